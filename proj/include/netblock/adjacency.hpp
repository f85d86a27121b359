#pragma once

#include <cstddef>
#include <vector>

#include "netblock/errors.hpp"

namespace netblock {

// Symmetric boolean adjacency over regions with a false diagonal.
class Adjacency {
 public:
  Adjacency() = default;
  explicit Adjacency(std::size_t p) : p_(p), m_(p * p, 0) {}

  std::size_t p() const { return p_; }

  bool operator()(std::size_t s, std::size_t t) const { return m_[s * p_ + t] != 0; }

  void set(std::size_t s, std::size_t t, bool value) {
    if (s == t) throw DomainError("adjacency: diagonal must stay false");
    m_[s * p_ + t] = value ? 1 : 0;
    m_[t * p_ + s] = value ? 1 : 0;
  }

  std::size_t edge_count() const {
    std::size_t c = 0;
    for (std::size_t s = 0; s < p_; ++s)
      for (std::size_t t = s + 1; t < p_; ++t)
        if ((*this)(s, t)) ++c;
    return c;
  }

  friend bool operator==(const Adjacency& a, const Adjacency& b) {
    return a.p_ == b.p_ && a.m_ == b.m_;
  }

 private:
  std::size_t p_ = 0;
  std::vector<char> m_;
};

}  // namespace netblock
