#pragma once

#include <cstddef>
#include <string>
#include <unordered_set>
#include <vector>

#include "netblock/errors.hpp"

namespace netblock {

// Partition of a global column index set into p named regions.
struct RegionLayout {
  std::vector<std::string> names;
  std::vector<std::size_t> widths;

  std::size_t p() const { return names.size(); }

  std::size_t total_columns() const {
    std::size_t t = 0;
    for (const std::size_t w : widths) t += w;
    return t;
  }

  std::size_t offset(std::size_t region) const {
    std::size_t o = 0;
    for (std::size_t v = 0; v < region; ++v) o += widths[v];
    return o;
  }

  void validate() const {
    if (names.size() != widths.size())
      throw LayoutMismatch("layout: names and widths differ in length");
    if (names.empty()) throw EmptyInput("layout: no regions");
    std::unordered_set<std::string> seen;
    for (const auto& name : names)
      if (!seen.insert(name).second)
        throw LayoutMismatch("layout: duplicate region name '" + name + "'");
    for (const std::size_t w : widths)
      if (w == 0) throw LayoutMismatch("layout: zero-width region");
  }

  static RegionLayout uniform(std::size_t p, std::size_t width) {
    RegionLayout l;
    l.names.reserve(p);
    l.widths.assign(p, width);
    for (std::size_t v = 0; v < p; ++v) l.names.push_back("R" + std::to_string(v + 1));
    return l;
  }
};

}  // namespace netblock
