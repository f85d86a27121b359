#pragma once

// Umbrella header.

#include "netblock/adjacency.hpp"
#include "netblock/dependence_tests.hpp"
#include "netblock/errors.hpp"
#include "netblock/experiments.hpp"
#include "netblock/io.hpp"
#include "netblock/layout.hpp"
#include "netblock/linalg.hpp"
#include "netblock/matrix.hpp"
#include "netblock/network.hpp"
#include "netblock/nodewise.hpp"
#include "netblock/null_dist.hpp"
#include "netblock/result_document.hpp"
#include "netblock/rng.hpp"
#include "netblock/simgen.hpp"
