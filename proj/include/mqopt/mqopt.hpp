#pragma once

#include "mqopt/bitset.hpp"
#include "mqopt/bounds.hpp"
#include "mqopt/common.hpp"
#include "mqopt/cost_model.hpp"
#include "mqopt/costing.hpp"
#include "mqopt/decomposition.hpp"
#include "mqopt/ground_set.hpp"
#include "mqopt/instances.hpp"
#include "mqopt/json_io.hpp"
#include "mqopt/qdag.hpp"
#include "mqopt/set_function.hpp"
#include "mqopt/solvers.hpp"
#include "mqopt/workload.hpp"
