#pragma once

#include "midconvex/errors.hpp"
#include "midconvex/group_core.hpp"
#include "midconvex/integer_sets.hpp"
#include "midconvex/midconvex_engine.hpp"
#include "midconvex/oracle_harness.hpp"
#include "midconvex/random.hpp"
#include "midconvex/rational.hpp"
#include "midconvex/rational_groups.hpp"
