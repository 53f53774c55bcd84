#pragma once

#include "posetmc/bits.hpp"
#include "posetmc/error.hpp"
#include "posetmc/io.hpp"
#include "posetmc/linear_extensions.hpp"
#include "posetmc/mcmc.hpp"
#include "posetmc/observation.hpp"
#include "posetmc/partial_order.hpp"
#include "posetmc/partition.hpp"
#include "posetmc/prior.hpp"
#include "posetmc/simulate.hpp"
#include "posetmc/summaries.hpp"
