#pragma once

#include "solwave/diagnostics.hpp"
#include "solwave/driver.hpp"
#include "solwave/grid.hpp"
#include "solwave/modulation.hpp"
#include "solwave/numerics.hpp"
#include "solwave/physical.hpp"
#include "solwave/projections.hpp"
#include "solwave/selfsim.hpp"
#include "solwave/solitons.hpp"
#include "solwave/trace.hpp"
