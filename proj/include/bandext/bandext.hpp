// Umbrella header.
#pragma once

#include "bandext/grid.hpp"
#include "bandext/parallel.hpp"
#include "bandext/stencils.hpp"
#include "bandext/geometry.hpp"
#include "bandext/extrapolation.hpp"
#include "bandext/metrics.hpp"
#include "bandext/moving_domain.hpp"
#include "bandext/io.hpp"
#include "bandext/harness.hpp"
