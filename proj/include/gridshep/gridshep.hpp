#pragma once

#include "gridshep/accuracy.hpp"
#include "gridshep/convergence.hpp"
#include "gridshep/errors.hpp"
#include "gridshep/grid.hpp"
#include "gridshep/parallel.hpp"
#include "gridshep/raster_io.hpp"
#include "gridshep/shepard.hpp"
#include "gridshep/tensor_poly.hpp"
