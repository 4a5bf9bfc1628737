#pragma once

#include "minsimplex/errors.hpp"
#include "minsimplex/experiment.hpp"
#include "minsimplex/exponents.hpp"
#include "minsimplex/finder.hpp"
#include "minsimplex/geometry.hpp"
#include "minsimplex/lifting.hpp"
#include "minsimplex/pointset.hpp"
#include "minsimplex/rng.hpp"
