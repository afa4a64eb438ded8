#pragma once

#include "sqwell/error.hpp"
#include "sqwell/fitting.hpp"
#include "sqwell/fractal.hpp"
#include "sqwell/parallel.hpp"
#include "sqwell/propagator.hpp"
#include "sqwell/quadrature.hpp"
#include "sqwell/spectral.hpp"
#include "sqwell/survival.hpp"
#include "sqwell/universal.hpp"
#include "sqwell/well.hpp"
