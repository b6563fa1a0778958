#pragma once

#include "bench.hpp"
#include "error.hpp"
#include "mle.hpp"
#include "multiroot.hpp"
#include "polynomial.hpp"
#include "pvalues.hpp"
#include "quadrature.hpp"
#include "quantiles.hpp"
#include "rate.hpp"
#include "solver.hpp"
#include "special_functions.hpp"
#include "types.hpp"
