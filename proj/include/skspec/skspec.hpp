#pragma once

#include "certificates.hpp"
#include "config.hpp"
#include "csv.hpp"
#include "cutoff.hpp"
#include "dynamics.hpp"
#include "experiments.hpp"
#include "field.hpp"
#include "hermite.hpp"
#include "kernels.hpp"
#include "lattice.hpp"
#include "metrics.hpp"
#include "noise.hpp"
#include "ops.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "series.hpp"
#include "symbols.hpp"
#include "transform.hpp"
#include "wick.hpp"
