#pragma once

#include "wvar/common.hpp"
#include "wvar/rng.hpp"
#include "wvar/quadrature.hpp"
#include "wvar/types.hpp"
#include "wvar/measure.hpp"
#include "wvar/parallel.hpp"
#include "wvar/geometry.hpp"
#include "wvar/discretization.hpp"
#include "wvar/approx_planar.hpp"
#include "wvar/approx_general.hpp"
#include "wvar/sampling.hpp"
#include "wvar/pipeline.hpp"
#include "wvar/training.hpp"
#include "wvar/io.hpp"
#include "wvar/experiments.hpp"
