#pragma once

// Umbrella header: the whole library.

#include "counterexample.hpp"
#include "criterion.hpp"
#include "fd.hpp"
#include "grid.hpp"
#include "math_util.hpp"
#include "presets.hpp"
#include "problem.hpp"
#include "profile.hpp"
#include "proofsim.hpp"
#include "quadrature.hpp"
#include "report.hpp"
#include "runner.hpp"
#include "weakform.hpp"
