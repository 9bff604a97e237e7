#pragma once

// Conditionally-additive-noise causal direction inference: structural model
// simulation, regression-free conditional-variance and regression-residual
// independence tests, and the pairwise noncausality criterion built on them.

#include "canid/cli.hpp"
#include "canid/csv.hpp"
#include "canid/decompose.hpp"
#include "canid/estimators.hpp"
#include "canid/expr.hpp"
#include "canid/graph.hpp"
#include "canid/indep_tests.hpp"
#include "canid/inference.hpp"
#include "canid/model_spec.hpp"
#include "canid/oracle.hpp"
#include "canid/presets.hpp"
#include "canid/report.hpp"
#include "canid/rng.hpp"
#include "canid/scm.hpp"
