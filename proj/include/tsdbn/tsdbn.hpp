#pragma once

// Umbrella header for the whole library.

#include "averaging/averaging.hpp"
#include "data/csv.hpp"
#include "data/dataset.hpp"
#include "data/discretize.hpp"
#include "data/transform.hpp"
#include "dbn/dbn.hpp"
#include "dbn/discrete.hpp"
#include "dbn/inference.hpp"
#include "dbn/policy.hpp"
#include "error.hpp"
#include "graph/algorithms.hpp"
#include "graph/dag.hpp"
#include "graph/io.hpp"
#include "impute/impute.hpp"
#include "lars/lars.hpp"
#include "lars/learner.hpp"
#include "rng.hpp"
#include "search/ci_test.hpp"
#include "search/constraint.hpp"
#include "search/gauss_score.hpp"
#include "search/score_search.hpp"
#include "search/two_slice.hpp"
#include "shrink/js_learner.hpp"
#include "shrink/shrinkage.hpp"
#include "sim/synthetic.hpp"
#include "var/diagnostics.hpp"
#include "var/var.hpp"
