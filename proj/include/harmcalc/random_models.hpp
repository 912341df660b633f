#pragma once

#include <random>

#include "harmcalc/scm.hpp"
#include "harmcalc/utility.hpp"

namespace harmcalc {

struct RandomModelOptions {
    int min_endogenous = 2;
    int max_endogenous = 4;
    int max_domain = 3;      // per-variable domain size in [2, max_domain]
    int max_parents = 2;     // endogenous parents per mechanism
    bool deterministic_policy = false;
};

struct RandomModel {
    DiscreteScm scm;
    UtilityTable utility;
};

/// A random discrete SCM with tabular mechanisms, one exogenous variable per
/// endogenous variable, a randomly placed action with at least one
/// descendant, context = all non-descendants, outcomes = all descendants,
/// and uniform [0, 1] utilities.
RandomModel random_discrete_model(std::mt19937_64& rng, const RandomModelOptions& options = {});

/// A random objective table for an existing model (uniform [0, 1] values).
Objective random_objective(std::mt19937_64& rng, const DiscreteScm& scm);

}  // namespace harmcalc
