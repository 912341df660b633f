#pragma once

#include <optional>
#include <string>

#include "harmcalc/het_anm.hpp"
#include "harmcalc/scm.hpp"
#include "harmcalc/utility.hpp"

namespace harmcalc {

struct ZooModel {
    DiscreteScm scm;
    UtilityTable utility;
};

/// Three-treatment model: untreated patients recover iff robust (p=0.5),
/// treatment 1 cures unless resistant (p=0.4), treatment 2 cures unless
/// allergic (p=0.2). Default is no treatment; U(a, y) = y.
ZooModel treatment_model();

/// Three-step shooting/fireball MDP as a discrete SCM. Outcome is the pair
/// of later survival indicators; utility is the cumulative per-step one.
ZooModel preemption_mdp();

/// Expected harm of intervening to shoot, against the don't-shoot default.
double preemption_harm();

/// Investment assistant: baseline return N(mean, std^2) on an invested
/// principal; actions multiply the return by K in [0, k_max], add a riskless
/// bonus, or cancel and return the principal. Default: leave the investment
/// (K = 1).
struct AssistantSpec {
    double baseline_mean = 100.0;
    double baseline_std = 100.0;
    double principal = 80.0;
    double bonus = 10.0;
    double k_max = 20.0;
};

enum class AssistantAgent {
    ExpectedUtility,  // argmax E[Y_a]
    RiskAverse,       // argmax E[Y_a] - lambda Var(Y_a)
    HarmAverse,       // argmax E[Y_a] - lambda E[h|a]
};

struct AssistantDecision {
    int action = 0;          // 1 = multiply, 2 = bonus trade, 3 = cancel
    double multiplier = 1.0; // K when action == 1
    double value = 0.0;      // the agent's objective at the chosen action
};

/// The agent's objective value for one action (K applies to action 1 only).
double assistant_action_value(AssistantAgent agent, double lambda, int action, double k,
                              const AssistantSpec& spec = {});

/// Analytic optimal decision of an agent; lambda must be >= 0 for the
/// parameterized agents. Ties prefer the lower action number.
AssistantDecision assistant_decision(AssistantAgent agent, double lambda,
                                     const AssistantSpec& spec = {});

/// The outcome model of one assistant action as a het ANM against the
/// leave-it default (single shared noise).
HetAnm assistant_het_anm(int action, double k, const AssistantSpec& spec = {});

}  // namespace harmcalc
