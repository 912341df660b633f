#pragma once

#include <optional>
#include <string>
#include <vector>

#include "harmcalc/scm.hpp"
#include "harmcalc/utility.hpp"

namespace harmcalc {

/// Slack used when comparing enumerated expectations for equality (argmax
/// sets, utility ties). Enumeration is exact up to float rounding.
inline constexpr double kValueTieTol = 1e-12;

/// Counterfactual harm of do(A=a) given context x and observed outcome y,
/// against the model's default policy: the expected positive utility gap to
/// the counterfactual default world. Nonnegative.
double harm(const DiscreteScm& scm, const UtilityTable& util, const std::string& action,
            const Assignment& context, const Assignment& outcome);

/// Mirror image of `harm`: expected positive utility gain over the
/// counterfactual default world.
double benefit(const DiscreteScm& scm, const UtilityTable& util, const std::string& action,
               const Assignment& context, const Assignment& outcome);

/// E[h | a, x]: outcome-marginal route, sum over y of P(y_a|x) * harm(a,x,y).
double expected_harm(const DiscreteScm& scm, const UtilityTable& util, const std::string& action,
                     const Assignment& context);

/// E[h | a, x] summed directly over the exogenous joint. Agrees with
/// `expected_harm` within 1e-12; kept as a separate route for verification.
double expected_harm_noise_route(const DiscreteScm& scm, const UtilityTable& util,
                                 const std::string& action, const Assignment& context);

double expected_benefit(const DiscreteScm& scm, const UtilityTable& util, const std::string& action,
                        const Assignment& context);

double expected_benefit_noise_route(const DiscreteScm& scm, const UtilityTable& util,
                                    const std::string& action, const Assignment& context);

/// E[U_a | x]: expected utility of intervening do(A=a) in context x.
double expected_utility(const DiscreteScm& scm, const UtilityTable& util, const std::string& action,
                        const Assignment& context);

/// E[U | x]: expected utility under the default policy (full joint over
/// actions and outcomes).
double default_expected_utility(const DiscreteScm& scm, const UtilityTable& util,
                                const Assignment& context);

/// Harm-penalized utility E[U_a|x] - lambda * E[h|a,x].
double hpu_value(const DiscreteScm& scm, const UtilityTable& util, double lambda,
                 const std::string& action, const Assignment& context);

struct HarmReportRow {
    std::string action;
    double expected_utility = 0.0;
    double expected_harm = 0.0;
    double expected_benefit = 0.0;
    double hpu = 0.0;
};

/// Per-action harm/benefit/utility/HPU summary for one context.
struct HarmReport {
    double lambda = 0.0;
    double default_expected_utility = 0.0;
    std::vector<HarmReportRow> rows;  // action-domain order

    /// Largest | (E[U_a|x] - E[U|x]) - (E[b|a,x] - E[h|a,x]) | over actions.
    double decomposition_residual() const;
};

HarmReport harm_report(const DiscreteScm& scm, const UtilityTable& util, double lambda,
                       const Assignment& context);

struct OptimalAction {
    std::string action;
    HarmReport report;
};

/// Argmax of the expected HPU over the action domain. Ties (within 1e-12)
/// prefer strictly lower expected harm, then lower domain index.
OptimalAction hpu_optimal_action(const DiscreteScm& scm, const UtilityTable& util, double lambda,
                                 const Assignment& context);

struct NeedlessHarm {
    bool flagged = false;
    std::optional<std::string> witness;  // an action with no less utility and strictly less harm
};

/// True iff another action has expected utility >= this one's (within 1e-12)
/// and strictly lower expected harm.
NeedlessHarm needlessly_harmful(const DiscreteScm& scm, const UtilityTable& util,
                                const std::string& action, const Assignment& context);

struct HarmfulObjective {
    bool flagged = false;
    std::optional<std::string> witness;        // a needlessly harmful maximizer of E[J|a,x]
    std::optional<std::string> better_action;  // its lower-harm alternative
    std::vector<std::string> maximizers;       // argmax set of E[J|a,x] (1e-12 slack)
};

/// True iff some maximizer of E[J|a,x] is needlessly harmful; a maximizing
/// policy may put mass on it.
HarmfulObjective harmful_objective(const DiscreteScm& scm, const UtilityTable& util,
                                   const Objective& objective, const Assignment& context);

/// Expectation of an objective under do(A=a): E[J | a, x].
double expected_objective(const DiscreteScm& scm, const Objective& objective,
                          const std::string& action, const Assignment& context);

/// Pointwise harm-penalized utility as a table: V(a,x,y) = U(a,x,y) -
/// lambda * h(a,x,y). Outcomes with zero probability under do(A=a) keep
/// V = U (their harm term never materializes but the table must stay total).
UtilityTable hpu_table(const DiscreteScm& scm, const UtilityTable& util, double lambda);

}  // namespace harmcalc
