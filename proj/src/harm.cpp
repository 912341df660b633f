#include "harmcalc/harm.hpp"

#include <algorithm>
#include <cmath>

namespace harmcalc {

namespace {

// Noise states compatible with a context, with posterior weights and the
// default-policy world evaluated once per state. Context variables are not
// descendants of the action, so the same slice serves every intervention.
struct ContextSlice {
    std::vector<std::uint64_t> states;        // ascending
    std::vector<double> probs;                // P(e | x)
    std::vector<std::size_t> default_action;  // action value index in the default world
    std::vector<std::uint64_t> default_outcome;
    std::uint64_t context = 0;
};

ContextSlice make_slice(const DiscreteScm& scm, const Assignment& context) {
    const auto& ri = scm.role_index();
    ContextSlice slice;
    slice.context = scm.context_joint_index(context);

    const std::vector<int> no_clamp(scm.endogenous_count(), -1);
    std::vector<int> exo_values, endo_values;
    double mass = 0.0;
    for (std::uint64_t s = 0; s < scm.noise_state_count(); ++s) {
        scm.decode_noise(s, exo_values);
        scm.evaluate_indices(exo_values, no_clamp, endo_values);
        if (ri.context_index(endo_values) != slice.context) continue;
        const double p = scm.noise_probability(s);
        if (p <= 0.0) continue;
        slice.states.push_back(s);
        slice.probs.push_back(p);
        slice.default_action.push_back(static_cast<std::size_t>(endo_values[static_cast<std::size_t>(ri.action_var)]));
        slice.default_outcome.push_back(ri.outcome_index(endo_values));
        mass += p;
    }
    if (mass <= 0.0) throw ValidationError("context has zero probability");
    for (double& p : slice.probs) p /= mass;
    return slice;
}

// Outcome joint index under do(A=a) for every state of a slice.
std::vector<std::uint64_t> intervened_outcomes(const DiscreteScm& scm, const ContextSlice& slice,
                                               const std::string& action) {
    const auto clamp = scm.compile_intervention(Intervention::set(scm.roles().action, action));
    const auto& ri = scm.role_index();
    std::vector<std::uint64_t> out(slice.states.size());
    std::vector<int> exo_values, endo_values;
    for (std::size_t i = 0; i < slice.states.size(); ++i) {
        scm.decode_noise(slice.states[i], exo_values);
        scm.evaluate_indices(exo_values, clamp, endo_values);
        out[i] = ri.outcome_index(endo_values);
    }
    return out;
}

enum class Gap { CounterfactualOverFactual, FactualOverCounterfactual };

double pointwise(const DiscreteScm& scm, const UtilityTable& util, const std::string& action,
                 const Assignment& context, const Assignment& outcome, Gap gap) {
    const auto slice = make_slice(scm, context);
    const auto y_a = intervened_outcomes(scm, slice, action);
    const std::size_t a = static_cast<std::size_t>(scm.action_domain().index_of(action));
    const std::uint64_t y = scm.outcome_joint_index(outcome);
    const double u_factual = util.at(a, slice.context, y);

    double num = 0.0, mass = 0.0;
    for (std::size_t i = 0; i < slice.states.size(); ++i) {
        if (y_a[i] != y) continue;
        const double u_cf = util.at(slice.default_action[i], slice.context, slice.default_outcome[i]);
        const double gap_value = gap == Gap::CounterfactualOverFactual ? u_cf - u_factual : u_factual - u_cf;
        num += slice.probs[i] * std::max(0.0, gap_value);
        mass += slice.probs[i];
    }
    if (mass <= 0.0) throw ValidationError("factual event P(Y_a = y | x) has zero probability");
    return num / mass;
}

double expected_noise_route(const DiscreteScm& scm, const UtilityTable& util, const std::string& action,
                            const Assignment& context, Gap gap) {
    const auto slice = make_slice(scm, context);
    const auto y_a = intervened_outcomes(scm, slice, action);
    const std::size_t a = static_cast<std::size_t>(scm.action_domain().index_of(action));

    double total = 0.0;
    for (std::size_t i = 0; i < slice.states.size(); ++i) {
        const double u_factual = util.at(a, slice.context, y_a[i]);
        const double u_cf = util.at(slice.default_action[i], slice.context, slice.default_outcome[i]);
        const double gap_value = gap == Gap::CounterfactualOverFactual ? u_cf - u_factual : u_factual - u_cf;
        total += slice.probs[i] * std::max(0.0, gap_value);
    }
    return total;
}

double expected_outcome_route(const DiscreteScm& scm, const UtilityTable& util,
                              const std::string& action, const Assignment& context, Gap gap) {
    const auto slice = make_slice(scm, context);
    const auto y_a = intervened_outcomes(scm, slice, action);
    const std::size_t a = static_cast<std::size_t>(scm.action_domain().index_of(action));

    // P(y_a | x), then the per-outcome conditional gap, composed exactly as
    // the defining sum over outcomes.
    const auto& ri = scm.role_index();
    std::vector<double> p_y(ri.outcome_count, 0.0);
    std::vector<double> gap_y(ri.outcome_count, 0.0);
    for (std::size_t i = 0; i < slice.states.size(); ++i) {
        const double u_factual = util.at(a, slice.context, y_a[i]);
        const double u_cf = util.at(slice.default_action[i], slice.context, slice.default_outcome[i]);
        const double gap_value = gap == Gap::CounterfactualOverFactual ? u_cf - u_factual : u_factual - u_cf;
        p_y[y_a[i]] += slice.probs[i];
        gap_y[y_a[i]] += slice.probs[i] * std::max(0.0, gap_value);
    }
    double total = 0.0;
    for (std::uint64_t y = 0; y < ri.outcome_count; ++y) {
        if (p_y[y] <= 0.0) continue;
        total += p_y[y] * (gap_y[y] / p_y[y]);  // P(y_a|x) * h(a,x,y)
    }
    return total;
}

}  // namespace

double harm(const DiscreteScm& scm, const UtilityTable& util, const std::string& action,
            const Assignment& context, const Assignment& outcome) {
    return pointwise(scm, util, action, context, outcome, Gap::CounterfactualOverFactual);
}

double benefit(const DiscreteScm& scm, const UtilityTable& util, const std::string& action,
               const Assignment& context, const Assignment& outcome) {
    return pointwise(scm, util, action, context, outcome, Gap::FactualOverCounterfactual);
}

double expected_harm(const DiscreteScm& scm, const UtilityTable& util, const std::string& action,
                     const Assignment& context) {
    return expected_outcome_route(scm, util, action, context, Gap::CounterfactualOverFactual);
}

double expected_harm_noise_route(const DiscreteScm& scm, const UtilityTable& util,
                                 const std::string& action, const Assignment& context) {
    return expected_noise_route(scm, util, action, context, Gap::CounterfactualOverFactual);
}

double expected_benefit(const DiscreteScm& scm, const UtilityTable& util, const std::string& action,
                        const Assignment& context) {
    return expected_outcome_route(scm, util, action, context, Gap::FactualOverCounterfactual);
}

double expected_benefit_noise_route(const DiscreteScm& scm, const UtilityTable& util,
                                    const std::string& action, const Assignment& context) {
    return expected_noise_route(scm, util, action, context, Gap::FactualOverCounterfactual);
}

double expected_utility(const DiscreteScm& scm, const UtilityTable& util, const std::string& action,
                        const Assignment& context) {
    const auto slice = make_slice(scm, context);
    const auto y_a = intervened_outcomes(scm, slice, action);
    const std::size_t a = static_cast<std::size_t>(scm.action_domain().index_of(action));
    double total = 0.0;
    for (std::size_t i = 0; i < slice.states.size(); ++i)
        total += slice.probs[i] * util.at(a, slice.context, y_a[i]);
    return total;
}

double default_expected_utility(const DiscreteScm& scm, const UtilityTable& util,
                                const Assignment& context) {
    const auto slice = make_slice(scm, context);
    double total = 0.0;
    for (std::size_t i = 0; i < slice.states.size(); ++i)
        total += slice.probs[i] * util.at(slice.default_action[i], slice.context, slice.default_outcome[i]);
    return total;
}

double hpu_value(const DiscreteScm& scm, const UtilityTable& util, double lambda,
                 const std::string& action, const Assignment& context) {
    if (!std::isfinite(lambda)) throw ValidationError("harm aversion must be finite");
    return expected_utility(scm, util, action, context) -
           lambda * expected_harm(scm, util, action, context);
}

double HarmReport::decomposition_residual() const {
    double worst = 0.0;
    for (const auto& row : rows) {
        const double lhs = row.expected_utility - default_expected_utility;
        const double rhs = row.expected_benefit - row.expected_harm;
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

HarmReport harm_report(const DiscreteScm& scm, const UtilityTable& util, double lambda,
                       const Assignment& context) {
    if (!std::isfinite(lambda)) throw ValidationError("harm aversion must be finite");
    HarmReport report;
    report.lambda = lambda;
    report.default_expected_utility = default_expected_utility(scm, util, context);
    const auto& actions = scm.action_domain();
    for (std::size_t a = 0; a < actions.size(); ++a) {
        HarmReportRow row;
        row.action = actions.label(static_cast<int>(a));
        row.expected_utility = expected_utility(scm, util, row.action, context);
        row.expected_harm = expected_harm(scm, util, row.action, context);
        row.expected_benefit = expected_benefit(scm, util, row.action, context);
        row.hpu = row.expected_utility - lambda * row.expected_harm;
        report.rows.push_back(std::move(row));
    }
    return report;
}

OptimalAction hpu_optimal_action(const DiscreteScm& scm, const UtilityTable& util, double lambda,
                                 const Assignment& context) {
    auto report = harm_report(scm, util, lambda, context);
    std::size_t best = 0;
    for (std::size_t a = 1; a < report.rows.size(); ++a) {
        const auto& cand = report.rows[a];
        const auto& cur = report.rows[best];
        if (cand.hpu > cur.hpu + kValueTieTol) {
            best = a;
        } else if (cand.hpu >= cur.hpu - kValueTieTol && cand.expected_harm < cur.expected_harm) {
            best = a;  // tie: prefer strictly lower expected harm
        }
    }
    return OptimalAction{report.rows[best].action, std::move(report)};
}

NeedlessHarm needlessly_harmful(const DiscreteScm& scm, const UtilityTable& util,
                                const std::string& action, const Assignment& context) {
    const double eu = expected_utility(scm, util, action, context);
    const double eh = expected_harm(scm, util, action, context);
    const auto& actions = scm.action_domain();
    for (std::size_t a = 0; a < actions.size(); ++a) {
        const std::string& other = actions.label(static_cast<int>(a));
        if (other == action) continue;
        const double eu_other = expected_utility(scm, util, other, context);
        const double eh_other = expected_harm(scm, util, other, context);
        if (eu_other >= eu - kValueTieTol && eh_other < eh)
            return NeedlessHarm{true, other};
    }
    return NeedlessHarm{false, std::nullopt};
}

double expected_objective(const DiscreteScm& scm, const Objective& objective,
                          const std::string& action, const Assignment& context) {
    return expected_utility(scm, objective.table, action, context);
}

HarmfulObjective harmful_objective(const DiscreteScm& scm, const UtilityTable& util,
                                   const Objective& objective, const Assignment& context) {
    const auto& actions = scm.action_domain();
    std::vector<double> scores(actions.size());
    for (std::size_t a = 0; a < actions.size(); ++a)
        scores[a] = expected_objective(scm, objective, actions.label(static_cast<int>(a)), context);
    const double best = *std::max_element(scores.begin(), scores.end());

    HarmfulObjective result;
    for (std::size_t a = 0; a < actions.size(); ++a) {
        if (scores[a] < best - kValueTieTol) continue;
        const std::string& maximizer = actions.label(static_cast<int>(a));
        result.maximizers.push_back(maximizer);
        if (result.flagged) continue;
        auto nh = needlessly_harmful(scm, util, maximizer, context);
        if (nh.flagged) {
            result.flagged = true;
            result.witness = maximizer;
            result.better_action = nh.witness;
        }
    }
    return result;
}

UtilityTable hpu_table(const DiscreteScm& scm, const UtilityTable& util, double lambda) {
    const auto& ri = scm.role_index();
    std::vector<double> values(util.raw());
    for (std::uint64_t x = 0; x < ri.context_count; ++x) {
        const Assignment context = scm.context_assignment(x);
        // Zero-probability contexts cannot be sliced; leave V = U there.
        try {
            for (std::size_t a = 0; a < ri.action_count; ++a) {
                const std::string action = scm.action_domain().label(static_cast<int>(a));
                for (std::uint64_t y = 0; y < ri.outcome_count; ++y) {
                    double h = 0.0;
                    try {
                        h = harm(scm, util, action, context, scm.outcome_assignment(y));
                    } catch (const ValidationError&) {
                        h = 0.0;  // outcome unreachable under do(A=a)
                    }
                    values[(a * ri.context_count + x) * ri.outcome_count + y] -= lambda * h;
                }
            }
        } catch (const ValidationError&) {
            continue;
        }
    }
    return UtilityTable(scm, std::move(values));
}

}  // namespace harmcalc
