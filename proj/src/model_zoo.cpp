#include "harmcalc/model_zoo.hpp"

#include <cmath>

#include "harmcalc/harm.hpp"

namespace harmcalc {

ZooModel treatment_model() {
    const Domain binary({"0", "1"});
    std::vector<std::pair<std::string, Domain>> endo = {{"T", Domain({"0", "1", "2"})}, {"Y", binary}};
    std::vector<ExogenousSpec> exo = {
        {"e1", binary, {0.5, 0.5}},  // robustness: recovers untreated iff e1 = 1
        {"e2", binary, {0.6, 0.4}},  // resistance to treatment 1 iff e2 = 1
        {"e3", binary, {0.8, 0.2}},  // allergy to treatment 2 iff e3 = 1
        {"eT", Domain({"0"}), {1.0}},
    };

    Mechanism y;
    y.parents = {"T"};
    y.exo_parents = {"e1", "e2", "e3"};
    y.table.resize(3 * 2 * 2 * 2);
    for (int t = 0; t < 3; ++t)
        for (int e1 = 0; e1 < 2; ++e1)
            for (int e2 = 0; e2 < 2; ++e2)
                for (int e3 = 0; e3 < 2; ++e3) {
                    int recovered = 0;
                    if (t == 0) recovered = e1;
                    if (t == 1) recovered = (e1 == 1 || e2 == 0) ? 1 : 0;
                    if (t == 2) recovered = (e3 == 0) ? 1 : 0;
                    y.table[static_cast<std::size_t>(((t * 2 + e1) * 2 + e2) * 2 + e3)] = recovered;
                }

    Mechanism policy;  // no treatment by default
    policy.exo_parents = {"eT"};
    policy.table = {0};

    DiscreteScm scm(std::move(endo), std::move(exo), {{"Y", std::move(y)}}, Roles{"T", {}, {"Y"}},
                    std::move(policy));
    auto util = UtilityTable::from_function(
        scm, [](const std::string&, const Assignment&, const Assignment& outcome) {
            return outcome.at("Y") == "1" ? 1.0 : 0.0;
        });
    return ZooModel{std::move(scm), std::move(util)};
}

ZooModel preemption_mdp() {
    const Domain binary({"0", "1"});
    std::vector<std::pair<std::string, Domain>> endo = {
        {"B0", binary}, {"A", binary}, {"F", binary}, {"B1", binary}, {"B2", binary}};
    std::vector<ExogenousSpec> exo = {{"eA", Domain({"0"}), {1.0}}};

    Mechanism b0;  // alive at the start
    b0.table = {1};
    Mechanism f;  // the fireball is fired with certainty
    f.table = {1};
    Mechanism b1;  // alive at t=1 iff alive before and not shot
    b1.parents = {"B0", "A"};
    b1.table = {0, 0, 1, 0};
    Mechanism b2;  // alive at t=2 iff alive at t=1 and no fireball
    b2.parents = {"B1", "F"};
    b2.table = {0, 0, 1, 0};

    Mechanism policy;  // don't shoot by default
    policy.exo_parents = {"eA"};
    policy.table = {0};

    DiscreteScm scm(std::move(endo), std::move(exo),
                    {{"B0", std::move(b0)}, {"F", std::move(f)}, {"B1", std::move(b1)}, {"B2", std::move(b2)}},
                    Roles{"A", {"B0", "F"}, {"B1", "B2"}}, std::move(policy));

    // cumulative utility: one point per step alive
    auto util = UtilityTable::from_function(
        scm, [](const std::string&, const Assignment& context, const Assignment& outcome) {
            const double b0 = context.at("B0") == "1" ? 1.0 : 0.0;
            const double b1 = outcome.at("B1") == "1" ? 1.0 : 0.0;
            const double b2 = outcome.at("B2") == "1" ? 1.0 : 0.0;
            return b0 + b1 + b2;
        });
    return ZooModel{std::move(scm), std::move(util)};
}

double preemption_harm() {
    const auto mdp = preemption_mdp();
    return expected_harm(mdp.scm, mdp.utility, "1", {{"B0", "1"}, {"F", "1"}});
}

namespace {

struct ActionStats {
    double mean = 0.0;
    double std_dev = 0.0;
};

ActionStats action_stats(int action, double k, const AssistantSpec& spec) {
    switch (action) {
        case 1: return {spec.baseline_mean * k, spec.baseline_std * k};
        case 2: return {spec.baseline_mean + spec.bonus, spec.baseline_std};
        case 3: return {spec.principal, 0.0};
        default: throw ValidationError("assistant actions are 1, 2 or 3");
    }
}

double assistant_harm(int action, double k, const AssistantSpec& spec) {
    const auto s = action_stats(action, k, spec);
    return closed_form_expected_harm(
        {s.mean - spec.baseline_mean, std::abs(s.std_dev - spec.baseline_std)});
}

}  // namespace

HetAnm assistant_het_anm(int action, double k, const AssistantSpec& spec) {
    const auto s = action_stats(action, k, spec);
    // action parameter of the het ANM: 1 = the chosen action, 0 = leave as is
    HetAnm model(
        [s, spec](double a) { return a > 0.5 ? s.mean : spec.baseline_mean; },
        {[s, spec](double a) { return a > 0.5 ? s.std_dev : spec.baseline_std; }},
        /*default_action=*/0.0);
    model.action_list = {{0.0, 1.0}};
    return model;
}

double assistant_action_value(AssistantAgent agent, double lambda, int action, double k,
                              const AssistantSpec& spec) {
    if (agent != AssistantAgent::ExpectedUtility && lambda < 0.0)
        throw ValidationError("lambda must be nonnegative");
    if (action == 1 && !(k >= 0.0 && k <= spec.k_max))
        throw ValidationError("multiplier K is outside [0, k_max]");
    const auto s = action_stats(action, k, spec);
    switch (agent) {
        case AssistantAgent::ExpectedUtility: return s.mean;
        case AssistantAgent::RiskAverse: return s.mean - lambda * s.std_dev * s.std_dev;
        case AssistantAgent::HarmAverse: return s.mean - lambda * assistant_harm(action, k, spec);
    }
    throw ValidationError("unknown agent");
}

AssistantDecision assistant_decision(AssistantAgent agent, double lambda, const AssistantSpec& spec) {
    if (agent != AssistantAgent::ExpectedUtility && lambda < 0.0)
        throw ValidationError("lambda must be nonnegative");

    // best K for action 1 per agent
    double k1 = spec.k_max;
    switch (agent) {
        case AssistantAgent::ExpectedUtility:
            k1 = spec.k_max;
            break;
        case AssistantAgent::RiskAverse: {
            // interior optimum of mean*K - lambda*std^2*K^2
            if (lambda > 0.0) {
                const double interior = spec.baseline_mean / (2.0 * spec.baseline_std * spec.baseline_std * lambda);
                k1 = std::min(spec.k_max, interior);
            }
            break;
        }
        case AssistantAgent::HarmAverse: {
            // piecewise linear in K on both sides of the default K = 1:
            // rising toward k_max iff mean outweighs the marginal harm
            const double harm_slope = spec.baseline_std * closed_form_expected_harm({
                                          spec.baseline_mean / spec.baseline_std, 1.0});
            k1 = spec.baseline_mean > lambda * harm_slope ? spec.k_max : 1.0;
            break;
        }
    }

    AssistantDecision best{1, k1, assistant_action_value(agent, lambda, 1, k1, spec)};
    for (int action = 2; action <= 3; ++action) {
        const double v = assistant_action_value(agent, lambda, action, 1.0, spec);
        if (v > best.value) best = {action, 1.0, v};
    }
    return best;
}

}  // namespace harmcalc
