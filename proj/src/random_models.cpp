#include "harmcalc/random_models.hpp"

#include <algorithm>

namespace harmcalc {

namespace {

Domain random_domain(std::mt19937_64& rng, int max_size) {
    std::uniform_int_distribution<int> size_dist(2, max_size);
    const int n = size_dist(rng);
    std::vector<std::string> labels;
    for (int i = 0; i < n; ++i) labels.push_back(std::to_string(i));
    return Domain(std::move(labels));
}

std::vector<double> random_probs(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> unit(0.05, 1.0);  // bounded away from zero
    std::vector<double> probs(n);
    double sum = 0.0;
    for (double& p : probs) {
        p = unit(rng);
        sum += p;
    }
    for (double& p : probs) p /= sum;
    // exact renormalization of the last entry against float drift
    double partial = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) partial += probs[i];
    probs[n - 1] = 1.0 - partial;
    return probs;
}

}  // namespace

RandomModel random_discrete_model(std::mt19937_64& rng, const RandomModelOptions& options) {
    std::uniform_int_distribution<int> count_dist(options.min_endogenous, options.max_endogenous);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (;;) {  // retry until the action has a descendant
        const int n = count_dist(rng);
        std::vector<std::pair<std::string, Domain>> endo;
        std::vector<ExogenousSpec> exo;
        for (int i = 0; i < n; ++i) {
            endo.emplace_back("v" + std::to_string(i), random_domain(rng, options.max_domain));
            const Domain noise = random_domain(rng, options.max_domain);
            auto probs = random_probs(rng, noise.size());
            exo.push_back({"e" + std::to_string(i), noise, std::move(probs)});
        }

        // parents drawn from earlier variables; declaration order is causal order
        std::vector<std::vector<int>> parents(static_cast<std::size_t>(n));
        for (int i = 1; i < n; ++i) {
            std::vector<int> candidates(static_cast<std::size_t>(i));
            for (int j = 0; j < i; ++j) candidates[static_cast<std::size_t>(j)] = j;
            std::shuffle(candidates.begin(), candidates.end(), rng);
            const int k = std::min<int>(options.max_parents, static_cast<int>(candidates.size()));
            for (int j = 0; j < k; ++j)
                if (unit(rng) < 0.6) parents[static_cast<std::size_t>(i)].push_back(candidates[static_cast<std::size_t>(j)]);
            std::sort(parents[static_cast<std::size_t>(i)].begin(), parents[static_cast<std::size_t>(i)].end());
        }

        std::uniform_int_distribution<int> action_dist(0, n - 2);
        const int action = n >= 2 ? action_dist(rng) : 0;
        // guarantee at least one descendant
        auto& first_child = parents[static_cast<std::size_t>(action + 1)];
        if (std::find(first_child.begin(), first_child.end(), action) == first_child.end()) {
            if (static_cast<int>(first_child.size()) >= options.max_parents) first_child.pop_back();
            first_child.push_back(action);
            std::sort(first_child.begin(), first_child.end());
        }

        // descendants of the action
        std::vector<bool> descendant(static_cast<std::size_t>(n), false);
        for (int i = action + 1; i < n; ++i)
            for (int p : parents[static_cast<std::size_t>(i)])
                if (p == action || descendant[static_cast<std::size_t>(p)]) descendant[static_cast<std::size_t>(i)] = true;

        Roles roles;
        roles.action = endo[static_cast<std::size_t>(action)].first;
        for (int i = 0; i < n; ++i) {
            if (i == action) continue;
            if (descendant[static_cast<std::size_t>(i)])
                roles.outcomes.push_back(endo[static_cast<std::size_t>(i)].first);
            else
                roles.context.push_back(endo[static_cast<std::size_t>(i)].first);
        }
        if (roles.outcomes.empty()) continue;

        auto make_mechanism = [&](int var, bool with_noise) {
            Mechanism m;
            std::uint64_t rows = 1;
            for (int p : parents[static_cast<std::size_t>(var)]) {
                m.parents.push_back(endo[static_cast<std::size_t>(p)].first);
                rows *= endo[static_cast<std::size_t>(p)].second.size();
            }
            if (with_noise) {
                m.exo_parents.push_back(exo[static_cast<std::size_t>(var)].name);
                rows *= exo[static_cast<std::size_t>(var)].domain.size();
            }
            const int dom = static_cast<int>(endo[static_cast<std::size_t>(var)].second.size());
            std::uniform_int_distribution<int> value_dist(0, dom - 1);
            m.table.resize(rows);
            for (auto& v : m.table) v = value_dist(rng);
            return m;
        };

        std::map<std::string, Mechanism> mechanisms;
        for (int i = 0; i < n; ++i) {
            if (i == action) continue;
            mechanisms.emplace(endo[static_cast<std::size_t>(i)].first, make_mechanism(i, true));
        }
        // the action's parents all precede it, so they are declared context
        Mechanism policy = make_mechanism(action, !options.deterministic_policy);

        DiscreteScm scm(std::move(endo), std::move(exo), std::move(mechanisms), std::move(roles),
                        std::move(policy));
        auto utility = UtilityTable::from_function(
            scm, [&](const std::string&, const Assignment&, const Assignment&) { return unit(rng); });
        return RandomModel{std::move(scm), std::move(utility)};
    }
}

Objective random_objective(std::mt19937_64& rng, const DiscreteScm& scm) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    return Objective{UtilityTable::from_function(
        scm, [&](const std::string&, const Assignment&, const Assignment&) { return unit(rng); })};
}

}  // namespace harmcalc
