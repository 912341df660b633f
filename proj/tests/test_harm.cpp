#include <doctest.h>

#include <cmath>
#include <random>

#include "harmcalc/harm.hpp"
#include "harmcalc/model_zoo.hpp"
#include "harmcalc/random_models.hpp"

using namespace harmcalc;

namespace {

std::vector<Assignment> live_contexts(const DiscreteScm& scm) {
    std::vector<Assignment> out;
    const auto dist = scm.interventional_distribution(Intervention::none());
    for (std::uint64_t x = 0; x < scm.role_index().context_count; ++x) {
        const auto ctx = scm.context_assignment(x);
        if (dist.probability(ctx) > 0.0) out.push_back(ctx);
    }
    return out;
}

}  // namespace

TEST_CASE("pointwise harm and benefit on the treatment model") {
    const auto model = treatment_model();
    // death after treatment 2: the counterfactual survival chance is 0.5
    CHECK(harm(model.scm, model.utility, "2", {}, {{"Y", "0"}}) ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK(harm(model.scm, model.utility, "1", {}, {{"Y", "1"}}) == 0.0);  // utility already maximal
    CHECK(harm(model.scm, model.utility, "0", {}, {{"Y", "0"}}) == 0.0);  // default action
    CHECK(harm(model.scm, model.utility, "0", {}, {{"Y", "1"}}) == 0.0);

    CHECK(benefit(model.scm, model.utility, "2", {}, {{"Y", "1"}}) ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK(benefit(model.scm, model.utility, "0", {}, {{"Y", "1"}}) == 0.0);
    CHECK(benefit(model.scm, model.utility, "1", {}, {{"Y", "0"}}) == 0.0);  // utility minimal

    // conditioning on an impossible factual outcome is an error: under
    // do(T=1) death requires e1=0,e2=1 which has probability 0.2 > 0, so use
    // a zero-probability event from a clamped model instead
    CHECK_THROWS_AS(harm(model.scm, model.utility, "0", {}, {{"Y", "2"}}), ValidationError);
}

TEST_CASE("zero-probability factual events are rejected") {
    const Domain binary({"0", "1"});
    Mechanism y;
    y.parents = {"A"};
    y.exo_parents = {"e"};
    y.table = {0, 1, 0, 1};  // Y := e regardless of A
    Mechanism policy;
    policy.table = {0};
    DiscreteScm scm({{"A", binary}, {"Y", binary}}, {{"e", binary, {0.0, 1.0}}}, {{"Y", y}},
                    Roles{"A", {}, {"Y"}}, policy);
    const auto util = UtilityTable::from_function(
        scm, [](const std::string&, const Assignment&, const Assignment& o) {
            return o.at("Y") == "1" ? 1.0 : 0.0;
        });
    CHECK_THROWS_AS(harm(scm, util, "1", {}, {{"Y", "0"}}), ValidationError);
}

TEST_CASE("expected harm and benefit follow the published treatment values") {
    const auto model = treatment_model();
    CHECK(expected_harm(model.scm, model.utility, "0", {}) == 0.0);
    CHECK(expected_harm(model.scm, model.utility, "1", {}) == 0.0);
    CHECK(expected_harm(model.scm, model.utility, "2", {}) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(expected_benefit(model.scm, model.utility, "0", {}) == 0.0);
    CHECK(expected_benefit(model.scm, model.utility, "1", {}) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(expected_benefit(model.scm, model.utility, "2", {}) == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("HPU values and the optimal action") {
    const auto model = treatment_model();
    for (const auto& action : {"0", "1", "2"})
        CHECK(hpu_value(model.scm, model.utility, 0.0, action, {}) ==
              doctest::Approx(expected_utility(model.scm, model.utility, action, {})).epsilon(1e-12));
    CHECK(hpu_value(model.scm, model.utility, 1.0, "2", {}) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(hpu_value(model.scm, model.utility, 1.0, "1", {}) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(hpu_value(model.scm, model.utility, -1.0, "2", {}) == doctest::Approx(0.9).epsilon(1e-12));

    CHECK(hpu_optimal_action(model.scm, model.utility, 1.0, {}).action == "1");
    // lambda = 0: both treatments reach 0.8; the lower-harm tie-break picks 1
    CHECK(hpu_optimal_action(model.scm, model.utility, 0.0, {}).action == "1");
    CHECK_THROWS_AS(hpu_optimal_action(model.scm, model.utility,
                                       std::numeric_limits<double>::infinity(), {}),
                    ValidationError);
}

TEST_CASE("a single-action domain returns that action") {
    const Domain only({"stay"});
    const Domain binary({"0", "1"});
    Mechanism y;
    y.parents = {"A"};
    y.exo_parents = {"e"};
    y.table = {0, 1};
    Mechanism policy;
    policy.table = {0};
    DiscreteScm scm({{"A", only}, {"Y", binary}}, {{"e", binary, {0.3, 0.7}}}, {{"Y", y}},
                    Roles{"A", {}, {"Y"}}, policy);
    const auto util = UtilityTable::from_function(
        scm, [](const std::string&, const Assignment&, const Assignment& o) {
            return o.at("Y") == "1" ? 1.0 : 0.0;
        });
    CHECK(hpu_optimal_action(scm, util, 3.0, {}).action == "stay");
}

TEST_CASE("needlessly harmful actions and harmful objectives") {
    const auto model = treatment_model();
    const auto flagged = needlessly_harmful(model.scm, model.utility, "2", {});
    CHECK(flagged.flagged);
    CHECK(flagged.witness == "1");
    CHECK_FALSE(needlessly_harmful(model.scm, model.utility, "1", {}).flagged);
    CHECK_FALSE(needlessly_harmful(model.scm, model.utility, "0", {}).flagged);

    // maximizing survival (the CATE objective) is harmful: treatment 2 is a maximizer
    const Objective cate_objective{model.utility};
    const auto harmful = harmful_objective(model.scm, model.utility, cate_objective, {});
    CHECK(harmful.flagged);
    CHECK(harmful.witness == "2");
    CHECK(harmful.maximizers.size() == 2);

    // the HPU itself, supplied as a pointwise table, is not harmful
    const Objective hpu_objective{hpu_table(model.scm, model.utility, 1.0)};
    CHECK(expected_objective(model.scm, hpu_objective, "2", {}) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK_FALSE(harmful_objective(model.scm, model.utility, hpu_objective, {}).flagged);

    // a constant objective makes every action a maximizer
    const Objective constant{UtilityTable::from_function(
        model.scm, [](const std::string&, const Assignment&, const Assignment&) { return 1.0; })};
    const auto all_max = harmful_objective(model.scm, model.utility, constant, {});
    CHECK(all_max.flagged);
    CHECK(all_max.maximizers.size() == 3);
}

TEST_CASE("decomposition identity holds on random models") {
    std::mt19937_64 rng(101);
    double worst = 0.0;
    for (int trial = 0; trial < 60; ++trial) {
        const auto model = random_discrete_model(rng);
        for (const auto& ctx : live_contexts(model.scm)) {
            const auto report = harm_report(model.scm, model.utility, 0.5, ctx);
            worst = std::max(worst, report.decomposition_residual());
            for (const auto& row : report.rows) {
                CHECK(row.expected_harm >= 0.0);
                CHECK(row.expected_benefit >= 0.0);
            }
        }
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("pointwise identity: benefit minus harm integrates to the utility gap") {
    std::mt19937_64 rng(103);
    for (int trial = 0; trial < 20; ++trial) {
        const auto model = random_discrete_model(rng);
        for (const auto& ctx : live_contexts(model.scm)) {
            for (std::size_t a = 0; a < model.scm.action_domain().size(); ++a) {
                const auto action = model.scm.action_domain().label(static_cast<int>(a));
                const auto dist = model.scm.interventional_distribution(
                    Intervention::set(model.scm.roles().action, action), ctx);
                double integrated = 0.0;
                for (std::uint64_t y = 0; y < model.scm.role_index().outcome_count; ++y) {
                    const auto outcome = model.scm.outcome_assignment(y);
                    const double p = dist.probability(outcome);
                    if (p <= 0.0) continue;
                    integrated += p * (benefit(model.scm, model.utility, action, ctx, outcome) -
                                       harm(model.scm, model.utility, action, ctx, outcome));
                }
                const double gap = expected_utility(model.scm, model.utility, action, ctx) -
                                   default_expected_utility(model.scm, model.utility, ctx);
                CHECK(std::abs(integrated - gap) <= 1e-10);
            }
        }
    }
}

TEST_CASE("outcome-marginal and noise-space harm routes agree") {
    std::mt19937_64 rng(107);
    for (int trial = 0; trial < 30; ++trial) {
        const auto model = random_discrete_model(rng);
        for (const auto& ctx : live_contexts(model.scm)) {
            for (std::size_t a = 0; a < model.scm.action_domain().size(); ++a) {
                const auto action = model.scm.action_domain().label(static_cast<int>(a));
                CHECK(std::abs(expected_harm(model.scm, model.utility, action, ctx) -
                               expected_harm_noise_route(model.scm, model.utility, action, ctx)) <= 1e-12);
            }
        }
    }
}

TEST_CASE("deterministic defaults cause exactly zero harm") {
    std::mt19937_64 rng(109);
    RandomModelOptions options;
    options.deterministic_policy = true;
    for (int trial = 0; trial < 30; ++trial) {
        const auto model = random_discrete_model(rng, options);
        for (const auto& ctx : live_contexts(model.scm)) {
            const auto dist = model.scm.interventional_distribution(Intervention::none(), ctx);
            for (std::size_t a = 0; a < model.scm.action_domain().size(); ++a) {
                const auto action = model.scm.action_domain().label(static_cast<int>(a));
                if (dist.probability({{model.scm.roles().action, action}}) <= 0.0) continue;
                CHECK(expected_harm(model.scm, model.utility, action, ctx) == 0.0);
            }
        }
    }
}

TEST_CASE("the HPU argmax is never needlessly harmful") {
    std::mt19937_64 rng(113);
    std::uniform_real_distribution<double> lambda_dist(1e-3, 10.0);
    for (int trial = 0; trial < 60; ++trial) {
        const auto model = random_discrete_model(rng);
        const double lambda = lambda_dist(rng);
        for (const auto& ctx : live_contexts(model.scm)) {
            const auto chosen = hpu_optimal_action(model.scm, model.utility, lambda, ctx);
            CHECK_FALSE(needlessly_harmful(model.scm, model.utility, chosen.action, ctx).flagged);
        }
    }
}
