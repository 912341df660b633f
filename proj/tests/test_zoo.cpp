#include <doctest.h>

#include <cmath>

#include "harmcalc/harm.hpp"
#include "harmcalc/model_zoo.hpp"

using namespace harmcalc;

namespace {

// bisect the smallest lambda in (lo, hi) where pred flips from false to true
double bisect_switch(double lo, double hi, const std::function<bool(double)>& pred) {
    REQUIRE_FALSE(pred(lo));
    REQUIRE(pred(hi));
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (pred(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("treatment model reproduces every published number") {
    const auto model = treatment_model();
    CHECK(expected_utility(model.scm, model.utility, "0", {}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(expected_utility(model.scm, model.utility, "1", {}) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(expected_utility(model.scm, model.utility, "2", {}) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(expected_harm(model.scm, model.utility, "1", {}) == 0.0);
    CHECK(expected_harm(model.scm, model.utility, "2", {}) == doctest::Approx(0.1).epsilon(1e-12));

    const auto report = harm_report(model.scm, model.utility, 1.0, {});
    CHECK(report.decomposition_residual() <= 1e-12);  // exact on all three actions
}

TEST_CASE("assistant: expected-utility maximizer takes the largest multiplier") {
    const auto d = assistant_decision(AssistantAgent::ExpectedUtility, 0.0);
    CHECK(d.action == 1);
    CHECK(d.multiplier == 20.0);
    CHECK(d.value == doctest::Approx(2000.0));
}

TEST_CASE("assistant: the risk-averse agent never performs the riskless trade") {
    for (int i = 1; i <= 10000; ++i) {
        const double lambda = static_cast<double>(i) / 10000.0;
        const auto d = assistant_decision(AssistantAgent::RiskAverse, lambda);
        REQUIRE(d.action != 2);
        if (lambda < 0.003125 - 1e-9) REQUIRE(d.action == 1);
        if (lambda > 0.003125 + 1e-9) REQUIRE(d.action == 3);
    }
    const double switch_at = bisect_switch(1e-4, 1.0, [](double lambda) {
        return assistant_decision(AssistantAgent::RiskAverse, lambda).action == 3;
    });
    CHECK(std::abs(switch_at - 0.003125) <= 1e-4);

    // the printed 0.0032 is where the action-1 and action-2 values cross
    const double value_cross = bisect_switch(1e-4, 0.0078, [](double lambda) {
        const double v1 = 1.0 / (4.0 * lambda);  // interior optimum value
        const double v2 = 110.0 - 1e4 * lambda;
        return v1 <= v2;
    });
    CHECK(std::abs(value_cross - 0.0032) <= 2.5e-4);

    // interior optimum satisfies the first-order condition
    for (double lambda : {0.001, 0.005, 0.05, 0.5}) {
        const double k = 1.0 / (200.0 * lambda);
        if (k > 20.0) continue;
        const double eps = 1e-6;
        const double grad = (assistant_action_value(AssistantAgent::RiskAverse, lambda, 1, k + eps) -
                             assistant_action_value(AssistantAgent::RiskAverse, lambda, 1, k - eps)) /
                            (2.0 * eps);
        CHECK(std::abs(grad) < 1e-2);  // central difference, rounding-limited
        CHECK(std::abs(100.0 - 2e4 * lambda * k) < 1e-8);  // the analytic FOC itself
    }
}

TEST_CASE("assistant: harm-averse thresholds match the derivation") {
    CHECK(assistant_decision(AssistantAgent::HarmAverse, 5.0).action == 1);
    CHECK(assistant_decision(AssistantAgent::HarmAverse, 5.0).multiplier == 20.0);
    CHECK(assistant_decision(AssistantAgent::HarmAverse, 20.0).action == 2);

    const double switch_at = bisect_switch(1.0, 20.0, [](double lambda) {
        return assistant_decision(AssistantAgent::HarmAverse, lambda).action == 2;
    });
    CHECK(std::abs(switch_at - 11.93) <= 0.05);

    // interior-K slope changes sign at 100 / (100 * cf(1,1))
    const double slope_flip = 100.0 / (100.0 * closed_form_expected_harm({1.0, 1.0}));
    CHECK(std::abs(slope_flip - 12.002) <= 1e-3);

    // never cancels; never drops the expected return below the default 100
    for (int i = 0; i <= 4000; ++i) {
        const double lambda = 30.0 * i / 4000.0;
        const auto d = assistant_decision(AssistantAgent::HarmAverse, lambda);
        REQUIRE(d.action != 3);
        const double mean_return = d.action == 1 ? 100.0 * d.multiplier : 110.0;
        REQUIRE(mean_return >= 100.0);
    }
    CHECK_THROWS_AS(assistant_decision(AssistantAgent::HarmAverse, -0.5), ValidationError);
}

TEST_CASE("assistant: analytic optima agree with a 1e-3 grid sweep") {
    for (const auto agent : {AssistantAgent::RiskAverse, AssistantAgent::HarmAverse}) {
        for (double lambda : {0.001, 0.0035, 2.0, 12.5}) {
            const auto d = assistant_decision(agent, lambda);
            double best = -1e30;
            int best_action = 0;
            double best_k = 1.0;
            for (int action = 1; action <= 3; ++action) {
                if (action == 1) {
                    for (int i = 0; i <= 20000; ++i) {
                        const double k = i / 1000.0;
                        const double v = assistant_action_value(agent, lambda, 1, k);
                        if (v > best) best = v, best_action = 1, best_k = k;
                    }
                } else {
                    const double v = assistant_action_value(agent, lambda, action, 1.0);
                    if (v > best) best = v, best_action = action, best_k = 1.0;
                }
            }
            CHECK(d.action == best_action);
            if (d.action == 1) CHECK(std::abs(d.multiplier - best_k) <= 1e-3 + 1e-9);
            CHECK(d.value >= best - 1e-6);
        }
    }
}

TEST_CASE("preemption MDP: harm counts only the causally reachable loss") {
    const auto mdp = preemption_mdp();
    const Assignment ctx{{"B0", "1"}, {"F", "1"}};
    CHECK(default_expected_utility(mdp.scm, mdp.utility, ctx) == 2.0);
    CHECK(expected_utility(mdp.scm, mdp.utility, "1", ctx) == 1.0);
    CHECK(preemption_harm() == 1.0);
    CHECK(expected_harm(mdp.scm, mdp.utility, "0", ctx) == 0.0);
}
