#include <doctest.h>

#include <cmath>

#include "harmcalc/het_anm.hpp"

using namespace harmcalc;

namespace {

HetAnm two_point_model(double delta_u, double sigma_diff) {
    return HetAnm([delta_u](double a) { return a > 0.5 ? delta_u : 0.0; },
                  {[sigma_diff](double a) { return a > 0.5 ? sigma_diff : 0.0; }}, 0.0);
}

}  // namespace

TEST_CASE("closed form reproduces the pinned values") {
    CHECK(closed_form_expected_harm({1.0, 1.0}) ==
          doctest::Approx(0.08331547058768629).epsilon(1e-13));
    CHECK(std::abs(closed_form_expected_harm({1.0, 1.0}) - 0.08332) < 5e-5);
    CHECK(closed_form_expected_harm({0.0, 1.0}) ==
          doctest::Approx(0.3989422804014327).epsilon(1e-13));  // 1/sqrt(2*pi)
    CHECK(closed_form_expected_harm({-20.0, 100.0}) ==
          doctest::Approx(50.689463586327655).epsilon(1e-12));
}

TEST_CASE("the degenerate branch is the continuity limit") {
    CHECK(closed_form_expected_harm({2.0, 0.0}) == 0.0);
    CHECK(closed_form_expected_harm({-2.0, 0.0}) == 2.0);
    CHECK(closed_form_expected_harm({0.0, 0.0}) == 0.0);
    // approach from s -> 0+
    CHECK(closed_form_expected_harm({-2.0, 1e-8}) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(closed_form_expected_harm({2.0, 1e-8}) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(closed_form_expected_harm({1.0, -0.5}), ValidationError);
}

TEST_CASE("erf and cdf forms agree with the erfc evaluation") {
    for (double du = -6.0; du <= 6.0; du += 0.173) {
        for (double s = 0.02; s <= 6.0; s += 0.31) {
            const double a = closed_form_expected_harm({du, s});
            CHECK(std::abs(a - expected_harm_erf_form({du, s})) <= 1e-12);
            CHECK(std::abs(a - expected_harm_cdf_form({du, s})) <= 1e-12);
        }
    }
}

TEST_CASE("closed form is monotone and nonnegative") {
    for (double du = -3.0; du <= 3.0; du += 0.2) {
        double prev = -1.0;
        for (double s = 0.0; s <= 4.0; s += 0.1) {
            const double h = closed_form_expected_harm({du, s});
            CHECK(h >= 0.0);
            CHECK(h >= prev - 1e-12);  // nondecreasing in s
            prev = h;
        }
    }
    for (double s = 0.2; s <= 4.0; s += 0.2) {
        double prev = std::numeric_limits<double>::infinity();
        for (double du = -3.0; du <= 3.0; du += 0.1) {
            const double h = closed_form_expected_harm({du, s});
            CHECK(h <= prev + 1e-12);  // nonincreasing in delta-U
            prev = h;
        }
    }
}

TEST_CASE("counterfactual difference std") {
    const auto single = two_point_model(0.0, 0.75);
    CHECK(counterfactual_diff_std(single, 1.0) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(counterfactual_diff_std(single, 0.0) == 0.0);  // identical model under both actions

    HetAnm two([](double) { return 0.0; },
               {[](double a) { return a > 0.5 ? 3.0 : 0.0; },
                [](double a) { return a > 0.5 ? 4.0 : 0.0; }},
               0.0);
    CHECK(counterfactual_diff_std(two, 1.0) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("Monte Carlo oracle is reproducible and matches the closed form") {
    const auto model = two_point_model(1.0, 1.0);
    const auto mc = mc_expected_harm(model, 1.0, 200000, 42);
    const auto again = mc_expected_harm(model, 1.0, 200000, 42);
    CHECK(mc.estimate == again.estimate);  // identical stream for a seed
    CHECK(mc.generator == std::string("mt19937_64+box-muller"));
    CHECK(std::abs(mc.estimate - 0.08331547058768629) <= 3.0 * mc.standard_error);

    // all coefficients equal across actions: the integrand vanishes identically
    HetAnm flat([](double a) { return a > 0.5 ? 2.0 : 0.0; }, {[](double) { return 1.3; }}, 0.0);
    const auto zero = mc_expected_harm(flat, 1.0, 1000, 7);
    CHECK(zero.estimate == 0.0);
    CHECK(zero.standard_error == 0.0);

    // two noises with coefficient differences (3, 4) behave like s = 5
    HetAnm two([](double) { return 0.0; },
               {[](double a) { return a > 0.5 ? 3.0 : 0.0; },
                [](double a) { return a > 0.5 ? 4.0 : 0.0; }},
               0.0);
    const auto five = mc_expected_harm(two, 1.0, 400000, 11);
    CHECK(std::abs(five.estimate - closed_form_expected_harm({0.0, 5.0})) <=
          3.0 * five.standard_error);

    CHECK_THROWS_AS(mc_expected_harm(model, 1.0, 0, 1), ValidationError);
}

TEST_CASE("benefit minus harm recovers the utility gap by Monte Carlo") {
    const auto model = two_point_model(0.8, 1.7);
    const auto h = mc_expected_harm(model, 1.0, 400000, 5);
    const auto b = mc_expected_benefit(model, 1.0, 400000, 5);
    CHECK(std::abs((b.estimate - h.estimate) - 0.8) <=
          3.0 * std::hypot(h.standard_error, b.standard_error));
}

TEST_CASE("rapid decline below a quarter of the utility gap") {
    for (double du = 0.5; du <= 6.0; du += 0.25) {
        for (double s = 0.02; s < du / 4.0; s += du / 50.0) {
            CHECK(closed_form_expected_harm({du, s}) < 0.002 * du);
        }
    }
}
