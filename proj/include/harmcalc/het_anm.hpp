#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "harmcalc/errors.hpp"

namespace harmcalc {

/// Inputs to the closed-form expected harm: the expected-utility gap to the
/// default action and the standard deviation of the counterfactual utility
/// difference.
struct HarmInputs {
    double delta_u = 0.0;
    double sigma = 0.0;  // >= 0
};

/// Expected harm of a Gaussian outcome model with utility U = y:
///
///   s/sqrt(2*pi) * exp(-dU^2 / (2 s^2)) + (dU/2) * (erf(dU / (sqrt(2) s)) - 1)
///
/// evaluated through std::erfc to avoid cancellation at large dU/s (glibc's
/// erfc is a rational minimax approximation, error <= 1 ulp). The s = 0
/// branch is the continuity limit max{0, -dU}; the surface is non-analytic
/// and flat there.
double closed_form_expected_harm(const HarmInputs& inputs);

/// The same quantity written with erf exactly as above; verification route.
double expected_harm_erf_form(const HarmInputs& inputs);

/// The same quantity via the Gaussian cdf: s*phi(dU/s) - dU*(1 - Phi(dU/s));
/// verification route.
double expected_harm_cdf_form(const HarmInputs& inputs);

/// Heteroskedastic additive-noise model for a real-valued outcome:
///
///   Y_a = mean(a) + sum_k e_k * scale_k(a),   e_k iid N(0,1)
///
/// with every noise term shared across interventions, so counterfactual
/// differences couple through the e_k. Single-noise models recover the
/// textbook mean/scale form.
class HetAnm {
public:
    HetAnm(std::function<double(double)> mean, std::vector<std::function<double(double)>> scales,
           double default_action);

    double mean(double action) const { return mean_(action); }
    double scale(std::size_t noise_index, double action) const { return scales_[noise_index](action); }
    std::size_t noise_count() const { return scales_.size(); }
    double default_action() const { return default_action_; }

    /// Optional metadata: a finite action list or a real interval, and a
    /// context tag. Purely descriptive.
    std::optional<std::vector<double>> action_list;
    std::optional<std::pair<double, double>> action_interval;
    std::string context;

private:
    std::function<double(double)> mean_;
    std::vector<std::function<double(double)>> scales_;
    double default_action_;
};

/// Standard deviation of Y_a - Y_a0 under shared noise:
/// sqrt(sum_k (scale_k(a0) - scale_k(a))^2).
double counterfactual_diff_std(const HetAnm& model, double action);

/// Closed-form expected harm of an action against the model's default.
double expected_harm_het(const HetAnm& model, double action);

struct McEstimate {
    double estimate = 0.0;
    double standard_error = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::string generator;  // recorded for reproducibility
};

/// Monte Carlo oracle for the expected harm: seeded, reproducible average of
/// max{0, sum_k e_k (scale_k(a0) - scale_k(a)) - dU}. Samples are drawn in
/// fixed-size shards with per-shard derived seeds and combined in shard
/// order, so the result is identical for any worker count.
McEstimate mc_expected_harm(const HetAnm& model, double action, std::uint64_t n, std::uint64_t seed);

/// Mirrored integrand E[max{0, dU + sum_k e_k (scale_k(a) - scale_k(a0))}];
/// oracle for the benefit side of the decomposition.
McEstimate mc_expected_benefit(const HetAnm& model, double action, std::uint64_t n, std::uint64_t seed);

}  // namespace harmcalc
