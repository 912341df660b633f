#pragma once

#include <optional>
#include <vector>

#include "harmcalc/het_anm.hpp"

namespace harmcalc {

/// Hierarchical GAM dose-response parameters: linear + restricted-cubic-spline
/// mean with Gaussian random effects. Defaults are the published Aripiprazole
/// fit (PANSS reduction per mg/day).
struct GamParams {
    double theta1 = 0.937;
    double theta2 = -1.156;
    double v1 = 0.03;  // variance of the linear random effect
    double v2 = 0.10;  // variance of the spline random effect
    double knot1 = 0.0;
    double knot2 = 10.0;
    double knot3 = 30.0;
    double sample_noise_variance = 0.0;  // V0; cancels in harm, enters Var[Y_a]

    void validate() const;
};

/// Restricted cubic spline with three knots:
/// [(a-k1)^3+ - ((k3-k1)/(k3-k2))(a-k2)^3+ + ((k2-k1)/(k3-k2))(a-k3)^3+] / (k3-k1)^2.
double spline_f(double dose, const GamParams& params = {});

struct MeanSigma {
    double mean = 0.0;   // theta1*a + theta2*f(a)
    double sigma = 0.0;  // g(a) = sqrt(a^2 V1 + f(a)^2 V2); sample noise excluded
};

MeanSigma dose_mean_and_sigma(double dose, const GamParams& params = {});

/// Closed-form expected harm of a dose against the zero-dose default.
double expected_harm_dose(double dose, const GamParams& params = {});

struct DoseGridSpec {
    double min = 0.0;
    double max = 30.0;
    double step = 0.1;

    void validate() const;
    std::size_t size() const;
    double dose(std::size_t i) const { return min + static_cast<double>(i) * step; }
};

struct DoseRow {
    double dose = 0.0;
    double expected_utility = 0.0;
    double expected_harm = 0.0;
    std::vector<double> hpu;  // one per lambda
};

/// Dose sweep: expected utility, expected harm and HPU per lambda on a grid.
struct DoseGrid {
    DoseGridSpec spec;
    std::vector<double> lambdas;
    std::vector<DoseRow> rows;
};

DoseGrid dose_sweep(const GamParams& params, const DoseGridSpec& grid,
                    const std::vector<double>& lambdas);

/// Argmax over the grid of mean(a) - lambda * expected_harm(a); ties go to
/// the lower dose.
double optimal_dose(double lambda, const GamParams& params = {}, const DoseGridSpec& grid = {});

struct TradeoffRow {
    double dose = 0.0;
    double relative_harm = 0.0;     // E[h|a] / E[h|a_max]
    double relative_utility = 0.0;  // E[U|a] / E[U|a_max]
};

/// Normalized harm/utility pairs relative to the lambda = 0 optimum, for
/// doses at or below it.
std::vector<TradeoffRow> tradeoff_curve(const GamParams& params = {}, const DoseGridSpec& grid = {});

/// The dose-response model as a single-shared-noise het ANM (default dose 0).
HetAnm dose_het_anm(const GamParams& params = {});

/// The outcome-shifted model: an extra shared standard-normal noise with
/// dose-dependent coefficient (10 - 0.5 a).
HetAnm shifted_dose_het_anm(const GamParams& params = {});

/// Extra-noise coefficient of the shifted model.
double shifted_noise_coefficient(double dose);

struct ShiftedLambdaRow {
    double lambda = 0.0;
    double hpu_argmax_dose = 0.0;
    bool equals_mu_argmax = false;
};

struct ShiftedBetaRow {
    double beta = 0.0;
    double risk_argmax_dose = 0.0;
    bool exceeds_mu_argmax = false;
    bool needlessly_harmful = false;       // some dose has >= utility and < harm
    std::optional<double> witness_dose;
};

/// Analysis of the shifted model: per-lambda HPU argmax versus the mean
/// argmax, and per-beta risk-averse argmax of mean(a) - beta * Var[Y_a] with
/// Var[Y_a] = g(a)^2 + (10 - 0.5a)^2 + V0, with a grid-based needless-harm
/// check of the risk-averse dose.
struct ShiftedModelReport {
    double mu_argmax_dose = 0.0;
    std::vector<ShiftedLambdaRow> lambda_rows;
    std::vector<ShiftedBetaRow> beta_rows;
    bool hpu_matches_mu_for_all_lambdas = false;
    bool risk_dose_exceeds_and_harmful_for_all_betas = false;
};

ShiftedModelReport shifted_model_analysis(const GamParams& params, const std::vector<double>& betas,
                                          const std::vector<double>& lambdas,
                                          const DoseGridSpec& grid = {});

}  // namespace harmcalc
