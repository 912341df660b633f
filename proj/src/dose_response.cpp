#include "harmcalc/dose_response.hpp"

#include <cmath>

#include "harmcalc/harm.hpp"  // kValueTieTol

namespace harmcalc {

void GamParams::validate() const {
    if (!(v1 >= 0.0) || !(v2 >= 0.0)) throw ValidationError("random-effect variances must be nonnegative");
    if (!(knot1 < knot2 && knot2 < knot3)) throw ValidationError("knots must be strictly increasing");
    if (!(sample_noise_variance >= 0.0)) throw ValidationError("sample noise variance must be nonnegative");
}

void DoseGridSpec::validate() const {
    if (!(step > 0.0)) throw ValidationError("grid step must be positive");
    if (!(min >= 0.0)) throw ValidationError("doses must be nonnegative");
    if (!(max >= min)) throw ValidationError("grid max must be >= min");
}

std::size_t DoseGridSpec::size() const {
    validate();
    return static_cast<std::size_t>(std::floor((max - min) / step + 0.5)) + 1;
}

double spline_f(double dose, const GamParams& p) {
    p.validate();
    const auto hinge3 = [](double u) { return u > 0.0 ? u * u * u : 0.0; };
    const double denom = (p.knot3 - p.knot1) * (p.knot3 - p.knot1);
    return (hinge3(dose - p.knot1) - (p.knot3 - p.knot1) / (p.knot3 - p.knot2) * hinge3(dose - p.knot2) +
            (p.knot2 - p.knot1) / (p.knot3 - p.knot2) * hinge3(dose - p.knot3)) /
           denom;
}

MeanSigma dose_mean_and_sigma(double dose, const GamParams& p) {
    const double f = spline_f(dose, p);
    MeanSigma out;
    out.mean = p.theta1 * dose + p.theta2 * f;
    out.sigma = std::sqrt(dose * dose * p.v1 + f * f * p.v2);
    return out;
}

double expected_harm_dose(double dose, const GamParams& p) {
    const auto ms = dose_mean_and_sigma(dose, p);
    const auto base = dose_mean_and_sigma(0.0, p);
    return closed_form_expected_harm({ms.mean - base.mean, std::abs(ms.sigma - base.sigma)});
}

DoseGrid dose_sweep(const GamParams& params, const DoseGridSpec& grid,
                    const std::vector<double>& lambdas) {
    params.validate();
    grid.validate();
    DoseGrid out;
    out.spec = grid;
    out.lambdas = lambdas;
    out.rows.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        DoseRow row;
        row.dose = grid.dose(i);
        row.expected_utility = dose_mean_and_sigma(row.dose, params).mean;
        row.expected_harm = expected_harm_dose(row.dose, params);
        row.hpu.reserve(lambdas.size());
        for (const double lambda : lambdas)
            row.hpu.push_back(row.expected_utility - lambda * row.expected_harm);
        out.rows.push_back(std::move(row));
    }
    return out;
}

double optimal_dose(double lambda, const GamParams& params, const DoseGridSpec& grid) {
    const auto sweep = dose_sweep(params, grid, {lambda});
    std::size_t best = 0;
    for (std::size_t i = 1; i < sweep.rows.size(); ++i)
        if (sweep.rows[i].hpu[0] > sweep.rows[best].hpu[0]) best = i;  // ties keep the lower dose
    return sweep.rows[best].dose;
}

std::vector<TradeoffRow> tradeoff_curve(const GamParams& params, const DoseGridSpec& grid) {
    const auto sweep = dose_sweep(params, grid, {0.0});
    std::size_t amax = 0;
    for (std::size_t i = 1; i < sweep.rows.size(); ++i)
        if (sweep.rows[i].expected_utility > sweep.rows[amax].expected_utility) amax = i;
    const double h_ref = sweep.rows[amax].expected_harm;
    const double u_ref = sweep.rows[amax].expected_utility;
    if (!(h_ref > 0.0) || !(u_ref > 0.0))
        throw ValidationError("trade-off normalization requires positive harm and utility at the optimum");

    std::vector<TradeoffRow> rows;
    rows.reserve(amax + 1);
    for (std::size_t i = 0; i <= amax; ++i)
        rows.push_back({sweep.rows[i].dose, sweep.rows[i].expected_harm / h_ref,
                        sweep.rows[i].expected_utility / u_ref});
    return rows;
}

HetAnm dose_het_anm(const GamParams& params) {
    params.validate();
    HetAnm model([params](double a) { return dose_mean_and_sigma(a, params).mean; },
                 {[params](double a) { return dose_mean_and_sigma(a, params).sigma; }},
                 /*default_action=*/0.0);
    model.action_interval = {0.0, params.knot3};
    return model;
}

double shifted_noise_coefficient(double dose) { return 10.0 - 0.5 * dose; }

HetAnm shifted_dose_het_anm(const GamParams& params) {
    params.validate();
    HetAnm model([params](double a) { return dose_mean_and_sigma(a, params).mean; },
                 {[params](double a) { return dose_mean_and_sigma(a, params).sigma; },
                  [](double a) { return shifted_noise_coefficient(a); }},
                 /*default_action=*/0.0);
    model.action_interval = {0.0, params.knot3};
    return model;
}

ShiftedModelReport shifted_model_analysis(const GamParams& params, const std::vector<double>& betas,
                                          const std::vector<double>& lambdas,
                                          const DoseGridSpec& grid) {
    params.validate();
    grid.validate();
    const auto shifted = shifted_dose_het_anm(params);
    const std::size_t n = grid.size();

    std::vector<double> mu(n), harm(n), var(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = grid.dose(i);
        const auto ms = dose_mean_and_sigma(a, params);
        const double eta = shifted_noise_coefficient(a);
        mu[i] = ms.mean;
        harm[i] = expected_harm_het(shifted, a);
        var[i] = ms.sigma * ms.sigma + eta * eta + params.sample_noise_variance;
    }

    auto argmax = [&](auto&& score) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (score(i) > score(best)) best = i;
        return best;
    };
    const std::size_t i_mu = argmax([&](std::size_t i) { return mu[i]; });

    ShiftedModelReport report;
    report.mu_argmax_dose = grid.dose(i_mu);
    report.hpu_matches_mu_for_all_lambdas = true;
    for (const double lambda : lambdas) {
        const std::size_t i = argmax([&](std::size_t j) { return mu[j] - lambda * harm[j]; });
        ShiftedLambdaRow row{lambda, grid.dose(i), i == i_mu};
        report.hpu_matches_mu_for_all_lambdas &= row.equals_mu_argmax;
        report.lambda_rows.push_back(row);
    }

    report.risk_dose_exceeds_and_harmful_for_all_betas = true;
    for (const double beta : betas) {
        const std::size_t i = argmax([&](std::size_t j) { return mu[j] - beta * var[j]; });
        ShiftedBetaRow row;
        row.beta = beta;
        row.risk_argmax_dose = grid.dose(i);
        row.exceeds_mu_argmax = i > i_mu;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            if (mu[j] >= mu[i] - kValueTieTol && harm[j] < harm[i]) {
                row.needlessly_harmful = true;
                row.witness_dose = grid.dose(j);
                break;
            }
        }
        report.risk_dose_exceeds_and_harmful_for_all_betas &=
            row.exceeds_mu_argmax && row.needlessly_harmful;
        report.beta_rows.push_back(row);
    }
    return report;
}

}  // namespace harmcalc
