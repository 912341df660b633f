#include "harmcalc/het_anm.hpp"

#include <cmath>

#include "harmcalc/gaussian.hpp"
#include "harmcalc/parallel.hpp"

namespace harmcalc {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;
constexpr double kSqrt2 = 1.4142135623730950488;

void check_inputs(const HarmInputs& in) {
    if (!std::isfinite(in.delta_u) || !std::isfinite(in.sigma))
        throw ValidationError("harm inputs must be finite");
    if (in.sigma < 0.0) throw ValidationError("sigma must be nonnegative");
}

}  // namespace

double closed_form_expected_harm(const HarmInputs& in) {
    check_inputs(in);
    if (in.sigma == 0.0) return std::max(0.0, -in.delta_u);
    const double r = in.delta_u / in.sigma;
    const double value =
        in.sigma * kInvSqrt2Pi * std::exp(-0.5 * r * r) - 0.5 * in.delta_u * std::erfc(r / kSqrt2);
    return std::max(0.0, value);  // tiny negative rounding in the deep tail
}

double expected_harm_erf_form(const HarmInputs& in) {
    check_inputs(in);
    if (in.sigma == 0.0) return std::max(0.0, -in.delta_u);
    const double r = in.delta_u / in.sigma;
    return in.sigma * kInvSqrt2Pi * std::exp(-0.5 * r * r) +
           0.5 * in.delta_u * (std::erf(r / kSqrt2) - 1.0);
}

double expected_harm_cdf_form(const HarmInputs& in) {
    check_inputs(in);
    if (in.sigma == 0.0) return std::max(0.0, -in.delta_u);
    const double r = in.delta_u / in.sigma;
    const double phi = kInvSqrt2Pi * std::exp(-0.5 * r * r);
    const double upper_tail = 0.5 * (1.0 - std::erf(r / kSqrt2));  // 1 - Phi(r)
    return in.sigma * phi - in.delta_u * upper_tail;
}

HetAnm::HetAnm(std::function<double(double)> mean, std::vector<std::function<double(double)>> scales,
               double default_action)
    : mean_(std::move(mean)), scales_(std::move(scales)), default_action_(default_action) {
    if (!mean_) throw ValidationError("mean function is required");
    if (scales_.empty()) throw ValidationError("at least one scale term is required");
    for (const auto& s : scales_)
        if (!s) throw ValidationError("scale function is required");
}

double counterfactual_diff_std(const HetAnm& model, double action) {
    double sum = 0.0;
    for (std::size_t k = 0; k < model.noise_count(); ++k) {
        const double d = model.scale(k, model.default_action()) - model.scale(k, action);
        sum += d * d;
    }
    return std::sqrt(sum);
}

double expected_harm_het(const HetAnm& model, double action) {
    const double delta_u = model.mean(action) - model.mean(model.default_action());
    return closed_form_expected_harm({delta_u, counterfactual_diff_std(model, action)});
}

namespace {

McEstimate mc_integrand(const HetAnm& model, double action, std::uint64_t n, std::uint64_t seed,
                        bool benefit_side) {
    if (n < 1) throw ValidationError("sample count must be at least 1");
    const double delta_u = model.mean(action) - model.mean(model.default_action());
    std::vector<double> coeff(model.noise_count());
    for (std::size_t k = 0; k < coeff.size(); ++k)
        coeff[k] = model.scale(k, model.default_action()) - model.scale(k, action);

    constexpr std::uint64_t kShard = 1u << 16;
    struct Acc {
        double sum = 0.0, sum_sq = 0.0;
    };
    const auto acc = chunked_reduce<Acc>(
        n, Acc{},
        [&](std::uint64_t begin, std::uint64_t end) {
            Acc a;
            auto stream = GaussianStream::for_shard(seed, begin / kShard);
            for (std::uint64_t i = begin; i < end; ++i) {
                double noise = 0.0;
                for (const double c : coeff) noise += c * stream.next();
                const double v =
                    benefit_side ? std::max(0.0, delta_u - noise) : std::max(0.0, noise - delta_u);
                a.sum += v;
                a.sum_sq += v * v;
            }
            return a;
        },
        [](Acc& into, const Acc& from) {
            into.sum += from.sum;
            into.sum_sq += from.sum_sq;
        },
        kShard);

    McEstimate out;
    out.samples = n;
    out.seed = seed;
    out.generator = GaussianStream::kGeneratorName;
    const double nn = static_cast<double>(n);
    out.estimate = acc.sum / nn;
    if (n > 1) {
        const double var = std::max(0.0, (acc.sum_sq - nn * out.estimate * out.estimate) / (nn - 1.0));
        out.standard_error = std::sqrt(var / nn);
    }
    return out;
}

}  // namespace

McEstimate mc_expected_harm(const HetAnm& model, double action, std::uint64_t n, std::uint64_t seed) {
    return mc_integrand(model, action, n, seed, /*benefit_side=*/false);
}

McEstimate mc_expected_benefit(const HetAnm& model, double action, std::uint64_t n, std::uint64_t seed) {
    return mc_integrand(model, action, n, seed, /*benefit_side=*/true);
}

}  // namespace harmcalc
