#include "harmcalc/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace harmcalc {

namespace {
constexpr double kProbTol = 1e-12;
}

// ---------------------------------------------------------------------------
// ActionOutcomeUtility

ActionOutcomeUtility::ActionOutcomeUtility(Domain actions, Domain outcomes, std::vector<double> values)
    : actions_(std::move(actions)), outcomes_(std::move(outcomes)), values_(std::move(values)) {
    if (values_.size() != actions_.size() * outcomes_.size())
        throw ValidationError("utility values do not cover action x outcome");
    for (double v : values_)
        if (!std::isfinite(v)) throw ValidationError("utility contains a non-finite value");
}

std::size_t ActionOutcomeUtility::argmax_outcome(std::size_t action) const {
    std::size_t best = 0;
    for (std::size_t y = 1; y < outcomes_.size(); ++y)
        if (at(action, y) > at(action, best)) best = y;
    return best;
}

std::size_t ActionOutcomeUtility::argmin_outcome(std::size_t action) const {
    std::size_t best = 0;
    for (std::size_t y = 1; y < outcomes_.size(); ++y)
        if (at(action, y) < at(action, best)) best = y;
    return best;
}

bool ActionOutcomeUtility::outcome_dependent(const std::vector<std::string>& subset) const {
    for (std::size_t i = 0; i < subset.size(); ++i) {
        for (std::size_t j = 0; j < subset.size(); ++j) {
            if (i == j) continue;
            const auto ai = static_cast<std::size_t>(actions_.index_of(subset[i]));
            const auto aj = static_cast<std::size_t>(actions_.index_of(subset[j]));
            if (!(at(ai, argmax_outcome(ai)) > at(aj, argmin_outcome(aj)))) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// CfiModel

CfiModel::CfiModel(Domain outcomes, std::vector<ActionEntry> actions, std::string default_action,
                   std::string context_tag)
    : outcomes_(std::move(outcomes)),
      actions_(std::move(actions)),
      default_action_(std::move(default_action)),
      context_tag_(std::move(context_tag)) {
    if (actions_.empty()) throw ValidationError("CFI model needs at least one action");
    for (auto& entry : actions_) {
        if (entry.marginal.size() != outcomes_.size())
            throw ValidationError("marginal for action '" + entry.action + "' has the wrong length");
        double sum = 0.0;
        for (double p : entry.marginal) {
            if (!(p >= 0.0))
                throw ValidationError("marginal for action '" + entry.action + "' has a negative entry");
            sum += p;
        }
        if (std::abs(sum - 1.0) > kProbTol)
            throw ValidationError("marginal for action '" + entry.action + "' sums to " + std::to_string(sum));
        if (!entry.hi_lo && outcomes_.size() == 2) entry.hi_lo = std::make_pair(1, 0);
    }
    action_index(default_action_);  // must exist
}

const CfiModel::ActionEntry& CfiModel::action(const std::string& name) const {
    return actions_[action_index(name)];
}

std::size_t CfiModel::action_index(const std::string& name) const {
    for (std::size_t i = 0; i < actions_.size(); ++i)
        if (actions_[i].action == name) return i;
    throw ValidationError("unknown action '" + name + "'");
}

double CfiModel::marginal(const std::string& action_name, std::size_t outcome) const {
    return action(action_name).marginal[outcome];
}

double CfiModel::counterfactual_joint(const std::string& a, std::size_t y, const std::string& b,
                                      std::size_t y_other) const {
    if (a == b) return y == y_other ? marginal(a, y) : 0.0;  // same world
    if (coupled_) {
        const bool forward = coupled_->action == a && coupled_->default_action == b;
        const bool backward = coupled_->action == b && coupled_->default_action == a;
        if (forward) return coupled_->joint[y * outcomes_.size() + y_other];
        if (backward) return coupled_->joint[y_other * outcomes_.size() + y];
    }
    return marginal(a, y) * marginal(b, y_other);
}

// ---------------------------------------------------------------------------
// builders

CfiModel build_cfi_model(const Domain& outcomes,
                         const std::vector<std::pair<std::string, std::vector<double>>>& marginals,
                         const std::string& default_action, const std::string& context_tag) {
    std::vector<CfiModel::ActionEntry> entries;
    entries.reserve(marginals.size());
    for (const auto& [name, probs] : marginals) entries.push_back({name, probs, std::nullopt});
    return CfiModel(outcomes, std::move(entries), default_action, context_tag);
}

CfiModel binary_concentrated_model(const ActionOutcomeUtility& util,
                                   const std::vector<std::string>& actions,
                                   const std::string& default_action,
                                   const std::optional<std::vector<double>>& weights,
                                   const std::string& context_tag) {
    if (!util.outcome_dependent(actions))
        throw ValidationError("utility is not outcome dependent for the requested actions");
    if (weights && weights->size() != actions.size())
        throw ValidationError("one mixing weight per action is required");

    // Equal-expected-utility target: midpoint of the overlap interval
    // [max_a min_y U, min_a max_y U]; strictly interior under outcome
    // dependence with non-constant per-action utilities.
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (const auto& name : actions) {
        const auto a = static_cast<std::size_t>(util.actions().index_of(name));
        const double u_min = util.at(a, util.argmin_outcome(a));
        const double u_max = util.at(a, util.argmax_outcome(a));
        if (!(u_max > u_min))
            throw ValidationError("action '" + name + "' has a constant utility; no equalizing mixture");
        lo = std::max(lo, u_min);
        hi = std::min(hi, u_max);
    }
    if (!(lo < hi)) throw ValidationError("utility ranges do not overlap; no equalizing mixture");
    const double target = 0.5 * (lo + hi);

    std::vector<CfiModel::ActionEntry> entries;
    entries.reserve(actions.size());
    for (std::size_t i = 0; i < actions.size(); ++i) {
        const auto a = static_cast<std::size_t>(util.actions().index_of(actions[i]));
        const auto y_hi = util.argmax_outcome(a);
        const auto y_lo = util.argmin_outcome(a);
        const double u_hi = util.at(a, y_hi);
        const double u_lo = util.at(a, y_lo);
        const double w = weights ? (*weights)[i] : (target - u_lo) / (u_hi - u_lo);
        if (!(w >= 0.0 && w <= 1.0))
            throw ValidationError("mixing weight for action '" + actions[i] + "' is outside [0, 1]");
        CfiModel::ActionEntry entry;
        entry.action = actions[i];
        entry.marginal.assign(util.outcomes().size(), 0.0);
        entry.marginal[y_hi] += w;
        entry.marginal[y_lo] += 1.0 - w;
        entry.hi_lo = std::make_pair(static_cast<int>(y_hi), static_cast<int>(y_lo));
        entries.push_back(std::move(entry));
    }
    return CfiModel(util.outcomes(), std::move(entries), default_action, context_tag);
}

// ---------------------------------------------------------------------------
// phi machinery

namespace {

std::pair<double, double> hi_lo_probs(const CfiModel::ActionEntry& entry, const Domain& outcomes,
                                      const std::string& role) {
    if (!entry.hi_lo)
        throw ValidationError("action '" + entry.action + "' (" + role +
                              ") has no binary outcome designation");
    const auto [hi, lo] = *entry.hi_lo;
    double mass = entry.marginal[static_cast<std::size_t>(hi)] + entry.marginal[static_cast<std::size_t>(lo)];
    for (std::size_t y = 0; y < outcomes.size(); ++y)
        if (static_cast<int>(y) != hi && static_cast<int>(y) != lo &&
            entry.marginal[y] > kProbTol)
            throw ValidationError("action '" + entry.action +
                                  "' puts probability outside its designated binary outcomes");
    if (std::abs(mass - 1.0) > kProbTol)
        throw ValidationError("binary designation of action '" + entry.action + "' loses mass");
    return {entry.marginal[static_cast<std::size_t>(hi)], entry.marginal[static_cast<std::size_t>(lo)]};
}

}  // namespace

PhiBounds phi_bounds(const CfiModel& model, const std::string& a, const std::string& a0) {
    if (a == a0) throw ValidationError("phi shift needs two distinct actions");
    const auto [pa1, pa0] = hi_lo_probs(model.action(a), model.outcome_domain(), "shifted action");
    const auto [pd1, pd0] = hi_lo_probs(model.action(a0), model.outcome_domain(), "default action");
    PhiBounds b;
    b.lower = std::max(-pd1 * pa1, -pd0 * pa0);
    b.upper = std::min(pd1 * pa0, pd0 * pa1);
    return b;
}

CfiModel apply_phi_shift(const CfiModel& model, const std::string& a, const std::string& a0,
                          double phi) {
    if (phi == 0.0) return model;  // identity shift
    if (model.coupled()) throw ValidationError("model already carries a coupled pair");
    if (a0 != model.default_action())
        throw ValidationError("phi shift couples an action with the default action");
    const auto bounds = phi_bounds(model, a, a0);
    if (phi < bounds.lower || phi > bounds.upper)
        throw ValidationError("phi is outside the admissible bounds (negative probability)");

    const auto& entry_a = model.action(a);
    const auto& entry_d = model.action(a0);
    const auto [hi_a, lo_a] = *entry_a.hi_lo;
    const auto [hi_d, lo_d] = *entry_d.hi_lo;
    const std::size_t ny = model.outcome_domain().size();

    CfiModel out = model;
    CfiModel::CoupledPair pair;
    pair.action = a;
    pair.default_action = a0;
    pair.phi = phi;
    pair.joint.assign(ny * ny, 0.0);
    for (std::size_t ya = 0; ya < ny; ++ya) {
        for (std::size_t yd = 0; yd < ny; ++yd) {
            double p = entry_a.marginal[ya] * entry_d.marginal[yd];
            const bool a_is_binary = static_cast<int>(ya) == hi_a || static_cast<int>(ya) == lo_a;
            const bool d_is_binary = static_cast<int>(yd) == hi_d || static_cast<int>(yd) == lo_d;
            if (a_is_binary && d_is_binary) {
                const int e_a = static_cast<int>(ya) == hi_a ? 1 : 0;
                const int e_d = static_cast<int>(yd) == hi_d ? 1 : 0;
                p += (e_a == e_d ? phi : -phi);
            }
            if (p < -kProbTol)
                throw ValidationError("phi shift produced a negative probability");
            pair.joint[ya * ny + yd] = std::max(0.0, p);
        }
    }
    out.coupled_ = std::move(pair);
    return out;
}

double phi_harm_coefficient(const CfiModel& model, const ActionOutcomeUtility& util,
                            const std::string& a, const std::string& a0) {
    const auto& entry_a = model.action(a);
    const auto& entry_d = model.action(a0);
    if (!entry_a.hi_lo || !entry_d.hi_lo)
        throw ValidationError("phi coefficient needs binary outcome designations");
    const auto ai = static_cast<std::size_t>(util.actions().index_of(a));
    const auto di = static_cast<std::size_t>(util.actions().index_of(a0));
    const auto [hi_a, lo_a] = *entry_a.hi_lo;
    const auto [hi_d, lo_d] = *entry_d.hi_lo;

    const auto delta = [&](int yd, int ya) {
        return std::max(0.0, util.at(di, static_cast<std::size_t>(yd)) -
                                 util.at(ai, static_cast<std::size_t>(ya)));
    };
    // d_{e_d, e_a} with e = 1 on the hi outcome
    const double d00 = delta(lo_d, lo_a);
    const double d11 = delta(hi_d, hi_a);
    const double d10 = delta(hi_d, lo_a);
    const double d01 = delta(lo_d, hi_a);
    return d00 + d11 - d10 - d01;
}

// ---------------------------------------------------------------------------
// expectations

double cfi_expected_utility(const CfiModel& model, const ActionOutcomeUtility& util,
                            const std::string& action) {
    const auto a = static_cast<std::size_t>(util.actions().index_of(action));
    const auto& marginal = model.action(action).marginal;
    double total = 0.0;
    for (std::size_t y = 0; y < marginal.size(); ++y) total += marginal[y] * util.at(a, y);
    return total;
}

double cfi_expected_harm(const CfiModel& model, const ActionOutcomeUtility& util,
                         const std::string& action) {
    const std::string& a0 = model.default_action();
    if (action == a0) return 0.0;  // factual and counterfactual worlds coincide
    const auto ai = static_cast<std::size_t>(util.actions().index_of(action));
    const auto di = static_cast<std::size_t>(util.actions().index_of(a0));
    const std::size_t ny = model.outcome_domain().size();
    double total = 0.0;
    for (std::size_t yd = 0; yd < ny; ++yd)
        for (std::size_t ya = 0; ya < ny; ++ya)
            total += model.counterfactual_joint(a0, yd, action, ya) *
                     std::max(0.0, util.at(di, yd) - util.at(ai, ya));
    return total;
}

ShiftFamily build_shift_family(const CfiModel& base, const ActionOutcomeUtility& util,
                               const std::string& action) {
    const auto bounds = phi_bounds(base, action, base.default_action());
    if (!(bounds.lower < 0.0) || !(bounds.upper > 0.0))
        throw ValidationError("marginals are deterministic; phi bounds collapse to zero");
    const double coeff = phi_harm_coefficient(base, util, action, base.default_action());
    if (coeff == 0.0) throw ValidationError("phi shift cannot move the harm (zero coefficient)");

    // Half the admissible bound on each side, oriented by the sign of the
    // harm coefficient so `increased` really increases the harm.
    const double phi_up = coeff > 0.0 ? bounds.upper / 2.0 : bounds.lower / 2.0;
    const double phi_down = coeff > 0.0 ? bounds.lower / 2.0 : bounds.upper / 2.0;

    ShiftFamily family{base, apply_phi_shift(base, action, base.default_action(), phi_up),
                       apply_phi_shift(base, action, base.default_action(), phi_down), action,
                       phi_up, phi_down};
    return family;
}

// ---------------------------------------------------------------------------
// SCM conversion

namespace {

DiscreteScm cfi_to_scm_impl(const CfiModel& model, std::optional<double> coin_q) {
    const auto& outcomes = model.outcome_domain();
    const std::size_t ny = outcomes.size();

    std::vector<std::string> action_labels;
    for (std::size_t i = 0; i < model.action_count(); ++i)
        action_labels.push_back(model.action(i).action);
    const Domain action_domain(action_labels);

    std::vector<ExogenousSpec> exo;
    // one noise variable per uncoupled action, in action order
    std::vector<int> noise_of_action(model.action_count(), -1);
    int pair_exo = -1;
    for (std::size_t i = 0; i < model.action_count(); ++i) {
        const auto& entry = model.action(i);
        const bool in_pair = model.coupled() && (model.coupled()->action == entry.action ||
                                                 model.coupled()->default_action == entry.action);
        if (in_pair) continue;
        noise_of_action[i] = static_cast<int>(exo.size());
        exo.push_back({"e_" + entry.action, outcomes, entry.marginal});
    }
    if (model.coupled()) {
        // the coupled pair becomes a single product-domain noise variable
        std::vector<std::string> labels;
        labels.reserve(ny * ny);
        for (std::size_t ya = 0; ya < ny; ++ya)
            for (std::size_t yd = 0; yd < ny; ++yd)
                labels.push_back(outcomes.label(static_cast<int>(ya)) + "|" +
                                 outcomes.label(static_cast<int>(yd)));
        pair_exo = static_cast<int>(exo.size());
        exo.push_back({"e_pair", Domain(labels), model.coupled()->joint});
    }

    // Y reads the noise variable selected by A
    Mechanism y_mech;
    y_mech.parents = {"A"};
    for (const auto& e : exo) y_mech.exo_parents.push_back(e.name);
    std::vector<std::uint64_t> sizes;
    sizes.push_back(model.action_count());
    for (const auto& e : exo) sizes.push_back(e.domain.size());
    std::uint64_t rows = 1;
    for (auto s : sizes) rows *= s;
    y_mech.table.resize(rows);
    std::vector<std::uint64_t> strides(sizes.size(), 1);
    for (std::size_t i = sizes.size(); i-- > 1;) strides[i - 1] = strides[i] * sizes[i];
    for (std::uint64_t row = 0; row < rows; ++row) {
        const auto a = static_cast<std::size_t>(row / strides[0]);
        const auto& entry = model.action(a);
        int value;
        if (model.coupled() && (model.coupled()->action == entry.action ||
                                model.coupled()->default_action == entry.action)) {
            const auto pair_state = (row / strides[static_cast<std::size_t>(pair_exo) + 1]) %
                                    (ny * ny);
            const auto ya = pair_state / ny;
            const auto yd = pair_state % ny;
            value = static_cast<int>(model.coupled()->action == entry.action ? ya : yd);
        } else {
            const auto k = static_cast<std::size_t>(noise_of_action[a]) + 1;
            value = static_cast<int>((row / strides[k]) % ny);
        }
        y_mech.table[row] = value;
    }

    if (coin_q) {
        if (!(*coin_q >= 0.0 && *coin_q <= 1.0))
            throw ValidationError("mixture weight must lie in [0, 1]");
        exo.push_back({"tau_coin", Domain({"1", "0"}), {*coin_q, 1.0 - *coin_q}});
    }

    Mechanism policy;  // deterministic default, no noise
    policy.table = {static_cast<int>(action_domain.index_of(model.default_action()))};

    return DiscreteScm({{"A", action_domain}, {"Y", outcomes}}, std::move(exo),
                       {{"Y", std::move(y_mech)}}, Roles{"A", {}, {"Y"}}, std::move(policy));
}

}  // namespace

DiscreteScm cfi_to_scm(const CfiModel& model) { return cfi_to_scm_impl(model, std::nullopt); }

DiscreteScm cfi_to_scm_with_coin(const CfiModel& model, double q) {
    return cfi_to_scm_impl(model, q);
}

UtilityTable cfi_utility_table(const DiscreteScm& scm, const ActionOutcomeUtility& util) {
    return UtilityTable::from_function(scm, [&](const std::string& action, const Assignment&,
                                                const Assignment& outcome) {
        const auto a = static_cast<std::size_t>(util.actions().index_of(action));
        const auto y = static_cast<std::size_t>(util.outcomes().index_of(outcome.at("Y")));
        return util.at(a, y);
    });
}

// ---------------------------------------------------------------------------
// theorem witnesses

Theorem3Witness theorem3_witness(const ActionOutcomeUtility& util, const std::string& default_action,
                                 const std::string& action) {
    auto model = binary_concentrated_model(util, {default_action, action}, default_action);
    Theorem3Witness w{std::move(model), 0.0, 0.0, 0.0, 0.0, {}};
    w.expected_utility_action = cfi_expected_utility(w.model, util, action);
    w.expected_utility_default = cfi_expected_utility(w.model, util, default_action);
    w.harm_action = cfi_expected_harm(w.model, util, action);
    w.harm_default = cfi_expected_harm(w.model, util, default_action);

    const auto scm = cfi_to_scm(w.model);
    const auto table = cfi_utility_table(scm, util);
    w.flag = harmful_objective(scm, table, Objective{table}, {});
    return w;
}

Theorem4Witness theorem4_witness(const ActionOutcomeUtility& util,
                                 const ActionOutcomeUtility& objective,
                                 const std::string& default_action, const std::string& a1_in,
                                 const std::string& a2_in) {
    auto base = binary_concentrated_model(util, {default_action, a1_in, a2_in}, default_action);

    std::string a1 = a1_in, a2 = a2_in;
    double h1 = cfi_expected_harm(base, util, a1);
    double h2 = cfi_expected_harm(base, util, a2);
    if (!(h1 > 0.0) || !(h2 > 0.0))
        throw ValidationError("construction requires positive harms for both non-default actions");

    Theorem4Witness w{build_shift_family(base, util, a1), false, 0.0, {}, "", "", "", false};

    if (h1 == h2) {
        // equal harms: the phi shift alone separates a1 and a2
        w.used_mixture = false;
        const auto row = [&](const std::string& name) {
            Theorem4Candidate c;
            c.name = name;
            c.expected_utility = cfi_expected_utility(base, util, name);
            c.expected_objective = cfi_expected_utility(base, objective, name);
            c.harm_base = cfi_expected_harm(base, util, name);
            c.harm_increased = cfi_expected_harm(w.family.increased, util, name);
            c.harm_decreased = cfi_expected_harm(w.family.decreased, util, name);
            return c;
        };
        w.candidates = {row(a1), row(a2)};
    } else {
        // mix a1 with the default so the mixture's harm ties a2's
        if (h1 < h2) {
            std::swap(a1, a2);
            std::swap(h1, h2);
            w.family = build_shift_family(base, util, a1);
        }
        const double q = h2 / h1;  // in (0,1)
        w.used_mixture = true;
        w.mixture_weight = q;

        Theorem4Candidate tau;
        tau.name = "tau";
        tau.expected_utility = q * cfi_expected_utility(base, util, a1) +
                               (1.0 - q) * cfi_expected_utility(base, util, default_action);
        tau.expected_objective = q * cfi_expected_utility(base, objective, a1) +
                                 (1.0 - q) * cfi_expected_utility(base, objective, default_action);
        tau.harm_base = q * cfi_expected_harm(base, util, a1);
        tau.harm_increased = q * cfi_expected_harm(w.family.increased, util, a1);
        tau.harm_decreased = q * cfi_expected_harm(w.family.decreased, util, a1);

        Theorem4Candidate other;
        other.name = a2;
        other.expected_utility = cfi_expected_utility(base, util, a2);
        other.expected_objective = cfi_expected_utility(base, objective, a2);
        other.harm_base = cfi_expected_harm(base, util, a2);
        other.harm_increased = cfi_expected_harm(w.family.increased, util, a2);
        other.harm_decreased = cfi_expected_harm(w.family.decreased, util, a2);

        w.candidates = {tau, other};
    }

    // J's maximizer among the two candidates; factual statistics are
    // identical across M0 and M+/-.
    const auto& first = w.candidates[0];
    const auto& second = w.candidates[1];
    const bool tie = std::abs(first.expected_objective - second.expected_objective) <= kValueTieTol;
    const bool first_wins = first.expected_objective > second.expected_objective;

    if (tie || first_wins) {
        // a maximizing policy may put mass on the first candidate; flag it in
        // the environment where it is strictly more harmful
        w.maximizer = first.name;
        w.environment = "M+";
        w.witness_alternative = second.name;
        w.flagged = first.harm_increased > second.harm_increased;
    } else {
        w.maximizer = second.name;
        w.environment = "M-";
        w.witness_alternative = first.name;
        w.flagged = second.harm_decreased > first.harm_decreased;
    }
    return w;
}

}  // namespace harmcalc
