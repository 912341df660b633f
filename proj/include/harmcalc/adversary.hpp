#pragma once

#include <optional>
#include <string>
#include <vector>

#include "harmcalc/domain.hpp"
#include "harmcalc/harm.hpp"
#include "harmcalc/scm.hpp"
#include "harmcalc/utility.hpp"

namespace harmcalc {

/// Utility (or factual objective) over action × outcome at one fixed
/// context — the shape the shift constructions work in.
class ActionOutcomeUtility {
public:
    ActionOutcomeUtility(Domain actions, Domain outcomes, std::vector<double> values /* a-major */);

    double at(std::size_t action, std::size_t outcome) const {
        return values_[action * outcomes_.size() + outcome];
    }
    const Domain& actions() const { return actions_; }
    const Domain& outcomes() const { return outcomes_; }

    std::size_t argmax_outcome(std::size_t action) const;  // ties: lowest index
    std::size_t argmin_outcome(std::size_t action) const;

    /// Outcome dependence for a subset of actions: utility ranges of every
    /// pair of distinct actions strictly overlap.
    bool outcome_dependent(const std::vector<std::string>& subset) const;

private:
    Domain actions_;
    Domain outcomes_;
    std::vector<double> values_;
};

/// Counterfactually independent model: one outcome-valued noise variable per
/// action, mechanism Y_a = E(a). Interventional marginals are the per-action
/// noise distributions and cross-action counterfactual joints factorize,
/// except for one optional coupled (action, default) pair carrying an
/// explicit joint table.
class CfiModel {
public:
    struct ActionEntry {
        std::string action;
        std::vector<double> marginal;  // over the shared outcome domain
        // binary designation for the phi machinery: outcome indices read as
        // "1" (hi) and "0" (lo)
        std::optional<std::pair<int, int>> hi_lo;
    };

    struct CoupledPair {
        std::string action;          // a
        std::string default_action;  // a0
        double phi = 0.0;
        std::vector<double> joint;  // dense over dom(Y) x dom(Y), (y_a, y_a0) row-major
    };

    CfiModel(Domain outcomes, std::vector<ActionEntry> actions, std::string default_action,
             std::string context_tag = "x");

    const Domain& outcome_domain() const { return outcomes_; }
    const std::string& default_action() const { return default_action_; }
    const std::string& context_tag() const { return context_tag_; }
    std::size_t action_count() const { return actions_.size(); }
    const ActionEntry& action(std::size_t i) const { return actions_[i]; }
    const ActionEntry& action(const std::string& name) const;
    std::size_t action_index(const std::string& name) const;
    const std::optional<CoupledPair>& coupled() const { return coupled_; }

    /// P(Y_a = y | x).
    double marginal(const std::string& action, std::size_t outcome) const;

    /// P(Y_a = y, Y_b = y' | x): delta-consistent on the diagonal, coupled
    /// joint for the designated pair, product otherwise.
    double counterfactual_joint(const std::string& a, std::size_t y, const std::string& b,
                                std::size_t y_other) const;

private:
    friend CfiModel apply_phi_shift(const CfiModel&, const std::string&, const std::string&, double);
    Domain outcomes_;
    std::vector<ActionEntry> actions_;
    std::string default_action_;
    std::string context_tag_;
    std::optional<CoupledPair> coupled_;
};

/// CFI model with the given interventional marginals (exactly reproduced).
/// On a two-value outcome domain, "1" is the higher domain index.
CfiModel build_cfi_model(const Domain& outcomes,
                         const std::vector<std::pair<std::string, std::vector<double>>>& marginals,
                         const std::string& default_action, const std::string& context_tag = "x");

/// Two-point CFI model concentrated on each action's argmax/argmin-utility
/// outcomes. `weights` are P(argmax outcome) per action; when absent they
/// are solved so all listed actions share the expected utility at the
/// midpoint of the overlap interval. Requires outcome dependence.
CfiModel binary_concentrated_model(const ActionOutcomeUtility& util,
                                   const std::vector<std::string>& actions,
                                   const std::string& default_action,
                                   const std::optional<std::vector<double>>& weights = std::nullopt,
                                   const std::string& context_tag = "x");

struct PhiBounds {
    double lower = 0.0;  // <= 0
    double upper = 0.0;  // >= 0
};

/// Admissible phi range keeping the coupled (a, a0) joint a distribution.
PhiBounds phi_bounds(const CfiModel& model, const std::string& a, const std::string& a0);

/// Couples the (a, a0) noise pair as P(e_a)P(e_a0) + (-1)^(e_a - e_a0) phi.
/// Marginals of every action are preserved exactly.
CfiModel apply_phi_shift(const CfiModel& model, const std::string& a, const std::string& a0,
                          double phi);

/// Harm-shift coefficient d00 + d11 - d10 - d01 with
/// d_{y*,y} = max{0, U(a0, y*) - U(a, y)} on the designated binary outcomes.
/// The harm of `a` changes by phi times this value; strictly negative under
/// outcome dependence.
double phi_harm_coefficient(const CfiModel& model, const ActionOutcomeUtility& util,
                            const std::string& a, const std::string& a0);

/// Expected utility of an action in a CFI model.
double cfi_expected_utility(const CfiModel& model, const ActionOutcomeUtility& util,
                            const std::string& action);

/// Expected harm of an action against the deterministic default.
double cfi_expected_harm(const CfiModel& model, const ActionOutcomeUtility& util,
                         const std::string& action);

/// Base model plus phi-shifted twins with strictly higher / strictly lower
/// harm for the designated action; all interventional marginals identical.
struct ShiftFamily {
    CfiModel base;
    CfiModel increased;  // M+
    CfiModel decreased;  // M-
    std::string shifted_action;
    double phi_plus = 0.0;
    double phi_minus = 0.0;
};

/// Shifts at half the admissible bound, oriented so `increased` has larger
/// harm for `action` than `base` and `decreased` smaller.
ShiftFamily build_shift_family(const CfiModel& base, const ActionOutcomeUtility& util,
                               const std::string& action);

/// Converts a CFI model to an equivalent discrete SCM (per-action noise
/// variables; the coupled pair becomes one product-domain noise variable).
DiscreteScm cfi_to_scm(const CfiModel& model);

/// cfi_to_scm plus an extra independent coin "tau_coin" with P("1") = q,
/// unused by the default policy. A mixed action q*[A=a1] + (1-q)*[A=a0] is
/// then a policy replacement (with_default_policy) reading the coin, which
/// lets the mixture be verified by exact enumeration.
DiscreteScm cfi_to_scm_with_coin(const CfiModel& model, double q);

/// The matching utility (or objective) table for cfi_to_scm(model).
UtilityTable cfi_utility_table(const DiscreteScm& scm, const ActionOutcomeUtility& util);

struct Theorem3Witness {
    CfiModel model;
    double expected_utility_action = 0.0;
    double expected_utility_default = 0.0;
    double harm_action = 0.0;
    double harm_default = 0.0;
    HarmfulObjective flag;  // harmful_objective on J = U in the witness model
};

/// Environment in which maximizing the user's expected utility is harmful:
/// the non-default action ties the default's expected utility but carries
/// strictly positive harm.
Theorem3Witness theorem3_witness(const ActionOutcomeUtility& util, const std::string& default_action,
                                 const std::string& action);

struct Theorem4Candidate {
    std::string name;  // "a1", "a2" or "tau"
    double expected_utility = 0.0;
    double expected_objective = 0.0;
    double harm_base = 0.0;
    double harm_increased = 0.0;
    double harm_decreased = 0.0;
};

struct Theorem4Witness {
    ShiftFamily family;
    bool used_mixture = false;
    double mixture_weight = 0.0;  // q on a1 (rest on the default action)
    std::vector<Theorem4Candidate> candidates;  // the two compared choices
    std::string maximizer;                      // J's argmax among the candidates
    std::string environment;                    // "M+" or "M-"
    std::string witness_alternative;            // equal utility, strictly lower harm there
    bool flagged = false;
};

/// For any factual objective J: a phi-shifted environment in which J's
/// maximizing choice is needlessly harmful. Follows the mixed-action
/// construction with tau = q*[A=a1] + (1-q)*[A=a0] when base harms differ.
Theorem4Witness theorem4_witness(const ActionOutcomeUtility& util,
                                 const ActionOutcomeUtility& objective,
                                 const std::string& default_action, const std::string& a1,
                                 const std::string& a2);

}  // namespace harmcalc
