#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "harmcalc/domain.hpp"
#include "harmcalc/errors.hpp"

namespace harmcalc {

/// Partial or full assignment of labeled values to named variables.
using Assignment = std::map<std::string, std::string>;

struct ExogenousSpec {
    std::string name;
    Domain domain;
    std::vector<double> probs;  // one per domain value, sums to 1 within 1e-12
};

/// Tabular mechanism: a total lookup table over the joint states of the
/// endogenous parents followed by the exogenous parents, row-major in
/// declaration order. Values are indices into the child variable's domain.
struct Mechanism {
    std::vector<std::string> parents;      // endogenous parents
    std::vector<std::string> exo_parents;  // exogenous parents (may be empty)
    std::vector<int> table;
};

struct Roles {
    std::string action;
    std::vector<std::string> context;   // non-descendants of the action variable
    std::vector<std::string> outcomes;  // descendants of the action variable
};

/// do(V=v, ...) as a map from endogenous names to fixed values.
/// An empty map is the trivial intervention do().
struct Intervention {
    Assignment targets;

    static Intervention none() { return {}; }
    static Intervention set(std::string var, std::string value) {
        Intervention iv;
        iv.targets.emplace(std::move(var), std::move(value));
        return iv;
    }
};

struct CounterfactualWorld {
    std::string tag;
    Intervention iv;
};

/// Joint query over several intervention worlds sharing one noise realization.
/// `evidence` conditions the noise posterior; `query` is the event whose
/// conditional probability is returned. Both map world tags to partial
/// endogenous assignments.
struct CounterfactualQuery {
    std::vector<CounterfactualWorld> worlds;
    std::map<std::string, Assignment> evidence;
    std::map<std::string, Assignment> query;
};

/// Full world state: a value for every endogenous and exogenous variable.
struct WorldAssignment {
    Assignment values;
};

/// Exact distribution over the joint states of a model's endogenous variables.
class JointDistribution {
public:
    JointDistribution(std::vector<std::pair<std::string, Domain>> variables,
                      std::vector<double> probs);

    /// Sum of probabilities of joint states matching a partial assignment.
    double probability(const Assignment& partial) const;

    /// Expectation of a per-state value, iterated in joint-index order.
    double expectation(const std::vector<double>& value_per_state) const;

    const std::vector<double>& raw() const { return probs_; }
    const std::vector<std::pair<std::string, Domain>>& variables() const { return variables_; }

    /// Decodes a joint index into one value index per variable.
    std::vector<int> decode(std::uint64_t joint_index) const;

private:
    std::vector<std::pair<std::string, Domain>> variables_;
    std::vector<double> probs_;
};

/// Posterior over exogenous joint states, sparse and sorted by state index.
struct NoisePosterior {
    std::vector<std::pair<std::uint64_t, double>> support;
};

/// Index helpers between full endogenous states and the (action, context,
/// outcome) role decomposition used by utility tables.
struct RoleIndex {
    int action_var = -1;
    std::vector<int> context_vars;  // role order
    std::vector<int> outcome_vars;  // role order
    std::uint64_t context_count = 1;
    std::uint64_t outcome_count = 1;
    std::size_t action_count = 0;

    std::uint64_t context_index(const std::vector<int>& endo_values) const;
    std::uint64_t outcome_index(const std::vector<int>& endo_values) const;

private:
    friend class DiscreteScm;
    std::vector<std::uint64_t> context_strides_;
    std::vector<std::uint64_t> outcome_strides_;
};

/// Discrete structural causal model: finite-domain endogenous variables,
/// factorized categorical exogenous noise, total tabular mechanisms, one
/// designated action variable with a default policy mechanism.
///
/// Immutable after construction; all queries are exact enumerations over the
/// exogenous joint, accumulated in ascending state order (bit-reproducible
/// for any worker count, see parallel.hpp).
class DiscreteScm {
public:
    DiscreteScm(std::vector<std::pair<std::string, Domain>> endogenous,
                std::vector<ExogenousSpec> exogenous,
                std::map<std::string, Mechanism> mechanisms,  // all non-action variables
                Roles roles,
                Mechanism default_policy);

    // -- structure ----------------------------------------------------------
    std::size_t endogenous_count() const { return endo_.size(); }
    std::size_t exogenous_count() const { return exo_.size(); }
    const std::string& endogenous_name(int i) const { return endo_[static_cast<std::size_t>(i)].first; }
    const Domain& endogenous_domain(int i) const { return endo_[static_cast<std::size_t>(i)].second; }
    const ExogenousSpec& exogenous(int i) const { return exo_[static_cast<std::size_t>(i)]; }
    int endogenous_index(std::string_view name) const;
    int exogenous_index(std::string_view name) const;
    const Roles& roles() const { return roles_; }
    const RoleIndex& role_index() const { return role_index_; }
    const Mechanism& mechanism_of(std::string_view endo_name) const;
    const std::vector<int>& topological_order() const { return topo_order_; }
    bool is_descendant_of_action(int endo_index) const {
        return descendant_of_action_[static_cast<std::size_t>(endo_index)];
    }
    const Domain& action_domain() const;

    /// Copy with the action variable's default policy replaced (revalidated).
    DiscreteScm with_default_policy(Mechanism policy) const;

    // -- exogenous joint ----------------------------------------------------
    std::uint64_t noise_state_count() const { return noise_count_; }
    double noise_probability(std::uint64_t state) const;
    Assignment noise_assignment(std::uint64_t state) const;
    std::uint64_t noise_state_of(const Assignment& full_noise) const;

    // -- low-level evaluation (index based) ----------------------------------
    /// Compiled intervention: per endogenous variable the clamped value index,
    /// or -1 where the variable keeps its mechanism.
    std::vector<int> compile_intervention(const Intervention& iv) const;
    void decode_noise(std::uint64_t state, std::vector<int>& exo_values) const;
    void evaluate_indices(const std::vector<int>& exo_values, const std::vector<int>& clamp,
                          std::vector<int>& endo_out) const;

    // -- operations ----------------------------------------------------------
    WorldAssignment evaluate_world(const Assignment& noise, const Intervention& iv) const;

    JointDistribution interventional_distribution(const Intervention& iv,
                                                  const Assignment& condition = {}) const;

    double counterfactual_joint(const CounterfactualQuery& query) const;

    NoisePosterior posterior_over_noise(const Intervention& iv, const Assignment& evidence) const;

    /// E[value(Y_treated)|x] - E[value(Y_control)|x]; `outcome_value` is
    /// indexed by outcome joint index (see role_index()).
    double cate(const std::string& treated, const std::string& control, const Assignment& context,
                const std::vector<double>& outcome_value) const;

    /// Which world the (cause, effect) evidence is read from: the default
    /// world (observational, as in the standard definition), or the world
    /// where the cause was set by intervention.
    enum class CauseWorld { Observed, Intervened };

    double prob_necessity(const std::string& cause_var, const std::string& cause_value,
                          const std::string& effect_var, const std::string& effect_value,
                          const std::string& counter_cause, const std::string& counter_effect,
                          CauseWorld cause_world = CauseWorld::Observed) const;

    // -- helpers for role-shaped values --------------------------------------
    /// Context joint index of a full assignment over the declared context set.
    std::uint64_t context_joint_index(const Assignment& context) const;
    Assignment context_assignment(std::uint64_t context_index) const;
    Assignment outcome_assignment(std::uint64_t outcome_index) const;
    std::uint64_t outcome_joint_index(const Assignment& outcome) const;

private:
    void validate_and_index();
    std::vector<std::pair<int, int>> compile_partial(const Assignment& partial) const;

    std::vector<std::pair<std::string, Domain>> endo_;
    std::vector<ExogenousSpec> exo_;
    std::vector<Mechanism> mechanism_by_var_;  // index-aligned with endo_
    Roles roles_;

    std::vector<int> topo_order_;
    std::vector<bool> descendant_of_action_;
    std::vector<std::uint64_t> noise_strides_;
    std::uint64_t noise_count_ = 1;
    std::uint64_t endo_joint_count_ = 1;
    std::vector<std::uint64_t> endo_strides_;
    RoleIndex role_index_;

    // per-mechanism compiled strides for table lookup
    struct CompiledMechanism {
        std::vector<int> parent_vars;
        std::vector<int> exo_vars;
        std::vector<std::uint64_t> strides;
    };
    std::vector<CompiledMechanism> compiled_;
};

}  // namespace harmcalc
