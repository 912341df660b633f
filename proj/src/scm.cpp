#include "harmcalc/scm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include "harmcalc/parallel.hpp"

namespace harmcalc {

namespace {

constexpr std::uint64_t kMaxStates = 1ull << 24;
constexpr double kNormTol = 1e-12;

std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

}  // namespace

int worker_cap() {
    if (const char* env = std::getenv("HARMCALC_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<int>(v);
    }
    return 1;
}

// ---------------------------------------------------------------------------
// JointDistribution

JointDistribution::JointDistribution(std::vector<std::pair<std::string, Domain>> variables,
                                     std::vector<double> probs)
    : variables_(std::move(variables)), probs_(std::move(probs)) {}

std::vector<int> JointDistribution::decode(std::uint64_t joint_index) const {
    std::vector<int> out(variables_.size());
    for (std::size_t i = variables_.size(); i-- > 0;) {
        const std::uint64_t size = variables_[i].second.size();
        out[i] = static_cast<int>(joint_index % size);
        joint_index /= size;
    }
    return out;
}

double JointDistribution::probability(const Assignment& partial) const {
    std::vector<std::pair<std::size_t, int>> match;
    for (const auto& [name, value] : partial) {
        bool found = false;
        for (std::size_t i = 0; i < variables_.size(); ++i) {
            if (variables_[i].first == name) {
                match.emplace_back(i, variables_[i].second.index_of(value));
                found = true;
                break;
            }
        }
        if (!found) throw ValidationError("unknown variable '" + name + "' in assignment");
    }
    double total = 0.0;
    for (std::uint64_t s = 0; s < probs_.size(); ++s) {
        const auto values = decode(s);
        bool ok = true;
        for (const auto& [var, val] : match)
            if (values[var] != val) { ok = false; break; }
        if (ok) total += probs_[s];
    }
    return total;
}

double JointDistribution::expectation(const std::vector<double>& value_per_state) const {
    if (value_per_state.size() != probs_.size())
        throw ValidationError("value vector does not match the joint state count");
    double total = 0.0;
    for (std::size_t s = 0; s < probs_.size(); ++s) total += probs_[s] * value_per_state[s];
    return total;
}

// ---------------------------------------------------------------------------
// RoleIndex

std::uint64_t RoleIndex::context_index(const std::vector<int>& endo_values) const {
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < context_vars.size(); ++i)
        idx += context_strides_[i] * static_cast<std::uint64_t>(endo_values[static_cast<std::size_t>(context_vars[i])]);
    return idx;
}

std::uint64_t RoleIndex::outcome_index(const std::vector<int>& endo_values) const {
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < outcome_vars.size(); ++i)
        idx += outcome_strides_[i] * static_cast<std::uint64_t>(endo_values[static_cast<std::size_t>(outcome_vars[i])]);
    return idx;
}

// ---------------------------------------------------------------------------
// DiscreteScm construction

DiscreteScm::DiscreteScm(std::vector<std::pair<std::string, Domain>> endogenous,
                         std::vector<ExogenousSpec> exogenous,
                         std::map<std::string, Mechanism> mechanisms, Roles roles,
                         Mechanism default_policy)
    : endo_(std::move(endogenous)), exo_(std::move(exogenous)), roles_(std::move(roles)) {
    if (endo_.empty()) throw ValidationError("model has no endogenous variables");

    // unique names
    for (std::size_t i = 0; i < endo_.size(); ++i)
        for (std::size_t j = i + 1; j < endo_.size(); ++j)
            if (endo_[i].first == endo_[j].first)
                throw ValidationError("duplicate endogenous variable '" + endo_[i].first + "'");
    for (std::size_t i = 0; i < exo_.size(); ++i) {
        for (std::size_t j = i + 1; j < exo_.size(); ++j)
            if (exo_[i].name == exo_[j].name)
                throw ValidationError("duplicate exogenous variable '" + exo_[i].name + "'");
        for (const auto& [name, dom] : endo_)
            if (name == exo_[i].name)
                throw ValidationError("variable '" + name + "' is both endogenous and exogenous");
    }

    const int action = endogenous_index(roles_.action);

    mechanism_by_var_.resize(endo_.size());
    if (mechanisms.count(roles_.action))
        throw ValidationError("the action variable's mechanism is given by default_policy, not mechanisms");
    for (std::size_t i = 0; i < endo_.size(); ++i) {
        const auto& name = endo_[i].first;
        if (static_cast<int>(i) == action) {
            mechanism_by_var_[i] = std::move(default_policy);
            continue;
        }
        auto it = mechanisms.find(name);
        if (it == mechanisms.end())
            throw ValidationError("missing mechanism for variable '" + name + "'");
        mechanism_by_var_[i] = std::move(it->second);
        mechanisms.erase(it);
    }
    if (!mechanisms.empty())
        throw ValidationError("mechanism given for unknown variable '" + mechanisms.begin()->first + "'");

    validate_and_index();
}

void DiscreteScm::validate_and_index() {
    const int n = static_cast<int>(endo_.size());
    const int action = endogenous_index(roles_.action);

    // exogenous distributions
    for (const auto& e : exo_) {
        if (e.probs.size() != e.domain.size())
            throw ValidationError("exogenous '" + e.name + "': probability vector length mismatch");
        double sum = 0.0;
        for (double p : e.probs) {
            if (!(p >= 0.0)) throw ValidationError("exogenous '" + e.name + "': negative probability");
            sum += p;
        }
        if (std::abs(sum - 1.0) > kNormTol)
            throw ValidationError("exogenous '" + e.name + "': probabilities sum to " + std::to_string(sum));
    }

    // compile mechanisms, checking totality
    compiled_.resize(endo_.size());
    for (int v = 0; v < n; ++v) {
        const auto& m = mechanism_by_var_[static_cast<std::size_t>(v)];
        auto& c = compiled_[static_cast<std::size_t>(v)];
        c.parent_vars.clear();
        c.exo_vars.clear();
        std::uint64_t rows = 1;
        std::vector<std::uint64_t> sizes;
        for (const auto& p : m.parents) {
            const int pi = endogenous_index(p);
            if (pi == v)
                throw ValidationError("variable '" + endo_[static_cast<std::size_t>(v)].first + "' lists itself as parent");
            c.parent_vars.push_back(pi);
            sizes.push_back(endo_[static_cast<std::size_t>(pi)].second.size());
        }
        for (const auto& e : m.exo_parents) {
            c.exo_vars.push_back(exogenous_index(e));
            sizes.push_back(exo_[static_cast<std::size_t>(c.exo_vars.back())].domain.size());
        }
        c.strides.assign(sizes.size(), 1);
        for (std::size_t i = sizes.size(); i-- > 0;) {
            if (i + 1 < sizes.size()) c.strides[i] = c.strides[i + 1] * sizes[i + 1];
            rows *= sizes[i];
        }
        if (m.table.size() != rows)
            throw ValidationError("mechanism for '" + endo_[static_cast<std::size_t>(v)].first + "': table has " +
                                  std::to_string(m.table.size()) + " entries, expected " + std::to_string(rows));
        const int dom = static_cast<int>(endo_[static_cast<std::size_t>(v)].second.size());
        for (int val : m.table)
            if (val < 0 || val >= dom)
                throw ValidationError("mechanism for '" + endo_[static_cast<std::size_t>(v)].first +
                                      "': table value out of domain");
    }

    // acyclicity over the endogenous parent graph (Kahn); name a cycle on failure
    std::vector<int> indeg(static_cast<std::size_t>(n), 0);
    std::vector<std::vector<int>> children(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v)
        for (int p : compiled_[static_cast<std::size_t>(v)].parent_vars) {
            children[static_cast<std::size_t>(p)].push_back(v);
            ++indeg[static_cast<std::size_t>(v)];
        }
    topo_order_.clear();
    std::vector<int> ready;
    for (int v = 0; v < n; ++v)
        if (indeg[static_cast<std::size_t>(v)] == 0) ready.push_back(v);
    while (!ready.empty()) {
        const int v = ready.back();
        ready.pop_back();
        topo_order_.push_back(v);
        for (int ch : children[static_cast<std::size_t>(v)])
            if (--indeg[static_cast<std::size_t>(ch)] == 0) ready.push_back(ch);
    }
    if (static_cast<int>(topo_order_.size()) != n) {
        std::vector<std::string> cycle;
        for (int v = 0; v < n; ++v)
            if (indeg[static_cast<std::size_t>(v)] > 0) cycle.push_back(endo_[static_cast<std::size_t>(v)].first);
        throw ValidationError("mechanism graph is cyclic through {" + join(cycle, ", ") + "}");
    }

    // descendants of the action variable
    descendant_of_action_.assign(static_cast<std::size_t>(n), false);
    for (int v : topo_order_) {
        if (v == action) continue;
        for (int p : compiled_[static_cast<std::size_t>(v)].parent_vars)
            if (p == action || descendant_of_action_[static_cast<std::size_t>(p)]) {
                descendant_of_action_[static_cast<std::size_t>(v)] = true;
                break;
            }
    }

    // roles
    role_index_ = RoleIndex{};
    role_index_.action_var = action;
    role_index_.action_count = endo_[static_cast<std::size_t>(action)].second.size();
    for (const auto& name : roles_.context) {
        const int v = endogenous_index(name);
        if (v == action) throw ValidationError("action variable cannot be in the context set");
        if (descendant_of_action_[static_cast<std::size_t>(v)])
            throw ValidationError("context variable '" + name + "' is a descendant of the action");
        role_index_.context_vars.push_back(v);
    }
    for (const auto& name : roles_.outcomes) {
        const int v = endogenous_index(name);
        if (v == action) throw ValidationError("action variable cannot be an outcome");
        if (!descendant_of_action_[static_cast<std::size_t>(v)])
            throw ValidationError("outcome variable '" + name + "' is not a descendant of the action");
        role_index_.outcome_vars.push_back(v);
    }
    for (const auto& name : roles_.context)
        for (const auto& other : roles_.outcomes)
            if (name == other) throw ValidationError("variable '" + name + "' is both context and outcome");

    auto build_strides = [&](const std::vector<int>& vars, std::vector<std::uint64_t>& strides,
                             std::uint64_t& count) {
        strides.assign(vars.size(), 1);
        count = 1;
        for (std::size_t i = vars.size(); i-- > 0;) {
            if (i + 1 < vars.size())
                strides[i] = strides[i + 1] * endo_[static_cast<std::size_t>(vars[i + 1])].second.size();
            count *= endo_[static_cast<std::size_t>(vars[i])].second.size();
        }
    };
    build_strides(role_index_.context_vars, role_index_.context_strides_, role_index_.context_count);
    build_strides(role_index_.outcome_vars, role_index_.outcome_strides_, role_index_.outcome_count);

    // default policy may only read the declared context
    for (int p : compiled_[static_cast<std::size_t>(action)].parent_vars) {
        if (std::find(role_index_.context_vars.begin(), role_index_.context_vars.end(), p) ==
            role_index_.context_vars.end())
            throw ValidationError("default policy parent '" + endo_[static_cast<std::size_t>(p)].first +
                                  "' is not a declared context variable");
    }

    // state-space bounds
    noise_strides_.assign(exo_.size(), 1);
    noise_count_ = 1;
    for (std::size_t i = exo_.size(); i-- > 0;) {
        if (i + 1 < exo_.size()) noise_strides_[i] = noise_strides_[i + 1] * exo_[i + 1].domain.size();
        if (noise_count_ > kMaxStates / exo_[i].domain.size())
            throw CapacityError("exogenous joint exceeds 2^24 states");
        noise_count_ *= exo_[i].domain.size();
    }
    endo_strides_.assign(endo_.size(), 1);
    endo_joint_count_ = 1;
    for (std::size_t i = endo_.size(); i-- > 0;) {
        if (i + 1 < endo_.size()) endo_strides_[i] = endo_strides_[i + 1] * endo_[i + 1].second.size();
        if (endo_joint_count_ > kMaxStates / endo_[i].second.size())
            throw CapacityError("endogenous joint exceeds 2^24 states");
        endo_joint_count_ *= endo_[i].second.size();
    }
}

int DiscreteScm::endogenous_index(std::string_view name) const {
    for (std::size_t i = 0; i < endo_.size(); ++i)
        if (endo_[i].first == name) return static_cast<int>(i);
    throw ValidationError("unknown endogenous variable '" + std::string(name) + "'");
}

int DiscreteScm::exogenous_index(std::string_view name) const {
    for (std::size_t i = 0; i < exo_.size(); ++i)
        if (exo_[i].name == name) return static_cast<int>(i);
    throw ValidationError("unknown exogenous variable '" + std::string(name) + "'");
}

const Mechanism& DiscreteScm::mechanism_of(std::string_view endo_name) const {
    return mechanism_by_var_[static_cast<std::size_t>(endogenous_index(endo_name))];
}

const Domain& DiscreteScm::action_domain() const {
    return endo_[static_cast<std::size_t>(role_index_.action_var)].second;
}

DiscreteScm DiscreteScm::with_default_policy(Mechanism policy) const {
    std::map<std::string, Mechanism> mechs;
    for (std::size_t i = 0; i < endo_.size(); ++i) {
        if (static_cast<int>(i) == role_index_.action_var) continue;
        mechs.emplace(endo_[i].first, mechanism_by_var_[i]);
    }
    return DiscreteScm(endo_, exo_, std::move(mechs), roles_, std::move(policy));
}

// ---------------------------------------------------------------------------
// exogenous joint

double DiscreteScm::noise_probability(std::uint64_t state) const {
    double p = 1.0;
    for (std::size_t i = 0; i < exo_.size(); ++i) {
        const auto v = (state / noise_strides_[i]) % exo_[i].domain.size();
        p *= exo_[i].probs[v];
    }
    return p;
}

Assignment DiscreteScm::noise_assignment(std::uint64_t state) const {
    Assignment out;
    for (std::size_t i = 0; i < exo_.size(); ++i) {
        const auto v = (state / noise_strides_[i]) % exo_[i].domain.size();
        out[exo_[i].name] = exo_[i].domain.label(static_cast<int>(v));
    }
    return out;
}

std::uint64_t DiscreteScm::noise_state_of(const Assignment& full_noise) const {
    std::uint64_t state = 0;
    for (std::size_t i = 0; i < exo_.size(); ++i) {
        auto it = full_noise.find(exo_[i].name);
        if (it == full_noise.end())
            throw ValidationError("missing noise value for '" + exo_[i].name + "'");
        state += noise_strides_[i] * static_cast<std::uint64_t>(exo_[i].domain.index_of(it->second));
    }
    return state;
}

// ---------------------------------------------------------------------------
// low-level evaluation

std::vector<int> DiscreteScm::compile_intervention(const Intervention& iv) const {
    std::vector<int> clamp(endo_.size(), -1);
    for (const auto& [name, value] : iv.targets) {
        const int v = endogenous_index(name);
        clamp[static_cast<std::size_t>(v)] = endo_[static_cast<std::size_t>(v)].second.index_of(value);
    }
    return clamp;
}

void DiscreteScm::decode_noise(std::uint64_t state, std::vector<int>& exo_values) const {
    exo_values.resize(exo_.size());
    for (std::size_t i = 0; i < exo_.size(); ++i)
        exo_values[i] = static_cast<int>((state / noise_strides_[i]) % exo_[i].domain.size());
}

void DiscreteScm::evaluate_indices(const std::vector<int>& exo_values, const std::vector<int>& clamp,
                                   std::vector<int>& endo_out) const {
    endo_out.resize(endo_.size());
    for (int v : topo_order_) {
        const auto vi = static_cast<std::size_t>(v);
        if (!clamp.empty() && clamp[vi] >= 0) {
            endo_out[vi] = clamp[vi];
            continue;
        }
        const auto& c = compiled_[vi];
        std::uint64_t row = 0;
        std::size_t k = 0;
        for (int p : c.parent_vars) row += c.strides[k++] * static_cast<std::uint64_t>(endo_out[static_cast<std::size_t>(p)]);
        for (int e : c.exo_vars) row += c.strides[k++] * static_cast<std::uint64_t>(exo_values[static_cast<std::size_t>(e)]);
        endo_out[vi] = mechanism_by_var_[vi].table[row];
    }
}

std::vector<std::pair<int, int>> DiscreteScm::compile_partial(const Assignment& partial) const {
    std::vector<std::pair<int, int>> out;
    out.reserve(partial.size());
    for (const auto& [name, value] : partial) {
        const int v = endogenous_index(name);
        out.emplace_back(v, endo_[static_cast<std::size_t>(v)].second.index_of(value));
    }
    return out;
}

// ---------------------------------------------------------------------------
// operations

WorldAssignment DiscreteScm::evaluate_world(const Assignment& noise, const Intervention& iv) const {
    const std::uint64_t state = noise_state_of(noise);  // errors on missing values
    std::vector<int> exo_values, endo_values;
    decode_noise(state, exo_values);
    evaluate_indices(exo_values, compile_intervention(iv), endo_values);

    WorldAssignment world;
    world.values = noise_assignment(state);
    for (std::size_t i = 0; i < endo_.size(); ++i)
        world.values[endo_[i].first] = endo_[i].second.label(endo_values[i]);
    return world;
}

JointDistribution DiscreteScm::interventional_distribution(const Intervention& iv,
                                                           const Assignment& condition) const {
    const auto clamp = compile_intervention(iv);
    const auto cond = compile_partial(condition);
    for (const auto& [var, val] : cond) {
        (void)val;
        if (descendant_of_action_[static_cast<std::size_t>(var)] || var == role_index_.action_var)
            throw ValidationError("condition variable '" + endo_[static_cast<std::size_t>(var)].first +
                                  "' is not a context (non-descendant) variable");
    }

    struct Acc {
        std::vector<double> probs;
        double mass = 0.0;
    };
    auto result = chunked_reduce<Acc>(
        noise_count_, Acc{std::vector<double>(endo_joint_count_, 0.0), 0.0},
        [&](std::uint64_t begin, std::uint64_t end) {
            Acc acc{std::vector<double>(endo_joint_count_, 0.0), 0.0};
            std::vector<int> exo_values, endo_values;
            for (std::uint64_t s = begin; s < end; ++s) {
                decode_noise(s, exo_values);
                evaluate_indices(exo_values, clamp, endo_values);
                bool ok = true;
                for (const auto& [var, val] : cond)
                    if (endo_values[static_cast<std::size_t>(var)] != val) { ok = false; break; }
                if (!ok) continue;
                const double p = noise_probability(s);
                std::uint64_t joint = 0;
                for (std::size_t i = 0; i < endo_.size(); ++i)
                    joint += endo_strides_[i] * static_cast<std::uint64_t>(endo_values[i]);
                acc.probs[joint] += p;
                acc.mass += p;
            }
            return acc;
        },
        [](Acc& into, const Acc& from) {
            for (std::size_t i = 0; i < into.probs.size(); ++i) into.probs[i] += from.probs[i];
            into.mass += from.mass;
        });

    if (!condition.empty()) {
        if (result.mass <= 0.0) throw ValidationError("zero-probability condition");
        for (double& p : result.probs) p /= result.mass;
    }
    return JointDistribution(endo_, std::move(result.probs));
}

double DiscreteScm::counterfactual_joint(const CounterfactualQuery& query) const {
    if (query.worlds.empty()) throw ValidationError("counterfactual query has no worlds");
    for (std::size_t i = 0; i < query.worlds.size(); ++i)
        for (std::size_t j = i + 1; j < query.worlds.size(); ++j)
            if (query.worlds[i].tag == query.worlds[j].tag)
                throw ValidationError("duplicate world tag '" + query.worlds[i].tag + "'");

    const std::size_t w = query.worlds.size();
    std::vector<std::vector<int>> clamps(w);
    std::vector<std::vector<std::pair<int, int>>> evidence(w), wanted(w);
    bool any_evidence = false;
    auto locate = [&](const std::string& tag) {
        for (std::size_t i = 0; i < w; ++i)
            if (query.worlds[i].tag == tag) return i;
        throw ValidationError("unknown world tag '" + tag + "'");
    };
    for (std::size_t i = 0; i < w; ++i) clamps[i] = compile_intervention(query.worlds[i].iv);
    for (const auto& [tag, part] : query.evidence) {
        evidence[locate(tag)] = compile_partial(part);
        if (!part.empty()) any_evidence = true;
    }
    for (const auto& [tag, part] : query.query) wanted[locate(tag)] = compile_partial(part);

    struct Acc {
        double num = 0.0, den = 0.0;
    };
    auto acc = chunked_reduce<Acc>(
        noise_count_, Acc{},
        [&](std::uint64_t begin, std::uint64_t end) {
            Acc a;
            std::vector<int> exo_values;
            std::vector<std::vector<int>> endo(w);
            for (std::uint64_t s = begin; s < end; ++s) {
                decode_noise(s, exo_values);
                bool ev_ok = true, q_ok = true;
                for (std::size_t i = 0; i < w; ++i) {
                    evaluate_indices(exo_values, clamps[i], endo[i]);
                    for (const auto& [var, val] : evidence[i])
                        if (endo[i][static_cast<std::size_t>(var)] != val) { ev_ok = false; break; }
                    if (!ev_ok) break;
                }
                if (!ev_ok) continue;
                for (std::size_t i = 0; i < w && q_ok; ++i)
                    for (const auto& [var, val] : wanted[i])
                        if (endo[i][static_cast<std::size_t>(var)] != val) { q_ok = false; break; }
                const double p = noise_probability(s);
                a.den += p;
                if (q_ok) a.num += p;
            }
            return a;
        },
        [](Acc& into, const Acc& from) {
            into.num += from.num;
            into.den += from.den;
        });

    if (!any_evidence) return acc.num;  // unconditional
    if (acc.den <= 0.0) throw ValidationError("evidence has zero probability");
    return acc.num / acc.den;
}

NoisePosterior DiscreteScm::posterior_over_noise(const Intervention& iv, const Assignment& evidence) const {
    const auto clamp = compile_intervention(iv);
    const auto ev = compile_partial(evidence);

    NoisePosterior post;
    double mass = 0.0;
    std::vector<int> exo_values, endo_values;
    for (std::uint64_t s = 0; s < noise_count_; ++s) {
        decode_noise(s, exo_values);
        evaluate_indices(exo_values, clamp, endo_values);
        bool ok = true;
        for (const auto& [var, val] : ev)
            if (endo_values[static_cast<std::size_t>(var)] != val) { ok = false; break; }
        if (!ok) continue;
        const double p = noise_probability(s);
        if (p > 0.0) {
            post.support.emplace_back(s, p);
            mass += p;
        }
    }
    if (evidence.empty()) return post;  // the prior, unchanged
    if (mass <= 0.0) throw ValidationError("evidence is inconsistent (zero probability)");
    for (auto& [state, p] : post.support) p /= mass;
    return post;
}

double DiscreteScm::cate(const std::string& treated, const std::string& control,
                         const Assignment& context, const std::vector<double>& outcome_value) const {
    if (outcome_value.size() != role_index_.outcome_count)
        throw ValidationError("outcome value map does not cover the outcome joint");
    const auto cond = compile_partial(context);

    auto expected = [&](const std::string& a) {
        const auto clamp = compile_intervention(Intervention::set(roles_.action, a));
        double num = 0.0, mass = 0.0;
        std::vector<int> exo_values, endo_values;
        for (std::uint64_t s = 0; s < noise_count_; ++s) {
            decode_noise(s, exo_values);
            evaluate_indices(exo_values, clamp, endo_values);
            bool ok = true;
            for (const auto& [var, val] : cond)
                if (endo_values[static_cast<std::size_t>(var)] != val) { ok = false; break; }
            if (!ok) continue;
            const double p = noise_probability(s);
            num += p * outcome_value[role_index_.outcome_index(endo_values)];
            mass += p;
        }
        if (mass <= 0.0) throw ValidationError("zero-probability condition");
        return num / mass;
    };
    return expected(treated) - expected(control);
}

double DiscreteScm::prob_necessity(const std::string& cause_var, const std::string& cause_value,
                                   const std::string& effect_var, const std::string& effect_value,
                                   const std::string& counter_cause, const std::string& counter_effect,
                                   CauseWorld cause_world) const {
    CounterfactualQuery q;
    Assignment factual_evidence;
    if (cause_world == CauseWorld::Observed) {
        q.worlds.push_back({"factual", Intervention::none()});
        factual_evidence[cause_var] = cause_value;
    } else {
        q.worlds.push_back({"factual", Intervention::set(cause_var, cause_value)});
    }
    factual_evidence[effect_var] = effect_value;
    q.worlds.push_back({"counterfactual", Intervention::set(cause_var, counter_cause)});
    q.evidence["factual"] = std::move(factual_evidence);
    q.query["counterfactual"] = {{effect_var, counter_effect}};
    return counterfactual_joint(q);
}

// ---------------------------------------------------------------------------
// role-shaped helpers

std::uint64_t DiscreteScm::context_joint_index(const Assignment& context) const {
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < role_index_.context_vars.size(); ++i) {
        const int v = role_index_.context_vars[i];
        auto it = context.find(endo_[static_cast<std::size_t>(v)].first);
        if (it == context.end())
            throw ValidationError("context assignment is missing '" + endo_[static_cast<std::size_t>(v)].first + "'");
        idx += role_index_.context_strides_[i] *
               static_cast<std::uint64_t>(endo_[static_cast<std::size_t>(v)].second.index_of(it->second));
    }
    return idx;
}

Assignment DiscreteScm::context_assignment(std::uint64_t context_index) const {
    Assignment out;
    for (std::size_t i = 0; i < role_index_.context_vars.size(); ++i) {
        const int v = role_index_.context_vars[i];
        const auto size = endo_[static_cast<std::size_t>(v)].second.size();
        const auto val = (context_index / role_index_.context_strides_[i]) % size;
        out[endo_[static_cast<std::size_t>(v)].first] =
            endo_[static_cast<std::size_t>(v)].second.label(static_cast<int>(val));
    }
    return out;
}

Assignment DiscreteScm::outcome_assignment(std::uint64_t outcome_index) const {
    Assignment out;
    for (std::size_t i = 0; i < role_index_.outcome_vars.size(); ++i) {
        const int v = role_index_.outcome_vars[i];
        const auto size = endo_[static_cast<std::size_t>(v)].second.size();
        const auto val = (outcome_index / role_index_.outcome_strides_[i]) % size;
        out[endo_[static_cast<std::size_t>(v)].first] =
            endo_[static_cast<std::size_t>(v)].second.label(static_cast<int>(val));
    }
    return out;
}

std::uint64_t DiscreteScm::outcome_joint_index(const Assignment& outcome) const {
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < role_index_.outcome_vars.size(); ++i) {
        const int v = role_index_.outcome_vars[i];
        auto it = outcome.find(endo_[static_cast<std::size_t>(v)].first);
        if (it == outcome.end())
            throw ValidationError("outcome assignment is missing '" + endo_[static_cast<std::size_t>(v)].first + "'");
        idx += role_index_.outcome_strides_[i] *
               static_cast<std::uint64_t>(endo_[static_cast<std::size_t>(v)].second.index_of(it->second));
    }
    return idx;
}

}  // namespace harmcalc
