#include "harmcalc/model_io.hpp"

#include <cstdio>
#include <fstream>

namespace harmcalc {

using nlohmann::json;

namespace {

std::string join_values(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

const json& require(const json& doc, const char* key, const std::string& path) {
    auto it = doc.find(key);
    if (it == doc.end()) throw ValidationError(path + ": missing key '" + key + "'");
    return *it;
}

Domain parse_domain(const json& arr, const std::string& path) {
    if (!arr.is_array() || arr.empty())
        throw ValidationError(path + ": domain must be a non-empty array of labels");
    std::vector<std::string> labels;
    for (const auto& v : arr) {
        if (!v.is_string()) throw ValidationError(path + ": domain labels must be strings");
        labels.push_back(v.get<std::string>());
    }
    return Domain(std::move(labels));
}

std::vector<std::string> parse_name_list(const json& value, const std::string& path) {
    std::vector<std::string> out;
    if (value.is_string()) {
        out.push_back(value.get<std::string>());
    } else if (value.is_array()) {
        for (const auto& v : value) {
            if (!v.is_string()) throw ValidationError(path + ": names must be strings");
            out.push_back(v.get<std::string>());
        }
    } else {
        throw ValidationError(path + ": expected a name or list of names");
    }
    return out;
}

struct DomainLookup {
    const std::vector<std::pair<std::string, Domain>>* endo;
    const std::vector<ExogenousSpec>* exo;

    const Domain& endogenous(const std::string& name, const std::string& path) const {
        for (const auto& [n, d] : *endo)
            if (n == name) return d;
        throw ValidationError(path + ": unknown endogenous variable '" + name + "'");
    }
    const Domain& exogenous(const std::string& name, const std::string& path) const {
        for (const auto& e : *exo)
            if (e.name == name) return e.domain;
        throw ValidationError(path + ": unknown exogenous variable '" + name + "'");
    }
};

Mechanism parse_mechanism(const json& doc, const std::string& child, const Domain& child_domain,
                          const DomainLookup& lookup, const std::string& path) {
    if (!doc.is_object()) throw ValidationError(path + ": expected an object");
    Mechanism m;
    if (doc.contains("parents")) m.parents = parse_name_list(doc.at("parents"), path + ".parents");
    if (doc.contains("exo")) m.exo_parents = parse_name_list(doc.at("exo"), path + ".exo");

    std::vector<const Domain*> dims;
    for (const auto& p : m.parents) dims.push_back(&lookup.endogenous(p, path + ".parents"));
    for (const auto& e : m.exo_parents) dims.push_back(&lookup.exogenous(e, path + ".exo"));

    const json& table = require(doc, "table", path);
    if (!table.is_object()) throw ValidationError(path + ".table: expected an object keyed by parent values");

    std::uint64_t rows = 1;
    for (const auto* d : dims) rows *= d->size();
    m.table.assign(rows, -1);

    std::vector<std::size_t> idx(dims.size(), 0);
    for (std::uint64_t row = 0; row < rows; ++row) {
        std::vector<std::string> parts;
        for (std::size_t i = 0; i < dims.size(); ++i)
            parts.push_back(dims[i]->label(static_cast<int>(idx[i])));
        const std::string key = join_values(parts, '|');
        auto it = table.find(key);
        if (it == table.end())
            throw ValidationError(path + ".table: missing entry for '" + key + "' (variable '" + child +
                                  "')");
        if (!it->is_string()) throw ValidationError(path + ".table['" + key + "']: value must be a label");
        m.table[row] = child_domain.index_of(it->get<std::string>());
        for (std::size_t i = dims.size(); i-- > 0;) {
            if (++idx[i] < dims[i]->size()) break;
            idx[i] = 0;
        }
    }
    if (table.size() != rows)
        throw ValidationError(path + ".table: has " + std::to_string(table.size()) + " entries, expected " +
                              std::to_string(rows));
    return m;
}

std::vector<double> parse_role_table(const json& doc, const DiscreteScm& scm, const std::string& path) {
    if (!doc.is_object()) throw ValidationError(path + ": expected an object keyed by 'a|x|y'");
    const auto& ri = scm.role_index();
    std::vector<double> values(ri.action_count * ri.context_count * ri.outcome_count);
    std::size_t seen = 0;
    for (std::size_t a = 0; a < ri.action_count; ++a) {
        for (std::uint64_t x = 0; x < ri.context_count; ++x) {
            for (std::uint64_t y = 0; y < ri.outcome_count; ++y) {
                const std::string key = utility_key(scm, a, x, y);
                auto it = doc.find(key);
                if (it == doc.end()) throw ValidationError(path + ": missing entry for '" + key + "'");
                if (!it->is_number()) throw ValidationError(path + "['" + key + "']: value must be a number");
                values[(a * ri.context_count + x) * ri.outcome_count + y] = it->get<double>();
                ++seen;
            }
        }
    }
    if (doc.size() != seen)
        throw ValidationError(path + ": has " + std::to_string(doc.size()) + " entries, expected " +
                              std::to_string(seen));
    return values;
}

}  // namespace

std::string utility_key(const DiscreteScm& scm, std::size_t action, std::uint64_t context,
                        std::uint64_t outcome) {
    const auto& roles = scm.roles();
    const Assignment x = scm.context_assignment(context);
    const Assignment y = scm.outcome_assignment(outcome);
    std::vector<std::string> xs, ys;
    for (const auto& name : roles.context) xs.push_back(x.at(name));
    for (const auto& name : roles.outcomes) ys.push_back(y.at(name));
    return scm.action_domain().label(static_cast<int>(action)) + "|" + join_values(xs, ',') + "|" +
           join_values(ys, ',');
}

LoadedModel parse_model(const json& doc) {
    if (!doc.is_object()) throw ValidationError("$: model file must be a JSON object");

    std::vector<std::pair<std::string, Domain>> endo;
    for (const auto& v : require(doc, "variables", "$")) {
        endo.emplace_back(require(v, "name", "$.variables").get<std::string>(),
                          parse_domain(require(v, "domain", "$.variables"), "$.variables"));
    }

    std::vector<ExogenousSpec> exo;
    for (const auto& v : require(doc, "exogenous", "$")) {
        ExogenousSpec spec;
        spec.name = require(v, "name", "$.exogenous").get<std::string>();
        spec.domain = parse_domain(require(v, "domain", "$.exogenous"), "$.exogenous." + spec.name);
        const json& probs = require(v, "probs", "$.exogenous." + spec.name);
        if (!probs.is_array())
            throw ValidationError("$.exogenous." + spec.name + ".probs: expected an array");
        for (const auto& p : probs) spec.probs.push_back(p.get<double>());
        exo.push_back(std::move(spec));
    }

    DomainLookup lookup{&endo, &exo};

    const json& roles_doc = require(doc, "roles", "$");
    Roles roles;
    roles.action = require(roles_doc, "action", "$.roles").get<std::string>();
    if (roles_doc.contains("context")) roles.context = parse_name_list(roles_doc.at("context"), "$.roles.context");
    roles.outcomes = parse_name_list(require(roles_doc, "outcomes", "$.roles"), "$.roles.outcomes");

    std::map<std::string, Mechanism> mechanisms;
    const json& mech_doc = require(doc, "mechanisms", "$");
    for (const auto& [name, body] : mech_doc.items()) {
        mechanisms.emplace(name, parse_mechanism(body, name, lookup.endogenous(name, "$.mechanisms"),
                                                 lookup, "$.mechanisms." + name));
    }

    Mechanism policy = parse_mechanism(require(doc, "default_policy", "$"), roles.action,
                                       lookup.endogenous(roles.action, "$.default_policy"), lookup,
                                       "$.default_policy");

    DiscreteScm scm(std::move(endo), std::move(exo), std::move(mechanisms), std::move(roles),
                    std::move(policy));

    UtilityTable utility(scm, parse_role_table(require(doc, "utility", "$"), scm, "$.utility"));
    std::optional<Objective> objective;
    if (doc.contains("objective"))
        objective = Objective{UtilityTable(scm, parse_role_table(doc.at("objective"), scm, "$.objective"))};

    return LoadedModel{std::move(scm), std::move(utility), std::move(objective)};
}

LoadedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open model file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("model file '" + path + "': " + e.what());
    }
    return parse_model(doc);
}

namespace {

json export_mechanism(const DiscreteScm& scm, const std::string& child) {
    const Mechanism& m = scm.mechanism_of(child);
    const Domain& child_domain = scm.endogenous_domain(scm.endogenous_index(child));
    json out;
    out["parents"] = m.parents;
    out["exo"] = m.exo_parents;
    std::vector<const Domain*> dims;
    for (const auto& p : m.parents) dims.push_back(&scm.endogenous_domain(scm.endogenous_index(p)));
    for (const auto& e : m.exo_parents) dims.push_back(&scm.exogenous(scm.exogenous_index(e)).domain);

    json table = json::object();
    std::vector<std::size_t> idx(dims.size(), 0);
    for (std::size_t row = 0; row < m.table.size(); ++row) {
        std::vector<std::string> parts;
        for (std::size_t i = 0; i < dims.size(); ++i)
            parts.push_back(dims[i]->label(static_cast<int>(idx[i])));
        table[join_values(parts, '|')] = child_domain.label(m.table[row]);
        for (std::size_t i = dims.size(); i-- > 0;) {
            if (++idx[i] < dims[i]->size()) break;
            idx[i] = 0;
        }
    }
    out["table"] = std::move(table);
    return out;
}

json export_role_table(const DiscreteScm& scm, const UtilityTable& table) {
    json out = json::object();
    const auto& ri = scm.role_index();
    for (std::size_t a = 0; a < ri.action_count; ++a)
        for (std::uint64_t x = 0; x < ri.context_count; ++x)
            for (std::uint64_t y = 0; y < ri.outcome_count; ++y)
                out[utility_key(scm, a, x, y)] = table.at(a, x, y);
    return out;
}

}  // namespace

json export_model(const DiscreteScm& scm, const UtilityTable& utility, const Objective* objective) {
    json doc;
    doc["variables"] = json::array();
    for (std::size_t i = 0; i < scm.endogenous_count(); ++i)
        doc["variables"].push_back({{"name", scm.endogenous_name(static_cast<int>(i))},
                                    {"domain", scm.endogenous_domain(static_cast<int>(i)).labels()}});
    doc["exogenous"] = json::array();
    for (std::size_t i = 0; i < scm.exogenous_count(); ++i) {
        const auto& e = scm.exogenous(static_cast<int>(i));
        doc["exogenous"].push_back({{"name", e.name}, {"domain", e.domain.labels()}, {"probs", e.probs}});
    }
    doc["mechanisms"] = json::object();
    for (std::size_t i = 0; i < scm.endogenous_count(); ++i) {
        const auto& name = scm.endogenous_name(static_cast<int>(i));
        if (name == scm.roles().action) continue;
        doc["mechanisms"][name] = export_mechanism(scm, name);
    }
    doc["roles"] = {{"action", scm.roles().action},
                    {"context", scm.roles().context},
                    {"outcomes", scm.roles().outcomes}};
    doc["default_policy"] = export_mechanism(scm, scm.roles().action);
    doc["utility"] = export_role_table(scm, utility);
    if (objective) doc["objective"] = export_role_table(scm, objective->table);
    return doc;
}

void save_model(const std::string& path, const DiscreteScm& scm, const UtilityTable& utility,
                const Objective* objective) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write model file '" + path + "'");
    out << export_model(scm, utility, objective).dump(2) << '\n';
}

std::string format_number(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

namespace {

void write_metadata(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& metadata) {
    for (const auto& [key, value] : metadata) out << "# " << key << ": " << value << '\n';
}

}  // namespace

void write_dose_csv(std::ostream& out, const DoseGrid& grid,
                    const std::vector<std::pair<std::string, std::string>>& metadata) {
    write_metadata(out, metadata);
    out << "dose,expected_utility,expected_harm";
    for (const double lambda : grid.lambdas) out << ",hpu_lambda_" << format_number(lambda);
    out << '\n';
    for (const auto& row : grid.rows) {
        out << format_number(row.dose) << ',' << format_number(row.expected_utility) << ','
            << format_number(row.expected_harm);
        for (const double v : row.hpu) out << ',' << format_number(v);
        out << '\n';
    }
}

void write_tradeoff_csv(std::ostream& out, const std::vector<TradeoffRow>& rows,
                        const std::vector<std::pair<std::string, std::string>>& metadata) {
    write_metadata(out, metadata);
    out << "dose,relative_harm,relative_utility\n";
    for (const auto& row : rows)
        out << format_number(row.dose) << ',' << format_number(row.relative_harm) << ','
            << format_number(row.relative_utility) << '\n';
}

void write_table_csv(std::ostream& out, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows,
                     const std::vector<std::pair<std::string, std::string>>& metadata) {
    write_metadata(out, metadata);
    out << join_values(header, ',') << '\n';
    for (const auto& row : rows) out << join_values(row, ',') << '\n';
}

}  // namespace harmcalc
