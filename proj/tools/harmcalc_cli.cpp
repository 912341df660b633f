// harmcalc: counterfactual-harm queries over discrete SCM model files, the
// dose-response sweeps, adversarial shift constructions, and the built-in
// verification suite.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>

#include "harmcalc/adversary.hpp"
#include "harmcalc/dose_response.hpp"
#include "harmcalc/harm.hpp"
#include "harmcalc/model_io.hpp"
#include "harmcalc/model_zoo.hpp"
#include "harmcalc/verification.hpp"

using namespace harmcalc;

namespace {

Assignment parse_assignment(const std::vector<std::string>& pairs, const std::string& flag) {
    Assignment out;
    for (const auto& pair : pairs) {
        const auto eq = pair.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 >= pair.size())
            throw ValidationError(flag + ": expected name=value, got '" + pair + "'");
        out[pair.substr(0, eq)] = pair.substr(eq + 1);
    }
    return out;
}

std::vector<double> parse_number_list(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t next = text.find(',', pos);
        if (next == std::string::npos) next = text.size();
        const std::string token = text.substr(pos, next - pos);
        try {
            std::size_t used = 0;
            out.push_back(std::stod(token, &used));
            if (used != token.size()) throw std::invalid_argument(token);
        } catch (const std::exception&) {
            throw ValidationError(flag + ": '" + token + "' is not a number");
        }
        pos = next + 1;
    }
    return out;
}

DoseGridSpec parse_grid(const std::string& text) {
    DoseGridSpec grid;
    if (text.empty()) return grid;
    const auto first = text.find(':');
    const auto second = text.find(':', first + 1);
    if (first == std::string::npos || second == std::string::npos)
        throw ValidationError("--grid: expected min:max:step");
    try {
        grid.min = std::stod(text.substr(0, first));
        grid.max = std::stod(text.substr(first + 1, second - first - 1));
        grid.step = std::stod(text.substr(second + 1));
    } catch (const std::exception&) {
        throw ValidationError("--grid: expected min:max:step with numeric fields");
    }
    grid.validate();
    return grid;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    return out;
}

std::string sibling_path(const std::string& path, const std::string& suffix) {
    const auto dot = path.rfind('.');
    if (dot == std::string::npos || path.find('/', dot) != std::string::npos)
        return path + suffix;
    return path.substr(0, dot) + suffix + path.substr(dot);
}

// arguments shared by the query subcommands
struct QueryArgs {
    std::string model_path;
    std::vector<std::string> context;
    std::string action;
    std::vector<std::string> outcome;
    std::string lambdas;
};

void add_model_option(CLI::App* cmd, std::string& path) {
    cmd->add_option("--model", path, "model file (JSON)")->required();
}

ActionOutcomeUtility single_context_utility(const DiscreteScm& scm, const UtilityTable& table,
                                            const std::string& what) {
    if (scm.role_index().context_count != 1)
        throw ValidationError(what + " requires a model with an empty context set");
    if (scm.roles().outcomes.size() != 1)
        throw ValidationError(what + " requires a model with a single outcome variable");
    const auto& outcomes = scm.endogenous_domain(scm.endogenous_index(scm.roles().outcomes[0]));
    std::vector<double> values;
    for (std::size_t a = 0; a < scm.action_domain().size(); ++a)
        for (std::size_t y = 0; y < outcomes.size(); ++y) values.push_back(table.at(a, 0, y));
    return ActionOutcomeUtility(scm.action_domain(), outcomes, values);
}

int run_verify(std::uint64_t seed) {
    const auto results = run_verification_suite(seed);
    int failures = 0;
    for (const auto& check : results) {
        std::cout << (check.pass ? "OK   " : "FAIL ") << check.name;
        if (!check.pass) std::cout << ": " << check.detail;
        std::cout << '\n';
        if (!check.pass) ++failures;
    }
    std::cout << (results.size() - failures) << "/" << results.size() << " checks passed\n";
    return failures == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"counterfactual harm computation engine"};
    app.require_subcommand(1);

    QueryArgs args;
    std::string out_path, grid_text, betas_text, seed_text;
    std::uint64_t seed = 20240805;
    std::uint64_t samples = 1000000;

    auto* harm_cmd = app.add_subcommand("harm", "pointwise harm/benefit of an action given an outcome");
    add_model_option(harm_cmd, args.model_path);
    harm_cmd->add_option("--context", args.context, "context assignment, name=value");
    harm_cmd->add_option("--action", args.action, "action value")->required();
    harm_cmd->add_option("--outcome", args.outcome, "observed outcome, name=value")->required();

    auto* expected_cmd = app.add_subcommand("expected", "expected harm/benefit per action");
    add_model_option(expected_cmd, args.model_path);
    expected_cmd->add_option("--context", args.context, "context assignment, name=value");
    expected_cmd->add_option("--lambda", args.lambdas, "harm-aversion values, comma separated");

    auto* policy_cmd = app.add_subcommand("policy", "HPU-optimal action per harm aversion");
    add_model_option(policy_cmd, args.model_path);
    policy_cmd->add_option("--context", args.context, "context assignment, name=value");
    policy_cmd->add_option("--lambda", args.lambdas, "harm-aversion values, comma separated");

    std::string treated, control;
    auto* cate_cmd = app.add_subcommand("cate", "conditional average treatment effect");
    add_model_option(cate_cmd, args.model_path);
    cate_cmd->add_option("--context", args.context, "context assignment, name=value");
    cate_cmd->add_option("--treated", treated, "treated action value")->required();
    cate_cmd->add_option("--control", control, "control action value")->required();

    std::string cause, effect, counter_cause, counter_effect, cause_world = "observed";
    auto* pn_cmd = app.add_subcommand("pn", "counterfactual probability of necessity");
    add_model_option(pn_cmd, args.model_path);
    pn_cmd->add_option("--cause", cause, "cause, name=value")->required();
    pn_cmd->add_option("--effect", effect, "effect, name=value")->required();
    pn_cmd->add_option("--counter-cause", counter_cause, "counterfactual cause value")->required();
    pn_cmd->add_option("--counter-effect", counter_effect, "counterfactual effect value")->required();
    pn_cmd->add_option("--cause-world", cause_world, "observed|intervened (default observed)");

    auto* dose_cmd = app.add_subcommand("dose", "dose-response sweep and trade-off CSVs");
    dose_cmd->add_option("--lambda", args.lambdas, "harm-aversion values (default 0,10,100)");
    dose_cmd->add_option("--beta", betas_text, "risk aversions for the shifted-model analysis");
    dose_cmd->add_option("--grid", grid_text, "dose grid min:max:step (default 0:30:0.1)");
    dose_cmd->add_option("--out", out_path, "output CSV path")->required();

    std::string a0, a1, a2;
    auto* adv_cmd = app.add_subcommand("adversary", "construct harmful-objective witnesses");
    add_model_option(adv_cmd, args.model_path);
    adv_cmd->add_option("--a0", a0, "default action value")->required();
    adv_cmd->add_option("--action", a1, "shifted action value")->required();
    adv_cmd->add_option("--a2", a2, "second action: build the factual-objective witness");
    adv_cmd->add_option("--out", out_path, "witness model JSON path")->required();

    std::string zoo_name;
    auto* zoo_cmd = app.add_subcommand("zoo", "canned models and their published numbers");
    zoo_cmd->add_option("name", zoo_name, "treatment|assistant|preemption")->required();
    zoo_cmd->add_option("--lambda", args.lambdas, "assistant harm/risk aversions");
    zoo_cmd->add_option("--out", out_path, "export the model file");

    auto* verify_cmd = app.add_subcommand("verify", "run the full invariant suite");
    verify_cmd->add_option("--seed", seed, "verification seed");

    // accepted everywhere for reproducibility metadata
    app.add_option("--seed", seed_text, "")->group("");
    app.add_option("--samples", samples, "")->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(harm_cmd)) {
            const auto loaded = load_model(args.model_path);
            const auto context = parse_assignment(args.context, "--context");
            const auto outcome = parse_assignment(args.outcome, "--outcome");
            std::cout << "harm: "
                      << format_number(harm(loaded.scm, loaded.utility, args.action, context, outcome))
                      << '\n'
                      << "benefit: "
                      << format_number(benefit(loaded.scm, loaded.utility, args.action, context, outcome))
                      << '\n';
        } else if (app.got_subcommand(expected_cmd) || app.got_subcommand(policy_cmd)) {
            const auto loaded = load_model(args.model_path);
            const auto context = parse_assignment(args.context, "--context");
            auto lambdas = args.lambdas.empty() ? std::vector<double>{0.0}
                                                : parse_number_list(args.lambdas, "--lambda");
            for (const double lambda : lambdas) {
                const auto chosen = hpu_optimal_action(loaded.scm, loaded.utility, lambda, context);
                std::cout << "lambda " << format_number(lambda) << ":\n";
                std::cout << "  default expected utility: "
                          << format_number(chosen.report.default_expected_utility) << '\n';
                for (const auto& row : chosen.report.rows) {
                    std::cout << "  action " << row.action << ": E[U]="
                              << format_number(row.expected_utility)
                              << " E[h]=" << format_number(row.expected_harm)
                              << " E[b]=" << format_number(row.expected_benefit)
                              << " hpu=" << format_number(row.hpu) << '\n';
                }
                std::cout << "  decomposition residual: "
                          << format_number(chosen.report.decomposition_residual()) << '\n';
                if (app.got_subcommand(policy_cmd))
                    std::cout << "  optimal action: " << chosen.action << '\n';
            }
        } else if (app.got_subcommand(cate_cmd)) {
            const auto loaded = load_model(args.model_path);
            const auto context = parse_assignment(args.context, "--context");
            if (loaded.scm.roles().outcomes.size() != 1)
                throw ValidationError("cate requires a single outcome variable");
            const auto& dom = loaded.scm.endogenous_domain(
                loaded.scm.endogenous_index(loaded.scm.roles().outcomes[0]));
            std::vector<double> value;
            for (std::size_t y = 0; y < dom.size(); ++y) {
                try {
                    value.push_back(std::stod(dom.label(static_cast<int>(y))));
                } catch (const std::exception&) {
                    throw ValidationError("cate requires numeric outcome labels; found '" +
                                          dom.label(static_cast<int>(y)) + "'");
                }
            }
            std::cout << "cate: "
                      << format_number(loaded.scm.cate(treated, control, context, value)) << '\n';
        } else if (app.got_subcommand(pn_cmd)) {
            const auto loaded = load_model(args.model_path);
            const auto cause_kv = parse_assignment({cause}, "--cause");
            const auto effect_kv = parse_assignment({effect}, "--effect");
            if (cause_world != "observed" && cause_world != "intervened")
                throw ValidationError("--cause-world must be observed or intervened");
            const double pn = loaded.scm.prob_necessity(
                cause_kv.begin()->first, cause_kv.begin()->second, effect_kv.begin()->first,
                effect_kv.begin()->second, counter_cause, counter_effect,
                cause_world == "observed" ? DiscreteScm::CauseWorld::Observed
                                          : DiscreteScm::CauseWorld::Intervened);
            std::cout << "pn: " << format_number(pn) << '\n';
        } else if (app.got_subcommand(dose_cmd)) {
            const auto grid_spec = parse_grid(grid_text);
            auto lambdas = args.lambdas.empty() ? std::vector<double>{0.0, 10.0, 100.0}
                                                : parse_number_list(args.lambdas, "--lambda");
            const GamParams params;
            const auto grid = dose_sweep(params, grid_spec, lambdas);
            std::vector<std::pair<std::string, std::string>> metadata = {
                {"model", "aripiprazole dose-response GAM"},
                {"grid", format_number(grid_spec.min) + ":" + format_number(grid_spec.max) + ":" +
                             format_number(grid_spec.step)},
                {"default", "dose 0"}};
            auto out = open_out(out_path);
            write_dose_csv(out, grid, metadata);
            const auto tradeoff_path = sibling_path(out_path, "_tradeoff");
            auto tout = open_out(tradeoff_path);
            write_tradeoff_csv(tout, tradeoff_curve(params, grid_spec), metadata);
            for (const double lambda : lambdas)
                std::cout << "optimal dose (lambda " << format_number(lambda)
                          << "): " << format_number(optimal_dose(lambda, params, grid_spec)) << '\n';
            std::cout << "wrote " << out_path << " and " << tradeoff_path << '\n';
            if (!betas_text.empty()) {
                const auto betas = parse_number_list(betas_text, "--beta");
                const auto report = shifted_model_analysis(params, betas, lambdas, grid_spec);
                std::cout << "shifted model: mu argmax " << format_number(report.mu_argmax_dose)
                          << '\n';
                for (const auto& row : report.lambda_rows)
                    std::cout << "  lambda " << format_number(row.lambda) << ": hpu argmax "
                              << format_number(row.hpu_argmax_dose)
                              << (row.equals_mu_argmax ? " (= mu argmax)" : " (!= mu argmax)") << '\n';
                for (const auto& row : report.beta_rows)
                    std::cout << "  beta " << format_number(row.beta) << ": risk argmax "
                              << format_number(row.risk_argmax_dose)
                              << (row.needlessly_harmful ? " needlessly harmful" : " not flagged")
                              << '\n';
            }
        } else if (app.got_subcommand(adv_cmd)) {
            const auto loaded = load_model(args.model_path);
            const auto util = single_context_utility(loaded.scm, loaded.utility, "adversary");
            std::vector<std::vector<std::string>> rows;
            if (a2.empty()) {
                const auto witness = theorem3_witness(util, a0, a1);
                const auto scm = cfi_to_scm(witness.model);
                const auto table = cfi_utility_table(scm, util);
                save_model(out_path, scm, table);
                rows.push_back({"action", "expected_utility", "expected_harm"});
                for (const auto& name : {a0, a1})
                    rows.push_back({name, format_number(cfi_expected_utility(witness.model, util, name)),
                                    format_number(cfi_expected_harm(witness.model, util, name))});
                std::cout << "utility objective "
                          << (witness.flag.flagged ? "IS harmful" : "is not harmful")
                          << " in the witness environment (witness action "
                          << witness.flag.witness.value_or("-") << ")\n";
            } else {
                if (!loaded.objective)
                    throw ValidationError("the factual-objective witness needs an 'objective' table");
                const auto objective =
                    single_context_utility(loaded.scm, loaded.objective->table, "adversary");
                const auto witness = theorem4_witness(util, objective, a0, a1, a2);
                const auto scm = cfi_to_scm(witness.environment == "M+" ? witness.family.increased
                                                                        : witness.family.decreased);
                const auto table = cfi_utility_table(scm, util);
                save_model(out_path, scm, table);
                rows.push_back({"candidate", "expected_utility", "expected_objective", "harm_base",
                                "harm_increased", "harm_decreased"});
                for (const auto& cand : witness.candidates)
                    rows.push_back({cand.name, format_number(cand.expected_utility),
                                    format_number(cand.expected_objective),
                                    format_number(cand.harm_base), format_number(cand.harm_increased),
                                    format_number(cand.harm_decreased)});
                std::cout << "objective maximizer '" << witness.maximizer << "' is "
                          << (witness.flagged ? "needlessly harmful" : "not flagged") << " in "
                          << witness.environment << " (alternative " << witness.witness_alternative
                          << ", mixture weight "
                          << format_number(witness.used_mixture ? witness.mixture_weight : 1.0)
                          << ")\n";
            }
            const auto demo_path = sibling_path(out_path, "_demo") + ".csv";
            auto demo = open_out(demo_path);
            write_table_csv(demo, rows.front(), {rows.begin() + 1, rows.end()},
                            {{"source", "harmcalc adversary"}});
            std::cout << "wrote " << out_path << " and " << demo_path << '\n';
        } else if (app.got_subcommand(zoo_cmd)) {
            if (zoo_name == "treatment") {
                const auto model = treatment_model();
                const auto report = harm_report(model.scm, model.utility, 1.0, {});
                std::cout << "default expected utility: "
                          << format_number(report.default_expected_utility) << '\n';
                for (const auto& row : report.rows)
                    std::cout << "treatment " << row.action << ": E[Y]="
                              << format_number(row.expected_utility)
                              << " expected_harm=" << format_number(row.expected_harm)
                              << " expected_benefit=" << format_number(row.expected_benefit) << '\n';
                if (!out_path.empty()) save_model(out_path, model.scm, model.utility);
            } else if (zoo_name == "assistant") {
                auto lambdas = args.lambdas.empty() ? std::vector<double>{1.0, 5.0, 11.0, 13.0, 20.0}
                                                    : parse_number_list(args.lambdas, "--lambda");
                const auto eu = assistant_decision(AssistantAgent::ExpectedUtility, 0.0);
                std::cout << "expected-utility agent: action " << eu.action << " K="
                          << format_number(eu.multiplier) << '\n';
                for (const double lambda : lambdas) {
                    const auto risk = assistant_decision(AssistantAgent::RiskAverse, lambda);
                    const auto averse = assistant_decision(AssistantAgent::HarmAverse, lambda);
                    std::cout << "lambda " << format_number(lambda) << ": risk-averse action "
                              << risk.action << " (K=" << format_number(risk.multiplier)
                              << "), harm-averse action " << averse.action
                              << " (K=" << format_number(averse.multiplier) << ")\n";
                }
            } else if (zoo_name == "preemption") {
                const auto mdp = preemption_mdp();
                const Assignment ctx{{"B0", "1"}, {"F", "1"}};
                std::cout << "expected harm of shooting: " << format_number(preemption_harm()) << '\n';
                std::cout << "expected harm of holding fire: "
                          << format_number(expected_harm(mdp.scm, mdp.utility, "0", ctx)) << '\n';
                std::cout << "expected utility drop: "
                          << format_number(default_expected_utility(mdp.scm, mdp.utility, ctx) -
                                           expected_utility(mdp.scm, mdp.utility, "1", ctx))
                          << '\n';
                if (!out_path.empty()) save_model(out_path, mdp.scm, mdp.utility);
            } else {
                throw ValidationError("unknown zoo model '" + zoo_name +
                                      "' (treatment|assistant|preemption)");
            }
        } else if (app.got_subcommand(verify_cmd)) {
            return run_verify(seed);
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const CapacityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
