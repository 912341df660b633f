#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "harmcalc/dose_response.hpp"
#include "harmcalc/scm.hpp"
#include "harmcalc/utility.hpp"

namespace harmcalc {

struct LoadedModel {
    DiscreteScm scm;
    UtilityTable utility;
    std::optional<Objective> objective;
};

/// Model-file schema:
///   variables     [{name, domain: [labels]}]            endogenous, ordered
///   exogenous     [{name, domain: [labels], probs}]
///   mechanisms    {var: {parents, exo, table}}          exo: name or list
///   roles         {action, context, outcomes}
///   default_policy {parents, exo, table}                the action mechanism
///   utility       {"a|x1,..|y1,..": number}             total over roles
///   objective     same shape as utility (optional)
/// Mechanism tables are keyed by parent values then exo values joined by
/// '|'; utility keys join context and outcome value groups with ','.
LoadedModel parse_model(const nlohmann::json& doc);
LoadedModel load_model(const std::string& path);

nlohmann::json export_model(const DiscreteScm& scm, const UtilityTable& utility,
                            const Objective* objective = nullptr);
void save_model(const std::string& path, const DiscreteScm& scm, const UtilityTable& utility,
                const Objective* objective = nullptr);

/// The "a|x|y" key for one (action, context joint, outcome joint) cell.
std::string utility_key(const DiscreteScm& scm, std::size_t action, std::uint64_t context,
                        std::uint64_t outcome);

/// 12-significant-digit decimal formatting used in every CSV.
std::string format_number(double value);

/// `#`-prefixed metadata lines, then the pinned header and rows.
void write_dose_csv(std::ostream& out, const DoseGrid& grid,
                    const std::vector<std::pair<std::string, std::string>>& metadata);
void write_tradeoff_csv(std::ostream& out, const std::vector<TradeoffRow>& rows,
                        const std::vector<std::pair<std::string, std::string>>& metadata);

/// Generic CSV table with metadata comments; used for demonstration records.
void write_table_csv(std::ostream& out, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows,
                     const std::vector<std::pair<std::string, std::string>>& metadata);

}  // namespace harmcalc
