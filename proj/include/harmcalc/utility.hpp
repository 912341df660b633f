#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "harmcalc/scm.hpp"

namespace harmcalc {

/// Total numeric map U(a, x, y) over action value × context joint × outcome
/// joint of a model. Stored dense, row-major (a, x, y).
class UtilityTable {
public:
    UtilityTable(const DiscreteScm& scm, std::vector<double> values)
        : na_(scm.role_index().action_count),
          nx_(scm.role_index().context_count),
          ny_(scm.role_index().outcome_count),
          values_(std::move(values)) {
        if (values_.size() != na_ * nx_ * ny_)
            throw ValidationError("utility table has " + std::to_string(values_.size()) +
                                  " entries, expected " + std::to_string(na_ * nx_ * ny_));
        for (double v : values_)
            if (!std::isfinite(v)) throw ValidationError("utility table contains a non-finite value");
    }

    using Fn = std::function<double(const std::string& action, const Assignment& context,
                                    const Assignment& outcome)>;

    static UtilityTable from_function(const DiscreteScm& scm, const Fn& fn) {
        const auto& ri = scm.role_index();
        std::vector<double> values;
        values.reserve(ri.action_count * ri.context_count * ri.outcome_count);
        for (std::size_t a = 0; a < ri.action_count; ++a)
            for (std::uint64_t x = 0; x < ri.context_count; ++x)
                for (std::uint64_t y = 0; y < ri.outcome_count; ++y)
                    values.push_back(fn(scm.action_domain().label(static_cast<int>(a)),
                                        scm.context_assignment(x), scm.outcome_assignment(y)));
        return UtilityTable(scm, std::move(values));
    }

    double at(std::size_t action, std::uint64_t context, std::uint64_t outcome) const {
        return values_[(action * nx_ + context) * ny_ + outcome];
    }

    std::size_t action_count() const { return na_; }
    std::uint64_t context_count() const { return nx_; }
    std::uint64_t outcome_count() const { return ny_; }
    const std::vector<double>& raw() const { return values_; }

private:
    std::size_t na_;
    std::uint64_t nx_, ny_;
    std::vector<double> values_;
};

/// A factual objective J(a, x, y): same shape and contract as a utility
/// table, kept as a distinct type because it plays a different role.
struct Objective {
    UtilityTable table;
};

}  // namespace harmcalc
