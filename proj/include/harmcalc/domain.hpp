#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "harmcalc/errors.hpp"

namespace harmcalc {

/// A finite, ordered set of labeled values. Order is the declaration order and
/// is significant: it defines joint-state indexing and argmax tie-breaking.
class Domain {
public:
    Domain() = default;

    explicit Domain(std::vector<std::string> labels) : labels_(std::move(labels)) {
        if (labels_.empty()) throw ValidationError("domain must have at least one value");
        for (std::size_t i = 0; i < labels_.size(); ++i)
            for (std::size_t j = i + 1; j < labels_.size(); ++j)
                if (labels_[i] == labels_[j])
                    throw ValidationError("duplicate domain value '" + labels_[i] + "'");
    }

    std::size_t size() const { return labels_.size(); }

    const std::string& label(int index) const { return labels_.at(static_cast<std::size_t>(index)); }

    const std::vector<std::string>& labels() const { return labels_; }

    bool contains(std::string_view label) const {
        for (const auto& l : labels_)
            if (l == label) return true;
        return false;
    }

    int index_of(std::string_view label) const {
        for (std::size_t i = 0; i < labels_.size(); ++i)
            if (labels_[i] == label) return static_cast<int>(i);
        throw ValidationError("value '" + std::string(label) + "' is not in the domain");
    }

private:
    std::vector<std::string> labels_;
};

}  // namespace harmcalc
