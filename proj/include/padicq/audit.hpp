#pragma once

#include <json.hpp>

#include <optional>
#include <string>

namespace padicq {

/// One identity check: two independently computed sides and the valuation of their difference.
struct AuditReport {
    std::string identity;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    std::string lhs;
    std::string rhs;
    long diff_valuation = 0;
    long target = 0;
    /// Absent for report-only identities.
    std::optional<bool> verdict;
    /// Identity-specific fields, appended after the common ones.
    nlohmann::ordered_json extra = nlohmann::ordered_json::object();

    bool gating() const { return verdict.has_value(); }
    bool passed() const { return verdict.value_or(true); }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["identity"] = identity;
        j["params"] = params;
        j["lhs"] = lhs;
        j["rhs"] = rhs;
        j["diff_valuation"] = diff_valuation;
        j["target"] = target;
        if (verdict) j["verdict"] = *verdict ? "PASS" : "FAIL";
        for (const auto& [k, v] : extra.items()) j[k] = v;
        return j;
    }
};

}  // namespace padicq
