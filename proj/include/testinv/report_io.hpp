#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "testinv/invariants.hpp"

namespace testinv::cli {

enum class OutputFormat { table, json };

/// 12-significant-digit rendering used for every floating-point bound.
std::string format_bound(double v);

nlohmann::json tau_report_json(const inv::InvariantReport& rep, const inv::BoundConstants& c);
std::string tau_report_table(const inv::InvariantReport& rep, const inv::BoundConstants& c);

nlohmann::json bounds_report_json(const inv::LowerBoundResult& lb, const inv::UpperBoundResult& ub,
                                  const inv::BoundConstants& c);
std::string bounds_report_table(const inv::LowerBoundResult& lb, const inv::UpperBoundResult& ub,
                                const inv::BoundConstants& c);

nlohmann::json defects_report_json(const inv::InvariantReport& rep);
std::string defects_report_table(const inv::InvariantReport& rep);

nlohmann::json classify_report_json(const inv::ClassifyResult& res, const Rat& threshold);
std::string classify_report_table(const inv::ClassifyResult& res, const Rat& threshold);

nlohmann::json level_fragment_json(const inv::LevelSpec& level);
/// Emitted as reusable instance-file `level ...` lines.
std::string level_fragment_text(const inv::LevelSpec& level);

struct OracleCheck {
    std::string name;
    std::string expected;
    std::string actual;
    bool pass = false;
};

nlohmann::json oracle_report_json(const std::vector<OracleCheck>& checks);
std::string oracle_report_table(const std::vector<OracleCheck>& checks);

/// Canonical byte rendering of a JSON report: sorted keys, two-space
/// indent, trailing newline. Golden files are compared against this.
std::string render_json(const nlohmann::json& j);

} // namespace testinv::cli
