#pragma once

#include "tailtest/harness/campaign.hpp"
#include "tailtest/ml_baseline.hpp"
#include "tailtest/tail_inference.hpp"

#include <json.hpp>

#include <ostream>
#include <string>

namespace tailtest::harness {

inline constexpr int kSchemaVersion = 1;

[[nodiscard]] nlohmann::json to_json(const TestReport& report);
[[nodiscard]] nlohmann::json to_json(const ConfidenceInterval& ci);
[[nodiscard]] nlohmann::json to_json(const OneStepEstimate& estimate);
[[nodiscard]] nlohmann::json to_json(const LrResult& lr);
/// Wall time is left out unless asked for, so repeated runs print identical bytes.
[[nodiscard]] nlohmann::json to_json(const CampaignResult& result, bool include_timing = false);

/// Append one report row, writing the header first when the file is new or empty.
void append_report_csv(const std::string& path, const TestReport& report);

void write_campaign_csv(std::ostream& out, const CampaignResult& result);

}  // namespace tailtest::harness
