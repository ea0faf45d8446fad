#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "contam/aggregate.h"
#include "contam/stats.h"

namespace contam {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kResultSchemaVersion = 1;

struct ResultWriteOptions {
  // Wall time differs between otherwise identical runs, so it is left out
  // of result files unless asked for.
  bool include_timing = false;
};

// Non-finite doubles are written as the strings "Infinity", "-Infinity"
// and "NaN".
nlohmann::json to_json(const TestResult& result,
                       const ResultWriteOptions& options = {});
TestResult test_result_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AggregateResult& result);
AggregateResult aggregate_result_from_json(const nlohmann::json& j);

// Pretty-printed JSON plus a trailing newline. Throws ConfigError.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& text);

nlohmann::json json_double(double d);
double double_from_json(const nlohmann::json& j);

}  // namespace contam
