#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace fairaudit {

inline constexpr const char* kToolName = "fairaudit";
inline constexpr const char* kToolVersion = "0.1.0";

// Provenance header embedded in every emitted report. No timestamps: two
// runs with equal input fingerprints produce byte-identical reports.
struct AuditRun {
  std::string command;  // re-running this reproduces the report
  nlohmann::json config = nlohmann::json::object();
  std::map<std::string, std::string> input_fingerprints;  // path -> hash
  std::vector<std::string> outputs;                       // files this run writes

  nlohmann::json to_json() const;
};

// Write-to-temp, rename-on-success: no partial outputs on error.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace fairaudit
