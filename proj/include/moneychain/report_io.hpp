#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "moneychain/engine.hpp"
#include "moneychain/exact.hpp"

namespace moneychain {

/// Shortest round-trip decimal form.
std::string format_double(double v);

/// Header `coins,count,frequency,exact,asymptotic`; one row per coin value
/// that was observed at least once.
std::string histogram_csv(const SimReport& report, const ExactMarginal& exact);

/// Header `coins,exact,asymptotic`; one row per c = 0..M.
std::string marginal_csv(const ExactMarginal& m, ModelKind model);

nlohmann::json sim_report_json(const SimReport& report);
nlohmann::json sim_params_json(const SimParams& p);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Minimal reader for the comma-separated files written above.
CsvTable parse_csv(const std::string& text);

/// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace moneychain
