#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "moneychain/dynamics.hpp"
#include "moneychain/engine.hpp"
#include "moneychain/graph.hpp"

namespace moneychain::cli {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimulateCommand {
  SimParams params;
  std::filesystem::path out;                    // histogram CSV
  std::optional<std::filesystem::path> report;  // SimReport JSON
};

struct ExactCommand {
  ModelKind model = ModelKind::Reshuffle;
  std::int64_t n = 0;
  Coins m = 0;
  std::filesystem::path out;
};

struct VerifyCommand {
  std::vector<ModelKind> models;
  std::vector<GraphFamily> graphs;
  std::optional<GraphSpec> edge_list;  // replaces the family sweep when set
  std::int64_t n_min = 2;
  std::int64_t n_max = 4;
  Coins m_min = 0;
  Coins m_max = 6;
  std::filesystem::path out;
};

struct SweepCommand {
  std::vector<ModelKind> models;
  std::vector<GraphFamily> graphs;
  std::vector<std::size_t> ns;
  std::vector<Coins> coins_per_vertex;
  std::uint64_t steps = 0;
  std::uint64_t seed = 0;
  std::uint64_t burn_in = 0;
  std::uint64_t sample_every = 0;
  unsigned jobs = 1;
  std::filesystem::path out_dir;
};

/// Thrown by parse_args for --help; carries the rendered help text.
struct HelpRequested {
  std::string text;
};

using Command = std::variant<SimulateCommand, ExactCommand, VerifyCommand, SweepCommand>;

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitInvalid = 2;

/// argv excludes the program name. Throws UsageError naming the bad flag.
Command parse_args(const std::vector<std::string>& args);

/// Runs a parsed command; diagnostics go to `diag`.
int execute(const Command& cmd, std::ostream& diag);

/// parse_args + execute with the exit-code mapping; what main() calls.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& diag);

}  // namespace moneychain::cli
