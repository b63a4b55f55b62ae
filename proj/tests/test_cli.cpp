#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "moneychain/cli.hpp"
#include "moneychain/report_io.hpp"

using namespace moneychain;
using namespace moneychain::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("moneychain_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::vector<std::string>& args, std::string* diag_out = nullptr) {
  std::ostringstream out, diag;
  const int code = run(args, out, diag);
  if (diag_out) *diag_out = diag.str();
  return code;
}

std::string usage_message(const std::vector<std::string>& args) {
  try {
    parse_args(args);
  } catch (const UsageError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("parse simulate") {
  const auto cmd = parse_args({"simulate", "--model", "exchange", "--graph", "cycle", "--n", "10",
                               "--coins-per-vertex", "5", "--steps", "1000", "--seed", "42", "--out", "h.csv",
                               "--burn-in", "10", "--sample-every", "3"});
  const auto& s = std::get<SimulateCommand>(cmd);
  CHECK(s.params.model == ModelKind::Exchange);
  CHECK(s.params.graph.family == GraphFamily::Cycle);
  CHECK(s.params.graph.n == 10);
  CHECK(s.params.init.kind == InitSpec::Kind::Equal);
  CHECK(s.params.init.per_vertex == 5);
  CHECK(s.params.steps == 1000);
  CHECK(s.params.seed == 42);
  CHECK(s.params.burn_in == 10);
  CHECK(s.params.sample_every == 3);
  CHECK(s.out == "h.csv");
  CHECK_FALSE(s.report.has_value());

  const auto at = std::get<SimulateCommand>(parse_args({"simulate", "--model", "saving", "--graph", "star", "--n",
                                                        "4", "--init-at-vertex", "2", "--m", "9", "--steps", "1",
                                                        "--seed", "0", "--out", "x"}));
  CHECK(at.params.init.kind == InitSpec::Kind::AllAtVertex);
  CHECK(at.params.init.vertex == 2);
  CHECK(at.params.init.total == 9);

  const auto cu = std::get<SimulateCommand>(parse_args({"simulate", "--model", "reshuffle", "--graph", "path",
                                                        "--n", "3", "--init-custom", "1,0,4", "--steps", "1",
                                                        "--seed", "0", "--out", "x"}));
  CHECK(cu.params.init.custom == std::vector<Coins>{1, 0, 4});
}

TEST_CASE("parse exact, verify, sweep") {
  const auto e = std::get<ExactCommand>(parse_args({"exact", "--model", "saving", "--n", "5", "--m", "12", "--out", "m.csv"}));
  CHECK(e.model == ModelKind::Saving);
  CHECK(e.n == 5);
  CHECK(e.m == 12);

  const auto v = std::get<VerifyCommand>(parse_args({"verify", "--out", "r.json"}));
  CHECK(v.models.size() == 3);
  CHECK(v.graphs.size() == 4);
  CHECK(v.n_min == 2);
  CHECK(v.n_max == 4);
  CHECK(v.m_max == 6);

  const auto v2 = std::get<VerifyCommand>(parse_args({"verify", "--models", "exchange,saving", "--graphs", "path",
                                                      "--n-max", "3", "--out", "r.json"}));
  CHECK(v2.models == std::vector<ModelKind>{ModelKind::Exchange, ModelKind::Saving});
  CHECK(v2.graphs == std::vector<GraphFamily>{GraphFamily::Path});

  const auto s = std::get<SweepCommand>(parse_args({"sweep", "--ns", "10,20", "--coins-per-vertex", "1,2,3",
                                                    "--steps", "100", "--seed", "9", "--jobs", "3", "--out-dir", "d"}));
  CHECK(s.ns == std::vector<std::size_t>{10, 20});
  CHECK(s.coins_per_vertex == std::vector<Coins>{1, 2, 3});
  CHECK(s.jobs == 3);
}

TEST_CASE("parse errors name the offending flag") {
  const std::vector<std::string> base{"simulate", "--model", "exchange", "--graph", "cycle", "--n", "10",
                                      "--coins-per-vertex", "5", "--steps", "100", "--seed", "1", "--out", "h.csv"};
  auto with = [&](std::vector<std::string> extra) {
    auto a = base;
    a.insert(a.end(), extra.begin(), extra.end());
    return a;
  };

  CHECK(usage_message(with({"--bogus", "1"})).find("--bogus") != std::string::npos);
  CHECK(usage_message({"simulate", "--model", "exchange", "--graph", "cycle", "--n", "10", "--coins-per-vertex", "5",
                       "--steps", "100", "--out", "h.csv"})
            .find("--seed") != std::string::npos);
  CHECK(usage_message({"simulate", "--model", "exchange", "--graph", "cycle", "--n", "10", "--coins-per-vertex",
                       "five", "--steps", "100", "--seed", "1", "--out", "h.csv"})
            .find("--coins-per-vertex") != std::string::npos);
  CHECK(usage_message(with({"--init-custom", "1,2"})).find("--") != std::string::npos);
  CHECK(usage_message(with({"--edges", "g.txt"})).find("--") != std::string::npos);
  CHECK(usage_message({"simulate", "--model", "barter", "--graph", "cycle", "--n", "10", "--coins-per-vertex", "5",
                       "--steps", "100", "--seed", "1", "--out", "h.csv"})
            .find("--model") != std::string::npos);
  CHECK(usage_message({"simulate", "--model", "exchange", "--graph", "cycle", "--coins-per-vertex", "5", "--steps",
                       "100", "--seed", "1", "--out", "h.csv"})
            .find("--n") != std::string::npos);
  CHECK(usage_message({"exact", "--model", "exchange", "--n", "1", "--m", "3", "--out", "x"}).find("--n") !=
        std::string::npos);
  CHECK_FALSE(usage_message({"frobnicate"}).empty());
  CHECK_FALSE(usage_message({}).empty());
}

TEST_CASE("exit codes") {
  TempDir dir;
  std::string diag;
  CHECK(run_cli({"exact", "--model", "exchange", "--n", "1", "--m", "3", "--out", dir / "x.csv"}, &diag) ==
        kExitInvalid);
  CHECK(diag.find("--n") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "x.csv"));
  CHECK(run_cli({"simulate", "--model", "exchange"}) == kExitInvalid);

  std::ostringstream out, err;
  CHECK(run({"--help"}, out, err) == kExitOk);
  CHECK(out.str().find("simulate") != std::string::npos);
}

TEST_CASE("the installed binary maps errors to exit code 2") {
  const char* cli = std::getenv("MONEYCHAIN_CLI_PATH");
  if (cli == nullptr) return;
  const std::string base = std::string("\"") + cli + "\"";
  auto status = [](const std::string& c) {
    const int raw = std::system((c + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status(base + " exact --model exchange --n 1 --m 3 --out /dev/null") == 2);
  CHECK(status(base + " --help") == 0);
}

TEST_CASE("exact writes the closed-form CSV") {
  TempDir dir;
  REQUIRE(run_cli({"exact", "--model", "exchange", "--n", "2", "--m", "2", "--out", dir / "m.csv"}) == kExitOk);
  const auto t = parse_csv(slurp(dir / "m.csv"));
  CHECK(t.header == std::vector<std::string>{"coins", "exact", "asymptotic"});
  REQUIRE(t.rows.size() == 3);
  CHECK(std::stod(t.rows[0][1]) == doctest::Approx(0.3));
  CHECK(std::stod(t.rows[1][1]) == doctest::Approx(0.4));
  CHECK(std::stod(t.rows[2][1]) == doctest::Approx(0.3));
}

TEST_CASE("simulate with zero steps writes a single row") {
  TempDir dir;
  REQUIRE(run_cli({"simulate", "--model", "reshuffle", "--graph", "complete", "--n", "6", "--coins-per-vertex", "4",
                   "--steps", "0", "--seed", "3", "--out", dir / "h.csv", "--report", dir / "r.json"}) == kExitOk);
  const auto t = parse_csv(slurp(dir / "h.csv"));
  CHECK(t.header == std::vector<std::string>{"coins", "count", "frequency", "exact", "asymptotic"});
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0][0] == "4");
  CHECK(t.rows[0][1] == "6");
  CHECK(std::stod(t.rows[0][2]) == 1.0);

  const auto j = nlohmann::json::parse(slurp(dir / "r.json"));
  CHECK(j.at("params").at("seed") == 3);
  CHECK(j.at("params").at("model") == "reshuffle");
  CHECK(j.at("final_config") == std::vector<Coins>(6, 4));
}

TEST_CASE("simulate CSV round-trips against the report and is reproducible") {
  TempDir dir;
  const std::vector<std::string> args{"simulate", "--model", "saving", "--graph", "grid", "--n", "12", "--width", "4",
                                      "--height", "3", "--coins-per-vertex", "6", "--steps", "30000", "--seed", "17",
                                      "--sample-every", "50"};
  auto a = args;
  a.insert(a.end(), {"--out", dir / "a.csv", "--report", dir / "a.json"});
  auto b = args;
  b.insert(b.end(), {"--out", dir / "b.csv"});
  REQUIRE(run_cli(a) == kExitOk);
  REQUIRE(run_cli(b) == kExitOk);
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));

  const auto t = parse_csv(slurp(dir / "a.csv"));
  const auto j = nlohmann::json::parse(slurp(dir / "a.json"));
  const auto counts = j.at("histogram").at("counts").get<std::vector<std::uint64_t>>();
  std::uint64_t nonzero = 0;
  for (auto c : counts) nonzero += c > 0;
  CHECK(t.rows.size() == nonzero);
  for (const auto& row : t.rows) {
    CHECK(std::stoull(row[1]) == counts.at(std::stoul(row[0])));
    CHECK(std::stoull(row[1]) > 0);
  }
}

TEST_CASE("verify passes on a small grid and on an edge list") {
  TempDir dir;
  REQUIRE(run_cli({"verify", "--n-max", "3", "--m-max", "4", "--out", dir / "v.json"}) == kExitOk);
  const auto j = nlohmann::json::parse(slurp(dir / "v.json"));
  CHECK(j.at("all_pass") == true);
  CHECK(j.at("summary").at("failed") == 0);
  CHECK(j.at("summary").at("checks").get<int>() > 0);
  for (const auto& inst : j.at("instances"))
    for (const auto& c : inst.at("checks")) CHECK(c.at("pass") == true);

  {
    std::ofstream g(dir / "g.txt");
    g << "# kite\n0 1\n1 2\n0 2\n2 3\n";
  }
  REQUIRE(run_cli({"verify", "--edges", dir / "g.txt", "--m-max", "4", "--out", dir / "e.json"}) == kExitOk);
  const auto e = nlohmann::json::parse(slurp(dir / "e.json"));
  CHECK(e.at("all_pass") == true);
  CHECK(e.at("instances").size() == 3 * 5);
}

TEST_CASE("sweep output does not depend on the job count") {
  TempDir dir;
  const std::vector<std::string> args{"sweep", "--models", "all", "--graphs", "complete,cycle", "--ns", "8,16",
                                      "--coins-per-vertex", "3", "--steps", "20000", "--seed", "5",
                                      "--sample-every", "100"};
  auto one = args;
  one.insert(one.end(), {"--jobs", "1", "--out-dir", dir / "one"});
  auto two = args;
  two.insert(two.end(), {"--jobs", "2", "--out-dir", dir / "two"});
  REQUIRE(run_cli(one) == kExitOk);
  REQUIRE(run_cli(two) == kExitOk);

  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(dir.path / "one")) {
    const auto name = entry.path().filename();
    CHECK(slurp(entry.path()) == slurp(dir.path / "two" / name));
    ++files;
  }
  CHECK(files == 3 * 2 * 2 + 1);
  const auto idx = nlohmann::json::parse(slurp(dir.path / "one" / "index.json"));
  CHECK(idx.at("points").size() == 12);
}
