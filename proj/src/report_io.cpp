#include "moneychain/report_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <unistd.h>

namespace moneychain {

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf.data(), ptr);
}

namespace {

std::string asymptotic_field(ModelKind model, Coins c, const ExactMarginal& m) {
  if (m.total_coins == 0) return "";  // T = 0: no limiting density
  return format_double(asymptotic_density(model, c, m.temperature()));
}

}  // namespace

std::string histogram_csv(const SimReport& report, const ExactMarginal& exact) {
  const auto& h = report.histogram;
  std::string out = "coins,count,frequency,exact,asymptotic\n";
  for (std::size_t c = 0; c < h.counts.size(); ++c) {
    if (h.counts[c] == 0) continue;
    out += std::to_string(c);
    out += ',';
    out += std::to_string(h.counts[c]);
    out += ',';
    out += format_double(h.frequency(c));
    out += ',';
    out += format_double(exact.probs.at(c));
    out += ',';
    out += asymptotic_field(report.params.model, static_cast<Coins>(c), exact);
    out += '\n';
  }
  return out;
}

std::string marginal_csv(const ExactMarginal& m, ModelKind model) {
  std::string out = "coins,exact,asymptotic\n";
  for (std::size_t c = 0; c < m.probs.size(); ++c) {
    out += std::to_string(c);
    out += ',';
    out += format_double(m.probs[c]);
    out += ',';
    out += asymptotic_field(model, static_cast<Coins>(c), m);
    out += '\n';
  }
  return out;
}

nlohmann::json sim_params_json(const SimParams& p) {
  nlohmann::json graph = {{"family", std::string(to_string(p.graph.family))}, {"n", p.graph.n}};
  if (p.graph.family == GraphFamily::Grid) {
    graph["width"] = p.graph.width;
    graph["height"] = p.graph.height;
  }
  if (p.graph.family == GraphFamily::ErdosRenyi) graph["p"] = p.graph.p;
  if (p.graph.family == GraphFamily::EdgeList) graph["source"] = p.graph.edge_list_source;

  nlohmann::json init;
  switch (p.init.kind) {
    case InitSpec::Kind::Equal:
      init = {{"kind", "equal"}, {"coins_per_vertex", p.init.per_vertex}};
      break;
    case InitSpec::Kind::AllAtVertex:
      init = {{"kind", "all_at_vertex"}, {"vertex", p.init.vertex}, {"total", p.init.total}};
      break;
    case InitSpec::Kind::Custom:
      init = {{"kind", "custom"}, {"coins", p.init.custom}};
      break;
  }
  return {{"model", std::string(to_string(p.model))},
          {"graph", graph},
          {"init", init},
          {"steps", p.steps},
          {"seed", p.seed},
          {"burn_in", p.burn_in},
          {"sample_every", p.sample_every},
          {"min_expected", p.min_expected}};
}

nlohmann::json sim_report_json(const SimReport& r) {
  nlohmann::json j;
  j["params"] = sim_params_json(r.params);
  j["vertices"] = r.vertices;
  j["edges"] = r.edges;
  j["total_coins"] = r.final_config.total();
  j["final_config"] = std::vector<Coins>(r.final_config.coins().begin(), r.final_config.coins().end());
  j["histogram"] = {{"counts", r.histogram.counts}, {"total", r.histogram.total}};
  j["tv_to_exact"] = r.tv_to_exact;
  if (r.chi_square) {
    j["chi_square"] = {{"statistic", r.chi_square->statistic}, {"dof", r.chi_square->dof}};
  } else {
    j["chi_square"] = nullptr;
  }
  j["wall_seconds"] = r.wall_seconds;
  return j;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (header) {
      t.header = std::move(fields);
      header = false;
    } else {
      t.rows.push_back(std::move(fields));
    }
  }
  return t;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw std::runtime_error("write to " + tmp.string() + " failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw std::runtime_error("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

}  // namespace moneychain
