#include "moneychain/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "moneychain/exact.hpp"
#include "moneychain/oracle.hpp"
#include "moneychain/report_io.hpp"

namespace moneychain::cli {

namespace {

ModelKind model_from(const std::string& name, const std::string& flag) {
  if (auto m = parse_model(name)) return *m;
  throw UsageError(flag + ": unknown model \"" + name + "\" (expected reshuffle, exchange or saving)");
}

std::vector<ModelKind> models_from(const std::vector<std::string>& names, const std::string& flag) {
  if (names.size() == 1 && names[0] == "all") return {std::begin(kAllModels), std::end(kAllModels)};
  std::vector<ModelKind> out;
  for (const auto& n : names) out.push_back(model_from(n, flag));
  if (out.empty()) throw UsageError(flag + ": at least one model is required");
  return out;
}

GraphFamily family_from(const std::string& name, const std::string& flag) {
  auto f = parse_graph_family(name);
  if (!f || *f == GraphFamily::EdgeList) {
    throw UsageError(flag + ": unknown graph family \"" + name +
                     "\" (expected complete, path, cycle, star, grid or erdos_renyi)");
  }
  return *f;
}

std::string read_text_file(const std::string& path, const std::string& flag) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError(flag + ": cannot read \"" + path + "\"");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<Coins> parse_coin_list(const std::string& text, const std::string& flag) {
  std::vector<Coins> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    Coins v = 0;
    const auto* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (tok.empty() || ec != std::errc{} || ptr != end || v < 0) {
      throw UsageError(flag + ": \"" + tok + "\" is not a nonnegative integer");
    }
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(flag + ": empty list");
  return out;
}

struct GraphFlags {
  std::string family;
  std::string edges_path;
  std::size_t n = 0;
  std::size_t width = 0;
  std::size_t height = 0;
  double p = 0.0;
  CLI::Option* family_opt = nullptr;
  CLI::Option* edges_opt = nullptr;
  CLI::Option* n_opt = nullptr;
};

void add_graph_flags(CLI::App* app, GraphFlags& g) {
  g.family_opt = app->add_option("--graph", g.family, "Graph family: complete|path|cycle|star|grid|erdos_renyi");
  g.edges_opt = app->add_option("--edges", g.edges_path, "Edge-list file (one \"u v\" pair per line)");
  g.family_opt->excludes(g.edges_opt);
  g.n_opt = app->add_option("--n", g.n, "Vertex count");
  app->add_option("--width", g.width, "Grid width");
  app->add_option("--height", g.height, "Grid height");
  app->add_option("--p", g.p, "Erdos-Renyi edge probability");
}

GraphSpec graph_spec_from(const GraphFlags& g) {
  GraphSpec spec;
  if (g.edges_opt->count() > 0) {
    spec.family = GraphFamily::EdgeList;
    spec.edge_list_text = read_text_file(g.edges_path, "--edges");
    spec.edge_list_source = g.edges_path;
    spec.n = g.n;
    return spec;
  }
  if (g.family_opt->count() == 0) throw UsageError("--graph or --edges is required");
  spec.family = family_from(g.family, "--graph");
  spec.n = g.n;
  spec.width = g.width;
  spec.height = g.height;
  spec.p = g.p;
  if (spec.family == GraphFamily::Grid) {
    if (g.width == 0 || g.height == 0) throw UsageError("--width/--height: grid needs both, positive");
    if (g.n_opt->count() == 0) spec.n = g.width * g.height;
    if (spec.n != g.width * g.height) throw UsageError("--n: grid needs n = width * height");
  } else if (g.n_opt->count() == 0) {
    throw UsageError("--n is required for --graph " + g.family);
  }
  if (spec.n < 2) throw UsageError("--n: graph needs at least 2 vertices");
  if (spec.family == GraphFamily::ErdosRenyi && !(g.p > 0.0 && g.p <= 1.0)) {
    throw UsageError("--p: erdos_renyi needs 0 < p <= 1");
  }
  return spec;
}

// ---------------------------------------------------------------------------
// verify

nlohmann::json check_json(const oracle::CheckReport& c) {
  nlohmann::json j = {{"name", c.name}, {"pass", c.passed}};
  if (!c.passed) j["counterexample"] = c.counterexample;
  return j;
}

struct VerifyTally {
  std::size_t checks = 0;
  std::size_t failed = 0;
  void add(const oracle::CheckReport& c) {
    ++checks;
    if (!c.passed) ++failed;
  }
};

struct GraphInstance {
  std::string label;
  Graph graph;
};

std::vector<GraphInstance> verify_graphs(const VerifyCommand& cmd) {
  std::vector<GraphInstance> out;
  if (cmd.edge_list) {
    out.push_back({cmd.edge_list->edge_list_source, build(*cmd.edge_list)});
    return out;
  }
  for (auto family : cmd.graphs) {
    for (std::int64_t n = cmd.n_min; n <= cmd.n_max; ++n) {
      GraphSpec spec;
      spec.family = family;
      spec.n = static_cast<std::size_t>(n);
      out.push_back({std::string(to_string(family)), build(spec)});
    }
  }
  return out;
}

int run_verify(const VerifyCommand& cmd, std::ostream& diag) {
  using namespace oracle;
  const Limits limits = limits_from_env();
  VerifyTally tally;
  nlohmann::json instances = nlohmann::json::array();
  nlohmann::json pairs = nlohmann::json::array();
  bool exchange_saving_differ = false;
  const bool have_pair =
      std::find(cmd.models.begin(), cmd.models.end(), ModelKind::Exchange) != cmd.models.end() &&
      std::find(cmd.models.begin(), cmd.models.end(), ModelKind::Saving) != cmd.models.end();

  for (const auto& inst : verify_graphs(cmd)) {
    const auto N = static_cast<std::int64_t>(inst.graph.vertex_count());
    for (Coins M = cmd.m_min; M <= cmd.m_max; ++M) {
      const ConfigSpace space(N, M, limits);
      std::vector<BigInt> weights;
      for (std::size_t i = 0; i < space.size(); ++i) weights.push_back(stationary_weight(space.at(i)));
      std::optional<TransitionMatrix> exchange_tm, saving_tm;
      std::optional<std::vector<Rational>> exchange_pi, saving_pi;

      for (ModelKind model : cmd.models) {
        const TransitionMatrix tm = transition_matrix(model, inst.graph, space);
        std::vector<CheckReport> checks;
        checks.push_back(check_row_sums(tm));

        const auto irr = check_irreducible_aperiodic(tm);
        checks.push_back({"irreducible", irr.irreducible, irr.irreducible ? "" : irr.counterexample});
        checks.push_back({"diagonal_positive", irr.all_diagonal_positive,
                          irr.all_diagonal_positive ? "" : irr.counterexample});

        std::vector<Rational> pi;
        if (irr.irreducible) {
          pi = stationary_solve(tm, limits);
          const auto again = left_multiply(pi, tm);
          checks.push_back({"stationary_fixed_point", again == pi, again == pi ? "" : "pi P != pi"});
        }

        if (model == ModelKind::Reshuffle) {
          checks.push_back(check_doubly_stochastic(tm, &space));
          const Rational bound(1, static_cast<unsigned long>(inst.graph.edge_count() * static_cast<std::size_t>(M + 1)));
          const bool ok = irr.min_diagonal >= bound;
          checks.push_back({"diagonal_lower_bound", ok,
                            ok ? "" : "min diagonal " + irr.min_diagonal.get_str() + " < " + bound.get_str()});
          if (!pi.empty()) {
            const Rational u(1, static_cast<unsigned long>(space.size()));
            const bool uniform = std::all_of(pi.begin(), pi.end(), [&](const Rational& q) { return q == u; });
            checks.push_back({"stationary_uniform", uniform, uniform ? "" : "stationary vector is not uniform"});
          }
        } else {
          checks.push_back(check_detailed_balance(tm, weights, &space));
        }

        if (!pi.empty()) {
          const ExactMarginal closed = exact_marginal(model, N, M);
          CheckReport marg{"marginal_matches_closed_form", true, {}};
          for (std::size_t v = 0; v < inst.graph.vertex_count() && marg.passed; ++v) {
            const ExactMarginal solved = marginal_from_stationary(pi, space, v);
            if (solved.exact != closed.exact) {
              marg.passed = false;
              marg.counterexample = "vertex " + std::to_string(v) + " marginal differs from closed form";
            }
          }
          checks.push_back(marg);
        }

        nlohmann::json cj = nlohmann::json::array();
        for (const auto& c : checks) {
          tally.add(c);
          cj.push_back(check_json(c));
        }
        instances.push_back({{"model", std::string(to_string(model))},
                             {"graph", inst.label},
                             {"n", N},
                             {"edges", inst.graph.edge_count()},
                             {"m", M},
                             {"states", space.size()},
                             {"checks", cj}});

        if (model == ModelKind::Exchange) {
          exchange_tm = tm;
          exchange_pi = pi;
        } else if (model == ModelKind::Saving) {
          saving_tm = tm;
          saving_pi = pi;
        }
      }

      if (have_pair && exchange_tm && saving_tm) {
        const bool differ = !(*exchange_tm == *saving_tm);
        exchange_saving_differ = exchange_saving_differ || differ;
        const bool same_pi = exchange_pi && saving_pi && *exchange_pi == *saving_pi;
        CheckReport c{"exchange_saving_same_stationary", same_pi,
                      same_pi ? "" : "exchange and saving stationary vectors differ"};
        tally.add(c);
        pairs.push_back({{"graph", inst.label},
                         {"n", N},
                         {"m", M},
                         {"matrices_differ", differ},
                         {"checks", nlohmann::json::array({check_json(c)})}});
      }
    }
  }

  nlohmann::json global = nlohmann::json::array();
  if (have_pair) {
    CheckReport c{"exchange_saving_matrices_differ_somewhere", exchange_saving_differ,
                  exchange_saving_differ ? "" : "exchange and saving matrices coincide on every instance"};
    tally.add(c);
    global.push_back(check_json(c));
  }

  nlohmann::json report = {{"instances", instances},
                           {"pairs", pairs},
                           {"global_checks", global},
                           {"summary", {{"checks", tally.checks}, {"failed", tally.failed}}},
                           {"all_pass", tally.failed == 0},
                           {"max_states", limits.max_states}};
  write_file_atomic(cmd.out, report.dump(2) + "\n");
  if (tally.failed > 0) {
    diag << "verify: " << tally.failed << " of " << tally.checks << " checks failed\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate / exact / sweep

int run_simulate(const SimulateCommand& cmd) {
  const SimReport rep = run_simulation(cmd.params);
  const ExactMarginal exact = exact_marginal(cmd.params.model, static_cast<std::int64_t>(rep.vertices),
                                             rep.final_config.total(), MarginalOptions{.exact_retain_limit = 0});
  write_file_atomic(cmd.out, histogram_csv(rep, exact));
  if (cmd.report) write_file_atomic(*cmd.report, sim_report_json(rep).dump(2) + "\n");
  return kExitOk;
}

int run_exact(const ExactCommand& cmd) {
  const ExactMarginal m = exact_marginal(cmd.model, cmd.n, cmd.m, MarginalOptions{.exact_retain_limit = 0});
  write_file_atomic(cmd.out, marginal_csv(m, cmd.model));
  return kExitOk;
}

int run_sweep(const SweepCommand& cmd, std::ostream& diag) {
  std::vector<SimParams> points;
  for (auto model : cmd.models)
    for (auto family : cmd.graphs)
      for (auto n : cmd.ns)
        for (auto t : cmd.coins_per_vertex) {
          SimParams p;
          p.model = model;
          p.graph.family = family;
          p.graph.n = n;
          p.init = InitSpec::equal(t);
          p.steps = cmd.steps;
          p.seed = split_seed(cmd.seed, points.size());
          p.burn_in = cmd.burn_in;
          p.sample_every = cmd.sample_every;
          points.push_back(p);
        }

  std::filesystem::create_directories(cmd.out_dir);
  std::vector<std::optional<SimReport>> results(points.size());
  std::vector<std::string> errors(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        results[i] = run_simulation(points[i]);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const unsigned jobs = std::max(1u, std::min<unsigned>(cmd.jobs, static_cast<unsigned>(points.size())));
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  nlohmann::json index = nlohmann::json::array();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!results[i]) {
      diag << "sweep: point " << i << " failed: " << errors[i] << "\n";
      return kExitInvalid;
    }
    const SimReport& rep = *results[i];
    std::ostringstream name;
    name << "point_" << std::setw(4) << std::setfill('0') << i << ".csv";
    const ExactMarginal exact = exact_marginal(rep.params.model, static_cast<std::int64_t>(rep.vertices),
                                               rep.final_config.total(), MarginalOptions{.exact_retain_limit = 0});
    write_file_atomic(cmd.out_dir / name.str(), histogram_csv(rep, exact));
    nlohmann::json entry = {{"index", i}, {"file", name.str()}, {"params", sim_params_json(rep.params)},
                            {"tv_to_exact", rep.tv_to_exact}};
    entry["chi_square"] = rep.chi_square ? nlohmann::json{{"statistic", rep.chi_square->statistic},
                                                          {"dof", rep.chi_square->dof}}
                                         : nlohmann::json(nullptr);
    index.push_back(entry);
  }
  write_file_atomic(cmd.out_dir / "index.json",
                    nlohmann::json{{"master_seed", cmd.seed}, {"points", index}}.dump(2) + "\n");
  return kExitOk;
}

}  // namespace

Command parse_args(const std::vector<std::string>& args) {
  CLI::App app{"Conservative money-exchange Markov chains on graphs", "moneychain"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte Carlo run; writes a histogram CSV");
  std::string sim_model;
  GraphFlags sim_graph;
  Coins per_vertex = 0;
  std::size_t at_vertex = 0;
  Coins at_vertex_total = 0;
  std::string custom;
  std::uint64_t steps = 0, seed = 0, burn_in = 0, sample_every = 0;
  double min_expected = 5.0;
  std::string sim_out, sim_report;
  sim->add_option("--model", sim_model, "reshuffle|exchange|saving")->required();
  add_graph_flags(sim, sim_graph);
  auto* o_equal = sim->add_option("--coins-per-vertex", per_vertex, "Equal initial fortune T");
  auto* o_vertex = sim->add_option("--init-at-vertex", at_vertex, "Put all coins on this vertex");
  auto* o_m = sim->add_option("--m", at_vertex_total, "Total coins for --init-at-vertex");
  auto* o_custom = sim->add_option("--init-custom", custom, "Comma-separated initial coins per vertex");
  o_equal->excludes(o_vertex)->excludes(o_custom);
  o_vertex->excludes(o_custom)->needs(o_m);
  o_m->needs(o_vertex);
  sim->add_option("--steps", steps, "Number of edge updates")->required();
  sim->add_option("--seed", seed, "Master seed")->required();
  sim->add_option("--burn-in", burn_in, "Steps before periodic sampling starts");
  sim->add_option("--sample-every", sample_every, "Record a cross-section every k steps (0 = final only)");
  sim->add_option("--min-expected", min_expected, "Chi-square pooling threshold");
  sim->add_option("--out", sim_out, "Histogram CSV path")->required();
  sim->add_option("--report", sim_report, "SimReport JSON path");

  // exact
  auto* ex = app.add_subcommand("exact", "Closed-form stationary marginal; writes CSV");
  std::string ex_model;
  std::int64_t ex_n = 0;
  Coins ex_m = 0;
  std::string ex_out;
  ex->add_option("--model", ex_model, "reshuffle|exchange|saving")->required();
  ex->add_option("--n", ex_n, "Vertex count N")->required();
  ex->add_option("--m", ex_m, "Total coins M")->required();
  ex->add_option("--out", ex_out, "CSV path")->required();

  // verify
  auto* ver = app.add_subcommand("verify", "Exact structural checks on small instances; writes JSON");
  std::vector<std::string> ver_models{"all"};
  std::vector<std::string> ver_graphs{"complete", "path", "cycle", "star"};
  std::string ver_edges;
  std::int64_t n_min = 2, n_max = 4;
  Coins m_min = 0, m_max = 6;
  std::string ver_out;
  ver->add_option("--models", ver_models, "all or comma list")->delimiter(',');
  auto* o_graphs = ver->add_option("--graphs", ver_graphs, "Comma list of families")->delimiter(',');
  auto* o_ver_edges = ver->add_option("--edges", ver_edges, "Verify on this edge-list graph instead");
  o_graphs->excludes(o_ver_edges);
  ver->add_option("--n-min", n_min, "Smallest N");
  ver->add_option("--n-max", n_max, "Largest N");
  ver->add_option("--m-min", m_min, "Smallest M");
  ver->add_option("--m-max", m_max, "Largest M");
  ver->add_option("--out", ver_out, "Report JSON path")->required();

  // sweep
  auto* sw = app.add_subcommand("sweep", "Grid of simulations; one CSV per point plus index.json");
  std::vector<std::string> sw_models{"all"};
  std::vector<std::string> sw_graphs{"complete"};
  std::vector<std::size_t> sw_ns;
  std::vector<Coins> sw_t;
  std::uint64_t sw_steps = 0, sw_seed = 0, sw_burn = 0, sw_every = 0;
  unsigned sw_jobs = 1;
  std::string sw_out;
  sw->add_option("--models", sw_models, "all or comma list")->delimiter(',');
  sw->add_option("--graphs", sw_graphs, "Comma list of families")->delimiter(',');
  sw->add_option("--ns", sw_ns, "Comma list of vertex counts")->delimiter(',')->required();
  sw->add_option("--coins-per-vertex", sw_t, "Comma list of T values")->delimiter(',')->required();
  sw->add_option("--steps", sw_steps, "Updates per point")->required();
  sw->add_option("--seed", sw_seed, "Master seed")->required();
  sw->add_option("--burn-in", sw_burn, "Burn-in steps");
  sw->add_option("--sample-every", sw_every, "Sampling period (0 = final only)");
  sw->add_option("--jobs", sw_jobs, "Concurrent grid points")->check(CLI::PositiveNumber);
  sw->add_option("--out-dir", sw_out, "Output directory")->required();

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested{app.help("", CLI::AppFormatMode::All)};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (sim->parsed()) {
    SimulateCommand c;
    c.params.model = model_from(sim_model, "--model");
    c.params.graph = graph_spec_from(sim_graph);
    if (o_equal->count()) {
      if (per_vertex < 0) throw UsageError("--coins-per-vertex must be nonnegative");
      c.params.init = InitSpec::equal(per_vertex);
    } else if (o_vertex->count()) {
      if (at_vertex_total < 0) throw UsageError("--m must be nonnegative");
      if (c.params.graph.n != 0 && at_vertex >= c.params.graph.n) {
        throw UsageError("--init-at-vertex: vertex out of range");
      }
      c.params.init = InitSpec::all_at_vertex(at_vertex, at_vertex_total);
    } else if (o_custom->count()) {
      c.params.init = InitSpec::from_vector(parse_coin_list(custom, "--init-custom"));
      if (c.params.graph.n != 0 && c.params.init.custom.size() != c.params.graph.n) {
        throw UsageError("--init-custom: expected " + std::to_string(c.params.graph.n) + " entries");
      }
    } else {
      throw UsageError("one of --coins-per-vertex, --init-at-vertex or --init-custom is required");
    }
    if (!(min_expected > 0.0)) throw UsageError("--min-expected must be positive");
    c.params.steps = steps;
    c.params.seed = seed;
    c.params.burn_in = burn_in;
    c.params.sample_every = sample_every;
    c.params.min_expected = min_expected;
    c.out = sim_out;
    if (!sim_report.empty()) c.report = sim_report;
    return c;
  }
  if (ex->parsed()) {
    ExactCommand c;
    c.model = model_from(ex_model, "--model");
    if (ex_n < 2) throw UsageError("--n: the stationary marginal needs N >= 2");
    if (ex_m < 0) throw UsageError("--m must be nonnegative");
    c.n = ex_n;
    c.m = ex_m;
    c.out = ex_out;
    return c;
  }
  if (ver->parsed()) {
    VerifyCommand c;
    c.models = models_from(ver_models, "--models");
    if (o_ver_edges->count()) {
      GraphSpec spec;
      spec.family = GraphFamily::EdgeList;
      spec.edge_list_text = read_text_file(ver_edges, "--edges");
      spec.edge_list_source = ver_edges;
      c.edge_list = spec;
    } else {
      for (const auto& g : ver_graphs) {
        const auto f = family_from(g, "--graphs");
        if (f == GraphFamily::Grid || f == GraphFamily::ErdosRenyi) {
          throw UsageError("--graphs: verify sweeps complete, path, cycle and star; use --edges for others");
        }
        c.graphs.push_back(f);
      }
    }
    if (n_min < 2 || n_max < n_min) throw UsageError("--n-min/--n-max: need 2 <= n-min <= n-max");
    if (m_min < 0 || m_max < m_min) throw UsageError("--m-min/--m-max: need 0 <= m-min <= m-max");
    c.n_min = n_min;
    c.n_max = n_max;
    c.m_min = m_min;
    c.m_max = m_max;
    c.out = ver_out;
    return c;
  }
  SweepCommand c;
  c.models = models_from(sw_models, "--models");
  for (const auto& g : sw_graphs) {
    const auto f = family_from(g, "--graphs");
    if (f == GraphFamily::Grid || f == GraphFamily::ErdosRenyi) {
      throw UsageError("--graphs: sweep supports complete, path, cycle and star");
    }
    c.graphs.push_back(f);
  }
  for (auto n : sw_ns) {
    if (n < 2) throw UsageError("--ns: every vertex count must be >= 2");
  }
  for (auto t : sw_t) {
    if (t < 0) throw UsageError("--coins-per-vertex: values must be nonnegative");
  }
  c.ns = sw_ns;
  c.coins_per_vertex = sw_t;
  c.steps = sw_steps;
  c.seed = sw_seed;
  c.burn_in = sw_burn;
  c.sample_every = sw_every;
  c.jobs = sw_jobs;
  c.out_dir = sw_out;
  return c;
}

int execute(const Command& cmd, std::ostream& diag) {
  try {
    return std::visit(
        [&](const auto& c) -> int {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, SimulateCommand>) return run_simulate(c);
          else if constexpr (std::is_same_v<T, ExactCommand>) return run_exact(c);
          else if constexpr (std::is_same_v<T, VerifyCommand>) return run_verify(c, diag);
          else return run_sweep(c, diag);
        },
        cmd);
  } catch (const std::exception& e) {
    diag << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& diag) {
  Command cmd;
  try {
    cmd = parse_args(args);
  } catch (const HelpRequested& h) {
    out << h.text;
    return kExitOk;
  } catch (const UsageError& e) {
    diag << "usage error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return execute(cmd, diag);
}

}  // namespace moneychain::cli
