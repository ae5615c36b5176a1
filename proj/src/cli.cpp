#include "ccg/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include <omp.h>

#include <CLI11.hpp>

#include "ccg/config.hpp"
#include "ccg/empirics.hpp"
#include "ccg/metrics.hpp"
#include "ccg/verify.hpp"

namespace ccg {

namespace {

using Outputs = std::vector<std::pair<std::string, std::string>>;  // file name, contents

std::string num(double v, int precision = 12) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

Exec exec_for(const CliOptions& opt) {
  if (opt.threads > 1) {
    omp_set_num_threads(opt.threads);
    return Exec::parallel;
  }
  return Exec::serial;
}

// Config with command-line overrides applied and echoed into cfg.raw.
ExperimentConfig resolve(const CliOptions& opt) {
  if (opt.config_path.empty()) throw ConfigError("--config is required");
  ExperimentConfig cfg = load_config(opt.config_path);
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.samples) cfg.samples = *opt.samples;
  if (opt.grid) {
    if (*opt.grid < 2) throw ConfigError("--grid must be at least 2");
    cfg.grid = *opt.grid;
  }
  cfg.raw["seed"] = cfg.seed;
  cfg.raw["samples"] = cfg.samples;
  return cfg;
}

std::string header_line(const ExperimentConfig& cfg) { return "# config=" + cfg.raw.dump() + "\n"; }

// Writes every output under out_dir, or the first one to stdout when no
// directory was given. Called only after all contents are computed.
void emit(const CliOptions& opt, const Outputs& outputs, std::ostream& out) {
  if (opt.out_dir.empty()) {
    if (!outputs.empty()) out << outputs.front().second;
    return;
  }
  std::filesystem::create_directories(opt.out_dir);
  for (const auto& [name, contents] : outputs) {
    std::ofstream f(std::filesystem::path(opt.out_dir) / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + name);
    f << contents;
  }
}

Metric single_recommender(const ExperimentConfig& cfg) {
  // "all" falls back to engagement for commands that need one ranking rule.
  return cfg.recommenders.size() == 1 ? cfg.recommenders.front() : Metric::engagement;
}

template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
  } catch (const PreconditionError& e) {
    err << "invalid configuration: " << e.what() << "\n";
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitConfig;
}

}  // namespace

int cmd_check_model(const CliOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opt.config_path.empty()) throw ConfigError("--config is required");
    const auto j = read_json_file(opt.config_path);
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    const auto model = parse_model_unchecked(j.contains("model") ? j["model"] : j);
    const auto problems = model.validate();
    const auto report = check_assumptions(model);
    auto rj = nlohmann::json::parse(report.to_json());
    rj["parameter_problems"] = problems;
    rj["model"] = model.describe();
    const std::string text = rj.dump(2) + "\n";
    emit(opt, {{"assumptions.json", text}}, out);
    if (!problems.empty()) err << "config error: " << problems.front() << "\n";
    return problems.empty() && report.all_passed() ? kExitOk : kExitConfig;
  });
}

int cmd_sample(const CliOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto cfg = resolve(opt);
    const Metric metric = single_recommender(cfg);
    const auto strategy = build_equilibrium(cfg, cfg.model, metric);
    Stream rng(cfg.seed, 0);
    std::ostringstream csv;
    csv << header_line(cfg) << "w_costly,w_cheap\n";
    for (std::uint64_t i = 0; i < cfg.samples; ++i) {
      const Content w = strategy.sample(rng);
      csv << num(w.w_costly, 17) << "," << num(w.w_cheap, 17) << "\n";
    }
    Outputs outputs{{"samples.csv", csv.str()}, {"strategy.json", strategy.to_json() + "\n"}};
    if (opt.rounds > 0) {
      Stream round_rng(cfg.seed, 1);
      std::ostringstream log;
      log << header_line(cfg) << "round,user_type,winner,consumed,engagement,quality,user_utility\n";
      for (std::uint64_t r = 0; r < opt.rounds; ++r) {
        const auto o = play_round(cfg.model, metric, strategy, cfg.P, round_rng);
        log << r << "," << num(o.user_type) << "," << (o.winner ? std::to_string(*o.winner) : "none")
            << "," << (o.consumed ? 1 : 0) << "," << num(o.engagement) << "," << num(o.quality) << ","
            << num(o.user_utility) << "\n";
      }
      outputs.emplace_back("rounds.csv", log.str());
    }
    emit(opt, outputs, out);
    return kExitOk;
  });
}

int cmd_verify(const CliOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto cfg = resolve(opt);
    const Metric metric = single_recommender(cfg);
    const auto strategy = build_equilibrium(cfg, cfg.model, metric);
    const auto rep = best_response_gap(cfg.model, metric, strategy, cfg.P, cfg.grid, cfg.samples,
                                       cfg.seed, exec_for(opt));
    auto j = nlohmann::json::parse(rep.to_json());
    j["config"] = cfg.raw;
    j["strategy"] = strategy.descriptor();
    j["recommender"] = metric_name(metric);
    emit(opt, {{"verify.json", j.dump(2) + "\n"}}, out);
    err << "gap " << rep.gap << " threshold " << rep.threshold << (rep.accepted() ? " accepted" : " rejected")
        << "\n";
    return rep.accepted() ? kExitOk : kExitVerifyFailed;
  });
}

int cmd_metrics(const CliOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto cfg = resolve(opt);
    if (cfg.samples == 0) throw ConfigError("samples must be positive");
    const auto points = sweep_instances(cfg);
    // Build every strategy first so a bad sweep point fails before any work.
    std::vector<std::tuple<std::string, Metric, MixedStrategy>> jobs;
    for (const auto& [label, inst] : points)
      for (Metric m : cfg.recommenders) jobs.emplace_back(label, m, build_equilibrium(cfg, inst, m));
    const Exec exec = exec_for(opt);
    std::ostringstream csv;
    csv << header_line(cfg) << "metric,recommender,params,mean,stderr,n\n";
    for (const auto& [label, m, strategy] : jobs) {
      const auto& inst = strategy.instance();
      const auto r = estimate_outcome_metrics(inst, m, strategy, cfg.P, cfg.samples, cfg.seed, exec);
      std::string params = inst.describe() + ";P=" + std::to_string(cfg.P);
      if (!label.empty()) params = label + ";" + params;
      for (const auto& [name, e] : {std::pair{"UCQ", r.ucq}, std::pair{"RE", r.re}, std::pair{"UW", r.uw}})
        csv << name << "," << metric_name(m) << "," << params << "," << num(e.mean) << ","
            << num(e.std_error) << "," << e.n << "\n";
    }
    emit(opt, {{"metrics.csv", csv.str()}}, out);
    return kExitOk;
  });
}

int cmd_empirics(const CliOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opt.data_path.empty()) throw ConfigError("--data is required");
    const auto records = load_records(opt.data_path);
    const std::vector<std::pair<Feed, std::string>> feeds{{Feed::engagement, "E"}, {Feed::chronological, "C"}};
    const std::vector<GenreSet> genre_sets{{true, false}, {false, true}, {true, true}};

    Outputs outputs;
    std::ostringstream table;
    table << "# data=" << opt.data_path << " records=" << records.size() << "\n";
    table << "feed";
    for (const auto& g : genre_sets) table << ",rho_" << g.label() << ",p_" << g.label() << ",n_" << g.label();
    table << "\n";
    std::vector<std::pair<std::string, std::string>> ecdf_files;
    for (const auto& [feed, feed_name] : feeds) {
      table << feed_name;
      for (const auto& g : genre_sets) {
        try {
          const auto s = spearman_rho(records, feed, g);
          table << "," << num(s.rho) << "," << num(s.p) << "," << s.n;
        } catch (const DataError&) {
          table << ",NA,NA,0";
        }
        // Per-level ECDF point files and the dominance matrix on the pooled support.
        std::set<double> support;
        for (int a = 0; a < 5; ++a) {
          const auto e = conditional_ecdf(records, a, feed, g);
          if (!e) continue;
          std::ostringstream pts;
          pts << "log1p_favorites,cdf\n";
          for (double x : e->sorted()) support.insert(x);
          std::set<double> own(e->sorted().begin(), e->sorted().end());
          for (double x : own) pts << num(x) << "," << num((*e)(x)) << "\n";
          ecdf_files.emplace_back("ecdf_" + feed_name + "_" + g.label() + "_a" + std::to_string(a) + ".csv",
                                  pts.str());
        }
        const std::vector<double> grid(support.begin(), support.end());
        const auto dm = dominance_matrix(records, feed, g, grid);
        std::ostringstream dom;
        dom << "level";
        for (int b = 0; b < 5; ++b) dom << ",a" << b;
        dom << "\n";
        for (int a = 0; a < 5; ++a) {
          dom << "a" << a;
          for (int b = 0; b < 5; ++b) dom << "," << (dm.entry[a][b] ? num(*dm.entry[a][b]) : "missing");
          dom << "\n";
        }
        ecdf_files.emplace_back("dominance_" + feed_name + "_" + g.label() + ".csv", dom.str());
      }
      table << "\n";
    }
    outputs.emplace_back("table1.csv", table.str());
    outputs.insert(outputs.end(), ecdf_files.begin(), ecdf_files.end());
    emit(opt, outputs, out);
    return kExitOk;
  });
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Creator competition simulator: equilibria, verification, metrics and feed statistics"};
  app.require_subcommand(1);
  CliOptions opt;
  std::uint64_t seed = 0, samples = 0;
  int grid = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "experiment or model JSON");
    sub->add_option("--out", opt.out_dir, "output directory (default: stdout)");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--samples", samples, "Monte Carlo samples");
    sub->add_option("--threads", opt.threads, "worker threads; 1 runs serially")->check(CLI::PositiveNumber);
  };
  auto* check = app.add_subcommand("check-model", "audit the model assumptions");
  auto* sample = app.add_subcommand("sample", "draw contents from the equilibrium");
  auto* verify = app.add_subcommand("verify", "best-response check of the equilibrium");
  auto* metrics = app.add_subcommand("metrics", "estimate UCQ, RE and UW at equilibrium");
  auto* empirics = app.add_subcommand("empirics", "rank statistics on feed data");
  for (auto* s : {check, sample, verify, metrics, empirics}) add_common(s);
  sample->add_option("--rounds", opt.rounds, "also log this many played rounds");
  verify->add_option("--grid", grid, "points per deviation curve");
  empirics->add_option("--data", opt.data_path, "CSV with feed,genre,angriness,favorites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  for (auto* s : {check, sample, verify, metrics, empirics}) {
    if (s->count("--seed")) opt.seed = seed;
    if (s->count("--samples")) opt.samples = samples;
  }
  if (verify->count("--grid")) opt.grid = grid;

  if (*check) return cmd_check_model(opt, std::cout, std::cerr);
  if (*sample) return cmd_sample(opt, std::cout, std::cerr);
  if (*verify) return cmd_verify(opt, std::cout, std::cerr);
  if (*metrics) return cmd_metrics(opt, std::cout, std::cerr);
  return cmd_empirics(opt, std::cout, std::cerr);
}

}  // namespace ccg
