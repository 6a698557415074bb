#include "agentcoord/cli.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "agentcoord/error.hpp"

namespace agentcoord::cli {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  return f;
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j) {
  auto f = open_out(path);
  f << j.dump(2) << '\n';
}

}  // namespace

int cmd_simulate_traces(const ExperimentConfig& cfg, std::ostream& out) {
  cfg.validate();
  const fs::path dir = resolve_output_dir(cfg) / "traces";
  const TraceBundle bundle = generate_all_traces(cfg.trace);

  std::vector<std::pair<std::string, const Trace*>> files{{"requests.csv", &bundle.requests}};
  for (const auto& b : bundle.bands) files.emplace_back("band_" + b.signal + ".csv", &b);
  files.emplace_back("bandwidth.csv", &bundle.bandwidth);

  auto listing = nlohmann::ordered_json::array();
  for (const auto& [name, trace] : files) {
    auto f = open_out(dir / name);
    write_trace_csv(f, *trace);
    listing.push_back({{"file", name},
                       {"signal", trace->signal},
                       {"unit", trace->unit},
                       {"period_s", trace->period_s},
                       {"length", trace->values.size()}});
  }
  nlohmann::ordered_json manifest;
  manifest["trace"] = to_json(cfg)["trace"];
  manifest["files"] = listing;
  manifest["dataset"] = {{"window", cfg.window},
                         {"train_fraction", cfg.train_fraction},
                         {"seed", cfg.split_seed}};
  write_json(dir / "manifest.json", manifest);
  out << "wrote " << files.size() << " traces to " << dir.string() << '\n';
  return kOk;
}

int cmd_scenario(const ExperimentConfig& cfg, const std::string& utterance, std::ostream& out) {
  cfg.validate();
  AgentController controller(cfg.intents, cfg.separation);
  for (auto& record : build_agent_records(cfg)) controller.add_agent(std::move(record));

  if (!controller.submit(utterance)) {
    out << "no goal detected in \"" << utterance << "\"\n";
    return kNoGoal;
  }
  const std::uint64_t seed = cfg.seeds.front();
  const CoordinationLog log = *controller.run_next(cfg.task_config(), seed);

  const fs::path dir = resolve_output_dir(cfg) / ("scenario-seed" + std::to_string(seed));
  {
    auto f = open_out(dir / "metrics.jsonl");
    write_metrics_jsonl(f, "scenario-seed" + std::to_string(seed), log.metrics);
  }
  write_json(dir / "summary.json", summary_json(log));

  out << "goal " << log.goal.goal_id << " (matched \"" << log.goal.matched_prompt << "\")\n";
  for (std::size_t i = 0; i < log.subtasks.size(); ++i) {
    const auto& r = log.reports[i];
    out << "  " << log.subtasks[i].id << " -> " << r.agent_id << ": " << r.action.name << "="
        << r.action.label << " [" << to_string(r.status) << "]\n";
  }
  const bool fulfilled = log.verdict && log.verdict->fulfilled;
  out << (fulfilled ? "fulfilled" : "unfulfilled") << "; outputs in " << dir.string() << '\n';
  return fulfilled ? kOk : kUnfulfilled;
}

int cmd_compare(const ExperimentConfig& cfg, std::ostream& out) {
  if (cfg.seeds.size() < 2) throw ConfigError("compare needs at least two seeds");
  const fs::path dir = resolve_output_dir(cfg) / "compare";
  const CompareReport report = compare_weighting(cfg, [&](const std::string& id, const RunResult& r) {
    auto f = open_out(dir / "runs" / id / "metrics.jsonl");
    write_metrics_jsonl(f, id, r.log);
  });

  write_json(dir / "report.json", to_json(report));
  {
    auto f = open_out(dir / "series.csv");
    f << "t,dynamic_c_error,static_c_error,dynamic_c_error_time_avg,static_c_error_time_avg\n";
    for (std::size_t t = 0; t < report.T; ++t) {
      f << t << ',' << num(report.dynamic.c_error[t]) << ',' << num(report.fixed.c_error[t]) << ','
        << num(report.dynamic.c_error_time_avg[t]) << ','
        << num(report.fixed.c_error_time_avg[t]) << '\n';
    }
  }
  {
    auto f = open_out(dir / "tradeoff.csv");
    f << "t,c_error_time_avg,g_error\n";
    for (std::size_t t = 0; t < report.T; ++t) {
      f << t << ',' << num(report.dynamic.c_error_time_avg[t]) << ','
        << num(report.dynamic.g_error[t]) << '\n';
    }
  }
  out << "task " << to_string(report.task) << ", " << report.seeds.size() << " seeds, T=" << report.T
      << '\n'
      << "  dynamic time-averaged C-error " << num(report.dynamic.mean_final_time_avg) << '\n'
      << "  static  time-averaged C-error " << num(report.fixed.mean_final_time_avg) << '\n'
      << "  ratio " << num(report.ratio) << (report.conflict_free ? " (no conflict)" : "") << '\n';
  return kOk;
}

int cmd_verify_bounds(const ExperimentConfig& cfg, std::ostream& out) {
  const BoundReport report = verify_bounds(cfg);
  const fs::path dir = resolve_output_dir(cfg) / "verify";
  write_json(dir / "report.json", to_json(report));
  for (const auto& s : report.sweep) {
    out << "eta=" << s.spec.eta << " beta=" << s.spec.beta << " T=" << s.spec.T
        << " measured=" << num(s.measured) << " bound=" << num(s.bound)
        << (s.holds ? " ok" : " VIOLATED") << '\n';
  }
  out << "C-error slope vs T: " << num(report.rate_slope) << '\n';
  if (report.scaling_fit.slope_vs_d) {
    out << "G-error slope vs D: " << num(*report.scaling_fit.slope_vs_d) << '\n';
  }
  return report.bounds_hold ? kOk : kBoundViolation;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conflict-resolving multi-agent cross-layer coordination experiments"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides ov;
  std::string utterance;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config (JSON)");
    sub->add_option("--seed", ov.seed, "replaces the first configured seed");
    sub->add_option("--out-dir", ov.out_dir, "output root");
    sub->add_option("--variant", ov.variant, "weight update: matrix | literal-diagonal");
    sub->add_option("--T", ov.T, "iterations");
    sub->add_option("--eta0", ov.eta0, "weight step constant");
    sub->add_option("--beta0", ov.beta0, "model step constant");
  };
  auto* sim = app.add_subcommand("simulate-traces", "write synthetic traces and a manifest");
  auto* scn = app.add_subcommand("scenario", "run one utterance end to end");
  auto* cmp = app.add_subcommand("compare", "dynamic versus static weighting over the seeds");
  auto* vfy = app.add_subcommand("verify-bounds", "check the conflicting-error bound and rates");
  for (auto* sub : {sim, scn, cmp, vfy}) add_common(sub);
  scn->add_option("--utterance,-u", utterance, "user request")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    ExperimentConfig cfg =
        config_path.empty() ? default_experiment_config() : load_experiment_config(config_path);
    apply_overrides(cfg, ov);
    if (*sim) return cmd_simulate_traces(cfg, out);
    if (*scn) return cmd_scenario(cfg, utterance, out);
    if (*cmp) return cmd_compare(cfg, out);
    return cmd_verify_bounds(cfg, out);
  } catch (const UnsatisfiableSubtask& e) {
    err << "error: " << e.what() << '\n';
    return kUnsatisfiable;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidInput& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace agentcoord::cli
