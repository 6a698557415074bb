#include <cstdlib>
#include <fstream>

#include "agentcoord/datasets.hpp"
#include "agentcoord/error.hpp"
#include "agentcoord/experiment.hpp"

namespace agentcoord {

using nlohmann::json;

namespace {

template <class T>
T read_value(const json& j, const char* key, const std::string& where) {
  const json& v = j.at(key);
  const std::string at = where + "." + key;
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw ConfigError(at + ": expected a boolean");
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw ConfigError(at + ": expected a string");
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_unsigned()) throw ConfigError(at + ": expected a non-negative integer");
  } else {
    if (!v.is_number()) throw ConfigError(at + ": expected a number");
  }
  return v.get<T>();
}

template <class T>
void read_opt(const json& j, const char* key, T& out, const std::string& where) {
  if (j.contains(key)) out = read_value<T>(j, key, where);
}

template <class T>
void read_list(const json& j, const char* key, std::vector<T>& out, const std::string& where) {
  if (!j.contains(key)) return;
  const json& arr = j.at(key);
  if (!arr.is_array()) throw ConfigError(where + "." + key + ": expected an array");
  std::vector<T> values;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    json wrapper = {{"item", arr[i]}};
    values.push_back(read_value<T>(wrapper, "item", where + "." + key + "[" + std::to_string(i) + "]"));
  }
  out = std::move(values);
}

const json& section(const json& j, const char* key, const std::string& where) {
  const json& s = j.at(key);
  if (!s.is_object()) throw ConfigError(where + "." + key + ": expected an object");
  return s;
}

Ar1Params read_ar1(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  require_known_fields(j, {"mean", "phi", "sigma"}, where);
  Ar1Params p;
  read_opt(j, "mean", p.mean, where);
  read_opt(j, "phi", p.phi, where);
  read_opt(j, "sigma", p.sigma, where);
  return p;
}

nlohmann::ordered_json ar1_json(const Ar1Params& p) {
  return {{"mean", p.mean}, {"phi", p.phi}, {"sigma", p.sigma}};
}

}  // namespace

void ExperimentConfig::validate() const {
  trace.validate();
  if (seeds.empty()) throw ConfigError("config: the seed list is empty");
  if (T < 1) throw ConfigError("config: T must be at least 1");
  if (window < 1) throw ConfigError("config: window must be at least 1");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("config: train_fraction must lie in (0, 1)");
  }
  if (cards.empty()) throw ConfigError("config: no agent cards");
  for (const auto& c : cards) c.validate();
  if (intents.entries.empty()) throw ConfigError("config: intent table is empty");
  separation.validate();
  if (g_error_stride < 1) throw ConfigError("config: g_error_stride must be at least 1");
  if (team.batch < 1) throw ConfigError("config: team.batch must be at least 1");
  if (!(quadratic_noise >= 0.0)) throw ConfigError("config: quadratic.noise must be non-negative");
  if (level_rates_mbps.size() < trace.levels.size()) {
    throw ConfigError("config: level_rates_mbps needs one rate per resolution level");
  }
  step_schedule().validate();
}

StepSchedule ExperimentConfig::step_schedule() const {
  return schedule == ScheduleKind::kTheory ? StepSchedule::theory(T, eta0, beta0)
                                           : StepSchedule::constant(eta0, beta0);
}

TaskConfig ExperimentConfig::task_config() const {
  TaskConfig c;
  c.kind = task;
  c.schedule = step_schedule();
  c.iterations = T;
  c.variant = variant;
  c.g_error_stride = g_error_stride;
  c.team = team;
  c.team.window = window;
  c.quadratic_noise = quadratic_noise;
  c.quadratic_samples = quadratic_samples;
  c.level_rates_mbps = level_rates_mbps;
  return c;
}

ExperimentConfig default_experiment_config() {
  ExperimentConfig cfg;
  cfg.cards = default_cards(cfg.trace.levels, cfg.trace.bands);
  cfg.intents = default_intent_table();
  cfg.separation = default_separation_table(cfg.trace.levels, cfg.trace.bands);
  return cfg;
}

ExperimentConfig experiment_config_from_json(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  require_known_fields(j,
                       {"trace", "dataset", "agents", "agents_file", "intents", "separation", "task",
                        "optimizer", "team", "quadratic", "level_rates_mbps", "verify",
                        "output_dir"},
                       "config");
  ExperimentConfig cfg = default_experiment_config();
  bool custom_levels = false;

  if (j.contains("trace")) {
    const json& t = section(j, "trace", "config");
    const std::string w = "config.trace";
    require_known_fields(t,
                         {"seed", "duration_s", "request_interval_s", "sample_period_s", "levels",
                          "bands", "band_signals", "bandwidth"},
                         w);
    read_opt(t, "seed", cfg.trace.seed, w);
    read_opt(t, "duration_s", cfg.trace.duration_s, w);
    read_opt(t, "request_interval_s", cfg.trace.request_interval_s, w);
    read_opt(t, "sample_period_s", cfg.trace.sample_period_s, w);
    custom_levels = t.contains("levels") || t.contains("bands");
    read_list(t, "levels", cfg.trace.levels, w);
    read_list(t, "bands", cfg.trace.bands, w);
    if (t.contains("band_signals")) {
      const json& arr = t.at("band_signals");
      if (!arr.is_array()) throw ConfigError(w + ".band_signals: expected an array");
      cfg.trace.band_signals.clear();
      for (std::size_t i = 0; i < arr.size(); ++i) {
        cfg.trace.band_signals.push_back(read_ar1(arr[i], w + ".band_signals[" + std::to_string(i) + "]"));
      }
    }
    if (t.contains("bandwidth")) cfg.trace.bandwidth = read_ar1(t.at("bandwidth"), w + ".bandwidth");
  }

  if (j.contains("dataset")) {
    const json& d = section(j, "dataset", "config");
    require_known_fields(d, {"window", "train_fraction", "seed"}, "config.dataset");
    read_opt(d, "window", cfg.window, "config.dataset");
    read_opt(d, "train_fraction", cfg.train_fraction, "config.dataset");
    read_opt(d, "seed", cfg.split_seed, "config.dataset");
  }

  if (j.contains("agents") && j.contains("agents_file")) {
    throw ConfigError("config: give either 'agents' or 'agents_file', not both");
  }
  if (j.contains("agents")) {
    cfg.cards = cards_from_json(json{{"agents", j.at("agents")}});
  } else if (j.contains("agents_file")) {
    std::filesystem::path p = read_value<std::string>(j, "agents_file", "config");
    if (p.is_relative()) p = base_dir / p;
    if (!std::filesystem::exists(p)) {
      throw ConfigError("config.agents_file: " + p.string() + " does not exist");
    }
    cfg.cards = load_cards(p);
  } else if (custom_levels) {
    cfg.cards = default_cards(cfg.trace.levels, cfg.trace.bands);
  }

  if (j.contains("intents")) cfg.intents = intent_table_from_json(j.at("intents"));
  if (j.contains("separation")) {
    cfg.separation = separation_table_from_json(j.at("separation"));
  } else if (custom_levels) {
    cfg.separation = default_separation_table(cfg.trace.levels, cfg.trace.bands);
  }
  if (j.contains("task")) cfg.task = parse_task_kind(read_value<std::string>(j, "task", "config"));

  if (j.contains("optimizer")) {
    const json& o = section(j, "optimizer", "config");
    const std::string w = "config.optimizer";
    require_known_fields(o, {"variant", "schedule", "eta0", "beta0", "T", "seeds", "g_error_stride"}, w);
    if (o.contains("variant")) cfg.variant = parse_variant(read_value<std::string>(o, "variant", w));
    if (o.contains("schedule")) {
      cfg.schedule = parse_schedule_kind(read_value<std::string>(o, "schedule", w));
    }
    read_opt(o, "eta0", cfg.eta0, w);
    read_opt(o, "beta0", cfg.beta0, w);
    read_opt(o, "T", cfg.T, w);
    read_list(o, "seeds", cfg.seeds, w);
    read_opt(o, "g_error_stride", cfg.g_error_stride, w);
  }

  if (j.contains("team")) {
    const json& t = section(j, "team", "config");
    require_known_fields(t, {"features", "batch", "init_scale", "population_samples"}, "config.team");
    read_opt(t, "features", cfg.team.features, "config.team");
    read_opt(t, "batch", cfg.team.batch, "config.team");
    read_opt(t, "init_scale", cfg.team.init_scale, "config.team");
    read_opt(t, "population_samples", cfg.team.population_samples, "config.team");
  }
  cfg.team.window = cfg.window;

  if (j.contains("quadratic")) {
    const json& q = section(j, "quadratic", "config");
    require_known_fields(q, {"noise", "samples"}, "config.quadratic");
    read_opt(q, "noise", cfg.quadratic_noise, "config.quadratic");
    read_opt(q, "samples", cfg.quadratic_samples, "config.quadratic");
  }
  read_list(j, "level_rates_mbps", cfg.level_rates_mbps, "config");

  if (j.contains("verify")) {
    const json& v = section(j, "verify", "config");
    const std::string w = "config.verify";
    require_known_fields(v,
                         {"sweep", "sweep_seeds", "rate_T", "rate_seeds", "scaling_D", "scaling_T",
                          "scaling_seeds"},
                         w);
    if (v.contains("sweep")) {
      const json& arr = v.at("sweep");
      if (!arr.is_array()) throw ConfigError(w + ".sweep: expected an array");
      cfg.verify.sweep.clear();
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string at = w + ".sweep[" + std::to_string(i) + "]";
        if (!arr[i].is_object()) throw ConfigError(at + ": expected an object");
        require_known_fields(arr[i], {"eta", "beta", "T"}, at);
        SweepSpec s;
        s.eta = read_value<double>(arr[i], "eta", at);
        s.beta = read_value<double>(arr[i], "beta", at);
        s.T = read_value<std::size_t>(arr[i], "T", at);
        cfg.verify.sweep.push_back(s);
      }
    }
    read_opt(v, "sweep_seeds", cfg.verify.sweep_seeds, w);
    read_list(v, "rate_T", cfg.verify.rate_T, w);
    read_opt(v, "rate_seeds", cfg.verify.rate_seeds, w);
    read_list(v, "scaling_D", cfg.verify.scaling_D, w);
    read_opt(v, "scaling_T", cfg.verify.scaling_T, w);
    read_opt(v, "scaling_seeds", cfg.verify.scaling_seeds, w);
  }

  if (j.contains("output_dir")) {
    std::filesystem::path p = read_value<std::string>(j, "output_dir", "config");
    cfg.output_dir = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  try {
    return experiment_config_from_json(doc, path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

nlohmann::ordered_json to_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  auto bands = nlohmann::ordered_json::array();
  for (const auto& b : cfg.trace.band_signals) bands.push_back(ar1_json(b));
  j["trace"] = {{"seed", cfg.trace.seed},
                {"duration_s", cfg.trace.duration_s},
                {"request_interval_s", cfg.trace.request_interval_s},
                {"sample_period_s", cfg.trace.sample_period_s},
                {"levels", cfg.trace.levels},
                {"bands", cfg.trace.bands},
                {"band_signals", bands},
                {"bandwidth", ar1_json(cfg.trace.bandwidth)}};
  j["dataset"] = {{"window", cfg.window},
                  {"train_fraction", cfg.train_fraction},
                  {"seed", cfg.split_seed}};
  auto cards = nlohmann::ordered_json::array();
  for (const auto& c : cfg.cards) cards.push_back(card_to_json(c));
  j["agents"] = cards;
  j["intents"] = to_json(cfg.intents);
  j["separation"] = to_json(cfg.separation);
  j["task"] = to_string(cfg.task);
  j["optimizer"] = {{"variant", to_string(cfg.variant)},
                    {"schedule", to_string(cfg.schedule)},
                    {"eta0", cfg.eta0},
                    {"beta0", cfg.beta0},
                    {"T", cfg.T},
                    {"seeds", cfg.seeds},
                    {"g_error_stride", cfg.g_error_stride}};
  j["team"] = {{"features", cfg.team.features},
               {"batch", cfg.team.batch},
               {"init_scale", cfg.team.init_scale},
               {"population_samples", cfg.team.population_samples}};
  j["quadratic"] = {{"noise", cfg.quadratic_noise}, {"samples", cfg.quadratic_samples}};
  j["level_rates_mbps"] = cfg.level_rates_mbps;
  auto sweep = nlohmann::ordered_json::array();
  for (const auto& s : cfg.verify.sweep) sweep.push_back({{"eta", s.eta}, {"beta", s.beta}, {"T", s.T}});
  j["verify"] = {{"sweep", sweep},
                 {"sweep_seeds", cfg.verify.sweep_seeds},
                 {"rate_T", cfg.verify.rate_T},
                 {"rate_seeds", cfg.verify.rate_seeds},
                 {"scaling_D", cfg.verify.scaling_D},
                 {"scaling_T", cfg.verify.scaling_T},
                 {"scaling_seeds", cfg.verify.scaling_seeds}};
  if (!cfg.output_dir.empty()) j["output_dir"] = cfg.output_dir.string();
  return j;
}

void apply_overrides(ExperimentConfig& cfg, const Overrides& o) {
  if (o.seed) cfg.seeds.front() = *o.seed;
  if (o.out_dir) cfg.output_dir = *o.out_dir;
  if (o.variant) cfg.variant = parse_variant(*o.variant);
  if (o.T) cfg.T = *o.T;
  if (o.eta0) cfg.eta0 = *o.eta0;
  if (o.beta0) cfg.beta0 = *o.beta0;
  cfg.validate();
}

std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg) {
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  if (const char* env = std::getenv(kOutputRootEnv); env && *env) return env;
  return "runs";
}

std::vector<AgentRecord> build_agent_records(const ExperimentConfig& cfg) {
  const TraceBundle traces = generate_all_traces(cfg.trace);
  const AgentDatasets data =
      build_datasets(cfg.trace, traces, cfg.window, cfg.train_fraction, cfg.split_seed);
  std::vector<AgentRecord> out;
  for (std::size_t i = 0; i < cfg.cards.size(); ++i) {
    const AgentCard& card = cfg.cards[i];
    const std::uint64_t key = i + 1;
    switch (card.layer) {
      case Layer::kApplication:
        out.emplace_back(card, data.application, std::vector<Trace>{traces.requests}, key);
        break;
      case Layer::kPhysical:
        out.emplace_back(card, data.physical, traces.bands, key);
        break;
      case Layer::kNetwork:
        out.emplace_back(card, data.network, std::vector<Trace>{traces.bandwidth}, key);
        break;
    }
  }
  return out;
}

std::unique_ptr<StochasticTask> make_task(const ExperimentConfig& cfg,
                                          const std::vector<AgentRecord>& records,
                                          std::uint64_t seed) {
  switch (cfg.task) {
    case TaskKind::kCrossLayerSim: {
      std::vector<const AgentRecord*> members;
      for (const auto& r : records) members.push_back(&r);
      AgentTeam::Options opts = cfg.team;
      opts.window = cfg.window;
      return std::make_unique<AgentTeam>(std::move(members), opts);
    }
    case TaskKind::kQuadraticOracle:
      return std::make_unique<QuadraticTask>(
          make_conflicting_quadratic_task(cfg.quadratic_noise, cfg.quadratic_samples, seed));
    case TaskKind::kIdenticalQuadratic:
      return std::make_unique<QuadraticTask>(make_identical_quadratic_task(
          records.empty() ? 3 : records.size(), cfg.quadratic_noise, cfg.quadratic_samples, seed));
  }
  throw ConfigError("unknown task kind");
}

}  // namespace agentcoord
