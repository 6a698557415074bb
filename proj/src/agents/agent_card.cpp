#include "agentcoord/agent_card.hpp"

#include <algorithm>
#include <fstream>

#include "agentcoord/error.hpp"

namespace agentcoord {

using nlohmann::json;

std::string to_string(Layer l) {
  switch (l) {
    case Layer::kApplication: return "application";
    case Layer::kPhysical: return "physical";
    case Layer::kNetwork: return "network";
  }
  return "?";
}

Layer parse_layer(const std::string& s) {
  if (s == "application") return Layer::kApplication;
  if (s == "physical") return Layer::kPhysical;
  if (s == "network") return Layer::kNetwork;
  throw ConfigError("unknown layer '" + s + "' (expected application|physical|network)");
}

bool ActionSpec::admits(const std::string& value) const {
  return kind == Kind::kDiscrete && std::find(values.begin(), values.end(), value) != values.end();
}

bool ActionSpec::admits(double value) const {
  return kind == Kind::kContinuous && value >= min && value <= max;
}

void AgentCard::validate() const {
  if (id.empty()) throw ConfigError("agent card id must be non-empty");
  if (action_space.empty()) throw ConfigError("agent card '" + id + "' has no actions");
  for (const auto& a : action_space) {
    if (a.kind == ActionSpec::Kind::kDiscrete && a.values.empty()) {
      throw ConfigError("agent card '" + id + "': discrete action '" + a.name + "' has no values");
    }
    if (a.kind == ActionSpec::Kind::kContinuous && !(a.min <= a.max)) {
      throw ConfigError("agent card '" + id + "': action '" + a.name + "' has an empty range");
    }
  }
}

const ActionSpec* AgentCard::action(const std::string& name) const {
  for (const auto& a : action_space) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

void require_known_fields(const json& j, std::initializer_list<const char*> allowed,
                          const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ConfigError(where + ": unknown field '" + key + "'");
    }
  }
}

namespace {

template <class T>
T required(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + ": field '" + key + "' has the wrong type");
  }
}

ActionSpec action_from_json(const json& j, const std::string& where) {
  const std::string kind = required<std::string>(j, "kind", where);
  ActionSpec a;
  a.name = required<std::string>(j, "name", where);
  if (kind == "discrete") {
    require_known_fields(j, {"name", "kind", "values"}, where);
    a.kind = ActionSpec::Kind::kDiscrete;
    a.values = required<std::vector<std::string>>(j, "values", where);
  } else if (kind == "continuous") {
    require_known_fields(j, {"name", "kind", "min", "max"}, where);
    a.kind = ActionSpec::Kind::kContinuous;
    a.min = required<double>(j, "min", where);
    a.max = required<double>(j, "max", where);
  } else {
    throw ConfigError(where + ": action kind must be discrete or continuous");
  }
  return a;
}

}  // namespace

AgentCard card_from_json(const json& j) {
  const std::string where = "agent card";
  require_known_fields(j, {"id", "layer", "function", "state_space", "action_space", "loss", "skills"},
                       where);
  AgentCard c;
  c.id = required<std::string>(j, "id", where);
  const std::string at = where + " '" + c.id + "'";
  c.layer = parse_layer(required<std::string>(j, "layer", at));
  c.function = required<std::string>(j, "function", at);
  c.state_space = required<std::vector<std::string>>(j, "state_space", at);
  const json actions = required<json>(j, "action_space", at);
  if (!actions.is_array()) throw ConfigError(at + ": action_space must be an array");
  for (const auto& a : actions) c.action_space.push_back(action_from_json(a, at + " action"));
  c.loss = parse_loss_kind(required<std::string>(j, "loss", at));
  c.skills = required<std::vector<std::string>>(j, "skills", at);
  c.validate();
  return c;
}

nlohmann::ordered_json card_to_json(const AgentCard& card) {
  nlohmann::ordered_json j;
  j["id"] = card.id;
  j["layer"] = to_string(card.layer);
  j["function"] = card.function;
  j["state_space"] = card.state_space;
  auto actions = nlohmann::ordered_json::array();
  for (const auto& a : card.action_space) {
    nlohmann::ordered_json aj;
    aj["name"] = a.name;
    if (a.kind == ActionSpec::Kind::kDiscrete) {
      aj["kind"] = "discrete";
      aj["values"] = a.values;
    } else {
      aj["kind"] = "continuous";
      aj["min"] = a.min;
      aj["max"] = a.max;
    }
    actions.push_back(std::move(aj));
  }
  j["action_space"] = std::move(actions);
  j["loss"] = to_string(card.loss);
  j["skills"] = card.skills;
  return j;
}

std::vector<AgentCard> cards_from_json(const json& doc) {
  require_known_fields(doc, {"agents"}, "agent card document");
  if (!doc.contains("agents") || !doc.at("agents").is_array()) {
    throw ConfigError("agent card document: 'agents' must be an array");
  }
  std::vector<AgentCard> out;
  for (const auto& c : doc.at("agents")) out.push_back(card_from_json(c));
  return out;
}

std::vector<AgentCard> load_cards(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open agent card file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return cards_from_json(doc);
}

void save_cards(const std::filesystem::path& path, const std::vector<AgentCard>& cards) {
  nlohmann::ordered_json doc;
  doc["agents"] = nlohmann::ordered_json::array();
  for (const auto& c : cards) doc["agents"].push_back(card_to_json(c));
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write agent card file " + path.string());
  out << doc.dump(2) << '\n';
}

std::vector<AgentCard> default_cards(const std::vector<std::string>& levels,
                                     const std::vector<std::string>& bands) {
  AgentCard a{"aAgent-video",
              Layer::kApplication,
              "video rendering with adjustable resolution",
              {"requested_level"},
              {ActionSpec{"resolution", ActionSpec::Kind::kDiscrete, levels, 0.0, 0.0}},
              LossKind::kL1,
              {"resolution-adaptation"}};
  AgentCard p{"pAgent-multiband",
              Layer::kPhysical,
              "multi-channel sensing and band assignment",
              bands,
              {ActionSpec{"band", ActionSpec::Kind::kDiscrete, bands, 0.0, 0.0}},
              LossKind::kMse,
              {"multi-band-sensing"}};
  AgentCard n{"nAgent-bandwidth",
              Layer::kNetwork,
              "end-to-end bandwidth tracking and prediction",
              {"bandwidth"},
              {ActionSpec{"bandwidth_mbps", ActionSpec::Kind::kContinuous, {}, 0.0, 1.0e5}},
              LossKind::kLogCosh,
              {"bandwidth-tracking"}};
  return {a, p, n};
}

}  // namespace agentcoord
