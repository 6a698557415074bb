#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "agentcoord/losses.hpp"

namespace agentcoord {

enum class Layer { kApplication, kPhysical, kNetwork };

std::string to_string(Layer l);
/// Accepts "application", "physical" and "network". Throws ConfigError otherwise.
Layer parse_layer(const std::string& s);

struct ActionSpec {
  enum class Kind { kDiscrete, kContinuous };
  std::string name;
  Kind kind = Kind::kDiscrete;
  std::vector<std::string> values;  // discrete options
  double min = 0.0;                 // continuous range
  double max = 0.0;

  bool admits(const std::string& value) const;
  bool admits(double value) const;

  friend bool operator==(const ActionSpec&, const ActionSpec&) = default;
};

/// Capability meta-file an agent registers with the controller.
struct AgentCard {
  std::string id;
  Layer layer = Layer::kApplication;
  std::string function;
  std::vector<std::string> state_space;  // named signal channels
  std::vector<ActionSpec> action_space;
  LossKind loss = LossKind::kL1;
  std::vector<std::string> skills;

  /// Throws ConfigError on an empty id or an empty action space.
  void validate() const;
  const ActionSpec* action(const std::string& name) const;

  friend bool operator==(const AgentCard&, const AgentCard&) = default;
};

/// Strict parse: unknown or missing fields throw ConfigError.
AgentCard card_from_json(const nlohmann::json& j);
nlohmann::ordered_json card_to_json(const AgentCard& card);

/// A JSON document {"agents": [card, ...]}.
std::vector<AgentCard> load_cards(const std::filesystem::path& path);
std::vector<AgentCard> cards_from_json(const nlohmann::json& doc);
void save_cards(const std::filesystem::path& path, const std::vector<AgentCard>& cards);

/// The three cards of the video-quality scenario: an application agent
/// choosing resolutions (L1), a physical agent choosing NR bands (MSE) and a
/// network agent tracking bandwidth (LogCosh).
std::vector<AgentCard> default_cards(const std::vector<std::string>& levels,
                                     const std::vector<std::string>& bands);

/// Rejects any key of `j` not listed in `allowed`.
void require_known_fields(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                          const std::string& where);

}  // namespace agentcoord
