#pragma once

#include <filesystem>
#include <optional>

#include <json.hpp>

#include "magaisil/nn/adam.hpp"
#include "magaisil/nn/mlp.hpp"

namespace magaisil::nn {

inline constexpr int kCheckpointVersion = 1;

// {version, layer_sizes, head, weights: [{w: [[...]], b: [...]}, ...], adam?}
// Doubles are written in shortest round-trip form, so parse(dump(x)) == x bit for bit.
nlohmann::json to_json(const Mlp& net, const AdamState* adam = nullptr);
Mlp mlp_from_json(const nlohmann::json& j);
std::optional<AdamState> adam_from_json(const nlohmann::json& j);

nlohmann::json adam_to_json(const AdamState& adam);
AdamState adam_state_from_json(const nlohmann::json& j);

void save_network(const std::filesystem::path& path, const Mlp& net, const AdamState* adam = nullptr);
std::pair<Mlp, std::optional<AdamState>> load_network(const std::filesystem::path& path);

}  // namespace magaisil::nn
