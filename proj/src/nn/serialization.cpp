#include "magaisil/nn/serialization.hpp"

#include <fstream>

#include "magaisil/common/error.hpp"
#include "magaisil/common/io.hpp"

namespace magaisil::nn {

using nlohmann::json;

json adam_to_json(const AdamState& adam) {
  return json{{"learning_rate", adam.config.learning_rate},
              {"beta1", adam.config.beta1},
              {"beta2", adam.config.beta2},
              {"epsilon", adam.config.epsilon},
              {"step", adam.step},
              {"m", adam.first_moment},
              {"v", adam.second_moment}};
}

AdamState adam_state_from_json(const json& j) {
  try {
    AdamState s;
    s.config.learning_rate = j.at("learning_rate").get<double>();
    s.config.beta1 = j.at("beta1").get<double>();
    s.config.beta2 = j.at("beta2").get<double>();
    s.config.epsilon = j.at("epsilon").get<double>();
    s.step = j.at("step").get<std::int64_t>();
    s.first_moment = j.at("m").get<std::vector<double>>();
    s.second_moment = j.at("v").get<std::vector<double>>();
    return s;
  } catch (const json::exception& e) {
    throw ParseError(std::string("adam state: ") + e.what());
  }
}

json to_json(const Mlp& net, const AdamState* adam) {
  json layers = json::array();
  const auto& sizes = net.layer_sizes();
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    json rows = json::array();
    for (int r = 0; r < sizes[l + 1]; ++r) {
      std::vector<double> row(sizes[l]);
      for (int c = 0; c < sizes[l]; ++c) row[c] = net.weight(l, r, c);
      rows.push_back(std::move(row));
    }
    std::vector<double> b(sizes[l + 1]);
    for (int r = 0; r < sizes[l + 1]; ++r) b[r] = net.bias(l, r);
    layers.push_back(json{{"w", std::move(rows)}, {"b", std::move(b)}});
  }
  json j{{"version", kCheckpointVersion},
         {"layer_sizes", sizes},
         {"head", std::string(to_string(net.head()))},
         {"weights", std::move(layers)}};
  if (adam != nullptr) j["adam"] = adam_to_json(*adam);
  return j;
}

Mlp mlp_from_json(const json& j) {
  try {
    if (j.at("version").get<int>() != kCheckpointVersion) {
      throw ParseError("unsupported network checkpoint version");
    }
    Mlp net(j.at("layer_sizes").get<std::vector<int>>(), head_from_string(j.at("head").get<std::string>()));
    const json& layers = j.at("weights");
    if (layers.size() != net.num_layers()) throw ParseError("weights: wrong number of layers");
    std::span<double> params = net.mutable_params();
    const auto& sizes = net.layer_sizes();
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
      const json& rows = layers[l].at("w");
      const json& b = layers[l].at("b");
      if (rows.size() != static_cast<std::size_t>(sizes[l + 1]) ||
          b.size() != static_cast<std::size_t>(sizes[l + 1])) {
        throw ParseError("weights: layer " + std::to_string(l) + " has the wrong shape");
      }
      for (int r = 0; r < sizes[l + 1]; ++r) {
        if (rows[r].size() != static_cast<std::size_t>(sizes[l])) {
          throw ParseError("weights: layer " + std::to_string(l) + " row has the wrong width");
        }
        for (int c = 0; c < sizes[l]; ++c) {
          params[net.weight_offset(l) + static_cast<std::size_t>(r) * sizes[l] + c] =
              rows[r][c].get<double>();
        }
        params[net.bias_offset(l) + r] = b[r].get<double>();
      }
    }
    return net;
  } catch (const json::exception& e) {
    throw ParseError(std::string("network checkpoint: ") + e.what());
  }
}

std::optional<AdamState> adam_from_json(const json& j) {
  if (!j.contains("adam")) return std::nullopt;
  return adam_state_from_json(j.at("adam"));
}

void save_network(const std::filesystem::path& path, const Mlp& net, const AdamState* adam) {
  write_file_atomic(path, to_json(net, adam).dump() + "\n");
}

std::pair<Mlp, std::optional<AdamState>> load_network(const std::filesystem::path& path) {
  const json j = parse_json_text(read_file(path), path.string());
  return {mlp_from_json(j), adam_from_json(j)};
}

}  // namespace magaisil::nn
