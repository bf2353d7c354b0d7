#include "magaisil/demos/demo_io.hpp"

#include <sstream>

#include <json.hpp>

#include "magaisil/common/error.hpp"
#include "magaisil/common/io.hpp"

namespace magaisil::demos {

using nlohmann::json;

json demo_episode_to_json(const algo::DemoEpisode& e) {
  std::vector<int> actions;
  actions.reserve(e.actions.size());
  for (world::ActionId a : e.actions) actions.push_back(world::index_of(a));
  return {{"obs", e.observations}, {"actions", actions}, {"task_id", e.task_id}, {"seed", e.seed}};
}

algo::DemoEpisode demo_episode_from_json(const json& j) {
  algo::DemoEpisode e;
  e.observations = j.at("obs").get<std::vector<std::vector<double>>>();
  for (int a : j.at("actions").get<std::vector<int>>()) e.actions.push_back(world::action_from_index(a));
  e.task_id = j.at("task_id").get<std::string>();
  e.seed = j.at("seed").get<std::uint64_t>();
  return e;
}

json demo_set_to_json(const algo::DemoSet& demos) {
  json episodes = json::array();
  for (const algo::DemoEpisode& e : demos.episodes) episodes.push_back(demo_episode_to_json(e));
  return {{"agent", std::string(to_string(demos.agent))},
          {"provenance", std::string(to_string(demos.provenance))},
          {"episodes", std::move(episodes)}};
}

algo::DemoSet demo_set_from_json(const json& j) {
  algo::DemoSet demos;
  try {
    demos.agent = algo::agent_from_string(j.at("agent").get<std::string>());
    demos.provenance = algo::provenance_from_string(j.at("provenance").get<std::string>());
    for (const json& e : j.at("episodes")) demos.episodes.push_back(demo_episode_from_json(e));
  } catch (const json::exception& e) {
    throw ParseError(std::string("demo set: ") + e.what());
  } catch (const ContractError& e) {
    throw ParseError(std::string("demo set: ") + e.what());
  }
  return demos;
}

std::string serialize_demos(const algo::DemoSet& demos) {
  std::string out = json{{"format", "magaisil-demos"}, {"version", kDemoFormatVersion}}.dump();
  out += '\n';
  for (const algo::DemoEpisode& e : demos.episodes) {
    json line{{"agent", std::string(to_string(demos.agent))},
              {"provenance", std::string(to_string(demos.provenance))}};
    line.update(demo_episode_to_json(e));
    out += line.dump();
    out += '\n';
  }
  return out;
}

algo::DemoSet parse_demos(std::string_view text, const std::string& origin) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  algo::DemoSet demos;
  bool have_header = false;
  bool have_episode = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    const json j = parse_json_text(line, where);
    try {
      if (!have_header) {
        if (j.value("format", "") != "magaisil-demos") throw ParseError(where + ": missing format header");
        if (j.at("version").get<int>() != kDemoFormatVersion) {
          throw ParseError(where + ": unsupported demo format version");
        }
        have_header = true;
        continue;
      }
      const algo::AgentId agent = algo::agent_from_string(j.at("agent").get<std::string>());
      const algo::Provenance provenance =
          algo::provenance_from_string(j.at("provenance").get<std::string>());
      if (have_episode && (agent != demos.agent || provenance != demos.provenance)) {
        throw ParseError(where + ": agent/provenance differs from earlier episodes");
      }
      demos.agent = agent;
      demos.provenance = provenance;
      have_episode = true;
      demos.episodes.push_back(demo_episode_from_json(j));
    } catch (const json::exception& e) {
      throw ParseError(where + ": " + e.what());
    } catch (const ContractError& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  if (!have_header) throw ParseError(origin + ": empty demo file");
  try {
    demos.validate();
  } catch (const InvariantError& e) {
    throw ParseError(origin + ": " + e.what());
  }
  return demos;
}

void write_demo_file(const std::filesystem::path& path, const algo::DemoSet& demos) {
  write_file_atomic(path, serialize_demos(demos));
}

algo::DemoSet read_demo_file(const std::filesystem::path& path) {
  return parse_demos(read_file(path), path.string());
}

}  // namespace magaisil::demos
