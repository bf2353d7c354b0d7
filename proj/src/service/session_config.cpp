#include "magaisil/service/session_config.hpp"

#include <cstdlib>
#include <sstream>

#include <toml.hpp>

#include "magaisil/common/error.hpp"
#include "magaisil/common/io.hpp"

namespace magaisil::service {

using nlohmann::json;

std::string_view to_string(JudgeKind k) { return k == JudgeKind::Oracle ? "oracle" : "human"; }

JudgeKind judge_kind_from_string(std::string_view s) {
  if (s == "oracle") return JudgeKind::Oracle;
  if (s == "human") return JudgeKind::Human;
  throw ParseError("judge must be 'oracle' or 'human', got '" + std::string(s) + "'");
}

void SessionConfig::validate(bool check_files) const {
  train.validate();
  if (task.empty()) throw InvariantError("task", "must name a task");
  if (episodes < 1) throw InvariantError("episodes", "must be at least 1");
  if (checkpoint_interval < 0) throw InvariantError("checkpoint_interval", "must be >= 0");
  if (!(judgment_timeout_s > 0.0)) throw InvariantError("judgment_timeout_s", "must be positive");
  if (demo_episodes < 1) throw InvariantError("demos.episodes", "must be at least 1");
  if (demos_leader.empty() != demos_follower.empty()) {
    throw InvariantError("demos", "give both leader and follower demo files, or neither");
  }
  for (const auto& [field, path] : {std::pair{"demos.leader", &demos_leader},
                                    std::pair{"demos.follower", &demos_follower}}) {
    if (check_files && !path->empty() && !std::filesystem::is_regular_file(*path)) {
      throw InvariantError(field, "no such file '" + *path + "'");
    }
  }
  if (judge == JudgeKind::Human && !serve) {
    throw InvariantError("judge", "human judging needs the HTTP API; run it through `serve`");
  }
  if (port < 0 || port > 65535) throw InvariantError("serve.port", "must lie in [0, 65535]");
}

std::filesystem::path data_dir() {
  if (const char* d = std::getenv("MAGAISIL_DATA_DIR"); d != nullptr && *d != '\0') return d;
  return std::filesystem::current_path();
}

std::filesystem::path SessionConfig::resolved_out_dir() const {
  if (!out_dir.empty()) return out_dir;
  const std::string stem = std::filesystem::path(task).stem().string();
  return data_dir() / "runs" /
         (std::string(algo::to_string(mode)) + "-" + stem + "-s" + std::to_string(train.seed));
}

json to_json(const SessionConfig& c) {
  return {{"mode", std::string(algo::to_string(c.mode))},
          {"judge", std::string(to_string(c.judge))},
          {"task", c.task},
          {"episodes", c.episodes},
          {"checkpoint_interval", c.checkpoint_interval},
          {"judgment_timeout_s", c.judgment_timeout_s},
          {"out_dir", c.out_dir},
          {"train", algo::to_json(c.train)},
          {"demos",
           {{"leader", c.demos_leader},
            {"follower", c.demos_follower},
            {"quality", std::string(demos::to_string(c.demo_quality))},
            {"episodes", c.demo_episodes},
            {"seed", c.demo_seed}}},
          {"serve", {{"enabled", c.serve}, {"host", c.host}, {"port", c.port}}}};
}

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ParseError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
void take(const json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

json toml_to_json(const toml::node& node) {
  if (const toml::table* t = node.as_table()) {
    json out = json::object();
    for (const auto& [k, v] : *t) out[std::string(k.str())] = toml_to_json(v);
    return out;
  }
  if (const toml::array* a = node.as_array()) {
    json out = json::array();
    for (const toml::node& v : *a) out.push_back(toml_to_json(v));
    return out;
  }
  if (const auto v = node.value_exact<std::int64_t>()) return *v;
  if (const auto v = node.value_exact<double>()) return *v;
  if (const auto v = node.value_exact<bool>()) return *v;
  if (const auto v = node.value_exact<std::string>()) return *v;
  throw ParseError("unsupported TOML value (dates and times are not used)");
}

}  // namespace

SessionConfig session_config_from_json(const json& j, SessionConfig c) {
  if (!j.is_object()) throw ParseError("session config must be an object");
  reject_unknown(j,
                 {"mode", "judge", "task", "episodes", "checkpoint_interval", "judgment_timeout_s",
                  "out_dir", "train", "demos", "serve"},
                 "session config");
  try {
    if (j.contains("mode")) c.mode = algo::mode_from_string(j.at("mode").get<std::string>());
    if (j.contains("judge")) c.judge = judge_kind_from_string(j.at("judge").get<std::string>());
    take(j, "task", c.task);
    take(j, "episodes", c.episodes);
    take(j, "checkpoint_interval", c.checkpoint_interval);
    take(j, "judgment_timeout_s", c.judgment_timeout_s);
    take(j, "out_dir", c.out_dir);
    if (j.contains("train")) c.train = algo::train_config_from_json(j.at("train"), c.train);
    if (j.contains("demos")) {
      const json& d = j.at("demos");
      reject_unknown(d, {"leader", "follower", "quality", "episodes", "seed"}, "demos");
      take(d, "leader", c.demos_leader);
      take(d, "follower", c.demos_follower);
      if (d.contains("quality")) c.demo_quality = demos::demo_quality_from_string(d.at("quality").get<std::string>());
      take(d, "episodes", c.demo_episodes);
      take(d, "seed", c.demo_seed);
    }
    if (j.contains("serve")) {
      const json& s = j.at("serve");
      reject_unknown(s, {"enabled", "host", "port"}, "serve");
      take(s, "enabled", c.serve);
      take(s, "host", c.host);
      take(s, "port", c.port);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("session config: ") + e.what());
  }
  return c;
}

SessionConfig parse_session_config(std::string_view text, SessionConfig base, const std::string& origin) {
  toml::table root;
  try {
    root = toml::parse(text, origin);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << origin << ": " << e.description() << " at line " << e.source().begin.line;
    throw ParseError(msg.str());
  }
  try {
    return session_config_from_json(toml_to_json(root), std::move(base));
  } catch (const ParseError& e) {
    throw ParseError(origin + ": " + e.what());
  }
}

SessionConfig load_session_config(const std::filesystem::path& path, SessionConfig base) {
  return parse_session_config(read_file(path), std::move(base), path.string());
}

void apply_env_overrides(SessionConfig& c) {
  const char* port = std::getenv("MAGAISIL_PORT");
  if (port == nullptr || *port == '\0') return;
  char* end = nullptr;
  const long p = std::strtol(port, &end, 10);
  if (*end != '\0' || p < 0 || p > 65535) {
    throw InvariantError("MAGAISIL_PORT", "not a port number: '" + std::string(port) + "'");
  }
  c.port = static_cast<int>(p);
}

}  // namespace magaisil::service
