#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

namespace magaisil {

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// Parses JSON, rethrowing library errors as ParseError tagged with `origin`.
nlohmann::json parse_json_text(std::string_view text, const std::string& origin);

}  // namespace magaisil
