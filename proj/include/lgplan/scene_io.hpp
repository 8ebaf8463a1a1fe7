#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "lgplan/json_lines.hpp"
#include "lgplan/scene.hpp"

namespace lgplan {

Json pose_to_json(const Pose& p);
Pose pose_from_json(const Json& j);

Json scene_to_json(const Scene& s);

/// Parses a scene document. Schema and invariant violations raise
/// ParseError (code "invalid_scene") pointing at the offending line.
Scene scene_from_text(std::string_view text);
Scene scene_from_json(const LinedJson& doc);
Scene load_scene(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Canonical dump (2-space indent, trailing newline).
std::string dump_json(const Json& j);

}  // namespace lgplan
