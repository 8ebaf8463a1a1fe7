#pragma once

#include <map>
#include <string>
#include <string_view>

#include "json.hpp"

namespace lgplan {

using Json = nlohmann::json;

/// A parsed JSON document that remembers the source line of every value,
/// keyed by JSON pointer ("" is the root, "/objects/2/pose" a nested value).
struct LinedJson {
  Json value;
  std::map<std::string, int> lines;

  /// Line of the value at `pointer`, falling back to its closest recorded
  /// ancestor, then to line 1.
  int line_of(std::string pointer) const;
};

/// Throws ParseError (code "json_syntax") with line and column on malformed
/// input.
LinedJson parse_json_with_lines(std::string_view text);

}  // namespace lgplan
