#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lgplan/json_lines.hpp"
#include "lgplan/patterns.hpp"
#include "lgplan/scene.hpp"

namespace lgplan {

struct SubGoal {
  std::string pattern;       // resolved pattern name
  std::vector<int> objects;  // sampling order; bottom-first for towers
  std::optional<int> anchor;  // spatial patterns only

  friend bool operator==(const SubGoal&, const SubGoal&) = default;
};

/// The distribution list: one sub-goal per pattern instance, in order.
struct GoalSpec {
  std::vector<SubGoal> subgoals;

  friend bool operator==(const GoalSpec&, const GoalSpec&) = default;
};

/// Scores how well `query` matches a prior; 0 means no match.
using KeyScorer = std::function<double(std::string_view query, const PatternPrior& prior)>;

/// Lower-cases and replaces punctuation runs with single spaces.
std::string normalize_key(std::string_view key);

/// Number of distinct non-stopword query tokens found among the prior's keys.
double token_overlap_score(std::string_view query, const PatternPrior& prior);

/// Exact key or name, then normalised match, then best score (ties go to the
/// lexicographically smallest name). Throws Error("unknown_pattern").
const PatternPrior& resolve_pattern_key(std::string_view key, const PatternDb& db,
                                        const KeyScorer& scorer = token_overlap_score);

/// Parses the goal mini-language:
///
///   spec    := clause (";" clause)*
///   clause  := IDENT "(" objlist ["|" obj] ")"
///   objlist := obj ("," obj)*
///   obj     := "o" INTEGER | "o_" NAME
///
/// Identifiers are case-insensitive and resolved through the pattern
/// database. Named references ("o_apple") need `scene`; with a scene every
/// reference is checked to exist. Errors are ParseError with the position.
GoalSpec parse_dsl(std::string_view text, const PatternDb& db, const Scene* scene = nullptr,
                   const KeyScorer& scorer = token_overlap_score);

/// Canonical text form; parse_dsl(render_dsl(g)) == g.
std::string render_dsl(const GoalSpec& goal);

/// Scene-independent checks: non-empty, known patterns, duplicate-free object
/// lists, anchors exactly on spatial sub-goals and not among their objects,
/// each object in at most one sub-goal, no anchor cycles. Throws Error.
void validate_goal(const GoalSpec& goal, const PatternDb& db);
/// Adds: every referenced id exists in `scene`.
void validate_goal(const GoalSpec& goal, const PatternDb& db, const Scene& scene);

Json goal_to_json(const GoalSpec& goal);
GoalSpec goal_from_json(const Json& j, const PatternDb& db);

}  // namespace lgplan
