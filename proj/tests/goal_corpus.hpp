#pragma once

// Generated goal corpus and invalid-grammar fixtures shared by the parser
// tests and the acceptance binary.

#include <algorithm>
#include <string>
#include <vector>

#include "lgplan/instruction.hpp"
#include "lgplan/rng.hpp"

namespace goal_corpus {

/// Random valid GoalSpec over ids 1..40: disjoint object lists, anchors
/// taken from earlier sub-goals or unused ids, so no cycles.
inline lgplan::GoalSpec random_goal(lgplan::Rng& rng, const lgplan::PatternDb& db) {
  const auto priors = db.priors();
  std::vector<int> free_ids;
  for (int id = 1; id <= 40; ++id) free_ids.push_back(id);
  auto take = [&] {
    const auto k = rng.index(free_ids.size());
    const int id = free_ids[k];
    free_ids.erase(free_ids.begin() + static_cast<long>(k));
    return id;
  };
  lgplan::GoalSpec goal;
  std::vector<int> used;
  const int n = 1 + static_cast<int>(rng.index(4));
  for (int i = 0; i < n; ++i) {
    const lgplan::PatternPrior& p = priors[rng.index(priors.size())];
    lgplan::SubGoal sg;
    sg.pattern = p.name;
    const int count = p.is_spatial() ? 1 + static_cast<int>(rng.index(2))
                                     : 2 + static_cast<int>(rng.index(4));
    for (int k = 0; k < count; ++k) sg.objects.push_back(take());
    if (p.is_spatial()) sg.anchor = !used.empty() && rng.uniform() < 0.5
                                        ? used[rng.index(used.size())]
                                        : take();
    used.insert(used.end(), sg.objects.begin(), sg.objects.end());
    goal.subgoals.push_back(std::move(sg));
  }
  return goal;
}

struct InvalidCase {
  std::string text;
  std::string code;
  int line;
  int column;
};

inline std::vector<InvalidCase> invalid_cases() {
  return {
      {"", "syntax_error", 1, 1},
      {"line(o1,o2", "syntax_error", 1, 11},
      {"line o1,o2)", "syntax_error", 1, 6},
      {"line(o1,,o2)", "syntax_error", 1, 9},
      {"line(o1 o2)", "syntax_error", 1, 9},
      {"line(o1,o2);", "syntax_error", 1, 13},
      {"line(o1,o2) circle(o3,o4)", "syntax_error", 1, 13},
      {"line(x1,o2)", "syntax_error", 1, 6},
      {"line(o1,o2)\ncircle(o3,o4#)", "syntax_error", 2, 13},
      {"line(o1,o2);\n  3d(o4)", "syntax_error", 2, 3},
      {"line(o1,o2|)", "syntax_error", 1, 12},
      {"line(o1,oo2)", "syntax_error", 1, 9},
      {"zigzag(o1,o2)", "unknown_pattern", 1, 1},
      {"line(o1,o2); left(o3)", "invalid_goal", 1, 14},
      {"line(o1,o2|o3)", "invalid_goal", 1, 1},
      {"left(o1|o1)", "invalid_goal", 1, 1},
      {"line(o1,o2);\ncircle(o2,o3)", "invalid_goal", 2, 1},
      {"left(o1|o2); right(o2|o1)", "cyclic_goal", 1, 14},
      {"line(o_apple,o2)", "unknown_object", 1, 6},
  };
}

}  // namespace goal_corpus
