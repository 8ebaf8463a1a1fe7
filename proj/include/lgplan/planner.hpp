#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "lgplan/instruction.hpp"
#include "lgplan/patterns.hpp"
#include "lgplan/rng.hpp"
#include "lgplan/scene.hpp"

namespace lgplan {

struct PlannerConfig {
  int budget = 10000;  // simulation calls
  double exploration = std::sqrt(2.0);
  int width = 8;  // untried action slots per unblocked sub-goal and node
  int pose_tries = 64;
  int relocation_tries = 64;
};

/// Throws Error("invalid_config") for out-of-range values.
void validate(const PlannerConfig& cfg);

enum class ActionKind { goal_placement, relocation, unstack };

std::string_view to_string(ActionKind k);
std::optional<ActionKind> parse_action_kind(std::string_view s);

struct Action {
  int object_id = 0;
  Pose target;
  ActionKind kind = ActionKind::goal_placement;

  friend bool operator==(const Action&, const Action&) = default;
};

struct Plan {
  std::vector<Action> actions;
  int steps_used = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const Plan&, const Plan&) = default;
};

struct SearchResult {
  bool solved = false;
  Plan plan;  // empty unless solved
  int best_reward = 0;  // highest |F| - |F_r| reached
  int requirement_count = 0;  // |F|
};

/// The distribution list F together with one branch's sampling progress:
/// which objects of each sub-goal already have goal poses (the complement is
/// F_r). Cheap to copy; the compiled goal is shared.
class Requirements {
 public:
  /// Validates `goal` against `scene` (Error on failure).
  static Requirements from_goal(const GoalSpec& goal, const PatternDb& db, const Scene& scene);

  /// A single sub-goal over the given objects (ascending id) whose samplers
  /// are Dirac assignments to the given poses. Objects already sitting at
  /// their pose start out satisfied.
  static Requirements from_fixed_poses(const std::map<int, Pose>& goals, const Scene& scene);

  std::size_t subgoal_count() const { return entries_->size(); }
  int total() const { return total_; }
  int satisfied() const { return satisfied_; }
  int remaining() const { return total_ - satisfied_; }

  bool pending(std::size_t subgoal) const;
  /// Pending and not waiting on an anchor whose own requirement is still in
  /// F_r.
  bool dependency_gate(std::size_t subgoal) const;
  /// Next object to place for a pending sub-goal.
  int next_object(std::size_t subgoal) const;
  bool is_fixed(std::size_t subgoal) const;
  /// Fixed pose of the sub-goal's next object.
  Pose fixed_target(std::size_t subgoal) const;
  /// Goal pose drawn in this branch for the object at `position`.
  const std::optional<Pose>& sampled(std::size_t subgoal, std::size_t position) const {
    return sampled_[subgoal][position];
  }
  /// Sampling context for the next object (pattern sub-goals only).
  SamplingContext context(std::size_t subgoal, const Scene& scene) const;

  /// Bookkeeping after `object_id` moved to `p`. A goal placement for
  /// `subgoal` records the pose. Any other move of an already placed object
  /// puts its requirement back: its own pose is dropped, and so is every
  /// sample that was conditioned on it (the rest of a curve when it was one
  /// of the two poses fixing the curve, the rest of a tower above its base).
  /// Moving an anchor drops all samples of the sub-goals anchored on it.
  void record_move(int object_id, const Pose& p, std::optional<std::size_t> subgoal);

 private:
  struct Entry {
    const PatternPrior* prior = nullptr;  // null for fixed-pose entries
    std::vector<int> objects;
    std::optional<int> anchor;
    std::vector<Pose> fixed;  // per object, fixed-pose entries only
  };

  std::shared_ptr<const std::vector<Entry>> entries_;
  std::shared_ptr<const PatternDb> db_;
  std::vector<std::vector<std::optional<Pose>>> sampled_;
  int total_ = 0;
  int satisfied_ = 0;
};

struct ChildStats {
  double reward_sum = 0.0;
  int visits = 0;
  bool selectable = true;
};

double ucb_score(const ChildStats& child, int parent_visits, double c);

/// argmax over selectable children of w/n + c sqrt(ln N / n); ties go to the
/// lowest index. Throws Error("leaf") when nothing is selectable.
std::size_t ucb_select(std::span<const ChildStats> children, int parent_visits, double c);

/// One simulation (expansion) step for `subgoal`: an unstack when its next
/// object is buried, a goal placement when a sampled pose is feasible, else
/// the relocation of an obstacle hit by the last colliding sample. nullopt
/// is a failed simulation.
std::optional<Action> simulate_step(const Scene& scene, const Requirements& req,
                                    std::size_t subgoal, Rng& rng, const PlannerConfig& cfg);

/// Monte Carlo tree search over rearrangement actions. Returns on the first
/// node whose F_r is empty.
class MctsPlanner {
 public:
  MctsPlanner(Scene scene, Requirements requirements, PlannerConfig cfg, std::uint64_t seed);
  ~MctsPlanner();
  MctsPlanner(const MctsPlanner&) = delete;
  MctsPlanner& operator=(const MctsPlanner&) = delete;

  SearchResult run();

  /// n(s) = 1 + sum of children's n for every node of the tree.
  bool visit_accounting_holds() const;
  std::size_t node_count() const;

 private:
  struct Node;

  std::unique_ptr<Node> make_node(Scene scene, Requirements req, Node* parent,
                                  std::optional<Action> action);
  void add_slots(Node& n);

  PlannerConfig cfg_;
  std::uint64_t seed_;
  Rng rng_;
  std::unique_ptr<Node> root_;
};

SearchResult mcts_plan(const Scene& scene, const GoalSpec& goal, const PatternDb& db,
                       const PlannerConfig& cfg, std::uint64_t seed);

/// Baseline with known goal poses: the same search with Dirac samplers.
SearchResult pmcts_plan(const Scene& scene, const std::map<int, Pose>& goal_poses,
                        const PlannerConfig& cfg, std::uint64_t seed);

}  // namespace lgplan
