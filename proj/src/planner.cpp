#include "lgplan/planner.hpp"

#include <algorithm>
#include <limits>

namespace lgplan {

void validate(const PlannerConfig& cfg) {
  if (cfg.budget < 0) throw Error("invalid_config", "budget must be non-negative");
  if (!std::isfinite(cfg.exploration) || cfg.exploration < 0.0)
    throw Error("invalid_config", "exploration constant must be finite and non-negative");
  if (cfg.width < 1) throw Error("invalid_config", "width must be at least 1");
  if (cfg.pose_tries < 1) throw Error("invalid_config", "pose_tries must be at least 1");
  if (cfg.relocation_tries < 1)
    throw Error("invalid_config", "relocation_tries must be at least 1");
}

std::string_view to_string(ActionKind k) {
  switch (k) {
    case ActionKind::goal_placement: return "goal_placement";
    case ActionKind::relocation: return "relocation";
    case ActionKind::unstack: return "unstack";
  }
  return "?";
}

std::optional<ActionKind> parse_action_kind(std::string_view s) {
  if (s == "goal_placement") return ActionKind::goal_placement;
  if (s == "relocation") return ActionKind::relocation;
  if (s == "unstack") return ActionKind::unstack;
  return std::nullopt;
}

// --- Requirements ------------------------------------------------------------

Requirements Requirements::from_goal(const GoalSpec& goal, const PatternDb& db,
                                     const Scene& scene) {
  validate_goal(goal, db, scene);
  Requirements r;
  r.db_ = std::make_shared<const PatternDb>(db);
  auto entries = std::make_shared<std::vector<Entry>>();
  for (const SubGoal& sg : goal.subgoals) {
    Entry e;
    e.prior = &r.db_->get(sg.pattern);
    e.objects = sg.objects;
    e.anchor = sg.anchor;
    r.total_ += static_cast<int>(e.objects.size());
    r.sampled_.emplace_back(e.objects.size());
    entries->push_back(std::move(e));
  }
  r.entries_ = std::move(entries);
  return r;
}

Requirements Requirements::from_fixed_poses(const std::map<int, Pose>& goals,
                                            const Scene& scene) {
  if (goals.empty()) throw Error("invalid_goal", "no goal poses given");
  std::vector<std::pair<int, Polygon>> placed;
  for (const auto& [id, p] : goals) {
    if (!scene.contains(id))
      throw Error("unknown_object", "unknown object reference o" + std::to_string(id));
    Polygon poly = transform_footprint(scene.object(id).footprint, p);
    if (!in_workspace(poly, scene.workspace()))
      throw Error("invalid_goal", "goal pose of o" + std::to_string(id) + " leaves the workspace");
    for (const auto& [other, q] : placed)
      if (goals.at(other).level() == p.level() && footprints_overlap(poly, q))
        throw Error("invalid_goal", "goal poses of o" + std::to_string(other) + " and o" +
                                        std::to_string(id) + " collide");
    placed.emplace_back(id, std::move(poly));
  }

  // One sub-goal over all objects in id order, each with a Dirac sampler.
  Requirements r;
  Entry e;
  r.sampled_.emplace_back();
  for (const auto& [id, p] : goals) {
    e.objects.push_back(id);
    e.fixed.push_back(p);
    r.sampled_[0].emplace_back();
    if (approx_equal(scene.pose(id), p)) {
      r.sampled_[0].back() = p;
      ++r.satisfied_;
    }
    ++r.total_;
  }
  r.entries_ = std::make_shared<const std::vector<Entry>>(std::vector<Entry>{std::move(e)});
  return r;
}

namespace {

std::size_t first_open(const std::vector<std::optional<Pose>>& slots) {
  std::size_t q = 0;
  while (q < slots.size() && slots[q]) ++q;
  return q;
}

}  // namespace

bool Requirements::pending(std::size_t subgoal) const {
  return first_open(sampled_.at(subgoal)) < sampled_[subgoal].size();
}

bool Requirements::dependency_gate(std::size_t subgoal) const {
  if (!pending(subgoal)) return false;
  const Entry& e = (*entries_)[subgoal];
  if (!e.anchor) return true;
  for (std::size_t j = 0; j < entries_->size(); ++j) {
    const auto& objs = (*entries_)[j].objects;
    const auto it = std::find(objs.begin(), objs.end(), *e.anchor);
    if (it != objs.end()) return sampled_[j][static_cast<std::size_t>(it - objs.begin())].has_value();
  }
  return true;
}

int Requirements::next_object(std::size_t subgoal) const {
  const std::size_t q = first_open(sampled_.at(subgoal));
  if (q == sampled_[subgoal].size()) throw Error("exhausted", "sub-goal has no pending objects");
  return (*entries_)[subgoal].objects[q];
}

bool Requirements::is_fixed(std::size_t subgoal) const {
  return !(*entries_).at(subgoal).fixed.empty();
}

Pose Requirements::fixed_target(std::size_t subgoal) const {
  const auto& f = (*entries_).at(subgoal).fixed;
  if (f.empty()) throw Error("invalid_goal", "sub-goal has no fixed poses");
  return f[first_open(sampled_[subgoal])];
}

SamplingContext Requirements::context(std::size_t subgoal, const Scene& scene) const {
  const Entry& e = (*entries_).at(subgoal);
  if (!e.prior) throw Error("invalid_goal", "fixed-pose sub-goal has no sampling context");
  SamplingContext ctx;
  ctx.pattern = e.prior;
  ctx.total = static_cast<int>(e.objects.size());
  const auto& slots = sampled_[subgoal];
  for (std::size_t q = 0; q < slots.size() && slots[q]; ++q) ctx.sampled.push_back(*slots[q]);
  if (e.anchor) ctx.anchor = scene.placed(*e.anchor);
  return ctx;
}

void Requirements::record_move(int object_id, const Pose& p,
                               std::optional<std::size_t> subgoal) {
  auto clear = [this](std::size_t j, std::size_t from) {
    for (std::size_t q = from; q < sampled_[j].size(); ++q)
      if (sampled_[j][q]) {
        sampled_[j][q].reset();
        --satisfied_;
      }
  };

  for (std::size_t j = 0; j < entries_->size(); ++j) {
    const Entry& e = (*entries_)[j];
    if (e.anchor == object_id) clear(j, 0);
    const auto it = std::find(e.objects.begin(), e.objects.end(), object_id);
    if (it == e.objects.end()) continue;
    const auto q = static_cast<std::size_t>(it - e.objects.begin());
    if (!sampled_[j][q]) continue;
    if (!e.prior) {  // fixed poses do not depend on each other
      sampled_[j][q].reset();
      --satisfied_;
      continue;
    }
    switch (e.prior->family) {
      case PatternFamily::line:
      case PatternFamily::circle:
      case PatternFamily::rectangle:
        if (q < 2) {
          clear(j, q);
          break;
        }
        [[fallthrough]];
      case PatternFamily::spatial:
        sampled_[j][q].reset();
        --satisfied_;
        break;
      case PatternFamily::tower:
        clear(j, q);
        break;
    }
  }

  if (subgoal) {
    const Entry& e = (*entries_).at(*subgoal);
    const std::size_t q = first_open(sampled_[*subgoal]);
    if (q == e.objects.size() || e.objects[q] != object_id)
      throw Error("invalid_action", "goal placement of o" + std::to_string(object_id) +
                                        " out of order for its sub-goal");
    sampled_[*subgoal][q] = p;
    ++satisfied_;
  }
}

// --- UCB ---------------------------------------------------------------------

double ucb_score(const ChildStats& child, int parent_visits, double c) {
  return child.reward_sum / child.visits +
         c * std::sqrt(std::log(static_cast<double>(parent_visits)) / child.visits);
}

std::size_t ucb_select(std::span<const ChildStats> children, int parent_visits, double c) {
  std::size_t best = children.size();
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < children.size(); ++i) {
    if (!children[i].selectable) continue;
    const double s = ucb_score(children[i], parent_visits, c);
    if (best == children.size() || s > best_score) {
      best = i;
      best_score = s;
    }
  }
  if (best == children.size()) throw Error("leaf", "node has no selectable children");
  return best;
}

// --- simulation ----------------------------------------------------------------

namespace {

std::optional<Action> relocate(const Scene& scene, int id, ActionKind kind, Rng& rng,
                               const PlannerConfig& cfg) {
  for (int t = 0; t < cfg.relocation_tries; ++t) {
    const Pose p = sample_uniform_pose(scene.workspace(), rng);
    if (!scene.placement_failure(id, p)) return Action{id, p, kind};
  }
  return std::nullopt;
}

std::optional<int> reachable_blocker(const Scene& scene, int id, Rng& rng) {
  std::vector<int> blockers = scene.blockers_above(id);
  std::erase_if(blockers, [&](int b) { return !scene.is_reachable(b); });
  if (blockers.empty()) return std::nullopt;
  return blockers[rng.index(blockers.size())];
}

}  // namespace

std::optional<Action> simulate_step(const Scene& scene, const Requirements& req,
                                    std::size_t subgoal, Rng& rng, const PlannerConfig& cfg) {
  const int o = req.next_object(subgoal);

  if (!scene.is_reachable(o)) {
    const auto b = reachable_blocker(scene, o, rng);
    if (!b) return std::nullopt;
    return relocate(scene, *b, ActionKind::unstack, rng, cfg);
  }

  std::optional<Pose> last_colliding;
  auto attempt = [&](const Pose& p) {
    if (!scene.placement_failure(o, p)) return true;
    if (!scene.colliding_objects(o, p).empty()) last_colliding = p;
    return false;
  };

  if (req.is_fixed(subgoal)) {
    const Pose p = req.fixed_target(subgoal);
    if (attempt(p)) return Action{o, p, ActionKind::goal_placement};
  } else {
    const SamplingContext ctx = req.context(subgoal, scene);
    for (int t = 0; t < cfg.pose_tries; ++t) {
      Pose p;
      try {
        p = sample_prior(ctx, scene.workspace(), rng);
      } catch (const Error&) {
        return std::nullopt;  // degenerate curve or empty region
      }
      if (attempt(p)) return Action{o, p, ActionKind::goal_placement};
    }
  }

  if (!last_colliding) return std::nullopt;
  const std::vector<int> obstacles = scene.colliding_objects(o, *last_colliding);
  const int c = obstacles[rng.index(obstacles.size())];
  if (scene.is_reachable(c)) return relocate(scene, c, ActionKind::relocation, rng, cfg);
  const auto b = reachable_blocker(scene, c, rng);
  if (!b) return std::nullopt;
  return relocate(scene, *b, ActionKind::unstack, rng, cfg);
}

// --- search ----------------------------------------------------------------------

struct MctsPlanner::Node {
  // Both empty for a failed simulation: a visited dead end.
  std::optional<Scene> scene;
  std::optional<Requirements> req;
  Node* parent = nullptr;
  std::optional<Action> action;
  int visits = 1;
  double reward_sum = 0.0;
  std::vector<std::unique_ptr<Node>> children;
  std::vector<std::size_t> untried;  // sub-goal index per slot
  bool exhausted = false;

  bool dead() const { return !scene.has_value(); }
  bool selectable() const { return !dead() && !exhausted; }
};

MctsPlanner::MctsPlanner(Scene scene, Requirements requirements, PlannerConfig cfg,
                         std::uint64_t seed)
    : cfg_(cfg), seed_(seed), rng_(seed) {
  validate(cfg_);
  root_ = make_node(std::move(scene), std::move(requirements), nullptr, std::nullopt);
}

MctsPlanner::~MctsPlanner() = default;

std::unique_ptr<MctsPlanner::Node> MctsPlanner::make_node(Scene scene, Requirements req,
                                                          Node* parent,
                                                          std::optional<Action> action) {
  auto n = std::make_unique<Node>();
  n->scene = std::move(scene);
  n->req = std::move(req);
  n->parent = parent;
  n->action = std::move(action);
  n->reward_sum = n->req->satisfied();
  add_slots(*n);
  return n;
}

void MctsPlanner::add_slots(Node& n) {
  for (std::size_t i = 0; i < n.req->subgoal_count(); ++i)
    if (n.req->dependency_gate(i))
      for (int k = 0; k < cfg_.width; ++k) n.untried.push_back(i);
}

SearchResult MctsPlanner::run() {
  SearchResult result;
  result.requirement_count = root_->req->total();
  result.best_reward = root_->req->satisfied();
  result.plan.seed = seed_;

  auto finish = [&](const Node* leaf, int steps) {
    result.solved = true;
    result.plan.steps_used = steps;
    for (const Node* n = leaf; n->parent; n = n->parent) result.plan.actions.push_back(*n->action);
    std::reverse(result.plan.actions.begin(), result.plan.actions.end());
    return result;
  };

  if (root_->req->remaining() == 0) return finish(root_.get(), 0);

  int steps = 0;
  std::vector<ChildStats> stats;
  while (steps < cfg_.budget) {
    // Selection: descend through fully expanded nodes.
    Node* node = root_.get();
    while (node->untried.empty()) {
      stats.clear();
      bool any = false;
      for (const auto& c : node->children) {
        stats.push_back({c->reward_sum, c->visits, c->selectable()});
        any = any || c->selectable();
      }
      if (!any) {
        node->exhausted = true;
        break;
      }
      node = node->children[ucb_select(stats, node->visits, cfg_.exploration)].get();
    }
    if (node->exhausted) {
      if (node == root_.get()) {
        node->exhausted = false;
        add_slots(*node);
      }
      continue;
    }

    // Expansion + single-step simulation.
    const std::size_t slot = rng_.index(node->untried.size());
    const std::size_t subgoal = node->untried[slot];
    node->untried[slot] = node->untried.back();
    node->untried.pop_back();
    ++steps;

    std::unique_ptr<Node> child;
    if (auto a = simulate_step(*node->scene, *node->req, subgoal, rng_, cfg_)) {
      Requirements req = *node->req;
      req.record_move(a->object_id, a->target,
                      a->kind == ActionKind::goal_placement ? std::optional(subgoal)
                                                            : std::nullopt);
      child = make_node(node->scene->apply_action(a->object_id, a->target), std::move(req), node,
                        *a);
    } else {
      child = std::make_unique<Node>();
      child->parent = node;
    }

    // Back-propagation of the raw reward |F| - |F_r|.
    const double reward = child->reward_sum;
    for (Node* n = node; n; n = n->parent) {
      ++n->visits;
      n->reward_sum += reward;
    }
    Node* added = node->children.emplace_back(std::move(child)).get();
    if (!added->dead()) {
      result.best_reward = std::max(result.best_reward, added->req->satisfied());
      if (added->req->remaining() == 0) return finish(added, steps);
    }
  }
  result.plan.steps_used = steps;
  return result;
}

bool MctsPlanner::visit_accounting_holds() const {
  std::vector<const Node*> stack{root_.get()};
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    int sum = 1;
    for (const auto& c : n->children) {
      sum += c->visits;
      stack.push_back(c.get());
    }
    if (sum != n->visits) return false;
  }
  return true;
}

std::size_t MctsPlanner::node_count() const {
  std::size_t count = 0;
  std::vector<const Node*> stack{root_.get()};
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    ++count;
    for (const auto& c : n->children) stack.push_back(c.get());
  }
  return count;
}

SearchResult mcts_plan(const Scene& scene, const GoalSpec& goal, const PatternDb& db,
                       const PlannerConfig& cfg, std::uint64_t seed) {
  MctsPlanner planner(scene, Requirements::from_goal(goal, db, scene), cfg, seed);
  return planner.run();
}

SearchResult pmcts_plan(const Scene& scene, const std::map<int, Pose>& goal_poses,
                        const PlannerConfig& cfg, std::uint64_t seed) {
  MctsPlanner planner(scene, Requirements::from_fixed_poses(goal_poses, scene), cfg, seed);
  return planner.run();
}

}  // namespace lgplan
