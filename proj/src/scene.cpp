#include "lgplan/scene.hpp"

#include <algorithm>

namespace lgplan {

std::string_view to_string(ActionFailure f) {
  switch (f) {
    case ActionFailure::blocked_pick: return "blocked_pick";
    case ActionFailure::blocked_place: return "blocked_place";
    case ActionFailure::out_of_bounds: return "out_of_bounds";
  }
  return "unknown";
}

std::optional<ActionFailure> parse_action_failure(std::string_view s) {
  if (s == "blocked_pick") return ActionFailure::blocked_pick;
  if (s == "blocked_place") return ActionFailure::blocked_place;
  if (s == "out_of_bounds") return ActionFailure::out_of_bounds;
  return std::nullopt;
}

Scene::Scene(Workspace workspace, std::vector<SceneObject> objects, std::vector<Pose> poses,
             std::uint64_t seed)
    : poses_(std::move(poses)), seed_(seed) {
  if (poses_.size() != objects.size())
    throw SceneError("every object needs exactly one pose", std::nullopt);

  auto shared = std::make_shared<Shared>(Shared{workspace, std::move(objects), {}});
  const auto& objs = shared->objects;
  const std::size_t n = objs.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (objs[i].name.empty() || objs[i].color.empty())
      throw SceneError("object " + std::to_string(objs[i].id) + " needs a name and a color", i);
    shared->id_index.emplace_back(objs[i].id, i);
  }
  std::sort(shared->id_index.begin(), shared->id_index.end());
  for (std::size_t k = 1; k < n; ++k) {
    if (shared->id_index[k].first == shared->id_index[k - 1].first)
      throw SceneError("duplicate object id " + std::to_string(shared->id_index[k].first),
                       std::max(shared->id_index[k].second, shared->id_index[k - 1].second));
  }

  placed_.reserve(n);
  boxes_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    placed_.push_back(transform_footprint(objs[i].footprint, poses_[i]));
    boxes_.push_back(bounding_box(placed_.back()));
    if (!in_workspace(placed_[i], workspace))
      throw SceneError("object " + std::to_string(objs[i].id) + " lies outside the workspace", i);
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (poses_[i].level() == poses_[j].level() && boxes_[i].intersects(boxes_[j]) &&
          footprints_overlap(placed_[i], placed_[j]))
        throw SceneError("objects " + std::to_string(objs[j].id) + " and " +
                             std::to_string(objs[i].id) + " overlap on level " +
                             std::to_string(poses_[i].level()),
                         i);
    }
  }

  supporter_.assign(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const int level = poses_[i].level();
    if (level == 0) continue;
    int found = -1, count = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || poses_[j].level() != level - 1) continue;
      if (boxes_[i].intersects(boxes_[j]) && footprints_overlap(placed_[i], placed_[j])) {
        found = static_cast<int>(j);
        ++count;
      }
    }
    if (count != 1)
      throw SceneError("object " + std::to_string(objs[i].id) + " on level " +
                           std::to_string(level) + " must rest on exactly one object, found " +
                           std::to_string(count),
                       i);
    supporter_[i] = found;
  }
  shared_ = std::move(shared);
}

std::optional<std::size_t> Scene::find_index(int id) const {
  const auto& idx = shared_->id_index;
  auto it = std::lower_bound(idx.begin(), idx.end(), std::make_pair(id, std::size_t{0}));
  if (it == idx.end() || it->first != id) return std::nullopt;
  return it->second;
}

bool Scene::contains(int id) const { return find_index(id).has_value(); }

std::size_t Scene::index_of(int id) const {
  if (auto i = find_index(id)) return *i;
  throw Error("no_such_object", "no such object: " + std::to_string(id));
}

std::optional<int> Scene::supporter(int id) const {
  const int s = supporter_[index_of(id)];
  if (s < 0) return std::nullopt;
  return shared_->objects[static_cast<std::size_t>(s)].id;
}

bool Scene::is_reachable(int id) const {
  const int idx = static_cast<int>(index_of(id));
  return std::find(supporter_.begin(), supporter_.end(), idx) == supporter_.end();
}

std::vector<int> Scene::blockers_above(int id) const {
  std::vector<int> frontier{static_cast<int>(index_of(id))};
  std::vector<std::size_t> above;
  while (!frontier.empty()) {
    const int cur = frontier.back();
    frontier.pop_back();
    for (std::size_t j = 0; j < supporter_.size(); ++j) {
      if (supporter_[j] == cur) {
        above.push_back(j);
        frontier.push_back(static_cast<int>(j));
      }
    }
  }
  std::vector<int> ids;
  std::sort(above.begin(), above.end(), [&](std::size_t a, std::size_t b) {
    if (poses_[a].level() != poses_[b].level()) return poses_[a].level() > poses_[b].level();
    return shared_->objects[a].id < shared_->objects[b].id;
  });
  for (std::size_t j : above) ids.push_back(shared_->objects[j].id);
  return ids;
}

bool Scene::f_free(int id, const Pose& p) const {
  const std::size_t idx = index_of(id);
  const Polygon poly = transform_footprint(shared_->objects[idx].footprint, p);
  if (!in_workspace(poly, workspace())) return false;
  const Aabb box = bounding_box(poly);
  for (std::size_t j = 0; j < poses_.size(); ++j) {
    if (j == idx || poses_[j].level() != p.level()) continue;
    if (box.intersects(boxes_[j]) && footprints_overlap(poly, placed_[j])) return false;
  }
  return true;
}

std::vector<int> Scene::colliding_objects(int id, const Pose& p) const {
  const std::size_t idx = index_of(id);
  const Polygon poly = transform_footprint(shared_->objects[idx].footprint, p);
  const Aabb box = bounding_box(poly);
  std::vector<int> out;
  for (std::size_t j = 0; j < poses_.size(); ++j) {
    if (j == idx || poses_[j].level() != p.level()) continue;
    if (box.intersects(boxes_[j]) && footprints_overlap(poly, placed_[j]))
      out.push_back(shared_->objects[j].id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

int Scene::infer_level(int id, const Pose& p) const {
  const std::size_t idx = index_of(id);
  const Footprint& fp = shared_->objects[idx].footprint;
  const Polygon poly = transform_footprint(fp, p);
  const Aabb box = bounding_box(poly);
  int level = 0;
  for (std::size_t j = 0; j < poses_.size(); ++j) {
    if (j == idx || !box.intersects(boxes_[j])) continue;
    // Reachable once `id` itself is lifted off.
    bool reachable = true;
    for (std::size_t k = 0; k < supporter_.size() && reachable; ++k)
      reachable = k == idx || supporter_[k] != static_cast<int>(j);
    if (!reachable) continue;
    if (intersection_area(poly, placed_[j]) >= 0.5 * fp.area())
      level = std::max(level, poses_[j].level() + 1);
  }
  return level;
}

std::optional<ActionFailure> Scene::placement_failure_at(std::size_t idx, const Pose& p,
                                                         const Polygon& poly,
                                                         int* supporter_out) const {
  if (!in_workspace(poly, workspace())) return ActionFailure::out_of_bounds;
  const Aabb box = bounding_box(poly);
  int below = -1, below_count = 0;
  for (std::size_t j = 0; j < poses_.size(); ++j) {
    if (j == idx || !box.intersects(boxes_[j])) continue;
    const int lj = poses_[j].level();
    if (lj != p.level() && lj + 1 != p.level()) continue;
    if (!footprints_overlap(poly, placed_[j])) continue;
    if (lj == p.level()) return ActionFailure::blocked_place;
    below = static_cast<int>(j);
    ++below_count;
  }
  if (p.level() > 0 && below_count != 1) return ActionFailure::blocked_place;
  if (infer_level(shared_->objects[idx].id, p) != p.level()) return ActionFailure::blocked_place;
  if (supporter_out) *supporter_out = p.level() > 0 ? below : -1;
  return std::nullopt;
}

std::optional<ActionFailure> Scene::placement_failure(int id, const Pose& p) const {
  const std::size_t idx = index_of(id);
  const Polygon poly = transform_footprint(shared_->objects[idx].footprint, p);
  return placement_failure_at(idx, p, poly, nullptr);
}

std::optional<ActionFailure> Scene::check_action(int id, const Pose& p) const {
  if (!is_reachable(id)) return ActionFailure::blocked_pick;
  return placement_failure(id, p);
}

Scene Scene::apply_action(int id, const Pose& p) const {
  const std::size_t idx = index_of(id);
  if (!is_reachable(id))
    throw ActionError(ActionFailure::blocked_pick,
                      "blocked pick: object " + std::to_string(id) + " has objects on top");
  Polygon poly = transform_footprint(shared_->objects[idx].footprint, p);
  int below = -1;
  if (auto failure = placement_failure_at(idx, p, poly, &below)) {
    throw ActionError(*failure, *failure == ActionFailure::out_of_bounds
                                    ? "out of bounds: object " + std::to_string(id)
                                    : "blocked place: object " + std::to_string(id));
  }
  Scene next = *this;
  next.poses_[idx] = p;
  next.boxes_[idx] = bounding_box(poly);
  next.placed_[idx] = std::move(poly);
  next.supporter_[idx] = below;
  return next;
}

bool approx_equal(const Scene& a, const Scene& b, double tol) {
  if (!(a.workspace() == b.workspace()) || a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const SceneObject& oa = a.objects()[i];
    const SceneObject& ob = b.objects()[i];
    if (oa.id != ob.id || oa.name != ob.name || oa.color != ob.color ||
        !(oa.footprint == ob.footprint))
      return false;
    if (!approx_equal(a.poses()[i], b.poses()[i], tol)) return false;
  }
  return true;
}

}  // namespace lgplan
