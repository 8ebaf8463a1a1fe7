#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lgplan/error.hpp"
#include "lgplan/geometry.hpp"

namespace lgplan {

struct SceneObject {
  int id = 0;
  std::string name;
  std::string color;
  Footprint footprint;
};

enum class ActionFailure { blocked_pick, blocked_place, out_of_bounds };

std::string_view to_string(ActionFailure f);
std::optional<ActionFailure> parse_action_failure(std::string_view s);

class ActionError : public Error {
 public:
  ActionError(ActionFailure reason, const std::string& message)
      : Error(std::string(to_string(reason)), message), reason_(reason) {}
  ActionFailure reason() const { return reason_; }

 private:
  ActionFailure reason_;
};

/// Scene invariant violation; `object_index()` names the offending entry of
/// the object list when there is one.
class SceneError : public Error {
 public:
  SceneError(const std::string& message, std::optional<std::size_t> object_index)
      : Error("invalid_scene", message), object_index_(object_index) {}
  std::optional<std::size_t> object_index() const { return object_index_; }

 private:
  std::optional<std::size_t> object_index_;
};

/// Immutable world snapshot: objects, their poses and the support graph.
///
/// Objects at level k > 0 rest on exactly one object at level k - 1 (the
/// supporter). Collisions are only checked between objects on the same
/// level. Copies share the object table.
class Scene {
 public:
  /// `poses[i]` belongs to `objects[i]`. Throws SceneError on any violated
  /// invariant (duplicate ids, empty labels, out-of-workspace poses,
  /// same-level overlap, missing or ambiguous supporter).
  Scene(Workspace workspace, std::vector<SceneObject> objects, std::vector<Pose> poses,
        std::uint64_t seed = 0);

  const Workspace& workspace() const { return shared_->workspace; }
  std::span<const SceneObject> objects() const { return shared_->objects; }
  std::size_t size() const { return shared_->objects.size(); }
  std::uint64_t seed() const { return seed_; }

  bool contains(int id) const;
  /// Throws Error("no_such_object") for unknown ids.
  std::size_t index_of(int id) const;
  const SceneObject& object(int id) const { return shared_->objects[index_of(id)]; }
  const Pose& pose(int id) const { return poses_[index_of(id)]; }
  const Polygon& placed(int id) const { return placed_[index_of(id)]; }
  std::span<const Pose> poses() const { return poses_; }

  /// Id of the object this one rests on, if any.
  std::optional<int> supporter(int id) const;

  /// Nothing rests on the object, directly or transitively.
  bool is_reachable(int id) const;

  /// Every object resting (transitively) on `id`, topmost level first, ties
  /// by ascending id.
  std::vector<int> blockers_above(int id) const;

  /// 1 iff `id`'s footprint at `p` lies in the workspace and overlaps no
  /// other object on level `p.level()`. The object's current pose is ignored.
  bool f_free(int id, const Pose& p) const;

  /// Same-level objects overlapping `id`'s footprint at `p` (ascending id).
  std::vector<int> colliding_objects(int id, const Pose& p) const;

  /// Level `id` would settle at if put down at (p.x, p.y, p.theta): one above
  /// the highest reachable object it covers by at least half of its own
  /// area, else 0.
  int infer_level(int id, const Pose& p) const;

  /// Why putting `id` down at `p` would be rejected (reachability of `id`
  /// itself is not checked), or nullopt if the placement is legal.
  std::optional<ActionFailure> placement_failure(int id, const Pose& p) const;

  /// Full precondition check for apply_action.
  std::optional<ActionFailure> check_action(int id, const Pose& p) const;

  /// New snapshot with `id` moved to `p`; this one is unchanged. Throws
  /// ActionError on an illegal move.
  Scene apply_action(int id, const Pose& p) const;

  Scene with_seed(std::uint64_t seed) const {
    Scene s = *this;
    s.seed_ = seed;
    return s;
  }

 private:
  struct Shared {
    Workspace workspace;
    std::vector<SceneObject> objects;
    std::vector<std::pair<int, std::size_t>> id_index;  // sorted by id
  };

  Scene() = default;
  std::optional<std::size_t> find_index(int id) const;
  std::optional<ActionFailure> placement_failure_at(std::size_t idx, const Pose& p,
                                                    const Polygon& poly,
                                                    int* supporter_out) const;

  std::shared_ptr<const Shared> shared_;
  std::vector<Pose> poses_;
  std::vector<Polygon> placed_;
  std::vector<Aabb> boxes_;
  std::vector<int> supporter_;  // index, -1 on the table
  std::uint64_t seed_ = 0;
};

/// Field-by-field equality with poses compared to `tol` (seed ignored).
bool approx_equal(const Scene& a, const Scene& b, double tol = 1e-9);

}  // namespace lgplan
