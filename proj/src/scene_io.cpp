#include "lgplan/scene_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace lgplan {

namespace {

class SchemaChecker {
 public:
  explicit SchemaChecker(const LinedJson& doc) : doc_(doc) {}

  [[noreturn]] void fail(const std::string& pointer, const std::string& msg) const {
    throw ParseError("invalid_scene", msg, doc_.line_of(pointer), 1);
  }

  const Json& at(const Json& parent, const std::string& pointer, const char* key) const {
    if (!parent.is_object()) fail(pointer, "expected an object");
    auto it = parent.find(key);
    if (it == parent.end()) fail(pointer, std::string("missing field \"") + key + "\"");
    return *it;
  }

  double number(const Json& parent, const std::string& pointer, const char* key) const {
    const Json& v = at(parent, pointer, key);
    if (!v.is_number()) fail(pointer + "/" + key, std::string("\"") + key + "\" must be a number");
    return v.get<double>();
  }

  std::int64_t integer(const Json& parent, const std::string& pointer, const char* key) const {
    const Json& v = at(parent, pointer, key);
    if (!v.is_number_integer())
      fail(pointer + "/" + key, std::string("\"") + key + "\" must be an integer");
    return v.get<std::int64_t>();
  }

  std::string text(const Json& parent, const std::string& pointer, const char* key) const {
    const Json& v = at(parent, pointer, key);
    if (!v.is_string()) fail(pointer + "/" + key, std::string("\"") + key + "\" must be a string");
    return v.get<std::string>();
  }

  void only_keys(const Json& obj, const std::string& pointer,
                 std::initializer_list<const char*> keys) const {
    if (!obj.is_object()) fail(pointer, "expected an object");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : obj.items())
      if (!allowed.count(k)) fail(pointer + "/" + k, "unknown field \"" + k + "\"");
  }

 private:
  const LinedJson& doc_;
};

}  // namespace

Json pose_to_json(const Pose& p) {
  return Json{{"x", p.x()}, {"y", p.y()}, {"theta", p.theta()}, {"level", p.level()}};
}

Pose pose_from_json(const Json& j) {
  return Pose(j.at("x").get<double>(), j.at("y").get<double>(), j.at("theta").get<double>(),
              j.value("level", 0));
}

Json scene_to_json(const Scene& s) {
  const Workspace& w = s.workspace();
  Json objects = Json::array();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const SceneObject& o = s.objects()[i];
    Json fp = Json::array();
    for (const Vec2& v : o.footprint.vertices()) fp.push_back({v.x, v.y});
    objects.push_back({{"id", o.id},
                       {"name", o.name},
                       {"color", o.color},
                       {"footprint", fp},
                       {"pose", pose_to_json(s.poses()[i])}});
  }
  return Json{{"workspace",
               {{"x_min", w.x_min()}, {"x_max", w.x_max()}, {"y_min", w.y_min()},
                {"y_max", w.y_max()}}},
              {"objects", objects},
              {"seed", s.seed()}};
}

Scene scene_from_json(const LinedJson& doc) {
  const SchemaChecker c(doc);
  const Json& root = doc.value;
  c.only_keys(root, "", {"workspace", "objects", "seed"});

  const Json& wj = c.at(root, "", "workspace");
  c.only_keys(wj, "/workspace", {"x_min", "x_max", "y_min", "y_max"});
  std::optional<Workspace> ws;
  try {
    ws.emplace(c.number(wj, "/workspace", "x_min"), c.number(wj, "/workspace", "x_max"),
               c.number(wj, "/workspace", "y_min"), c.number(wj, "/workspace", "y_max"));
  } catch (const std::invalid_argument& e) {
    c.fail("/workspace", e.what());
  }

  std::uint64_t seed = 0;
  if (root.contains("seed")) {
    const Json& sj = root["seed"];
    if (!sj.is_number_unsigned() && !(sj.is_number_integer() && sj.get<std::int64_t>() >= 0))
      c.fail("/seed", "\"seed\" must be a non-negative integer");
    seed = sj.get<std::uint64_t>();
  }

  const Json& oj = c.at(root, "", "objects");
  if (!oj.is_array()) c.fail("/objects", "\"objects\" must be an array");

  std::vector<SceneObject> objects;
  std::vector<Pose> poses;
  for (std::size_t i = 0; i < oj.size(); ++i) {
    const std::string ptr = "/objects/" + std::to_string(i);
    const Json& o = oj[i];
    c.only_keys(o, ptr, {"id", "name", "color", "footprint", "pose"});
    const auto id = c.integer(o, ptr, "id");
    if (id < INT32_MIN || id > INT32_MAX) c.fail(ptr + "/id", "object id out of range");

    const Json& fj = c.at(o, ptr, "footprint");
    if (!fj.is_array()) c.fail(ptr + "/footprint", "footprint must be a list of [x, y] points");
    std::vector<Vec2> verts;
    for (std::size_t k = 0; k < fj.size(); ++k) {
      const Json& v = fj[k];
      if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        c.fail(ptr + "/footprint/" + std::to_string(k), "footprint points must be [x, y]");
      verts.push_back({v[0].get<double>(), v[1].get<double>()});
    }
    std::optional<Footprint> fp;
    try {
      fp.emplace(std::move(verts));
    } catch (const std::invalid_argument& e) {
      c.fail(ptr + "/footprint", e.what());
    }

    const Json& pj = c.at(o, ptr, "pose");
    const std::string pptr = ptr + "/pose";
    c.only_keys(pj, pptr, {"x", "y", "theta", "level"});
    const auto level = c.integer(pj, pptr, "level");
    if (level < 0) c.fail(pptr + "/level", "level must be non-negative");
    poses.emplace_back(c.number(pj, pptr, "x"), c.number(pj, pptr, "y"),
                       c.number(pj, pptr, "theta"), static_cast<int>(level));
    objects.push_back(SceneObject{static_cast<int>(id), c.text(o, ptr, "name"),
                                  c.text(o, ptr, "color"), std::move(*fp)});
  }

  try {
    return Scene(*ws, std::move(objects), std::move(poses), seed);
  } catch (const SceneError& e) {
    const std::string ptr =
        e.object_index() ? "/objects/" + std::to_string(*e.object_index()) : "/objects";
    c.fail(ptr, e.what());
  }
}

Scene scene_from_text(std::string_view text) { return scene_from_json(parse_json_with_lines(text)); }

Scene load_scene(const std::filesystem::path& path) { return scene_from_text(read_text_file(path)); }

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io", "cannot write " + path.string());
  out << text;
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace lgplan
