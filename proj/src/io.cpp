#include "rearrange/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace rearrange {

using nlohmann::json;

namespace {

json pose_to_json(const Pose& p) { return json::array({p.x(), p.y(), p.theta()}); }

json footprint_to_json(const Footprint& fp) {
  switch (fp.kind()) {
    case ShapeKind::kRectangle:
      return {{"shape", "rect"}, {"w", 2.0 * fp.semi_x()}, {"h", 2.0 * fp.semi_y()}};
    case ShapeKind::kEllipse:
      return {{"shape", "ellipse"}, {"a", fp.semi_x()}, {"b", fp.semi_y()}};
    case ShapeKind::kDisc:
      return {{"shape", "disc"}, {"r", fp.radius()}};
    case ShapeKind::kPolygon: {
      json verts = json::array();
      for (const Vec2& v : fp.vertices()) verts.push_back({v.x, v.y});
      return {{"shape", "poly"}, {"vertices", verts}};
    }
  }
  return {};
}

// Field access that reports where a document went wrong.
class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError((path_.empty() ? std::string("document") : path_) + ": " + what);
  }

  Reader field(const char* name) const {
    if (!node_.is_object()) fail("expected an object");
    auto it = node_.find(name);
    if (it == node_.end()) {
      Reader(node_, join(name)).fail("missing field");
    }
    return Reader(*it, join(name));
  }

  bool has(const char* name) const {
    return node_.is_object() && node_.contains(name);
  }

  Reader at(std::size_t i) const {
    return Reader(node_[i], path_ + "[" + std::to_string(i) + "]");
  }

  std::size_t array_size() const {
    if (!node_.is_array()) fail("expected an array");
    return node_.size();
  }

  double number() const {
    if (!node_.is_number()) fail("expected a number");
    return node_.get<double>();
  }

  std::int64_t integer() const {
    if (!node_.is_number_integer()) fail("expected an integer");
    return node_.get<std::int64_t>();
  }

  std::uint64_t unsigned_integer() const {
    if (!node_.is_number_unsigned() &&
        !(node_.is_number_integer() && node_.get<std::int64_t>() >= 0)) {
      fail("expected a nonnegative integer");
    }
    return node_.get<std::uint64_t>();
  }

  std::string string() const {
    if (!node_.is_string()) fail("expected a string");
    return node_.get<std::string>();
  }

  Pose pose() const {
    if (array_size() != 3) fail("expected [x, y, theta]");
    return Pose(at(0).number(), at(1).number(), at(2).number());
  }

  const std::string& path() const { return path_; }

 private:
  std::string join(const char* name) const {
    return path_.empty() ? std::string(name) : path_ + "." + name;
  }

  const json& node_;
  std::string path_;
};

Footprint footprint_from(const Reader& r) {
  const std::string shape = r.field("shape").string();
  try {
    if (shape == "rect") {
      return Footprint::rectangle(r.field("w").number(), r.field("h").number());
    }
    if (shape == "ellipse") {
      return Footprint::ellipse(r.field("a").number(), r.field("b").number());
    }
    if (shape == "disc") return Footprint::disc(r.field("r").number());
    if (shape == "poly") {
      Reader verts = r.field("vertices");
      std::vector<Vec2> pts;
      for (std::size_t i = 0; i < verts.array_size(); ++i) {
        Reader v = verts.at(i);
        if (v.array_size() != 2) v.fail("expected [x, y]");
        pts.push_back({v.at(0).number(), v.at(1).number()});
      }
      return Footprint::polygon(std::move(pts));
    }
  } catch (const std::invalid_argument& e) {
    r.fail(e.what());
  }
  r.field("shape").fail("unknown shape '" + shape + "'");
}

Arrangement arrangement_from(const Reader& r, std::size_t n) {
  if (r.array_size() != n) {
    r.fail("expected " + std::to_string(n) + " poses");
  }
  Arrangement arr;
  for (std::size_t i = 0; i < n; ++i) arr.push_back(r.at(i).pose());
  return arr;
}

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text << '\n';
}

}  // namespace

std::string instance_to_json(const Instance& inst) {
  json objects = json::array();
  for (const auto& obj : inst.objects) {
    json o = footprint_to_json(obj.footprint);
    if (obj.mass) o["mass"] = *obj.mass;
    if (obj.impedance) o["impedance"] = *obj.impedance;
    objects.push_back(std::move(o));
  }
  json start = json::array(), goal = json::array();
  for (const Pose& p : inst.start) start.push_back(pose_to_json(p));
  for (const Pose& p : inst.goal) goal.push_back(pose_to_json(p));
  json doc = {
      {"workspace", {{"w", inst.workspace.width}, {"h", inst.workspace.height}}},
      {"objects", std::move(objects)},
      {"start", std::move(start)},
      {"goal", std::move(goal)},
      {"seed", inst.seed},
  };
  return doc.dump(2);
}

Instance instance_from_json(std::string_view text) {
  const json doc = parse(text);
  Reader root(doc, "");
  Instance inst;
  Reader ws = root.field("workspace");
  try {
    inst.workspace = Workspace(ws.field("w").number(), ws.field("h").number());
  } catch (const std::invalid_argument& e) {
    ws.fail(e.what());
  }
  Reader objects = root.field("objects");
  for (std::size_t i = 0; i < objects.array_size(); ++i) {
    Reader o = objects.at(i);
    ObjectCharacteristics chars{footprint_from(o), {}, {}};
    if (o.has("mass")) chars.mass = o.field("mass").number();
    if (o.has("impedance")) chars.impedance = o.field("impedance").number();
    inst.objects.push_back(std::move(chars));
  }
  inst.start = arrangement_from(root.field("start"), inst.objects.size());
  inst.goal = arrangement_from(root.field("goal"), inst.objects.size());
  if (root.has("seed")) inst.seed = root.field("seed").unsigned_integer();
  try {
    check_instance(inst);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  return inst;
}

std::string plan_to_json(const RearrangementPlan& plan) {
  json actions = json::array();
  for (const Action& a : plan.actions) {
    actions.push_back({{"obj", a.object},
                       {"pose", pose_to_json(a.target)},
                       {"tag", a.tag == ActionTag::kToGoal ? "goal" : "buffer"}});
  }
  return json{{"actions", std::move(actions)}}.dump(2);
}

RearrangementPlan plan_from_json(std::string_view text) {
  const json doc = parse(text);
  Reader actions = Reader(doc, "").field("actions");
  RearrangementPlan plan;
  for (std::size_t i = 0; i < actions.array_size(); ++i) {
    Reader a = actions.at(i);
    Action act;
    act.object = static_cast<int>(a.field("obj").integer());
    act.target = a.field("pose").pose();
    const std::string tag = a.field("tag").string();
    if (tag == "goal") {
      act.tag = ActionTag::kToGoal;
    } else if (tag == "buffer") {
      act.tag = ActionTag::kToBuffer;
    } else {
      a.field("tag").fail("expected \"goal\" or \"buffer\"");
    }
    plan.actions.push_back(act);
  }
  return plan;
}

Instance load_instance(const std::filesystem::path& path) {
  return instance_from_json(read_file(path));
}

void save_instance(const Instance& inst, const std::filesystem::path& path) {
  write_file(path, instance_to_json(inst));
}

RearrangementPlan load_plan(const std::filesystem::path& path) {
  return plan_from_json(read_file(path));
}

void save_plan(const RearrangementPlan& plan, const std::filesystem::path& path) {
  write_file(path, plan_to_json(plan));
}

}  // namespace rearrange
