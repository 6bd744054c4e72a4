#include "trajlab/sim/types.hpp"

#include <cstdio>

#include "trajlab/common.hpp"

namespace trajlab {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Cell step_toward(Cell c, int heading) {
  switch (heading) {
    case 0: return {c.x, c.y - 1};
    case 90: return {c.x + 1, c.y};
    case 180: return {c.x, c.y + 1};
    default: return {c.x - 1, c.y};
  }
}

namespace {

constexpr std::array<std::string_view, kNumObjTypes> kTypeNames = {
    "Cup",     "Plate", "Potato",     "Apple", "DishSponge", "Knife",
    "Microwave", "Fridge", "Cabinet", "Sink",  "Faucet",     "CounterTop",
    "Table",   "Shelf", "Sofa",       "Person"};

constexpr std::array<std::string_view, 13> kActionNames = {
    "MoveAhead", "TurnLeft", "TurnRight", "LookUp",    "LookDown",
    "PickUp",    "Put",      "Open",      "Close",     "ToggleOn",
    "ToggleOff", "Declare",  "Stop"};

const std::array<TypeTraits, kNumObjTypes> kTraits = [] {
  std::array<TypeTraits, kNumObjTypes> t{};
  for (int i = 0; i <= static_cast<int>(ObjType::Knife); ++i) t[i].pickupable = true;
  auto& mw = t[static_cast<int>(ObjType::Microwave)];
  mw = {false, true, true, true, Elevation::High};
  t[static_cast<int>(ObjType::Fridge)] = {false, true, false, true, Elevation::Mid};
  t[static_cast<int>(ObjType::Cabinet)] = {false, true, false, true, Elevation::Low};
  t[static_cast<int>(ObjType::Sink)] = {false, false, false, true, Elevation::Mid};
  t[static_cast<int>(ObjType::Faucet)] = {false, false, true, false, Elevation::Mid};
  t[static_cast<int>(ObjType::CounterTop)] = {false, false, false, true, Elevation::Mid};
  t[static_cast<int>(ObjType::Table)] = {false, false, false, true, Elevation::Mid};
  t[static_cast<int>(ObjType::Shelf)] = {false, false, false, true, Elevation::High};
  t[static_cast<int>(ObjType::Sofa)] = {false, false, false, true, Elevation::Low};
  t[static_cast<int>(ObjType::Person)] = {false, false, false, false, Elevation::Mid};
  return t;
}();

}  // namespace

const TypeTraits& traits(ObjType t) { return kTraits[static_cast<int>(t)]; }

ObjectInstance make_object(int id, ObjType type, Cell pos) {
  const auto& tr = traits(type);
  ObjectInstance o;
  o.id = id;
  o.type = type;
  o.position = pos;
  o.elevation = tr.elevation;
  o.openable = tr.openable;
  o.toggleable = tr.toggleable;
  o.pickupable = tr.pickupable;
  o.receptacle = tr.receptacle;
  return o;
}

bool pitch_sees(int pitch, Elevation e) {
  if (e == Elevation::Mid) return true;
  if (e == Elevation::Low) return pitch < 0;
  return pitch > 0;
}

int pitch_for(Elevation e, int current) {
  if (pitch_sees(current, e)) return current;
  return e == Elevation::Low ? -30 : 30;
}

bool is_parameterized(ActionKind k) {
  return k >= ActionKind::PickUp && k <= ActionKind::Declare;
}
bool is_interaction(ActionKind k) { return is_parameterized(k); }
bool is_navigation(ActionKind k) { return k <= ActionKind::LookDown; }

std::string_view to_string(ObjType t) { return kTypeNames[static_cast<int>(t)]; }

ObjType parse_obj_type(std::string_view s) {
  for (int i = 0; i < kNumObjTypes; ++i)
    if (kTypeNames[i] == s) return static_cast<ObjType>(i);
  throw ValidationError("unknown object type: " + std::string(s));
}

std::string_view to_string(Elevation e) {
  switch (e) {
    case Elevation::Low: return "low";
    case Elevation::Mid: return "mid";
    default: return "high";
  }
}

Elevation parse_elevation(std::string_view s) {
  if (s == "low") return Elevation::Low;
  if (s == "mid") return Elevation::Mid;
  if (s == "high") return Elevation::High;
  throw ValidationError("unknown elevation: " + std::string(s));
}

std::string_view to_string(ActionKind k) { return kActionNames[static_cast<int>(k)]; }

ActionKind parse_action_kind(std::string_view s) {
  for (std::size_t i = 0; i < kActionNames.size(); ++i)
    if (kActionNames[i] == s) return static_cast<ActionKind>(i);
  throw ValidationError("unknown action: " + std::string(s));
}

std::string to_string(const Action& a) {
  std::string s(to_string(a.kind));
  if (is_parameterized(a.kind)) s += "(" + std::to_string(a.target) + ")";
  return s;
}

Action parse_action(std::string_view s) {
  const auto open = s.find('(');
  if (open == std::string_view::npos) {
    const auto k = parse_action_kind(s);
    if (is_parameterized(k)) throw ValidationError("action needs an id: " + std::string(s));
    return Action::simple(k);
  }
  if (s.back() != ')') throw ValidationError("malformed action: " + std::string(s));
  const auto k = parse_action_kind(s.substr(0, open));
  if (!is_parameterized(k)) throw ValidationError("action takes no id: " + std::string(s));
  const auto digits = s.substr(open + 1, s.size() - open - 2);
  return Action::with(k, std::stoi(std::string(digits)));
}

std::string to_string(const Relation& r) {
  switch (r.kind) {
    case Relation::Kind::Floor: return "FLOOR";
    case Relation::Kind::On: return "ON(" + std::to_string(r.parent) + ")";
    default: return "IN(" + std::to_string(r.parent) + ")";
  }
}

Relation parse_relation(std::string_view s) {
  if (s == "FLOOR") return Relation::floor();
  if (s.size() > 4 && s.back() == ')') {
    const int id = std::stoi(std::string(s.substr(3, s.size() - 4)));
    if (s.substr(0, 3) == "ON(") return Relation::on(id);
    if (s.substr(0, 3) == "IN(") return Relation::in(id);
  }
  throw ValidationError("malformed relation: " + std::string(s));
}

void to_json(Json& j, const Cell& c) { j = Json::array({c.x, c.y}); }
void from_json(const Json& j, Cell& c) {
  c.x = j.at(0).get<int>();
  c.y = j.at(1).get<int>();
}

namespace {
std::string_view temp_name(Temperature t) {
  return t == Temperature::Hot ? "hot" : t == Temperature::Cold ? "cold" : "normal";
}
Temperature parse_temp(std::string_view s) {
  if (s == "hot") return Temperature::Hot;
  if (s == "cold") return Temperature::Cold;
  if (s == "normal") return Temperature::Normal;
  throw ValidationError("unknown temperature: " + std::string(s));
}
}  // namespace

void to_json(Json& j, const ObjectInstance& o) {
  j = Json{{"id", o.id},
           {"type", to_string(o.type)},
           {"pos", o.position},
           {"elevation", to_string(o.elevation)},
           {"relation", to_string(o.relation)},
           {"openable", o.openable},
           {"is_open", o.is_open},
           {"toggleable", o.toggleable},
           {"is_on", o.is_on},
           {"pickupable", o.pickupable},
           {"receptacle", o.receptacle},
           {"temperature", temp_name(o.temperature)},
           {"cleanliness", o.cleanliness == Cleanliness::Clean ? "clean" : "dirty"}};
}

void from_json(const Json& j, ObjectInstance& o) {
  o.id = j.at("id").get<int>();
  o.type = parse_obj_type(j.at("type").get<std::string>());
  o.position = j.at("pos").get<Cell>();
  o.elevation = parse_elevation(j.at("elevation").get<std::string>());
  o.relation = parse_relation(j.at("relation").get<std::string>());
  o.openable = j.at("openable").get<bool>();
  o.is_open = j.at("is_open").get<bool>();
  o.toggleable = j.at("toggleable").get<bool>();
  o.is_on = j.at("is_on").get<bool>();
  o.pickupable = j.at("pickupable").get<bool>();
  o.receptacle = j.at("receptacle").get<bool>();
  o.temperature = parse_temp(j.at("temperature").get<std::string>());
  const auto cl = j.at("cleanliness").get<std::string>();
  if (cl != "clean" && cl != "dirty") throw ValidationError("unknown cleanliness: " + cl);
  o.cleanliness = cl == "clean" ? Cleanliness::Clean : Cleanliness::Dirty;
}

void to_json(Json& j, const Pose& p) {
  j = Json{{"cell", p.cell}, {"heading", p.heading}, {"pitch", p.pitch}};
  j["held"] = p.held ? Json(*p.held) : Json(nullptr);
}

void from_json(const Json& j, Pose& p) {
  p.cell = j.at("cell").get<Cell>();
  p.heading = j.at("heading").get<int>();
  p.pitch = j.at("pitch").get<int>();
  const auto& h = j.at("held");
  p.held = h.is_null() ? std::nullopt : std::optional<int>(h.get<int>());
}

void to_json(Json& j, const Action& a) { j = to_string(a); }
void from_json(const Json& j, Action& a) { a = parse_action(j.get<std::string>()); }

void to_json(Json& j, const VisibleObject& v) {
  j = Json::array({v.id, to_string(v.type), to_string(v.relation), v.distance,
                   v.bearing, v.cell.x, v.cell.y});
}

void from_json(const Json& j, VisibleObject& v) {
  v.id = j.at(0).get<int>();
  v.type = parse_obj_type(j.at(1).get<std::string>());
  v.relation = parse_relation(j.at(2).get<std::string>());
  v.distance = j.at(3).get<int>();
  v.bearing = j.at(4).get<int>();
  v.cell = {j.at(5).get<int>(), j.at(6).get<int>()};
}

void to_json(Json& j, const Observation& o) {
  std::string view;
  view.reserve(o.view.size() * 6);
  for (const auto& vc : o.view) {
    if (!view.empty()) view += ';';
    view += std::to_string(vc.cell.x) + "," + std::to_string(vc.cell.y) + vc.terrain;
  }
  j = Json{{"visible", o.visible}, {"pose", o.pose}, {"feedback", o.feedback}, {"view", view}};
}

void from_json(const Json& j, Observation& o) {
  o.visible = j.at("visible").get<std::vector<VisibleObject>>();
  o.pose = j.at("pose").get<Pose>();
  o.feedback = j.at("feedback").get<std::string>();
  o.view.clear();
  const auto view = j.at("view").get<std::string>();
  std::size_t pos = 0;
  while (pos < view.size()) {
    auto end = view.find(';', pos);
    if (end == std::string::npos) end = view.size();
    const auto item = view.substr(pos, end - pos);
    const auto comma = item.find(',');
    if (comma == std::string::npos || item.size() < comma + 3)
      throw ValidationError("malformed view cell: " + item);
    ViewCell vc;
    vc.cell.x = std::stoi(item.substr(0, comma));
    vc.cell.y = std::stoi(item.substr(comma + 1, item.size() - comma - 2));
    vc.terrain = item.back();
    o.view.push_back(vc);
    pos = end + 1;
  }
}

}  // namespace trajlab
