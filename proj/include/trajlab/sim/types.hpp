#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace trajlab {

using Json = nlohmann::ordered_json;

enum class ObjType : std::uint8_t {
  Cup,
  Plate,
  Potato,
  Apple,
  DishSponge,
  Knife,
  Microwave,
  Fridge,
  Cabinet,
  Sink,
  Faucet,
  CounterTop,
  Table,
  Shelf,
  Sofa,
  Person,
};
inline constexpr int kNumObjTypes = 16;

enum class Elevation : std::uint8_t { Low, Mid, High };
enum class Temperature : std::uint8_t { Normal, Hot, Cold };
enum class Cleanliness : std::uint8_t { Dirty, Clean };

struct Cell {
  int x = 0;
  int y = 0;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

inline int chebyshev(Cell a, Cell b) {
  const int dx = a.x > b.x ? a.x - b.x : b.x - a.x;
  const int dy = a.y > b.y ? a.y - b.y : b.y - a.y;
  return dx > dy ? dx : dy;
}

inline int manhattan(Cell a, Cell b) {
  return (a.x > b.x ? a.x - b.x : b.x - a.x) + (a.y > b.y ? a.y - b.y : b.y - a.y);
}

/// Cell one step ahead for heading in {0: north (y-1), 90: east, 180: south, 270: west}.
Cell step_toward(Cell c, int heading);

struct Relation {
  enum class Kind : std::uint8_t { Floor, On, In };
  Kind kind = Kind::Floor;
  int parent = 0;  // object id when kind != Floor
  friend bool operator==(const Relation&, const Relation&) = default;

  static Relation floor() { return {}; }
  static Relation on(int id) { return {Kind::On, id}; }
  static Relation in(int id) { return {Kind::In, id}; }
};

struct TypeTraits {
  bool pickupable = false;
  bool openable = false;
  bool toggleable = false;
  bool receptacle = false;
  Elevation elevation = Elevation::Mid;  // fixtures; small objects inherit
};

const TypeTraits& traits(ObjType t);

/// Fixtures occupy their cell; the agent cannot stand there.
inline bool blocks_movement(ObjType t) { return !traits(t).pickupable; }

struct ObjectInstance {
  int id = 0;
  ObjType type = ObjType::Cup;
  Cell position;
  Elevation elevation = Elevation::Mid;
  Relation relation;
  bool openable = false;
  bool is_open = false;
  bool toggleable = false;
  bool is_on = false;
  bool pickupable = false;
  bool receptacle = false;
  Temperature temperature = Temperature::Normal;
  Cleanliness cleanliness = Cleanliness::Dirty;
  friend bool operator==(const ObjectInstance&, const ObjectInstance&) = default;
};

ObjectInstance make_object(int id, ObjType type, Cell pos);

struct Pose {
  Cell cell;
  int heading = 0;  // 0, 90, 180, 270
  int pitch = 0;    // -30, 0, 30
  std::optional<int> held;
  friend bool operator==(const Pose&, const Pose&) = default;
};

/// Pitch -30 sees {low, mid}; 0 sees {mid}; +30 sees {mid, high}.
bool pitch_sees(int pitch, Elevation e);

/// Pitch that brings `e` into view, preferring `current` when it already does.
int pitch_for(Elevation e, int current);

enum class ActionKind : std::uint8_t {
  MoveAhead,
  TurnLeft,
  TurnRight,
  LookUp,
  LookDown,
  PickUp,
  Put,
  Open,
  Close,
  ToggleOn,
  ToggleOff,
  Declare,
  Stop,
};

bool is_parameterized(ActionKind k);
bool is_interaction(ActionKind k);  // PickUp, Put, Open, Close, Toggle*, Declare
bool is_navigation(ActionKind k);   // moves, turns, looks

struct Action {
  ActionKind kind = ActionKind::Stop;
  int target = 0;  // object id for parameterized kinds, else 0
  friend bool operator==(const Action&, const Action&) = default;

  static Action simple(ActionKind k) { return {k, 0}; }
  static Action with(ActionKind k, int id) { return {k, id}; }
};

std::string to_string(const Action& a);
Action parse_action(std::string_view s);

struct VisibleObject {
  int id = 0;
  ObjType type = ObjType::Cup;
  Relation relation;
  int distance = 0;  // Chebyshev cells
  int bearing = 0;   // degrees, clockwise from heading, in (-180, 180]
  Cell cell;         // absolute cell; localization is exact in this world
  friend bool operator==(const VisibleObject&, const VisibleObject&) = default;
};

// Terrain characters: '#' wall, '.' floor, 'D' door, 'F' fixture-occupied.
struct ViewCell {
  Cell cell;
  char terrain = '.';
  friend bool operator==(const ViewCell&, const ViewCell&) = default;
};

struct Observation {
  std::vector<VisibleObject> visible;  // ascending id
  Pose pose;
  std::string feedback;
  std::vector<ViewCell> view;  // terrain inside the view cone, row-major order
  friend bool operator==(const Observation&, const Observation&) = default;
};

std::string_view to_string(ObjType t);
ObjType parse_obj_type(std::string_view s);
std::string_view to_string(Elevation e);
Elevation parse_elevation(std::string_view s);
std::string_view to_string(ActionKind k);
ActionKind parse_action_kind(std::string_view s);
std::string to_string(const Relation& r);
Relation parse_relation(std::string_view s);

void to_json(Json& j, const Cell& c);
void from_json(const Json& j, Cell& c);
void to_json(Json& j, const ObjectInstance& o);
void from_json(const Json& j, ObjectInstance& o);
void to_json(Json& j, const Pose& p);
void from_json(const Json& j, Pose& p);
void to_json(Json& j, const Action& a);
void from_json(const Json& j, Action& a);
void to_json(Json& j, const VisibleObject& v);
void from_json(const Json& j, VisibleObject& v);
void to_json(Json& j, const Observation& o);
void from_json(const Json& j, Observation& o);

}  // namespace trajlab
