#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "trajlab/sim/types.hpp"

namespace trajlab {

enum class Archetype : std::uint8_t { Kitchen1Room, Kitchen2Room, Livingroom1Room, Livingroom2Room };
inline constexpr int kNumArchetypes = 4;

std::string_view to_string(Archetype a);
Archetype parse_archetype(std::string_view s);
inline bool is_kitchen(Archetype a) {
  return a == Archetype::Kitchen1Room || a == Archetype::Kitchen2Room;
}
inline bool is_two_room(Archetype a) {
  return a == Archetype::Kitchen2Room || a == Archetype::Livingroom2Room;
}

/// Static layout plus the initial object configuration.
struct Scene {
  std::string scene_id;
  Archetype archetype = Archetype::Kitchen1Room;
  std::uint64_t seed = 0;
  int width = 0;
  int height = 0;
  std::vector<std::string> grid;  // row-major: '#' wall, '.' floor, 'D' door
  std::vector<ObjectInstance> objects;  // ids 1..N in order

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }
  char terrain(Cell c) const { return in_bounds(c) ? grid[c.y][c.x] : '#'; }
  bool is_floor(Cell c) const {
    const char t = terrain(c);
    return t == '.' || t == 'D';
  }
  const ObjectInstance* find(int id) const {
    return id >= 1 && id <= static_cast<int>(objects.size()) ? &objects[id - 1] : nullptr;
  }
  bool has_type(ObjType t) const;

  friend bool operator==(const Scene&, const Scene&) = default;
};

/// Scene id embeds the archetype so features can compare layouts by family.
std::string make_scene_id(Archetype a, std::uint64_t seed);
Archetype archetype_of_scene_id(std::string_view scene_id);

/// Deterministic procedural household: same (archetype, seed) gives an
/// identical scene. Kitchens hold 12-20 objects, living rooms 8-14.
Scene generate_scene(Archetype archetype, std::uint64_t seed);

/// Cells the agent may stand on: floor or door, not occupied by a fixture.
std::vector<std::vector<bool>> walkable_mask(const Scene& scene);

void to_json(Json& j, const Scene& s);
void from_json(const Json& j, Scene& s);

}  // namespace trajlab
