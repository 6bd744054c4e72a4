#include "trajlab/sim/scene.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "trajlab/common.hpp"

namespace trajlab {

namespace {

constexpr std::array<std::string_view, kNumArchetypes> kArchetypeNames = {
    "kitchen-1room", "kitchen-2room", "livingroom-1room", "livingroom-2room"};

struct Layout {
  int width = 0;
  int height = 0;
  std::vector<std::string> grid;
  std::vector<Cell> doors;
};

Layout make_layout(Archetype a, Rng& rng) {
  Layout l;
  const bool two = is_two_room(a);
  const int h = rng.range(7, 9);
  const int w1 = two ? rng.range(8, 10) : rng.range(10, 13);
  const int w2 = two ? rng.range(7, 9) : 0;
  l.height = h + 2;
  l.width = two ? w1 + w2 + 3 : w1 + 2;
  l.grid.assign(l.height, std::string(l.width, '#'));
  for (int y = 1; y <= h; ++y) {
    for (int x = 1; x <= w1; ++x) l.grid[y][x] = '.';
    if (two)
      for (int x = w1 + 2; x <= w1 + 1 + w2; ++x) l.grid[y][x] = '.';
  }
  if (two) {
    const Cell door{w1 + 1, rng.range(2, h - 1)};
    l.grid[door.y][door.x] = 'D';
    l.doors.push_back(door);
  }
  return l;
}

struct Placement {
  ObjType type;
  Cell cell;
  int parent = -1;  // index into placements for small objects
  bool inside = false;
};

bool connected(const Layout& l, const std::vector<std::vector<bool>>& blocked) {
  std::vector<std::vector<bool>> seen(l.height, std::vector<bool>(l.width, false));
  int total = 0;
  Cell start{-1, -1};
  for (int y = 0; y < l.height; ++y)
    for (int x = 0; x < l.width; ++x)
      if (l.grid[y][x] != '#' && !blocked[y][x]) {
        ++total;
        if (start.x < 0) start = {x, y};
      }
  if (total == 0) return false;
  std::deque<Cell> q{start};
  seen[start.y][start.x] = true;
  int reached = 0;
  while (!q.empty()) {
    const Cell c = q.front();
    q.pop_front();
    ++reached;
    for (int h = 0; h < 360; h += 90) {
      const Cell n = step_toward(c, h);
      if (n.x < 0 || n.y < 0 || n.x >= l.width || n.y >= l.height) continue;
      if (l.grid[n.y][n.x] == '#' || blocked[n.y][n.x] || seen[n.y][n.x]) continue;
      seen[n.y][n.x] = true;
      q.push_back(n);
    }
  }
  return reached == total;
}

bool has_free_neighbor(const Layout& l, const std::vector<std::vector<bool>>& blocked, Cell c) {
  for (int h = 0; h < 360; h += 90) {
    const Cell n = step_toward(c, h);
    if (l.grid[n.y][n.x] != '#' && !blocked[n.y][n.x]) return true;
  }
  return false;
}

bool near_door(const Layout& l, Cell c) {
  return std::any_of(l.doors.begin(), l.doors.end(),
                     [&](Cell d) { return chebyshev(c, d) <= 1; });
}

bool wall_adjacent(const Layout& l, Cell c) {
  for (int h = 0; h < 360; h += 90) {
    const Cell n = step_toward(c, h);
    if (l.grid[n.y][n.x] == '#') return true;
  }
  return false;
}

// Places one fixture at a random admissible cell; keeps the free space
// connected and every fixture reachable from an orthogonal neighbor.
bool place_fixture(const Layout& l, std::vector<std::vector<bool>>& blocked,
                   std::vector<Placement>& out, ObjType type, bool against_wall, Rng& rng) {
  std::vector<Cell> candidates;
  for (int y = 1; y < l.height - 1; ++y)
    for (int x = 1; x < l.width - 1; ++x) {
      const Cell c{x, y};
      if (l.grid[y][x] != '.' || blocked[y][x] || near_door(l, c)) continue;
      if (against_wall != wall_adjacent(l, c)) continue;
      candidates.push_back(c);
    }
  rng.shuffle(candidates);
  for (const Cell c : candidates) {
    blocked[c.y][c.x] = true;
    bool ok = connected(l, blocked) && has_free_neighbor(l, blocked, c);
    for (const auto& p : out)
      if (ok && p.parent < 0) ok = has_free_neighbor(l, blocked, p.cell);
    if (ok) {
      out.push_back({type, c});
      return true;
    }
    blocked[c.y][c.x] = false;
  }
  return false;
}

constexpr double kStowedFraction = 0.5;

constexpr std::array<ObjType, 6> kSmallTypes = {ObjType::Cup,   ObjType::Plate,
                                                ObjType::Potato, ObjType::Apple,
                                                ObjType::DishSponge, ObjType::Knife};

}  // namespace

std::string_view to_string(Archetype a) { return kArchetypeNames[static_cast<int>(a)]; }

Archetype parse_archetype(std::string_view s) {
  for (int i = 0; i < kNumArchetypes; ++i)
    if (kArchetypeNames[i] == s) return static_cast<Archetype>(i);
  throw ValidationError("unknown archetype: " + std::string(s));
}

bool Scene::has_type(ObjType t) const {
  return std::any_of(objects.begin(), objects.end(),
                     [t](const ObjectInstance& o) { return o.type == t; });
}

std::string make_scene_id(Archetype a, std::uint64_t seed) {
  return std::string(to_string(a)) + "#" + hex64(seed);
}

Archetype archetype_of_scene_id(std::string_view scene_id) {
  const auto hash = scene_id.find('#');
  return parse_archetype(scene_id.substr(0, hash));
}

Scene generate_scene(Archetype archetype, std::uint64_t seed) {
  // Retry with a derived seed on the rare layout that cannot hold the
  // required fixtures; the result is still a pure function of (archetype, seed).
  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng(derive_seed(seed, streams::kScene, attempt * kNumArchetypes +
                                                   static_cast<std::uint64_t>(archetype)));
    const Layout l = make_layout(archetype, rng);
    std::vector<std::vector<bool>> blocked(l.height, std::vector<bool>(l.width, false));
    std::vector<Placement> placed;
    bool ok = true;
    auto fixture = [&](ObjType t, bool wall = true) {
      ok = ok && place_fixture(l, blocked, placed, t, wall, rng);
    };

    std::vector<ObjType> small;
    if (is_kitchen(archetype)) {
      fixture(ObjType::Fridge);
      fixture(ObjType::Microwave);
      fixture(ObjType::Sink);
      if (ok) placed.push_back({ObjType::Faucet, placed.back().cell});
      const int counters = rng.range(2, 3);
      const int cabinets = rng.range(2, 4);
      const int shelves = rng.range(1, 2);
      for (int i = 0; i < counters; ++i) fixture(ObjType::CounterTop);
      for (int i = 0; i < cabinets; ++i) fixture(ObjType::Cabinet);
      for (int i = 0; i < shelves; ++i) fixture(ObjType::Shelf);
      if (rng.below(2) == 0) fixture(ObjType::Table, false);
      small.assign(kSmallTypes.begin(), kSmallTypes.end());
      const int room = 20 - static_cast<int>(placed.size()) - 6;
      const int extras = rng.range(0, std::min(3, room));
      for (int i = 0; i < extras; ++i) small.push_back(kSmallTypes[rng.below(kSmallTypes.size())]);
    } else {
      fixture(ObjType::Sofa);
      fixture(ObjType::Table, false);
      const int shelves = rng.range(1, 2);
      const int cabinets = rng.range(2, 3);
      for (int i = 0; i < shelves; ++i) fixture(ObjType::Shelf);
      for (int i = 0; i < cabinets; ++i) fixture(ObjType::Cabinet);
      fixture(ObjType::Person, false);
      small = {ObjType::Cup, ObjType::Apple, ObjType::Plate};
      const int room = 14 - static_cast<int>(placed.size()) - 3;
      const int extras = rng.range(0, std::min(4, room));
      for (int i = 0; i < extras; ++i) small.push_back(kSmallTypes[rng.below(kSmallTypes.size())]);
    }
    if (!ok) continue;

    std::vector<int> parents, containers;
    for (std::size_t i = 0; i < placed.size(); ++i) {
      const auto t = placed[i].type;
      if (traits(t).receptacle && t != ObjType::Microwave && t != ObjType::Sink) {
        parents.push_back(static_cast<int>(i));
        if (traits(t).openable) containers.push_back(static_cast<int>(i));
      }
    }
    // Households keep most small items stowed away.
    for (const ObjType t : small) {
      const auto& pool = !containers.empty() && rng.uniform01() < kStowedFraction ? containers : parents;
      const int p = pool[rng.below(pool.size())];
      const bool inside = traits(placed[p].type).openable;
      placed.push_back({t, placed[p].cell, p, inside});
    }

    // Shuffle so instance ids carry no information about type.
    std::vector<int> order(placed.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    rng.shuffle(order);
    std::vector<int> id_of(placed.size());
    for (std::size_t k = 0; k < order.size(); ++k) id_of[order[k]] = static_cast<int>(k) + 1;

    Scene s;
    s.archetype = archetype;
    s.seed = seed;
    s.scene_id = make_scene_id(archetype, seed);
    s.width = l.width;
    s.height = l.height;
    s.grid = l.grid;
    s.objects.resize(placed.size());
    for (std::size_t i = 0; i < placed.size(); ++i) {
      const auto& p = placed[i];
      auto o = make_object(id_of[i], p.type, p.cell);
      if (p.parent >= 0) {
        o.elevation = traits(placed[p.parent].type).elevation;
        o.relation = p.inside ? Relation::in(id_of[p.parent]) : Relation::on(id_of[p.parent]);
        if (p.inside && placed[p.parent].type == ObjType::Fridge) o.temperature = Temperature::Cold;
      }
      s.objects[o.id - 1] = o;
    }
    return s;
  }
}

std::vector<std::vector<bool>> walkable_mask(const Scene& scene) {
  std::vector<std::vector<bool>> m(scene.height, std::vector<bool>(scene.width, false));
  for (int y = 0; y < scene.height; ++y)
    for (int x = 0; x < scene.width; ++x) m[y][x] = scene.is_floor({x, y});
  for (const auto& o : scene.objects)
    if (blocks_movement(o.type)) m[o.position.y][o.position.x] = false;
  return m;
}

void to_json(Json& j, const Scene& s) {
  j = Json{{"scene_id", s.scene_id},
           {"archetype", to_string(s.archetype)},
           {"seed", s.seed},
           {"width", s.width},
           {"height", s.height},
           {"grid", s.grid},
           {"objects", s.objects}};
}

void from_json(const Json& j, Scene& s) {
  s.scene_id = j.at("scene_id").get<std::string>();
  s.archetype = parse_archetype(j.at("archetype").get<std::string>());
  s.seed = j.at("seed").get<std::uint64_t>();
  s.width = j.at("width").get<int>();
  s.height = j.at("height").get<int>();
  s.grid = j.at("grid").get<std::vector<std::string>>();
  s.objects = j.at("objects").get<std::vector<ObjectInstance>>();
  if (static_cast<int>(s.grid.size()) != s.height)
    throw ValidationError("scene " + s.scene_id + ": grid height mismatch");
  for (const auto& row : s.grid)
    if (static_cast<int>(row.size()) != s.width)
      throw ValidationError("scene " + s.scene_id + ": grid width mismatch");
  for (std::size_t i = 0; i < s.objects.size(); ++i)
    if (s.objects[i].id != static_cast<int>(i) + 1)
      throw ValidationError("scene " + s.scene_id + ": object ids must be 1..N in order");
}

}  // namespace trajlab
