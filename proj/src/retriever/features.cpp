#include "trajlab/retriever/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

#include "trajlab/common.hpp"

namespace trajlab {
namespace {

constexpr std::uint64_t kHashSeed = 0x6d61727472657472ULL;

void l1_normalize(double* first, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += std::abs(first[i]);
  if (s > 0.0)
    for (int i = 0; i < n; ++i) first[i] /= s;
}

int kind_index(ActionKind k) { return static_cast<int>(k); }

std::optional<TaskFamily> family_of_instruction(const std::string& instruction) {
  const auto toks = tokenize(instruction);
  if (toks.empty()) return std::nullopt;
  const auto& w = toks.front();
  if (w == "come") return TaskFamily::Goto;
  if (w == "where") return TaskFamily::AnswerWhere;
  if (w == "put") return TaskFamily::PickAndPlace;
  if (w == "clean") return TaskFamily::PickCleanThenPlace;
  if (w == "cool") return TaskFamily::PickCoolThenPlace;
  if (w == "heat") return TaskFamily::PickHeatThenPlace;
  return std::nullopt;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::vector<double> instruction_bag(const std::string& instruction) {
  std::vector<double> bag(fv::kInstrBins, 0.0);
  for (const auto& t : tokenize(instruction)) bag[fnv1a(t, kHashSeed) % fv::kInstrBins] += 1.0;
  l1_normalize(bag.data(), fv::kInstrBins);
  return bag;
}

std::vector<double> observation_histogram(const Observation& obs) {
  std::vector<double> h(fv::kObsBins, 0.0);
  for (const auto& v : obs.visible) h[static_cast<int>(v.type) * 2 + (v.distance <= 2 ? 0 : 1)] += 1.0;
  l1_normalize(h.data(), fv::kObsBins);
  return h;
}

double scene_overlap(const Observation& o1, const AbstractTrajectory& abstract) {
  std::set<std::pair<int, Cell>> objects;
  std::set<Cell> fixtures;
  for (const auto& m : abstract.milestones) {
    for (const auto& v : m.observation.visible) objects.insert({static_cast<int>(v.type), v.cell});
    for (const auto& c : m.observation.view)
      if (c.terrain == 'F') fixtures.insert(c.cell);
  }
  int total = 0, hit = 0;
  for (const auto& v : o1.visible) {
    ++total;
    hit += objects.count({static_cast<int>(v.type), v.cell}) ? 1 : 0;
  }
  for (const auto& c : o1.view)
    if (c.terrain == 'F') {
      ++total;
      hit += fixtures.count(c.cell) ? 1 : 0;
    }
  return total > 0 ? static_cast<double>(hit) / total : 0.0;
}

LayoutEvidence layout_evidence(const Observation& o1, const AbstractTrajectory& abstract) {
  std::map<Cell, char> seen;
  for (const auto& m : abstract.milestones)
    for (const auto& c : m.observation.view) seen.emplace(c.cell, c.terrain);
  LayoutEvidence e;
  for (const auto& c : o1.view) {
    const auto it = seen.find(c.cell);
    if (it == seen.end()) continue;
    if (it->second != c.terrain)
      ++e.conflict;
    else if (c.terrain != '.')
      ++e.agree;
  }
  return e;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

FeatureVector featurize(const Task& task, const Observation& o1, const AbstractTrajectory& abstract) {
  FeatureVector f(fv::kDim, 0.0);

  const auto bag = instruction_bag(task.instruction);
  std::copy(bag.begin(), bag.end(), f.begin() + fv::kInstr);
  f[fv::kFamily + static_cast<int>(task.family)] = 1.0;
  f[fv::kTarget + static_cast<int>(task.target_type)] = 1.0;
  if (task.receptacle_type) f[fv::kReceptacle + static_cast<int>(*task.receptacle_type)] = 1.0;
  const auto hist = observation_histogram(o1);
  std::copy(hist.begin(), hist.end(), f.begin() + fv::kObsHist);
  f[fv::kPose + o1.pose.heading / 90] = 1.0;
  f[fv::kPose + 4 + (o1.pose.pitch + 30) / 30] = 1.0;
  f[fv::kPose + 7] = o1.pose.held ? 1.0 : 0.0;

  const auto& ms = abstract.milestones;
  f[fv::kCount] = static_cast<double>(std::min<std::size_t>(ms.size(), 64)) / 16.0;
  std::set<std::string> mtokens;
  bool target_located = false;
  for (const auto& m : ms) {
    if (m.action && is_interaction(m.action->kind)) f[fv::kKinds + kind_index(m.action->kind)] += 1.0;
    if (m.action_object) f[fv::kObjects + static_cast<int>(*m.action_object)] += 1.0;
    for (const auto& v : m.observation.visible) {
      f[fv::kObjects + static_cast<int>(v.type)] += 1.0;
      if (v.type == task.target_type) target_located = true;
    }
    if (m.action_object == task.target_type) target_located = true;
    for (int t = 0; t < 5; ++t)
      if (m.triggers & (1u << t)) f[fv::kTriggers + t] += 1.0;
    for (auto& tok : tokenize(m.description)) mtokens.insert(std::move(tok));
  }
  l1_normalize(&f[fv::kKinds], 13);
  l1_normalize(&f[fv::kObjects], kNumObjTypes);
  if (!ms.empty())
    for (int t = 0; t < 5; ++t) f[fv::kTriggers + t] /= static_cast<double>(ms.size());

  const auto itoks = tokenize(task.instruction);
  const std::set<std::string> iset(itoks.begin(), itoks.end());
  int common = 0;
  for (const auto& t : iset) common += mtokens.count(t) ? 1 : 0;
  f[fv::kTokenOverlap] = iset.empty() ? 0.0 : static_cast<double>(common) / iset.size();
  f[fv::kTargetMentioned] = mtokens.count(lower(to_string(task.target_type))) ? 1.0 : 0.0;
  f[fv::kReceptacleMentioned] =
      task.receptacle_type && mtokens.count(lower(to_string(*task.receptacle_type))) ? 1.0 : 0.0;
  try {
    f[fv::kArchetypeMatch] =
        archetype_of_scene_id(abstract.source_scene_id) == archetype_of_scene_id(task.scene_id) ? 1.0 : 0.0;
  } catch (const ValidationError&) {
    f[fv::kArchetypeMatch] = 0.0;
  }
  const double overlap = scene_overlap(o1, abstract);
  f[fv::kSceneOverlap] = overlap;
  f[fv::kTargetLocated] = target_located ? 1.0 : 0.0;
  f[fv::kInstructionMatch] = abstract.source_instruction == task.instruction ? 1.0 : 0.0;
  f[fv::kFamilyMatch] = family_of_instruction(abstract.source_instruction) == task.family ? 1.0 : 0.0;
  f[fv::kGroundedTarget] = target_located ? overlap : 0.0;
  f[fv::kSceneMatch] = abstract.source_scene_id == task.scene_id ? 1.0 : 0.0;
  const auto layout = layout_evidence(o1, abstract);
  f[fv::kLayoutMatch] = layout.agree > 0 && layout.conflict == 0 ? 1.0 : 0.0;
  f[fv::kLayoutConflict] = layout.conflict > 0 ? 1.0 : 0.0;
  bool blind = o1.visible.empty();
  for (const auto& c : o1.view) blind = blind && c.terrain != 'F';
  f[fv::kBlindStart] = blind ? 1.0 : 0.0;
  return f;
}

}  // namespace trajlab
