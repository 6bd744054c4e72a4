#pragma once

#include <string>
#include <vector>

#include "trajlab/abstraction/abstraction.hpp"
#include "trajlab/sim/scene.hpp"

namespace trajlab {

using FeatureVector = std::vector<double>;

// Block layout of the feature vector.
namespace fv {
inline constexpr int kDim = 256;
inline constexpr int kInstr = 0;          // 64 hashed instruction tokens
inline constexpr int kInstrBins = 64;
inline constexpr int kFamily = 64;        // 6
inline constexpr int kTarget = 70;        // 16
inline constexpr int kReceptacle = 86;    // 16
inline constexpr int kObsHist = 102;      // 32: type x {near, far}
inline constexpr int kObsBins = 32;
inline constexpr int kPose = 134;         // 8: heading 4, pitch 3, holding 1
inline constexpr int kCount = 142;        // 1
inline constexpr int kKinds = 143;        // 13 action kinds
inline constexpr int kObjects = 156;      // 16
inline constexpr int kTriggers = 172;     // 5
inline constexpr int kOverlap = 177;      // scalars below
inline constexpr int kTokenOverlap = kOverlap + 0;
inline constexpr int kTargetMentioned = kOverlap + 1;
inline constexpr int kReceptacleMentioned = kOverlap + 2;
inline constexpr int kArchetypeMatch = kOverlap + 3;
inline constexpr int kSceneOverlap = kOverlap + 4;
inline constexpr int kTargetLocated = kOverlap + 5;
inline constexpr int kInstructionMatch = kOverlap + 6;
inline constexpr int kFamilyMatch = kOverlap + 7;
inline constexpr int kGroundedTarget = kOverlap + 8;
inline constexpr int kBlindStart = kOverlap + 9;
inline constexpr int kLayoutMatch = kOverlap + 10;
inline constexpr int kLayoutConflict = kOverlap + 11;
inline constexpr int kSceneMatch = kOverlap + 12;  // stands in for recognizing the room on sight
inline constexpr int kUsed = kOverlap + 13;  // rest is zero padding
}  // namespace fv

/// Lower-cased alphanumeric tokens.
std::vector<std::string> tokenize(const std::string& text);

/// L1-normalized hashed bag of the instruction tokens.
std::vector<double> instruction_bag(const std::string& instruction);

/// L1-normalized histogram of visible types split by distance (<= 2 or farther).
std::vector<double> observation_histogram(const Observation& obs);

/// Fraction of what o1 shows (objects by type and cell, fixture cells) that
/// reappears in the abstract's observations. Zero when o1 shows nothing.
double scene_overlap(const Observation& o1, const AbstractTrajectory& abstract);

/// Terrain comparison of o1's view against every cell the abstract observed.
/// `agree` counts matching walls, doors and fixtures; `conflict` counts
/// cells whose terrain differs.
struct LayoutEvidence {
  int agree = 0;
  int conflict = 0;
};
LayoutEvidence layout_evidence(const Observation& o1, const AbstractTrajectory& abstract);

FeatureVector featurize(const Task& task, const Observation& initial_obs, const AbstractTrajectory& abstract);

double cosine(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace trajlab
