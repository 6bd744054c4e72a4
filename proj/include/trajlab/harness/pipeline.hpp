#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "trajlab/common.hpp"
#include "trajlab/harness/harness.hpp"

namespace trajlab {

/// Shared settings of every stage run.
struct StageContext {
  std::filesystem::path workdir;
  LabConfig config;
  std::uint64_t seed = 42;
  int jobs = 1;
  // Per-command overrides of config.prefs; recorded in the manifest but not
  // part of the config hash.
  std::optional<int> k;
  std::optional<int> trials;
};

/// A stage could not run because an input is missing or stale. `stage` is
/// the stage that has to be (re)run first.
class StageInputError : public ValidationError {
 public:
  StageInputError(std::string stage, const std::string& what)
      : ValidationError(what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

Json suite_to_json(const Suite& s);
Suite suite_from_json(const Json& j);

// Each stage reads the artifacts of earlier stages from the workdir, checks
// them against the manifests that produced them, writes its own outputs and
// a manifest `<stage>.manifest.json` with the config hash, seed and the
// hashes of every input and output file.
void stage_gen_scenes(const StageContext& ctx);
void stage_collect(const StageContext& ctx);
void stage_gen_prefs(const StageContext& ctx);
void stage_train(const StageContext& ctx);
/// `methods` empty means all; `split` selects suite and memory.
std::vector<EvalReport> stage_eval(const StageContext& ctx, const std::vector<Method>& methods, Split split);
CorrelationResult stage_correlate(const StageContext& ctx);
/// Collects every eval report in the workdir into report.txt / report.json.
std::string stage_report(const StageContext& ctx);

/// gen-scenes through report with every method.
void run_pipeline(const StageContext& ctx);

}  // namespace trajlab
