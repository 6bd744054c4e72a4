// trajlab: seeded, resumable pipeline stages over a working directory.
#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "trajlab/harness/pipeline.hpp"
#include "trajlab/io.hpp"

namespace {

using namespace trajlab;

std::vector<Method> parse_methods(const std::string& list) {
  std::vector<Method> out;
  if (list.empty() || list == "all") return out;
  std::stringstream in(list);
  std::string name;
  while (std::getline(in, name, ',')) out.push_back(parse_method(name));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trajectory retrieval lab: scenes, memory, preferences, training and evaluation"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string workdir = "work";
  std::uint64_t seed = 42;
  int jobs = 1;
  app.add_option("--config", config_path, "JSON config; defaults apply when omitted")->check(CLI::ExistingFile);
  app.add_option("--workdir", workdir, "Artifact directory")->capture_default_str();
  app.add_option("--seed", seed, "Master seed")->capture_default_str();
  app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();

  std::optional<int> k, trials;
  std::string methods = "all";
  std::string split = "test";

  auto* gen_scenes = app.add_subcommand("gen-scenes", "Build train and test suites");
  auto* collect = app.add_subcommand("collect", "Record one expert trajectory per task");
  auto* gen_prefs = app.add_subcommand("gen-prefs", "Measure candidate references and write preference pairs");
  gen_prefs->add_option("--k", k, "Candidates per task")->check(CLI::PositiveNumber);
  gen_prefs->add_option("--trials", trials, "Episodes per candidate")->check(CLI::PositiveNumber);
  auto* train = app.add_subcommand("train", "Fit the retriever on the preference pairs");
  auto* eval = app.add_subcommand("eval", "Evaluate methods on a split");
  eval->add_option("--method", methods, "Method name, comma list or `all`")->capture_default_str();
  eval->add_option("--split", split, "train or test")->check(CLI::IsMember({"train", "test"}))->capture_default_str();
  auto* correlate = app.add_subcommand("correlate", "Score-vs-SR correlation on the test split");
  auto* report = app.add_subcommand("report", "Summarize every eval in the workdir");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string stage = app.get_subcommands().front()->get_name();
  try {
    StageContext ctx;
    ctx.workdir = workdir;
    ctx.seed = seed;
    ctx.jobs = jobs;
    ctx.k = k;
    ctx.trials = trials;
    if (!config_path.empty()) ctx.config = load_config(read_text(config_path));

    if (gen_scenes->parsed()) stage_gen_scenes(ctx);
    if (collect->parsed()) stage_collect(ctx);
    if (gen_prefs->parsed()) stage_gen_prefs(ctx);
    if (train->parsed()) stage_train(ctx);
    if (eval->parsed()) std::cout << report_table(stage_eval(ctx, parse_methods(methods), parse_split(split)));
    if (correlate->parsed()) std::cout << correlation_summary(stage_correlate(ctx)).dump(2) << "\n";
    if (report->parsed()) std::cout << stage_report(ctx);
    return 0;
  } catch (const StageInputError& e) {
    std::cerr << stage << ": " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << stage << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << stage << ": internal error: " << e.what() << "\n";
    return 1;
  }
}
