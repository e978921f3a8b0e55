#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gavel/eval/eval.hpp"
#include "gavel/mutate/mutate.hpp"
#include "gavel/qd/archive.hpp"

namespace gavel::hub {

struct OperatorConfig {
  enum class Kind { Grammar, Infill };
  Kind kind = Kind::Grammar;
  bool ucb = false;  // bandit site selection
  mutate::GrammarSamplerParams grammar;
  mutate::InfillEndpointConfig infill;
};

struct EvalConfig {
  int n_random = 100;
  int n_mcts = 10;
  int mcts_iterations = 1000;
  double exploration_c = 1.4142135623730951;
  int move_limit = 50;
  double balance_gate = 0.5;
  double agency_gate = 0.5;

  eval::EvalParams params(std::uint64_t seed) const;
};

/// Evolution run settings. Relative paths resolve against the config file's
/// directory when loaded from a file.
struct RunConfig {
  std::vector<std::filesystem::path> seeds;  // .lud files or directories
  std::filesystem::path corpus;              // reference corpus for the projection and novelty baseline
  std::filesystem::path macros;              // optional macro directory
  int steps = 500;
  int j = 3;
  int k = 3;
  EvalConfig eval;
  qd::ArchiveGeometry archive;
  OperatorConfig op;
  std::uint64_t seed = 1;
  int workers = 0;  // 0 = logical cores - 1
  int snapshot_every = 50;
  std::filesystem::path output = "runs/run";

  /// Throws Error(Config) on out-of-range values.
  void check() const;
  /// Like check(), plus existence of the input paths.
  void check_paths() const;
  int resolved_workers() const;
};

/// Parses a JSON config; unknown keys are rejected. Throws Error(Config).
RunConfig parse_run_config(std::string_view json, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);
std::string run_config_to_json(const RunConfig& config);

}  // namespace gavel::hub
