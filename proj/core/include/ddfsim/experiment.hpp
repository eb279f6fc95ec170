#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ddfsim/engine.hpp"
#include "ddfsim/metrics.hpp"

namespace ddfsim {

enum class ExperimentKind { Outage, Fer, T1Dist, Slope, AwgnRef };

/// A fully resolved experiment: what to run, over which SNR sweep, with
/// which budgets, and where to put the results.
struct ExperimentSpec {
  ExperimentKind experiment = ExperimentKind::Outage;
  FrameConfig config;
  std::vector<double> snrs_db;
  StoppingRule stopping{10000, 0};
  std::uint64_t seed = 1;
  std::string output_path;
  std::string ref_table_path;  // optional cache for the AWGN reference table

  /// Canonical flat key=value view (what the manifest records).
  std::map<std::string, std::string> resolved() const;

  /// Builds a spec from key=value pairs; keys unknown to the schema are
  /// rejected, `meta.*` keys (from manifests) are ignored.
  static ExperimentSpec from_key_values(const std::map<std::string, std::string>& kv);
  static std::map<std::string, std::string> parse_config_file(const std::string& path);
};

/// Runs the experiment, writing the result CSV to spec.output_path and a
/// manifest (resolved config + seed + version + wall time) next to it.
/// Identical spec and seed produce a byte-identical CSV.
void run(const ExperimentSpec& spec);

std::string tool_version();

}  // namespace ddfsim
