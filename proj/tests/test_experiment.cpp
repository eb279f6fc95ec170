#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "ddfsim/experiment.hpp"

using namespace ddfsim;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> minimal_kv() {
  return {{"experiment", "outage"}, {"n_relays", "0"},     {"rate", "2"},
          {"snr_start", "10"},      {"snr_stop", "12"},    {"snr_step", "2"},
          {"trials", "2000"},       {"seed", "5"},         {"out", "exp_test_out.csv"}};
}

}  // namespace

TEST_CASE("spec parsing: schema is closed") {
  auto kv = minimal_kv();
  kv["definitely_not_a_key"] = "1";
  CHECK_THROWS(ExperimentSpec::from_key_values(kv));
}

TEST_CASE("spec parsing: manifest meta keys are ignored") {
  auto kv = minimal_kv();
  kv["meta.version"] = "0.0";
  kv["meta.walltime_s"] = "12.5";
  CHECK_NOTHROW(ExperimentSpec::from_key_values(kv));
}

TEST_CASE("spec parsing: experiment and output path are mandatory") {
  auto kv = minimal_kv();
  kv.erase("experiment");
  CHECK_THROWS(ExperimentSpec::from_key_values(kv));
  kv = minimal_kv();
  kv.erase("out");
  CHECK_THROWS(ExperimentSpec::from_key_values(kv));
}

TEST_CASE("spec parsing: invalid configurations are rejected up front") {
  auto kv = minimal_kv();
  kv["scheme"] = "alamouti";
  kv["n_relays"] = "2";
  kv["block_length"] = "2";
  CHECK_THROWS(ExperimentSpec::from_key_values(kv));
}

TEST_CASE("spec parsing: snr grid and defaults") {
  const ExperimentSpec spec = ExperimentSpec::from_key_values(minimal_kv());
  REQUIRE(spec.snrs_db.size() == 2);
  CHECK(spec.snrs_db[0] == 10.0);
  CHECK(spec.snrs_db[1] == 12.0);
  CHECK(spec.stopping.max_trials == 2000);
  CHECK(spec.stopping.target_errors == 0);
  CHECK(spec.seed == 5);
}

TEST_CASE("running an experiment produces a CSV, a manifest, and is reproducible") {
  const ExperimentSpec spec = ExperimentSpec::from_key_values(minimal_kv());
  run(spec);
  const std::string first = slurp(spec.output_path);
  CHECK(first.rfind("snr_db,estimate,ci_halfwidth,trials,errors\n", 0) == 0);
  CHECK(first.find("\r") == std::string::npos);  // LF-only output

  run(spec);
  CHECK(slurp(spec.output_path) == first);

  const std::string manifest = slurp(spec.output_path + ".manifest");
  CHECK(manifest.find("experiment=outage") != std::string::npos);
  CHECK(manifest.find("seed=5") != std::string::npos);
  CHECK(manifest.find("meta.version=") != std::string::npos);

  std::remove(spec.output_path.c_str());
  std::remove((spec.output_path + ".manifest").c_str());
}

TEST_CASE("a manifest re-runs to a byte-identical CSV") {
  const ExperimentSpec spec = ExperimentSpec::from_key_values(minimal_kv());
  run(spec);
  const std::string first = slurp(spec.output_path);
  const std::string manifest_path = spec.output_path + ".manifest";

  auto kv = ExperimentSpec::parse_config_file(manifest_path);
  kv["out"] = "exp_test_rerun.csv";
  const ExperimentSpec again = ExperimentSpec::from_key_values(kv);
  run(again);
  CHECK(slurp(again.output_path) == first);

  std::remove(spec.output_path.c_str());
  std::remove(manifest_path.c_str());
  std::remove(again.output_path.c_str());
  std::remove((again.output_path + ".manifest").c_str());
}

TEST_CASE("t1dist experiment writes the histogram schema") {
  auto kv = minimal_kv();
  kv["experiment"] = "t1dist";
  kv["n_relays"] = "1";
  kv["snr_start"] = "15";
  kv["snr_stop"] = "15";
  kv["trials"] = "1000";
  kv["out"] = "exp_test_t1.csv";
  const ExperimentSpec spec = ExperimentSpec::from_key_values(kv);
  run(spec);
  const std::string text = slurp(spec.output_path);
  CHECK(text.rfind("activation_block,probability,count\n", 0) == 0);
  CHECK(text.find("never,") != std::string::npos);
  std::remove(spec.output_path.c_str());
  std::remove((spec.output_path + ".manifest").c_str());
}
