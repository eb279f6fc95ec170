#include "ddfsim/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ddfsim {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string experiment_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Outage: return "outage";
    case ExperimentKind::Fer: return "fer";
    case ExperimentKind::T1Dist: return "t1dist";
    case ExperimentKind::Slope: return "slope";
    case ExperimentKind::AwgnRef: return "awgn-ref";
  }
  return "?";
}

ExperimentKind parse_experiment(const std::string& s) {
  if (s == "outage") return ExperimentKind::Outage;
  if (s == "fer") return ExperimentKind::Fer;
  if (s == "t1dist") return ExperimentKind::T1Dist;
  if (s == "slope") return ExperimentKind::Slope;
  if (s == "awgn-ref") return ExperimentKind::AwgnRef;
  throw std::invalid_argument("unknown experiment: " + s);
}

std::string scheme_name(Scheme s) {
  return s == Scheme::DistributedRotation ? "rotation" : "alamouti";
}

Scheme parse_scheme(const std::string& s) {
  if (s == "rotation") return Scheme::DistributedRotation;
  if (s == "alamouti") return Scheme::AlamoutiSingleRelay;
  throw std::invalid_argument("unknown scheme: " + s);
}

std::string criterion_name(DecisionCriterion::Kind k) {
  switch (k) {
    case DecisionCriterion::Kind::Outage: return "outage";
    case DecisionCriterion::Kind::OutageHalfFrame: return "outage-half";
    case DecisionCriterion::Kind::OutageDelayedOne: return "outage-delayed";
    case DecisionCriterion::Kind::SnrThreshold: return "snr-threshold";
    case DecisionCriterion::Kind::ForneyRule: return "forney";
    case DecisionCriterion::Kind::GenieExactDecoding: return "genie";
  }
  return "?";
}

DecisionCriterion::Kind parse_criterion(const std::string& s) {
  if (s == "outage") return DecisionCriterion::Kind::Outage;
  if (s == "outage-half") return DecisionCriterion::Kind::OutageHalfFrame;
  if (s == "outage-delayed") return DecisionCriterion::Kind::OutageDelayedOne;
  if (s == "snr-threshold") return DecisionCriterion::Kind::SnrThreshold;
  if (s == "forney") return DecisionCriterion::Kind::ForneyRule;
  if (s == "genie") return DecisionCriterion::Kind::GenieExactDecoding;
  throw std::invalid_argument("unknown criterion: " + s);
}

std::string activity_name(ActivityModel m) {
  switch (m) {
    case ActivityModel::GenieActivity: return "genie";
    case ActivityModel::SignallingOverhead: return "signalling";
    case ActivityModel::GlrtDetection: return "glrt";
  }
  return "?";
}

ActivityModel parse_activity(const std::string& s) {
  if (s == "genie") return ActivityModel::GenieActivity;
  if (s == "signalling") return ActivityModel::SignallingOverhead;
  if (s == "glrt") return ActivityModel::GlrtDetection;
  throw std::invalid_argument("unknown activity model: " + s);
}

const char* const kKnownKeys[] = {
    "experiment",      "n_relays",      "frame_length",  "block_length",
    "modulation_order", "rate",         "scheme",        "criterion",
    "target_pe",       "forney_log_threshold",           "activity",
    "rotation_set_size", "rotation_rule",                "snr_start",
    "snr_stop",        "snr_step",      "trials",        "target_errors",
    "seed",            "out",           "ref_table",
};

bool known_key(const std::string& k) {
  for (const char* key : kKnownKeys)
    if (k == key) return true;
  return false;
}

void write_curve_csv(const std::string& path, const std::vector<CurvePoint>& points) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file: " + path);
  out << "snr_db,estimate,ci_halfwidth,trials,errors\n";
  for (const CurvePoint& p : points) {
    out << fmt(p.snr_db) << ',' << fmt(p.estimate) << ',' << fmt(p.ci_halfwidth) << ','
        << p.trials << ',' << p.errors << '\n';
  }
  if (!out) throw std::runtime_error("failed writing output file: " + path);
}

}  // namespace

std::string tool_version() { return "0.1.0"; }

std::map<std::string, std::string> ExperimentSpec::resolved() const {
  std::map<std::string, std::string> kv;
  kv["experiment"] = experiment_name(experiment);
  kv["n_relays"] = std::to_string(config.n_relays);
  kv["frame_length"] = std::to_string(config.frame_length);
  kv["block_length"] = std::to_string(config.block_length);
  kv["modulation_order"] = std::to_string(config.constellation.order);
  kv["rate"] = fmt(config.rate);
  kv["scheme"] = scheme_name(config.scheme);
  kv["criterion"] = criterion_name(config.criterion.kind);
  kv["target_pe"] = fmt(config.criterion.target_pe);
  kv["forney_log_threshold"] = fmt(config.criterion.forney_log_threshold);
  kv["activity"] = activity_name(config.activity_model);
  kv["rotation_set_size"] = std::to_string(config.rotation_set_size);
  kv["rotation_rule"] =
      config.rotation_rule == RotationSchedule::Rule::ProductMod ? "product" : "sum";
  if (!snrs_db.empty()) {
    kv["snr_start"] = fmt(snrs_db.front());
    kv["snr_stop"] = fmt(snrs_db.back());
    kv["snr_step"] = fmt(snrs_db.size() > 1 ? snrs_db[1] - snrs_db[0] : 1.0);
  }
  kv["trials"] = std::to_string(stopping.max_trials);
  kv["target_errors"] = std::to_string(stopping.target_errors);
  kv["seed"] = std::to_string(seed);
  kv["out"] = output_path;
  if (!ref_table_path.empty()) kv["ref_table"] = ref_table_path;
  return kv;
}

ExperimentSpec ExperimentSpec::from_key_values(const std::map<std::string, std::string>& kv) {
  for (const auto& [k, v] : kv) {
    if (k.rfind("meta.", 0) == 0) continue;
    if (!known_key(k)) throw std::invalid_argument("unknown configuration key: " + k);
  }
  auto get = [&](const std::string& k) -> const std::string* {
    auto it = kv.find(k);
    return it == kv.end() ? nullptr : &it->second;
  };
  ExperimentSpec spec;
  if (const auto* v = get("experiment")) spec.experiment = parse_experiment(*v);
  else throw std::invalid_argument("missing required key: experiment");

  FrameConfig& c = spec.config;
  if (const auto* v = get("n_relays")) c.n_relays = std::stoi(*v);
  if (const auto* v = get("frame_length")) c.frame_length = std::stoi(*v);
  if (const auto* v = get("block_length")) c.block_length = std::stoi(*v);
  if (const auto* v = get("modulation_order")) c.constellation = Constellation::make(std::stoi(*v));
  c.rate = std::log2(static_cast<double>(c.constellation.order));
  if (const auto* v = get("rate")) c.rate = std::stod(*v);
  if (const auto* v = get("scheme")) c.scheme = parse_scheme(*v);
  if (const auto* v = get("criterion")) c.criterion.kind = parse_criterion(*v);
  if (const auto* v = get("target_pe")) c.criterion.target_pe = std::stod(*v);
  if (const auto* v = get("forney_log_threshold")) c.criterion.forney_log_threshold = std::stod(*v);
  if (const auto* v = get("activity")) c.activity_model = parse_activity(*v);
  if (const auto* v = get("rotation_set_size")) c.rotation_set_size = std::stoi(*v);
  if (const auto* v = get("rotation_rule")) {
    if (*v == "product") c.rotation_rule = RotationSchedule::Rule::ProductMod;
    else if (*v == "sum") c.rotation_rule = RotationSchedule::Rule::SumMod;
    else throw std::invalid_argument("unknown rotation rule: " + *v);
  }

  double start = 10.0, stop = 10.0, step = 5.0;
  if (const auto* v = get("snr_start")) start = std::stod(*v);
  if (const auto* v = get("snr_stop")) stop = std::stod(*v);
  if (const auto* v = get("snr_step")) step = std::stod(*v);
  if (step <= 0.0) throw std::invalid_argument("snr_step must be positive");
  if (stop < start) throw std::invalid_argument("snr_stop must be >= snr_start");
  const int n_points = static_cast<int>(std::floor((stop - start) / step + 0.5)) + 1;
  for (int i = 0; i < n_points; ++i) spec.snrs_db.push_back(start + i * step);

  if (const auto* v = get("trials")) spec.stopping.max_trials = std::stol(*v);
  if (const auto* v = get("target_errors")) spec.stopping.target_errors = std::stol(*v);
  if (const auto* v = get("seed")) spec.seed = std::stoull(*v);
  if (const auto* v = get("out")) spec.output_path = *v;
  else throw std::invalid_argument("missing required key: out");
  if (const auto* v = get("ref_table")) spec.ref_table_path = *v;

  spec.config.snr_db = spec.snrs_db.front();
  spec.config.validate();
  return spec;
}

std::map<std::string, std::string> ExperimentSpec::parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

void run(const ExperimentSpec& spec) {
  const auto t0 = std::chrono::steady_clock::now();
  spec.config.validate();
  std::map<std::string, std::string> extra_meta;

  // Resolve the AWGN reference table when the criterion needs one.
  AwgnReferenceTable ref;
  const AwgnReferenceTable* ref_ptr = nullptr;
  const bool needs_ref = spec.config.criterion.kind == DecisionCriterion::Kind::SnrThreshold &&
                         (spec.experiment == ExperimentKind::Fer ||
                          spec.experiment == ExperimentKind::Slope);
  if (needs_ref) {
    if (!spec.ref_table_path.empty() && std::filesystem::exists(spec.ref_table_path)) {
      ref = AwgnReferenceTable::load_csv(spec.ref_table_path);
    } else {
      std::vector<double> grid;
      for (int s = 0; s <= 20; ++s) grid.push_back(static_cast<double>(s));
      ref = awgn_reference_curve(spec.config.constellation,
                                 build_spreading_matrix(spec.config.frame_length), grid,
                                 StoppingRule{20000, 200}, spec.seed ^ 0x5eedab1eULL);
      if (!spec.ref_table_path.empty()) ref.save_csv(spec.ref_table_path);
    }
    ref_ptr = &ref;
  }

  switch (spec.experiment) {
    case ExperimentKind::Outage: {
      write_curve_csv(spec.output_path,
                      outage_curve(spec.config, spec.snrs_db, spec.stopping.max_trials, spec.seed));
      break;
    }
    case ExperimentKind::Fer: {
      write_curve_csv(spec.output_path,
                      fer_curve(spec.config, spec.snrs_db, spec.stopping, spec.seed, ref_ptr));
      break;
    }
    case ExperimentKind::T1Dist: {
      const ListeningHistogram h =
          t1_distribution(spec.config, spec.stopping.max_trials, spec.seed);
      std::ofstream out(spec.output_path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write output file: " + spec.output_path);
      out << "activation_block,probability,count\n";
      for (int b = 1; b <= h.num_blocks; ++b)
        out << b << ',' << fmt(h.probability_block(b)) << ',' << h.block_counts[b - 1] << '\n';
      out << "never," << fmt(h.probability_never()) << ',' << h.never_count << '\n';
      break;
    }
    case ExperimentKind::Slope: {
      const auto points = fer_curve(spec.config, spec.snrs_db, spec.stopping, spec.seed, ref_ptr);
      write_curve_csv(spec.output_path, points);
      const CurvePoint* lo = nullptr;
      const CurvePoint* hi = nullptr;
      for (const auto& p : points)
        if (p.errors >= 100) {
          if (lo == nullptr) lo = &p;
          hi = &p;
        }
      if (lo != nullptr && hi != nullptr && hi->snr_db > lo->snr_db) {
        const DiversityEstimate d = diversity_slope(*lo, *hi);
        extra_meta["meta.slope"] = fmt(d.slope);
        extra_meta["meta.slope_window_db"] = fmt(d.snr_low_db) + ".." + fmt(d.snr_high_db);
        std::printf("diversity slope %.3f over %g..%g dB\n", d.slope, d.snr_low_db, d.snr_high_db);
      } else {
        std::printf("diversity slope unavailable: need two points with >= 100 errors\n");
      }
      break;
    }
    case ExperimentKind::AwgnRef: {
      const AwgnReferenceTable t =
          awgn_reference_curve(spec.config.constellation,
                               build_spreading_matrix(spec.config.frame_length), spec.snrs_db,
                               spec.stopping, spec.seed);
      t.save_csv(spec.output_path);
      break;
    }
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  auto kv = spec.resolved();
  kv["meta.version"] = tool_version();
  kv["meta.walltime_s"] = fmt(wall);
  for (const auto& [k, v] : extra_meta) kv[k] = v;
  std::ofstream manifest(spec.output_path + ".manifest", std::ios::binary);
  if (!manifest)
    throw std::runtime_error("cannot write manifest: " + spec.output_path + ".manifest");
  for (const auto& [k, v] : kv) manifest << k << '=' << v << '\n';
}

}  // namespace ddfsim
