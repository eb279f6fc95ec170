#include "ddfsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace ddfsim {

namespace {

constexpr long kBatchSize = 1000;

// Runs per_trial(trial, acc) for trials [0, stopping.max_trials) in fixed
// batches, splitting each batch over workers. Accumulators must merge by
// integer addition so the result is independent of the split.
template <typename Acc, typename PerTrial, typename ErrorsOf>
Acc run_trials(const StoppingRule& stopping, PerTrial per_trial, ErrorsOf errors_of) {
  Acc total{};
  long done = 0;
  const int workers = worker_count();
  while (done < stopping.max_trials) {
    const long n = std::min(kBatchSize, stopping.max_trials - done);
    if (workers <= 1 || n < 2 * workers) {
      for (long i = 0; i < n; ++i) per_trial(done + i, total);
    } else {
      std::vector<Acc> partial(workers);
      std::vector<std::thread> pool;
      const long chunk = (n + workers - 1) / workers;
      for (int w = 0; w < workers; ++w) {
        const long lo = done + w * chunk;
        const long hi = std::min(done + n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, w, lo, hi] {
          for (long i = lo; i < hi; ++i) per_trial(i, partial[w]);
        });
      }
      for (auto& th : pool) th.join();
      for (int w = 0; w < workers; ++w) total.merge(partial[w]);
    }
    done += n;
    if (stopping.target_errors > 0 && errors_of(total) >= stopping.target_errors) break;
  }
  total.trials = done;
  return total;
}

struct ErrorCounts {
  long trials = 0;
  long errors = 0;
  void merge(const ErrorCounts& o) { errors += o.errors; }
};

struct FerCounts {
  long trials = 0;
  long errors = 0;
  long relay_false = 0;
  long det_errors = 0;
  void merge(const FerCounts& o) {
    errors += o.errors;
    relay_false += o.relay_false;
    det_errors += o.det_errors;
  }
};

// Activation at the final block is observationally identical to never
// forwarding; normalize before comparing detected vs true activity.
int observable_activation(int block, int num_blocks) {
  return block >= num_blocks ? ActivationProfile::kNever : block;
}

}  // namespace

CurvePoint CurvePoint::from_counts(double snr_db, long errors, long trials) {
  if (trials <= 0) throw std::invalid_argument("trial count must be positive");
  CurvePoint p;
  p.snr_db = snr_db;
  p.trials = trials;
  p.errors = errors;
  p.estimate = static_cast<double>(errors) / trials;
  p.ci_halfwidth = 1.96 * std::sqrt(p.estimate * (1.0 - p.estimate) / trials);
  return p;
}

int worker_count() {
  if (const char* env = std::getenv("DDFSIM_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

CurvePoint outage_probability(const FrameConfig& cfg, long trials, std::uint64_t seed) {
  cfg.validate();
  const RotationSchedule rot =
      rotation_schedule(cfg.n_relays, cfg.rotation_set_size, cfg.frame_length, cfg.rotation_rule);
  const double rate_eff = cfg.effective_rate();
  const double threshold = cfg.frame_length * rate_eff;
  StoppingRule stopping{trials, 0};
  auto acc = run_trials<ErrorCounts>(
      stopping,
      [&](long trial, ErrorCounts& c) {
        TrialStreams streams = TrialStreams::make(seed, trial, cfg.n_relays);
        const NetworkChannels ch = sample_network_channels(cfg.n_relays, streams.channel);
        const ActivationProfile profile = activation_profile_outage(ch, rot, cfg, rate_eff);
        const double mi = accumulated_mutual_information(NodeId::destination(), cfg.num_blocks(),
                                                         ch, profile, rot, cfg);
        if (mi < threshold) ++c.errors;
      },
      [](const ErrorCounts& c) { return c.errors; });
  return CurvePoint::from_counts(cfg.snr_db, acc.errors, acc.trials);
}

std::vector<CurvePoint> outage_curve(const FrameConfig& cfg, const std::vector<double>& snrs_db,
                                     long trials, std::uint64_t seed) {
  std::vector<CurvePoint> out;
  out.reserve(snrs_db.size());
  for (double snr : snrs_db) {
    FrameConfig c = cfg;
    c.snr_db = snr;
    out.push_back(outage_probability(c, trials, seed));
  }
  return out;
}

FerStats fer_point(const FrameConfig& cfg, const StoppingRule& stopping, std::uint64_t seed,
                   const AwgnReferenceTable* reference) {
  const FrameSimulator sim(cfg, reference);
  const int B = cfg.num_blocks();
  auto acc = run_trials<FerCounts>(
      stopping,
      [&](long trial, FerCounts& c) {
        TrialStreams streams = TrialStreams::make(seed, trial, cfg.n_relays);
        const NetworkChannels ch = sample_network_channels(cfg.n_relays, streams.channel);
        const BitVec bits = sim.random_info_bits(streams.info);
        const FrameOutcome out = sim.run(ch, streams, bits);
        if (out.frame_error) ++c.errors;
        for (int r = 0; r < cfg.n_relays; ++r) {
          const int act = out.true_activation.activation_block[r];
          if (act != ActivationProfile::kNever && act < B && !out.relay_decode_correct[r]) {
            ++c.relay_false;
            break;
          }
        }
        for (int r = 0; r < cfg.n_relays; ++r) {
          if (observable_activation(out.true_activation.activation_block[r], B) !=
              observable_activation(out.detected_activation.activation_block[r], B)) {
            ++c.det_errors;
            break;
          }
        }
      },
      [](const FerCounts& c) { return c.errors; });
  FerStats stats;
  stats.point = CurvePoint::from_counts(cfg.snr_db, acc.errors, acc.trials);
  stats.relay_false_forwards = acc.relay_false;
  stats.detection_errors = acc.det_errors;
  return stats;
}

std::vector<CurvePoint> fer_curve(const FrameConfig& cfg, const std::vector<double>& snrs_db,
                                  const StoppingRule& stopping, std::uint64_t seed,
                                  const AwgnReferenceTable* reference) {
  std::vector<CurvePoint> out;
  out.reserve(snrs_db.size());
  for (double snr : snrs_db) {
    FrameConfig c = cfg;
    c.snr_db = snr;
    out.push_back(fer_point(c, stopping, seed, reference).point);
  }
  return out;
}

ListeningHistogram t1_distribution(const FrameConfig& cfg, long trials, std::uint64_t seed) {
  cfg.validate();
  if (cfg.n_relays != 1) throw std::invalid_argument("listening-time distribution needs N=1");
  const RotationSchedule rot =
      rotation_schedule(cfg.n_relays, cfg.rotation_set_size, cfg.frame_length, cfg.rotation_rule);
  const double rate_eff = cfg.effective_rate();
  const int B = cfg.num_blocks();

  struct HistCounts {
    long trials = 0;
    std::vector<long> blocks;
    long never = 0;
    void merge(const HistCounts& o) {
      if (blocks.empty()) blocks.assign(o.blocks.size(), 0);
      for (std::size_t i = 0; i < o.blocks.size(); ++i) blocks[i] += o.blocks[i];
      never += o.never;
    }
  };
  StoppingRule stopping{trials, 0};
  auto acc = run_trials<HistCounts>(
      stopping,
      [&](long trial, HistCounts& c) {
        if (c.blocks.empty()) c.blocks.assign(B, 0);
        TrialStreams streams = TrialStreams::make(seed, trial, cfg.n_relays);
        const NetworkChannels ch = sample_network_channels(cfg.n_relays, streams.channel);
        const ActivationProfile profile = activation_profile_outage(ch, rot, cfg, rate_eff);
        const int act = profile.activation_block[0];
        if (act == ActivationProfile::kNever)
          ++c.never;
        else
          ++c.blocks[act - 1];
      },
      [](const HistCounts&) { return 0L; });

  ListeningHistogram h;
  h.num_blocks = B;
  h.trials = acc.trials;
  h.block_counts = acc.blocks.empty() ? std::vector<long>(B, 0) : acc.blocks;
  h.never_count = acc.never;
  return h;
}

DiversityEstimate diversity_slope(const CurvePoint& low_snr, const CurvePoint& high_snr) {
  if (low_snr.errors < 100 || high_snr.errors < 100)
    throw std::invalid_argument("diversity slope needs at least 100 errors per point");
  if (!(high_snr.snr_db > low_snr.snr_db))
    throw std::invalid_argument("points must be ordered by SNR");
  DiversityEstimate d;
  d.snr_low_db = low_snr.snr_db;
  d.snr_high_db = high_snr.snr_db;
  d.slope = -(std::log10(high_snr.estimate) - std::log10(low_snr.estimate)) /
            ((high_snr.snr_db - low_snr.snr_db) / 10.0);
  return d;
}

AwgnReferenceTable awgn_reference_curve(const Constellation& c, const SpreadingMatrix& u,
                                        const std::vector<double>& snr_grid_db,
                                        const StoppingRule& per_point, std::uint64_t seed) {
  const CandidateCodebook book(c, u);
  const int T = u.dim;
  AwgnReferenceTable table;
  for (double snr : snr_grid_db) {
    const PowerModel pw = PowerModel::from_snr_db(snr);
    const double amp = std::sqrt(pw.total_power);
    auto acc = run_trials<ErrorCounts>(
        per_point,
        [&](long trial, ErrorCounts& cnt) {
          TrialStreams streams = TrialStreams::make(seed, trial, 0);
          BitVec bits(static_cast<std::size_t>(T) * c.bits_per_symbol);
          for (auto& b : bits) b = static_cast<std::uint8_t>(streams.info.next_u64() & 1);
          const int cand = book.candidate_of(bits);
          PrefixDecoder dec(book, pw.noise_variance);
          for (int t = 0; t < T; ++t) {
            const cplx y = amp * book.coded(t, cand) + streams.noise_dest.cgaussian(pw.noise_variance);
            dec.add_slot(t, y, cplx{amp, 0.0});
          }
          if (dec.best_candidate() != cand) ++cnt.errors;
        },
        [](const ErrorCounts& cnt) { return cnt.errors; });
    table.rows.push_back({snr, static_cast<double>(acc.errors) / acc.trials, acc.trials});
  }
  std::sort(table.rows.begin(), table.rows.end(),
            [](const auto& a, const auto& b) { return a.snr_db < b.snr_db; });
  enforce_non_increasing(table.rows);
  return table;
}

}  // namespace ddfsim
