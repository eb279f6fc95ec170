#pragma once

#include <cstdint>
#include <vector>

#include "ddfsim/engine.hpp"
#include "ddfsim/reference_table.hpp"

namespace ddfsim {

/// One Monte Carlo estimate with a 95% normal-approximation interval.
struct CurvePoint {
  double snr_db = 0.0;
  double estimate = 0.0;
  double ci_halfwidth = 0.0;
  long trials = 0;
  long errors = 0;

  static CurvePoint from_counts(double snr_db, long errors, long trials);
};

/// Stop after `target_errors` observed errors (checked at fixed batch
/// boundaries so the result does not depend on the worker count) or after
/// `max_trials`, whichever comes first. target_errors = 0 disables early
/// stopping.
struct StoppingRule {
  long max_trials = 10000;
  long target_errors = 0;
};

struct DiversityEstimate {
  double slope = 0.0;
  double snr_low_db = 0.0;
  double snr_high_db = 0.0;
  double multiplexing_gain = 0.0;  // fixed-rate runs
};

/// Worker threads for trial-level parallelism; DDFSIM_WORKERS overrides the
/// hardware default.
int worker_count();

CurvePoint outage_probability(const FrameConfig& cfg, long trials, std::uint64_t seed);
std::vector<CurvePoint> outage_curve(const FrameConfig& cfg, const std::vector<double>& snrs_db,
                                     long trials, std::uint64_t seed);

/// Frame-error trial counters beyond the error/trial totals.
struct FerStats {
  CurvePoint point;
  long relay_false_forwards = 0;  // frames where some relay forwarded a wrong frame
  long detection_errors = 0;      // frames where the detected activity differed from truth
};

FerStats fer_point(const FrameConfig& cfg, const StoppingRule& stopping, std::uint64_t seed,
                   const AwgnReferenceTable* reference = nullptr);
std::vector<CurvePoint> fer_curve(const FrameConfig& cfg, const std::vector<double>& snrs_db,
                                  const StoppingRule& stopping, std::uint64_t seed,
                                  const AwgnReferenceTable* reference = nullptr);

/// Empirical distribution of the single relay's activation block.
struct ListeningHistogram {
  int num_blocks = 0;
  long trials = 0;
  std::vector<long> block_counts;  // index b-1 holds block b
  long never_count = 0;

  double probability_block(int b) const {
    return static_cast<double>(block_counts[b - 1]) / trials;
  }
  double probability_never() const { return static_cast<double>(never_count) / trials; }
};

ListeningHistogram t1_distribution(const FrameConfig& cfg, long trials, std::uint64_t seed);

/// Empirical diversity order from two curve points; both need at least 100
/// observed errors.
DiversityEstimate diversity_slope(const CurvePoint& low_snr, const CurvePoint& high_snr);

/// FER of exhaustive ML over a unit-gain AWGN channel, per grid SNR, made
/// monotone non-increasing by isotonic regression.
AwgnReferenceTable awgn_reference_curve(const Constellation& c, const SpreadingMatrix& u,
                                        const std::vector<double>& snr_grid_db,
                                        const StoppingRule& per_point, std::uint64_t seed);

}  // namespace ddfsim
