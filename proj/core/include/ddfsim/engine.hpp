#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ddfsim/channel.hpp"
#include "ddfsim/detect.hpp"
#include "ddfsim/reference_table.hpp"
#include "ddfsim/rng.hpp"
#include "ddfsim/signal.hpp"

namespace ddfsim {

enum class Scheme { DistributedRotation, AlamoutiSingleRelay };
enum class ActivityModel { GenieActivity, SignallingOverhead, GlrtDetection };

/// Forwarding decision rule evaluated by a listening relay at block ends.
struct DecisionCriterion {
  enum class Kind {
    Outage,
    OutageHalfFrame,
    OutageDelayedOne,
    SnrThreshold,
    ForneyRule,
    GenieExactDecoding,
  };

  Kind kind = Kind::Outage;
  /// Target relay error probability for SnrThreshold.
  double target_pe = 1e-2;
  /// Log reliability-ratio threshold for ForneyRule. The default demands
  /// posterior odds of 999:1 for the detected codeword, which bounds the
  /// false-forward probability near 1e-3.
  double forney_log_threshold = 6.906754778648554;  // log(999)

  bool needs_decode_each_block() const {
    return kind == Kind::ForneyRule || kind == Kind::GenieExactDecoding;
  }
};

struct FrameConfig {
  int n_relays = 1;
  int frame_length = 6;   // T
  int block_length = 1;   // T_b
  Constellation constellation = Constellation::qpsk();
  double rate = 2.0;      // bits per channel use carried by the frame
  double snr_db = 10.0;
  Scheme scheme = Scheme::DistributedRotation;
  DecisionCriterion criterion{};
  ActivityModel activity_model = ActivityModel::GenieActivity;
  int rotation_set_size = 4;
  RotationSchedule::Rule rotation_rule = RotationSchedule::Rule::ProductMod;

  int num_blocks() const { return frame_length / block_length; }
  PowerModel power() const { return PowerModel::from_snr_db(snr_db); }
  /// Rate after relay-signalling overhead; equals `rate` for the other
  /// activity models.
  double effective_rate() const;
  void validate() const;
};

/// Per-relay block index at whose end the relay decoded, or kNever.
/// A relay forwards only in blocks strictly after its activation block.
struct ActivationProfile {
  static constexpr int kNever = ActivityState::kNever;
  std::vector<int> activation_block;

  bool never(int relay) const { return activation_block[relay] == kNever; }
  ActivityState to_activity(const FrameConfig& cfg) const {
    return ActivityState(static_cast<int>(activation_block.size()), cfg.frame_length,
                         cfg.block_length, activation_block);
  }
  bool operator==(const ActivationProfile&) const = default;
};

struct FrameOutcome {
  BitVec dest_bits;
  bool frame_error = false;
  /// Whether the frame a relay forwarded matched the transmitted frame;
  /// true for relays that never forwarded.
  std::vector<std::uint8_t> relay_decode_correct;
  ActivationProfile true_activation;
  ActivationProfile detected_activation;
};

/// Relay-signalling effective rate in bits per channel use:
/// log2(M) * T_b*log2(M) / (T_b*log2(M) + ceil(log2(N))).
double effective_rate(int block_length, int mod_order, int n_relays);

/// Sum over the slots of blocks 1..through_block of log2(1 + |h_eq|^2/N0)
/// at the given receiver, with the transmitter count induced by `profile`.
double accumulated_mutual_information(NodeId receiver, int through_block,
                                      const NetworkChannels& ch,
                                      const ActivationProfile& profile,
                                      const RotationSchedule& rot, const FrameConfig& cfg);

/// Information-theoretic activation: block by block, every still-listening
/// relay whose accumulated mutual information reaches T*rate_eff activates
/// at that boundary (several may activate together).
ActivationProfile activation_profile_outage(const NetworkChannels& ch,
                                            const RotationSchedule& rot,
                                            const FrameConfig& cfg, double rate_eff);

/// Snapshot of everything a forwarding criterion may look at.
struct RelayDecisionState {
  double mi_through_block = 0.0;
  double mi_through_prev_block = 0.0;
  double effective_snr_db = -300.0;  // MI-equivalent full-frame receive SNR
  bool decode_matches_truth = false;
  double forney_log_ratio = 0.0;
};

/// Ties at exact equality count as met.
bool criterion_met(const DecisionCriterion& criterion, const RelayDecisionState& state,
                   int block, const FrameConfig& cfg, double rate_eff,
                   double snr_threshold_db);

/// Independent random streams for one Monte Carlo trial.
struct TrialStreams {
  Rng channel;
  Rng noise_dest;
  std::vector<Rng> noise_relays;
  Rng info;

  static TrialStreams make(std::uint64_t seed, std::uint64_t trial, int n_relays);
};

/// One configured frame-level simulation. Construction precomputes the
/// spreading matrix, rotation schedule and candidate codebook; `run` is a
/// pure function of (channels, streams, info bits) and is safe to call from
/// concurrent workers.
class FrameSimulator {
 public:
  explicit FrameSimulator(FrameConfig cfg, const AwgnReferenceTable* reference = nullptr);

  const FrameConfig& config() const { return cfg_; }
  const SpreadingMatrix& spreading() const { return spreading_; }
  const RotationSchedule& rotations() const { return rotations_; }
  const CandidateCodebook& codebook() const { return codebook_; }
  /// Resolved SNR threshold (dB) when the criterion is SnrThreshold.
  double snr_threshold_db() const { return snr_threshold_db_; }

  BitVec random_info_bits(Rng& info) const;
  FrameOutcome run(const NetworkChannels& ch, TrialStreams& streams,
                   const BitVec& info_bits) const;

 private:
  FrameConfig cfg_;
  SpreadingMatrix spreading_;
  RotationSchedule rotations_;
  CandidateCodebook codebook_;
  double snr_threshold_db_;
};

/// Convenience wrapper; rebuilds the codebook on every call, so use
/// FrameSimulator directly inside Monte Carlo loops.
FrameOutcome run_frame_signal_level(const NetworkChannels& ch, const RotationSchedule& rot,
                                    const FrameConfig& cfg, TrialStreams& streams,
                                    const BitVec& info_bits,
                                    const AwgnReferenceTable* reference = nullptr);

}  // namespace ddfsim
