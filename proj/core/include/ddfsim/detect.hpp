#pragma once

#include <span>
#include <vector>

#include "ddfsim/channel.hpp"
#include "ddfsim/signal.hpp"

namespace ddfsim {

/// Received samples plus the equivalent gains the receiver believes produced
/// them, aligned slot by slot. May cover any subset of a frame.
struct ObservationWindow {
  std::vector<cplx> y;
  std::vector<cplx> h;
  std::vector<int> slot_indices;

  void add(int slot, cplx sample, cplx gain) {
    slot_indices.push_back(slot);
    y.push_back(sample);
    h.push_back(gain);
  }
  std::size_t size() const { return y.size(); }
};

/// All M^T coded candidate frames for a (constellation, spreading) pair,
/// stored slot-major for the exhaustive-search inner loop.
class CandidateCodebook {
 public:
  CandidateCodebook(const Constellation& c, const SpreadingMatrix& u,
                    long max_candidates = 1L << 20);

  int frame_length() const { return u_.dim; }
  int num_candidates() const { return n_; }
  const Constellation& constellation() const { return c_; }
  const SpreadingMatrix& spreading() const { return u_; }

  cplx coded(int t, int cand) const {
    const std::size_t k = static_cast<std::size_t>(t) * n_ + cand;
    return {re_[k], im_[k]};
  }
  const double* re(int t) const { return re_.data() + static_cast<std::size_t>(t) * n_; }
  const double* im(int t) const { return im_.data() + static_cast<std::size_t>(t) * n_; }
  const double* abs2(int t) const { return abs2_.data() + static_cast<std::size_t>(t) * n_; }
  /// Single-precision copies feeding the residual-scan inner loop, which is
  /// bound by memory bandwidth rather than arithmetic.
  const float* ref(int t) const { return ref_.data() + static_cast<std::size_t>(t) * n_; }
  const float* imf(int t) const { return imf_.data() + static_cast<std::size_t>(t) * n_; }
  const float* abs2f(int t) const { return abs2f_.data() + static_cast<std::size_t>(t) * n_; }

  /// Candidate index <-> information bits; the index is the bit pattern read
  /// MSB-first, so numeric order is lexicographic bit order.
  BitVec bits_of(int cand) const;
  int candidate_of(const BitVec& bits) const;
  std::vector<cplx> info_symbols(int cand) const;

 private:
  Constellation c_;
  SpreadingMatrix u_;
  int n_;
  std::vector<double> re_, im_, abs2_;
  std::vector<float> ref_, imf_, abs2f_;
};

/// Incremental exhaustive-ML residual tracker. Observations are added one
/// slot at a time, so a relay evaluating at every block boundary pays the
/// cost of a single full-frame search overall.
class PrefixDecoder {
 public:
  explicit PrefixDecoder(const CandidateCodebook& book, double noise_variance = 1.0);

  void reset();
  void add_slot(int slot, cplx y, cplx h);
  void add_window(const ObservationWindow& w);

  int slots_added() const { return slots_; }
  int best_candidate() const;
  double residual(int cand) const { return res_[cand]; }
  std::span<const float> residuals() const { return res_; }
  /// Unnormalized log-likelihood of a candidate: -residual / N0.
  double log_likelihood(int cand) const { return -res_[cand] / n0_; }
  /// log of p(y|best) / sum over all other candidates of p(y|c).
  double forney_log_ratio() const;

  const CandidateCodebook& codebook() const { return *book_; }

 private:
  const CandidateCodebook* book_;
  double n0_;
  std::vector<float> res_;
  int slots_ = 0;
};

struct MlDecision {
  BitVec bits;
  int candidate = 0;
  double log_likelihood = 0.0;
  double residual = 0.0;
};

/// Exhaustive ML over all candidate information frames, restricted to the
/// slots the window covers. Ties break toward the smallest candidate index.
MlDecision ml_decode(const ObservationWindow& w, const CandidateCodebook& book,
                     double noise_variance = 1.0);
MlDecision ml_decode(const ObservationWindow& w, const SpreadingMatrix& u,
                     const Constellation& c, double noise_variance = 1.0);

/// Stable log( p(y|best)/sum_{c != best} p(y|c) ) from a residual table.
double forney_log_ratio(std::span<const double> residuals, double noise_variance, int best);
double forney_log_ratio(std::span<const float> residuals, double noise_variance, int best);

/// Forney reliability ratio for a window (may overflow to +inf for very
/// clean observations; use the log form for thresholding).
double forney_reliability(const ObservationWindow& w, const SpreadingMatrix& u,
                          const Constellation& c, double noise_variance = 1.0);

/// Alamouti combining: SISO statistics before `first_coop_slot`, orthogonal
/// per-pair combining afterwards, normalized so the noise variance stays N0.
/// h_direct applies to pre-activation slots; h_source/h_relay are the
/// per-antenna gains (power split included) during cooperative pairs.
ObservationWindow alamouti_combine(std::span<const cplx> y, int first_coop_slot,
                                   cplx h_direct, cplx h_source, cplx h_relay);

MlDecision alamouti_decode(std::span<const cplx> y, int first_coop_slot, cplx h_direct,
                           cplx h_source, cplx h_relay, const CandidateCodebook& book,
                           double noise_variance = 1.0);

struct GlrtResult {
  BitVec bits;
  std::vector<int> activation_block;  // per relay, ActivityState::kNever if silent
  double log_likelihood = 0.0;
  int candidate = 0;
};

/// Joint relay-activity detection and decoding: maximizes likelihood over
/// (candidate frame, activation profile) with profiles drawn from per-relay
/// activation blocks in {1..B-1, never}. Ties prefer later activation
/// (fewer transmitters), then the smaller candidate index.
GlrtResult glrt_joint_decode(std::span<const cplx> y, const NetworkChannels& ch,
                             const RotationSchedule& rot, const CandidateCodebook& book,
                             const PowerModel& pw, int block_length,
                             long max_hypotheses = 4096);

}  // namespace ddfsim
