#include "ddfsim/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ddfsim {

CandidateCodebook::CandidateCodebook(const Constellation& c, const SpreadingMatrix& u,
                                     long max_candidates)
    : c_(c), u_(u) {
  const int T = u.dim;
  long n = 1;
  for (int t = 0; t < T; ++t) {
    n *= c.order;
    if (n > max_candidates) throw std::invalid_argument("candidate space exceeds budget");
  }
  n_ = static_cast<int>(n);
  const std::size_t total = static_cast<std::size_t>(T) * n_;
  re_.resize(total);
  im_.resize(total);
  abs2_.resize(total);
  ref_.resize(total);
  imf_.resize(total);
  abs2f_.resize(total);
  std::vector<cplx> s(T);
  for (int cand = 0; cand < n_; ++cand) {
    int rem = cand;
    for (int k = T - 1; k >= 0; --k) {
      s[k] = c.points[rem % c.order];
      rem /= c.order;
    }
    for (int t = 0; t < T; ++t) {
      cplx x{0.0, 0.0};
      for (int k = 0; k < T; ++k) x += u_.at(t, k) * s[k];
      const std::size_t idx = static_cast<std::size_t>(t) * n_ + cand;
      re_[idx] = x.real();
      im_[idx] = x.imag();
      abs2_[idx] = std::norm(x);
      ref_[idx] = static_cast<float>(re_[idx]);
      imf_[idx] = static_cast<float>(im_[idx]);
      abs2f_[idx] = static_cast<float>(abs2_[idx]);
    }
  }
}

BitVec CandidateCodebook::bits_of(int cand) const {
  const int nbits = u_.dim * c_.bits_per_symbol;
  BitVec bits(nbits);
  for (int b = 0; b < nbits; ++b)
    bits[b] = static_cast<std::uint8_t>((cand >> (nbits - 1 - b)) & 1);
  return bits;
}

int CandidateCodebook::candidate_of(const BitVec& bits) const {
  const int nbits = u_.dim * c_.bits_per_symbol;
  if (static_cast<int>(bits.size()) != nbits) throw std::invalid_argument("bit count mismatch");
  int cand = 0;
  for (int b = 0; b < nbits; ++b) cand = (cand << 1) | (bits[b] & 1);
  return cand;
}

std::vector<cplx> CandidateCodebook::info_symbols(int cand) const {
  std::vector<cplx> s(u_.dim);
  int rem = cand;
  for (int k = u_.dim - 1; k >= 0; --k) {
    s[k] = c_.points[rem % c_.order];
    rem /= c_.order;
  }
  return s;
}

PrefixDecoder::PrefixDecoder(const CandidateCodebook& book, double noise_variance)
    : book_(&book), n0_(noise_variance), res_(book.num_candidates(), 0.0) {}

void PrefixDecoder::reset() {
  std::fill(res_.begin(), res_.end(), 0.0);
  slots_ = 0;
}

void PrefixDecoder::add_slot(int slot, cplx y, cplx h) {
  const int n = book_->num_candidates();
  const float* __restrict xr = book_->ref(slot);
  const float* __restrict xi = book_->imf(slot);
  const float* __restrict xa = book_->abs2f(slot);
  const cplx w = std::conj(y) * h;  // Re(w * x) = Re(conj(y) h x)
  const float wr2 = static_cast<float>(2.0 * w.real());
  const float wi2 = static_cast<float>(2.0 * w.imag());
  const float yy = static_cast<float>(std::norm(y));
  const float hh = static_cast<float>(std::norm(h));
  float* __restrict r = res_.data();
  for (int c = 0; c < n; ++c)
    r[c] += yy + hh * xa[c] - wr2 * xr[c] + wi2 * xi[c];
  ++slots_;
}

void PrefixDecoder::add_window(const ObservationWindow& w) {
  for (std::size_t i = 0; i < w.size(); ++i) add_slot(w.slot_indices[i], w.y[i], w.h[i]);
}

int PrefixDecoder::best_candidate() const {
  int best = 0;
  float best_r = res_[0];
  const int n = static_cast<int>(res_.size());
  for (int c = 1; c < n; ++c)
    if (res_[c] < best_r) {
      best_r = res_[c];
      best = c;
    }
  return best;
}

double PrefixDecoder::forney_log_ratio() const {
  return ddfsim::forney_log_ratio(res_, n0_, best_candidate());
}

namespace {
template <typename Real>
double forney_log_ratio_impl(std::span<const Real> residuals, double noise_variance, int best) {
  // log-sum-exp over the non-best candidates, shifted by the max exponent.
  const double lbest = -static_cast<double>(residuals[best]) / noise_variance;
  double lmax = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < residuals.size(); ++c) {
    if (static_cast<int>(c) == best) continue;
    lmax = std::max(lmax, -static_cast<double>(residuals[c]) / noise_variance);
  }
  if (!std::isfinite(lmax)) return std::numeric_limits<double>::infinity();
  // Terms more than ~60 nats below the max are lost to double rounding
  // anyway; skipping them avoids almost all exp() calls.
  constexpr double kCutoff = 60.0;
  double acc = 0.0;
  for (std::size_t c = 0; c < residuals.size(); ++c) {
    if (static_cast<int>(c) == best) continue;
    const double e = -static_cast<double>(residuals[c]) / noise_variance - lmax;
    if (e > -kCutoff) acc += std::exp(e);
  }
  return lbest - (lmax + std::log(acc));
}
}  // namespace

double forney_log_ratio(std::span<const double> residuals, double noise_variance, int best) {
  return forney_log_ratio_impl(residuals, noise_variance, best);
}

double forney_log_ratio(std::span<const float> residuals, double noise_variance, int best) {
  return forney_log_ratio_impl(residuals, noise_variance, best);
}

MlDecision ml_decode(const ObservationWindow& w, const CandidateCodebook& book,
                     double noise_variance) {
  PrefixDecoder dec(book, noise_variance);
  dec.add_window(w);
  MlDecision d;
  d.candidate = dec.best_candidate();
  d.bits = book.bits_of(d.candidate);
  d.residual = dec.residual(d.candidate);
  d.log_likelihood = dec.log_likelihood(d.candidate);
  return d;
}

MlDecision ml_decode(const ObservationWindow& w, const SpreadingMatrix& u,
                     const Constellation& c, double noise_variance) {
  return ml_decode(w, CandidateCodebook(c, u), noise_variance);
}

double forney_reliability(const ObservationWindow& w, const SpreadingMatrix& u,
                          const Constellation& c, double noise_variance) {
  CandidateCodebook book(c, u);
  PrefixDecoder dec(book, noise_variance);
  dec.add_window(w);
  return std::exp(dec.forney_log_ratio());
}

ObservationWindow alamouti_combine(std::span<const cplx> y, int first_coop_slot,
                                   cplx h_direct, cplx h_source, cplx h_relay) {
  const int T = static_cast<int>(y.size());
  if (T % 2 != 0) throw std::invalid_argument("frame length must be even for Alamouti");
  if (first_coop_slot % 2 != 0) throw std::invalid_argument("cooperative phase must start on a pair boundary");
  ObservationWindow w;
  for (int t = 0; t < std::min(first_coop_slot, T); ++t) w.add(t, y[t], h_direct);
  const double gain2 = std::norm(h_source) + std::norm(h_relay);
  const double heff = std::sqrt(gain2);
  const double inv = gain2 > 0.0 ? 1.0 / heff : 0.0;
  for (int t = first_coop_slot; t < T; t += 2) {
    const cplx y1 = y[t], y2 = y[t + 1];
    const cplx z1 = std::conj(h_source) * y1 + h_relay * std::conj(y2);
    const cplx z2 = std::conj(h_source) * y2 - h_relay * std::conj(y1);
    w.add(t, inv * z1, cplx{heff, 0.0});
    w.add(t + 1, inv * z2, cplx{heff, 0.0});
  }
  return w;
}

MlDecision alamouti_decode(std::span<const cplx> y, int first_coop_slot, cplx h_direct,
                           cplx h_source, cplx h_relay, const CandidateCodebook& book,
                           double noise_variance) {
  const ObservationWindow w = alamouti_combine(y, first_coop_slot, h_direct, h_source, h_relay);
  return ml_decode(w, book, noise_variance);
}

GlrtResult glrt_joint_decode(std::span<const cplx> y, const NetworkChannels& ch,
                             const RotationSchedule& rot, const CandidateCodebook& book,
                             const PowerModel& pw, int block_length, long max_hypotheses) {
  const int T = book.frame_length();
  if (static_cast<int>(y.size()) != T) throw std::invalid_argument("frame length mismatch");
  const int N = ch.n_relays();
  const int B = T / block_length;

  // Per-relay options in tie-break preference order: silent first, then
  // later activation before earlier (fewer transmitters preferred on ties).
  std::vector<int> options;
  options.push_back(ActivityState::kNever);
  for (int b = B - 1; b >= 1; --b) options.push_back(b);

  long n_hyp = 1;
  for (int r = 0; r < N; ++r) {
    n_hyp *= static_cast<long>(options.size());
    if (n_hyp > max_hypotheses) throw std::invalid_argument("GLRT hypothesis space exceeds budget");
  }

  GlrtResult best;
  best.log_likelihood = -std::numeric_limits<double>::infinity();
  std::vector<int> profile(N, ActivityState::kNever);

  for (long hyp = 0; hyp < n_hyp; ++hyp) {
    long rem = hyp;
    for (int r = N - 1; r >= 0; --r) {
      profile[r] = options[rem % options.size()];
      rem /= options.size();
    }
    const ActivityState activity(N, T, block_length, profile);
    ObservationWindow w;
    for (int t = 0; t < T; ++t)
      w.add(t, y[t], equivalent_gain(NodeId::destination(), t, activity, rot, ch, pw));
    const MlDecision d = ml_decode(w, book, pw.noise_variance);
    if (d.log_likelihood > best.log_likelihood) {
      best.log_likelihood = d.log_likelihood;
      best.bits = d.bits;
      best.candidate = d.candidate;
      best.activation_block = profile;
    }
  }
  return best;
}

}  // namespace ddfsim
