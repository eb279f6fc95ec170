#include "ddfsim/engine.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ddfsim {

namespace {

int ceil_log2(int n) {
  int bits = 0;
  while ((1 << bits) < n) ++bits;
  return bits;
}

double log2_term(cplx h, double n0) { return std::log2(1.0 + std::norm(h) / n0); }

}  // namespace

double effective_rate(int block_length, int mod_order, int n_relays) {
  if (block_length < 1 || n_relays < 1) throw std::invalid_argument("bad effective_rate arguments");
  const double bps = std::log2(static_cast<double>(mod_order));
  const double payload = block_length * bps;
  const double overhead = static_cast<double>(ceil_log2(n_relays));
  return bps * payload / (payload + overhead);
}

double FrameConfig::effective_rate() const {
  if (activity_model != ActivityModel::SignallingOverhead || n_relays == 0) return rate;
  const double bps = std::log2(static_cast<double>(constellation.order));
  const double payload = block_length * bps;
  const double overhead = static_cast<double>(ceil_log2(n_relays));
  return rate * payload / (payload + overhead);
}

void FrameConfig::validate() const {
  if (n_relays < 0) throw std::invalid_argument("n_relays must be >= 0");
  if (frame_length < 1 || block_length < 1)
    throw std::invalid_argument("frame and block lengths must be >= 1");
  if (frame_length % block_length != 0)
    throw std::invalid_argument("frame_length must equal num_blocks * block_length");
  if (scheme == Scheme::AlamoutiSingleRelay) {
    if (n_relays != 1)
      throw std::invalid_argument("the Alamouti scheme supports exactly one relay");
    if (block_length != 2)
      throw std::invalid_argument("the Alamouti scheme requires block_length 2");
    if (activity_model == ActivityModel::GlrtDetection)
      throw std::invalid_argument("GLRT activity detection is only supported with distributed rotations");
  }
  if (rate < 0.0) throw std::invalid_argument("rate must be nonnegative");
  if (rotation_set_size < 2 || rotation_set_size % 2 != 0)
    throw std::invalid_argument("rotation set size must be even and >= 2");
  if (criterion.kind == DecisionCriterion::Kind::SnrThreshold &&
      (criterion.target_pe <= 0.0 || criterion.target_pe >= 1.0))
    throw std::invalid_argument("target error probability must be in (0,1)");
  if (criterion.kind == DecisionCriterion::Kind::ForneyRule &&
      !(criterion.forney_log_threshold > -std::numeric_limits<double>::infinity()))
    throw std::invalid_argument("Forney threshold must be finite");
}

double accumulated_mutual_information(NodeId receiver, int through_block,
                                      const NetworkChannels& ch,
                                      const ActivationProfile& profile,
                                      const RotationSchedule& rot, const FrameConfig& cfg) {
  const ActivityState activity = profile.to_activity(cfg);
  const PowerModel pw = cfg.power();
  double mi = 0.0;
  const int slots = through_block * cfg.block_length;
  for (int t = 0; t < slots; ++t)
    mi += log2_term(equivalent_gain(receiver, t, activity, rot, ch, pw), pw.noise_variance);
  return mi;
}

ActivationProfile activation_profile_outage(const NetworkChannels& ch,
                                            const RotationSchedule& rot,
                                            const FrameConfig& cfg, double rate_eff) {
  const int N = cfg.n_relays;
  const int B = cfg.num_blocks();
  const PowerModel pw = cfg.power();
  const double threshold = cfg.frame_length * rate_eff;

  ActivationProfile profile{std::vector<int>(N, ActivationProfile::kNever)};
  std::vector<double> mi(N, 0.0);

  for (int b = 1; b <= B; ++b) {
    const ActivityState activity = profile.to_activity(cfg);  // as of the block start
    for (int r = 0; r < N; ++r) {
      if (!profile.never(r)) continue;
      for (int t = (b - 1) * cfg.block_length; t < b * cfg.block_length; ++t)
        mi[r] += log2_term(equivalent_gain(NodeId::relay(r), t, activity, rot, ch, pw),
                           pw.noise_variance);
    }
    for (int r = 0; r < N; ++r)
      if (profile.never(r) && mi[r] >= threshold) profile.activation_block[r] = b;
  }
  return profile;
}

bool criterion_met(const DecisionCriterion& criterion, const RelayDecisionState& state,
                   int block, const FrameConfig& cfg, double rate_eff,
                   double snr_threshold_db) {
  const double mi_target = cfg.frame_length * rate_eff;
  switch (criterion.kind) {
    case DecisionCriterion::Kind::Outage:
      return state.mi_through_block >= mi_target;
    case DecisionCriterion::Kind::OutageHalfFrame:
      return 2 * block * cfg.block_length >= cfg.frame_length &&
             state.mi_through_block >= mi_target;
    case DecisionCriterion::Kind::OutageDelayedOne:
      return block >= 2 && state.mi_through_prev_block >= mi_target;
    case DecisionCriterion::Kind::SnrThreshold:
      return state.effective_snr_db >= snr_threshold_db;
    case DecisionCriterion::Kind::ForneyRule:
      return state.forney_log_ratio >= criterion.forney_log_threshold;
    case DecisionCriterion::Kind::GenieExactDecoding:
      return state.decode_matches_truth;
  }
  return false;
}

TrialStreams TrialStreams::make(std::uint64_t seed, std::uint64_t trial, int n_relays) {
  TrialStreams s{Rng::derive(seed, trial, 0), Rng::derive(seed, trial, 1), {},
                 Rng::derive(seed, trial, 2)};
  s.noise_relays.reserve(n_relays);
  for (int r = 0; r < n_relays; ++r) s.noise_relays.push_back(Rng::derive(seed, trial, 16 + r));
  return s;
}

FrameSimulator::FrameSimulator(FrameConfig cfg, const AwgnReferenceTable* reference)
    : cfg_(std::move(cfg)),
      spreading_(build_spreading_matrix(cfg_.frame_length)),
      rotations_(rotation_schedule(cfg_.n_relays, cfg_.rotation_set_size, cfg_.frame_length,
                                   cfg_.rotation_rule)),
      codebook_(cfg_.constellation, spreading_),
      snr_threshold_db_(std::numeric_limits<double>::quiet_NaN()) {
  cfg_.validate();
  if (cfg_.criterion.kind == DecisionCriterion::Kind::SnrThreshold) {
    if (reference == nullptr)
      throw std::invalid_argument("SnrThreshold criterion needs an AWGN reference table");
    snr_threshold_db_ = reference->threshold_snr_db(cfg_.criterion.target_pe);
  }
}

BitVec FrameSimulator::random_info_bits(Rng& info) const {
  const int nbits = cfg_.frame_length * cfg_.constellation.bits_per_symbol;
  BitVec bits(nbits);
  for (int i = 0; i < nbits; ++i) bits[i] = static_cast<std::uint8_t>(info.next_u64() & 1);
  return bits;
}

FrameOutcome FrameSimulator::run(const NetworkChannels& ch, TrialStreams& streams,
                                 const BitVec& info_bits) const {
  const int N = cfg_.n_relays;
  const int T = cfg_.frame_length;
  const int Tb = cfg_.block_length;
  const int B = cfg_.num_blocks();
  const PowerModel pw = cfg_.power();
  const double n0 = pw.noise_variance;
  const double rate_eff = cfg_.effective_rate();
  const bool alamouti = cfg_.scheme == Scheme::AlamoutiSingleRelay;

  if (ch.n_relays() != N) throw std::invalid_argument("channel realization size mismatch");
  const int true_cand = codebook_.candidate_of(info_bits);
  const std::vector<cplx> x = [&] {
    std::vector<cplx> v(T);
    for (int t = 0; t < T; ++t) v[t] = codebook_.coded(t, true_cand);
    return v;
  }();

  std::vector<int> activation(N, ActivationProfile::kNever);
  std::vector<int> forwarded_cand(N, -1);
  std::vector<std::uint8_t> relay_correct(N, 1);

  std::vector<PrefixDecoder> relay_dec;
  relay_dec.reserve(N);
  for (int r = 0; r < N; ++r) relay_dec.emplace_back(codebook_, n0);
  std::vector<double> mi(N, 0.0), mi_prev(N, 0.0);

  std::vector<cplx> y_d(T), h_d(T);

  // Symbol a forwarding relay puts on the air in slot t.
  auto relay_tx = [&](int r, int t) -> cplx {
    const int cand = forwarded_cand[r];
    if (!alamouti) return codebook_.coded(t, cand) * rotations_.phase(r, t);
    return (t % 2 == 0) ? -std::conj(codebook_.coded(t + 1, cand))
                        : std::conj(codebook_.coded(t - 1, cand));
  };

  for (int b = 1; b <= B; ++b) {
    for (int r = 0; r < N; ++r) mi_prev[r] = mi[r];
    const ActivityState activity(N, T, Tb, activation);
    for (int t = (b - 1) * Tb; t < b * Tb; ++t) {
      const int k = activity.num_transmitters(t);
      const double amp = std::sqrt(pw.share(k));

      cplx sig = ch.g_sd * x[t];
      cplx believed = ch.g_sd;
      for (int j = 0; j < N; ++j) {
        if (!activity.relay_transmitting(j, t)) continue;
        sig += ch.g_rd[j] * relay_tx(j, t);
        believed += ch.g_rd[j] * rotations_.phase(j, t);
      }
      y_d[t] = amp * sig + streams.noise_dest.cgaussian(n0);
      h_d[t] = amp * believed;

      for (int r = 0; r < N; ++r) {
        if (activation[r] != ActivationProfile::kNever) continue;  // decoded; no longer listening
        assert(!activity.relay_transmitting(r, t));
        cplx rsig = ch.g_sr[r] * x[t];
        cplx rbelieved = ch.g_sr[r];
        for (int j = 0; j < N; ++j) {
          if (j == r || !activity.relay_transmitting(j, t)) continue;
          rsig += ch.g_rr[r][j] * relay_tx(j, t);
          rbelieved += ch.g_rr[r][j] * rotations_.phase(j, t);
        }
        const cplx y = amp * rsig + streams.noise_relays[r].cgaussian(n0);
        const cplx h = amp * rbelieved;
        relay_dec[r].add_slot(t, y, h);
        mi[r] += log2_term(h, n0);
      }
    }

    // Block-end forwarding decisions for relays still listening.
    for (int r = 0; r < N; ++r) {
      if (activation[r] != ActivationProfile::kNever) continue;
      RelayDecisionState state;
      state.mi_through_block = mi[r];
      state.mi_through_prev_block = mi_prev[r];
      // Equivalent full-frame receive SNR: the AWGN SNR at which a whole
      // frame would carry the same mutual information as the slots heard so
      // far. For a full frame at steady SNR this is the per-slot receive
      // SNR; for a partial window it discounts the missing observations,
      // which a raw per-slot average would not.
      const double rho_eq = std::pow(2.0, mi[r] / T) - 1.0;
      if (rho_eq > 0.0) state.effective_snr_db = 10.0 * std::log10(rho_eq);
      int decoded = -1;
      if (cfg_.criterion.needs_decode_each_block()) {
        decoded = relay_dec[r].best_candidate();
        state.decode_matches_truth = decoded == true_cand;
        if (cfg_.criterion.kind == DecisionCriterion::Kind::ForneyRule)
          state.forney_log_ratio = relay_dec[r].forney_log_ratio();
      }
      if (!criterion_met(cfg_.criterion, state, b, cfg_, rate_eff, snr_threshold_db_)) continue;
      if (decoded < 0) decoded = relay_dec[r].best_candidate();
      activation[r] = b;
      forwarded_cand[r] = decoded;
      relay_correct[r] = decoded == true_cand ? 1 : 0;
    }
  }

  FrameOutcome out;
  out.true_activation = ActivationProfile{activation};
  out.relay_decode_correct = relay_correct;

  if (cfg_.activity_model == ActivityModel::GlrtDetection) {
    const GlrtResult g = glrt_joint_decode(y_d, ch, rotations_, codebook_, pw, Tb);
    out.dest_bits = g.bits;
    out.detected_activation = ActivationProfile{g.activation_block};
  } else {
    out.detected_activation = out.true_activation;
    if (!alamouti) {
      ObservationWindow w;
      for (int t = 0; t < T; ++t) w.add(t, y_d[t], h_d[t]);
      out.dest_bits = ml_decode(w, codebook_, n0).bits;
    } else {
      const int act = activation[0];
      const int first_coop = (act == ActivationProfile::kNever || act >= B) ? T : act * Tb;
      const cplx h_direct = std::sqrt(pw.share(1)) * ch.g_sd;
      const cplx h1 = std::sqrt(pw.share(2)) * ch.g_sd;
      const cplx h2 = std::sqrt(pw.share(2)) * ch.g_rd[0];
      out.dest_bits = alamouti_decode(y_d, first_coop, h_direct, h1, h2, codebook_, n0).bits;
    }
  }
  out.frame_error = out.dest_bits != info_bits;
  return out;
}

FrameOutcome run_frame_signal_level(const NetworkChannels& ch, const RotationSchedule& rot,
                                    const FrameConfig& cfg, TrialStreams& streams,
                                    const BitVec& info_bits,
                                    const AwgnReferenceTable* reference) {
  if (rot.n_relays != cfg.n_relays || rot.frame_length != cfg.frame_length ||
      rot.set_size != cfg.rotation_set_size)
    throw std::invalid_argument("rotation schedule does not match configuration");
  FrameSimulator sim(cfg, reference);
  return sim.run(ch, streams, info_bits);
}

}  // namespace ddfsim
