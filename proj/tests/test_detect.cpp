#include <doctest.h>

#include <cmath>
#include <vector>

#include "ddfsim/channel.hpp"
#include "ddfsim/detect.hpp"
#include "ddfsim/rng.hpp"
#include "ddfsim/signal.hpp"

using namespace ddfsim;

namespace {

// Independent brute-force ML: enumerate candidates through map_bits/apply in
// descending index order (the opposite of the library's loop) and track the
// minimum with <= so the smallest index still wins ties.
int brute_force_ml(const ObservationWindow& w, const SpreadingMatrix& u,
                   const Constellation& c) {
  const int T = u.dim;
  const int nbits = T * c.bits_per_symbol;
  const int n = 1 << nbits;
  int best = -1;
  double best_r = 1e300;
  for (int cand = n - 1; cand >= 0; --cand) {
    BitVec bits(nbits);
    for (int b = 0; b < nbits; ++b)
      bits[b] = static_cast<std::uint8_t>((cand >> (nbits - 1 - b)) & 1);
    const std::vector<cplx> x = u.apply(map_bits(bits, c));
    double r = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
      r += std::norm(w.y[i] - w.h[i] * x[w.slot_indices[i]]);
    if (r <= best_r) {
      best_r = r;
      best = cand;
    }
  }
  return best;
}

ObservationWindow noiseless_window(const CandidateCodebook& book, int cand,
                                   const std::vector<cplx>& gains) {
  ObservationWindow w;
  for (int t = 0; t < book.frame_length(); ++t)
    w.add(t, gains[t] * book.coded(t, cand), gains[t]);
  return w;
}

}  // namespace

TEST_CASE("codebook indexes candidates by their bit pattern") {
  const Constellation c = Constellation::qpsk();
  const CandidateCodebook book(c, build_spreading_matrix(3));
  CHECK(book.num_candidates() == 64);
  for (int cand : {0, 1, 17, 63}) {
    CHECK(book.candidate_of(book.bits_of(cand)) == cand);
  }
  // Coded symbols agree with an explicit map-then-spread evaluation.
  const SpreadingMatrix u = build_spreading_matrix(3);
  const BitVec bits = book.bits_of(41);
  const std::vector<cplx> x = u.apply(map_bits(bits, c));
  for (int t = 0; t < 3; ++t) CHECK(std::abs(book.coded(t, 41) - x[t]) < 1e-12);
}

TEST_CASE("codebook rejects candidate spaces beyond the budget") {
  const Constellation c = Constellation::make(16);
  CHECK_THROWS(CandidateCodebook(c, build_spreading_matrix(6)));  // 16^6 > 2^20
}

TEST_CASE("noiseless full-window ML decoding is exact") {
  const Constellation c = Constellation::qpsk();
  const SpreadingMatrix u = build_spreading_matrix(6);
  const CandidateCodebook book(c, u);
  Rng rng(2);
  for (int rep = 0; rep < 20; ++rep) {
    const int cand = static_cast<int>(rng.next_u64() % book.num_candidates());
    std::vector<cplx> gains(6);
    for (auto& g : gains) g = rng.cgaussian(1.0);
    const MlDecision d = ml_decode(noiseless_window(book, cand, gains), book);
    CHECK(d.candidate == cand);
    CHECK(d.bits == book.bits_of(cand));
    // The residual accumulates in single precision, so "zero" means small
    // against the O(1) per-slot energies, not 1e-16-small.
    CHECK(d.residual < 1e-5);
  }
}

TEST_CASE("all-zero gains decode to candidate 0 by tie-break") {
  const Constellation c = Constellation::qpsk();
  const CandidateCodebook book(c, build_spreading_matrix(4));
  ObservationWindow w;
  for (int t = 0; t < 4; ++t) w.add(t, cplx{0.3, -0.2}, cplx{0.0, 0.0});
  CHECK(ml_decode(w, book).candidate == 0);
}

TEST_CASE("ML decisions match an order-independent brute-force oracle") {
  const Constellation c = Constellation::qpsk();
  const SpreadingMatrix u = build_spreading_matrix(2);
  const CandidateCodebook book(c, u);
  Rng rng(13);
  for (int rep = 0; rep < 200; ++rep) {
    ObservationWindow w;
    const int truth = static_cast<int>(rng.next_u64() % 16);
    for (int t = 0; t < 2; ++t) {
      const cplx h = rng.cgaussian(1.0);
      const cplx y = 2.0 * h * book.coded(t, truth) + rng.cgaussian(1.0);
      w.add(t, y, 2.0 * h);
    }
    CHECK(ml_decode(w, book).candidate == brute_force_ml(w, u, c));
  }
}

TEST_CASE("returned residual never exceeds the residual of the truth") {
  const Constellation c = Constellation::qpsk();
  const CandidateCodebook book(c, build_spreading_matrix(6));
  Rng rng(19);
  for (int rep = 0; rep < 50; ++rep) {
    const int truth = static_cast<int>(rng.next_u64() % book.num_candidates());
    ObservationWindow w;
    for (int t = 0; t < 6; ++t) {
      const cplx h = rng.cgaussian(1.0);
      w.add(t, h * book.coded(t, truth) + rng.cgaussian(1.0), h);
    }
    PrefixDecoder dec(book);
    dec.add_window(w);
    const int best = dec.best_candidate();
    CHECK(dec.residual(best) <= dec.residual(truth) + 1e-6);
  }
}

TEST_CASE("prefix decoder matches a one-shot decode of the same window") {
  const Constellation c = Constellation::qpsk();
  const CandidateCodebook book(c, build_spreading_matrix(6));
  Rng rng(23);
  ObservationWindow w;
  for (int t = 0; t < 4; ++t) {  // partial window
    const cplx h = rng.cgaussian(1.0);
    w.add(t, h * book.coded(t, 99) + rng.cgaussian(0.25), h);
  }
  PrefixDecoder inc(book);
  for (std::size_t i = 0; i < w.size(); ++i) inc.add_slot(w.slot_indices[i], w.y[i], w.h[i]);
  CHECK(inc.best_candidate() == ml_decode(w, book).candidate);
  CHECK(inc.slots_added() == 4);
}

TEST_CASE("Forney log ratio: noiseless observations are extremely reliable") {
  const Constellation c = Constellation::qpsk();
  const SpreadingMatrix u = build_spreading_matrix(6);
  const CandidateCodebook book(c, u);
  const double p = std::pow(10.0, 3.0);  // 30 dB
  std::vector<cplx> gains(6, cplx{std::sqrt(p), 0.0});
  const ObservationWindow w = noiseless_window(book, 7, gains);
  PrefixDecoder dec(book, 1.0);
  dec.add_window(w);
  CHECK(dec.best_candidate() == 7);
  CHECK(dec.forney_log_ratio() > 1000.0);
}

TEST_CASE("Forney ratio under non-informative observations is 1/(M^T - 1)") {
  const Constellation c = Constellation::qpsk();
  const CandidateCodebook book(c, build_spreading_matrix(4));  // 256 candidates
  ObservationWindow w;
  for (int t = 0; t < 4; ++t) w.add(t, cplx{0.7, 0.1}, cplx{0.0, 0.0});
  PrefixDecoder dec(book, 1.0);
  dec.add_window(w);
  CHECK(std::abs(dec.forney_log_ratio() + std::log(255.0)) < 1e-9);
  CHECK(std::abs(forney_reliability(w, build_spreading_matrix(4), c) - 1.0 / 255.0) < 1e-12);
}

TEST_CASE("Forney ratio is invariant to a common likelihood scaling") {
  Rng rng(29);
  std::vector<double> res(64);
  for (auto& r : res) r = rng.uniform() * 10.0;
  int best = 0;
  for (int i = 1; i < 64; ++i)
    if (res[i] < res[best]) best = i;
  const double base = forney_log_ratio(std::span<const double>(res), 1.0, best);
  // Scaling every likelihood by exp(-c/n0) shifts every residual by c.
  std::vector<double> shifted = res;
  for (auto& r : shifted) r += 3.25;
  const double moved = forney_log_ratio(std::span<const double>(shifted), 1.0, best);
  CHECK(std::abs(base - moved) < 1e-9);
}

TEST_CASE("Alamouti combining: silent relay equals plain SISO decoding") {
  const Constellation c = Constellation::qpsk();
  const CandidateCodebook book(c, build_spreading_matrix(6));
  Rng rng(37);
  std::vector<cplx> y(6);
  const cplx h_direct = rng.cgaussian(1.0);
  for (int t = 0; t < 6; ++t) y[t] = h_direct * book.coded(t, 123) + rng.cgaussian(0.5);
  const MlDecision a = alamouti_decode(y, 6, h_direct, cplx{}, cplx{}, book);
  ObservationWindow w;
  for (int t = 0; t < 6; ++t) w.add(t, y[t], h_direct);
  CHECK(a.candidate == ml_decode(w, book).candidate);
}

TEST_CASE("Alamouti combining: noiseless cooperative frame decodes exactly") {
  const Constellation c = Constellation::qpsk();
  const CandidateCodebook book(c, build_spreading_matrix(6));
  Rng rng(43);
  for (int rep = 0; rep < 10; ++rep) {
    const int cand = static_cast<int>(rng.next_u64() % book.num_candidates());
    const cplx hd = rng.cgaussian(1.0);
    const cplx h1 = rng.cgaussian(1.0), h2 = rng.cgaussian(1.0);
    const int first_coop = 2;
    std::vector<cplx> y(6);
    for (int t = 0; t < first_coop; ++t) y[t] = hd * book.coded(t, cand);
    for (int t = first_coop; t < 6; t += 2) {
      const cplx x1 = book.coded(t, cand), x2 = book.coded(t + 1, cand);
      const auto [r1, r2] = alamouti_relay_pair(x1, x2);
      y[t] = h1 * x1 + h2 * r1;
      y[t + 1] = h1 * x2 + h2 * r2;
    }
    const MlDecision d = alamouti_decode(y, first_coop, hd, h1, h2, book);
    CHECK(d.candidate == cand);

    // Combined statistics carry the full two-antenna gain with unit noise
    // figure: |h_eff|^2 = |h1|^2 + |h2|^2 on cooperative slots.
    const ObservationWindow w = alamouti_combine(y, first_coop, hd, h1, h2);
    const double gain2 = std::norm(h1) + std::norm(h2);
    for (std::size_t i = first_coop; i < w.size(); ++i) {
      CHECK(std::abs(std::norm(w.h[i]) - gain2) < 1e-10);
      CHECK(std::abs(w.y[i] - w.h[i] * book.coded(w.slot_indices[i], cand)) < 1e-9);
    }
  }
}

TEST_CASE("Alamouti combining rejects odd geometry") {
  std::vector<cplx> y(6);
  CHECK_THROWS(alamouti_combine(y, 3, cplx{1, 0}, cplx{1, 0}, cplx{1, 0}));
  std::vector<cplx> odd(5);
  CHECK_THROWS(alamouti_combine(odd, 2, cplx{1, 0}, cplx{1, 0}, cplx{1, 0}));
}

TEST_CASE("GLRT recovers the true profile from a noiseless frame") {
  const Constellation c = Constellation::qpsk();
  const SpreadingMatrix u = build_spreading_matrix(6);
  const CandidateCodebook book(c, u);
  const RotationSchedule rot = rotation_schedule(1, 4, 6);
  const PowerModel pw = PowerModel::from_snr_db(10.0);
  Rng rng(47);
  NetworkChannels ch = sample_network_channels(1, rng);
  const int Tb = 2, cand = 1234;
  for (int act : {1, 2, ActivityState::kNever}) {
    const ActivityState truth(1, 6, Tb, {act});
    std::vector<cplx> y(6);
    for (int t = 0; t < 6; ++t)
      y[t] = equivalent_gain(NodeId::destination(), t, truth, rot, ch, pw) * book.coded(t, cand);
    const GlrtResult g = glrt_joint_decode(y, ch, rot, book, pw, Tb);
    CHECK(g.candidate == cand);
    CHECK(g.activation_block[0] == act);
  }
}

TEST_CASE("GLRT prefers the silent hypothesis when profiles are indistinguishable") {
  const Constellation c = Constellation::qpsk();
  const CandidateCodebook book(c, build_spreading_matrix(6));
  const RotationSchedule rot = rotation_schedule(1, 4, 6);
  const PowerModel pw = PowerModel::from_snr_db(10.0);
  Rng rng(53);
  NetworkChannels ch = sample_network_channels(1, rng);
  ch.g_rd[0] = cplx{0.0, 0.0};  // relay invisible at the destination
  // Power still re-splits when the relay is believed active, so hypotheses
  // are not exactly identical; build the frame from the silent truth.
  const ActivityState silent(1, 6, 2, {ActivityState::kNever});
  std::vector<cplx> y(6);
  for (int t = 0; t < 6; ++t)
    y[t] = equivalent_gain(NodeId::destination(), t, silent, rot, ch, pw) * book.coded(t, 77);
  const GlrtResult g = glrt_joint_decode(y, ch, rot, book, pw, 2);
  CHECK(g.candidate == 77);
  CHECK(g.activation_block[0] == ActivityState::kNever);
}

TEST_CASE("GLRT likelihood dominates the truth hypothesis") {
  const Constellation c = Constellation::qpsk();
  const CandidateCodebook book(c, build_spreading_matrix(6));
  const RotationSchedule rot = rotation_schedule(1, 4, 6);
  const PowerModel pw = PowerModel::from_snr_db(15.0);
  Rng rng(59);
  for (int rep = 0; rep < 10; ++rep) {
    const NetworkChannels ch = sample_network_channels(1, rng);
    const int cand = static_cast<int>(rng.next_u64() % book.num_candidates());
    const ActivityState truth(1, 6, 2, {1});
    std::vector<cplx> y(6);
    ObservationWindow w;
    for (int t = 0; t < 6; ++t) {
      const cplx h = equivalent_gain(NodeId::destination(), t, truth, rot, ch, pw);
      y[t] = h * book.coded(t, cand) + rng.cgaussian(pw.noise_variance);
      w.add(t, y[t], h);
    }
    const GlrtResult g = glrt_joint_decode(y, ch, rot, book, pw, 2);
    PrefixDecoder dec(book, pw.noise_variance);
    dec.add_window(w);
    CHECK(g.log_likelihood >= dec.log_likelihood(cand) - 1e-6);
  }
}

TEST_CASE("GLRT rejects hypothesis spaces beyond the budget") {
  const Constellation c = Constellation::qpsk();
  const CandidateCodebook book(c, build_spreading_matrix(6));
  const RotationSchedule rot = rotation_schedule(3, 4, 6);
  const PowerModel pw = PowerModel::from_snr_db(10.0);
  Rng rng(61);
  const NetworkChannels ch = sample_network_channels(3, rng);
  std::vector<cplx> y(6);
  CHECK_THROWS(glrt_joint_decode(y, ch, rot, book, pw, 1, /*max_hypotheses=*/4));
}
