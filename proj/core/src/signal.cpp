#include "ddfsim/signal.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

namespace ddfsim {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Common phase offset of the spreading nodes; any fixed nonzero rational
// number of radians keeps the nodes off the algebraic numbers. 0.94 also
// maximizes the worst-case prefix distances of the T=6 QPSK codebook over
// this one-parameter family, which sets how reliably a relay can decode
// from a short listening window.
constexpr double kNodePhase = 0.94;
}  // namespace

Constellation Constellation::qpsk() { return make(4); }

Constellation Constellation::make(int order) {
  Constellation c;
  c.order = order;
  if (order == 4) {
    c.bits_per_symbol = 2;
    const double s = 1.0 / std::sqrt(2.0);
    // index = (b0 b1), Gray around the circle: 00,01,11,10
    c.points = {{s, s}, {-s, s}, {s, -s}, {-s, -s}};
  } else if (order == 16) {
    c.bits_per_symbol = 4;
    // Gray per axis over levels {-3,-1,1,3}/sqrt(10).
    const double s = 1.0 / std::sqrt(10.0);
    auto level = [&](int g2) {
      switch (g2) {
        case 0: return -3.0 * s;
        case 1: return -1.0 * s;
        case 3: return 1.0 * s;
        default: return 3.0 * s;  // 2
      }
    };
    c.points.resize(16);
    for (int i = 0; i < 16; ++i) {
      const int gi = (i >> 2) & 3;  // first two bits -> I axis
      const int gq = i & 3;         // last two bits -> Q axis
      c.points[i] = {level(gi), level(gq)};
    }
  } else {
    throw std::invalid_argument("constellation order must be 4 or 16");
  }
  return c;
}

int Constellation::symbol_index(std::span<const std::uint8_t> bits) const {
  if (static_cast<int>(bits.size()) != bits_per_symbol)
    throw std::invalid_argument("bit group size mismatch");
  int idx = 0;
  for (auto b : bits) idx = (idx << 1) | (b & 1);
  return idx;
}

std::vector<cplx> map_bits(const BitVec& bits, const Constellation& c) {
  if (bits.size() % static_cast<std::size_t>(c.bits_per_symbol) != 0)
    throw std::invalid_argument("bit count not divisible by bits per symbol");
  std::vector<cplx> out;
  out.reserve(bits.size() / c.bits_per_symbol);
  for (std::size_t i = 0; i < bits.size(); i += c.bits_per_symbol) {
    const int idx = c.symbol_index(std::span(bits).subspan(i, c.bits_per_symbol));
    out.push_back(c.points[idx]);
  }
  return out;
}

BitVec demap_symbols(std::span<const cplx> symbols, const Constellation& c) {
  BitVec bits;
  bits.reserve(symbols.size() * c.bits_per_symbol);
  for (const cplx& y : symbols) {
    int best = 0;
    double best_d = std::norm(y - c.points[0]);
    for (int i = 1; i < c.order; ++i) {
      const double d = std::norm(y - c.points[i]);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    for (int b = c.bits_per_symbol - 1; b >= 0; --b)
      bits.push_back(static_cast<std::uint8_t>((best >> b) & 1));
  }
  return bits;
}

std::vector<cplx> SpreadingMatrix::apply(std::span<const cplx> s) const {
  if (static_cast<int>(s.size()) != dim) throw std::invalid_argument("frame length mismatch");
  std::vector<cplx> x(dim, cplx{0.0, 0.0});
  for (int t = 0; t < dim; ++t) {
    cplx acc{0.0, 0.0};
    for (int k = 0; k < dim; ++k) acc += at(t, k) * s[k];
    x[t] = acc;
  }
  return x;
}

std::vector<cplx> SpreadingMatrix::apply_inverse(std::span<const cplx> x) const {
  if (static_cast<int>(x.size()) != dim) throw std::invalid_argument("frame length mismatch");
  std::vector<cplx> s(dim, cplx{0.0, 0.0});
  for (int k = 0; k < dim; ++k) {
    cplx acc{0.0, 0.0};
    for (int t = 0; t < dim; ++t) acc += std::conj(at(t, k)) * x[t];
    s[k] = acc;
  }
  return s;
}

SpreadingMatrix build_spreading_matrix(int frame_length) {
  if (frame_length < 1) throw std::invalid_argument("frame length must be >= 1");
  SpreadingMatrix m;
  m.dim = frame_length;
  m.u.resize(static_cast<std::size_t>(frame_length) * frame_length);
  if (frame_length == 1) {
    m.u[0] = cplx{1.0, 0.0};
    return m;
  }
  const double norm = 1.0 / std::sqrt(static_cast<double>(frame_length));
  for (int t = 0; t < frame_length; ++t) {
    const double node = kTwoPi * t / frame_length + kNodePhase;
    for (int k = 0; k < frame_length; ++k) {
      const double a = node * k;
      m.u[static_cast<std::size_t>(t) * frame_length + k] = norm * cplx{std::cos(a), std::sin(a)};
    }
  }
  return m;
}

int RotationSchedule::index(int relay, int t) const {
  const int j = relay + 1;  // relay 0 uses multiplier 1; index 0 is the unrotated source
  switch (rule) {
    case Rule::ProductMod:
      return static_cast<int>((static_cast<long long>(j) * t) % set_size);
    case Rule::SumMod:
      return (j + t) % set_size;
  }
  return 0;
}

double RotationSchedule::angle(int relay, int t) const {
  return kTwoPi * index(relay, t) / set_size;
}

cplx RotationSchedule::phase(int relay, int t) const {
  const double a = angle(relay, t);
  return {std::cos(a), std::sin(a)};
}

RotationSchedule rotation_schedule(int n_relays, int set_size, int frame_length,
                                   RotationSchedule::Rule rule) {
  if (set_size < 2 || set_size % 2 != 0)
    throw std::invalid_argument("rotation set size must be even and >= 2");
  if (n_relays < 0 || frame_length < 1) throw std::invalid_argument("bad schedule geometry");
  RotationSchedule sched{set_size, n_relays, frame_length, rule};
  // Distinct relays must produce distinct slot-sequences, otherwise their
  // activity hypotheses are indistinguishable at every receiver.
  std::set<std::vector<int>> seen;
  for (int r = 0; r < n_relays; ++r) {
    std::vector<int> seq(frame_length);
    for (int t = 0; t < frame_length; ++t) seq[t] = sched.index(r, t);
    if (!seen.insert(seq).second)
      throw std::invalid_argument("too many relays for distinct rotation sequences");
  }
  return sched;
}

std::pair<cplx, cplx> alamouti_relay_pair(cplx x1, cplx x2) {
  return {-std::conj(x2), std::conj(x1)};
}

}  // namespace ddfsim
