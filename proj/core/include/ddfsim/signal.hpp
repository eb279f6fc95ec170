#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace ddfsim {

using cplx = std::complex<double>;
using BitVec = std::vector<std::uint8_t>;  // entries are 0 or 1

/// Gray-labeled unit-average-energy constellation (QPSK or 16-QAM).
struct Constellation {
  int order = 4;
  int bits_per_symbol = 2;
  std::vector<cplx> points;

  static Constellation qpsk();
  /// M must be 4 or 16.
  static Constellation make(int order);

  /// Symbol index for a group of bits_per_symbol bits, MSB first.
  int symbol_index(std::span<const std::uint8_t> bits) const;
};

std::vector<cplx> map_bits(const BitVec& bits, const Constellation& c);
BitVec demap_symbols(std::span<const cplx> symbols, const Constellation& c);

/// Unitary T x T spreading transform mixing every information symbol into
/// every transmitted symbol.
///
/// Construction: Vandermonde rows on the nodes z_t = exp(i(2*pi*t/T + phi0))
/// with a fixed transcendental phase offset phi0, normalized by 1/sqrt(T).
/// Orthogonality of the rows holds for any common offset; the offset makes
/// the nodes transcendental, so no nonzero difference vector with
/// constellation (algebraic) coordinates can evaluate to zero in any output
/// coordinate.
struct SpreadingMatrix {
  int dim = 1;
  std::vector<cplx> u;  // row-major dim x dim

  cplx at(int row, int col) const { return u[static_cast<std::size_t>(row) * dim + col]; }
  std::vector<cplx> apply(std::span<const cplx> s) const;
  /// Conjugate-transpose application (the inverse, by unitarity).
  std::vector<cplx> apply_inverse(std::span<const cplx> x) const;
};

SpreadingMatrix build_spreading_matrix(int frame_length);

/// Per-relay, per-slot rotation angles drawn from {2*pi*l/L}.
///
/// The schedule is a pure function of (relay index, slot index) so every
/// node in the network derives the identical table.
struct RotationSchedule {
  enum class Rule { ProductMod, SumMod };

  int set_size = 4;   // L, even
  int n_relays = 0;
  int frame_length = 0;
  Rule rule = Rule::ProductMod;

  /// Rotation index in 0..L-1 for relay (0-based) at slot t (0-based).
  int index(int relay, int t) const;
  double angle(int relay, int t) const;
  cplx phase(int relay, int t) const;
};

RotationSchedule rotation_schedule(int n_relays, int set_size, int frame_length,
                                   RotationSchedule::Rule rule = RotationSchedule::Rule::ProductMod);

/// Alamouti second-antenna pair for coded symbols (x1, x2): the relay sends
/// (-conj(x2), conj(x1)) while the source sends (x1, x2).
std::pair<cplx, cplx> alamouti_relay_pair(cplx x1, cplx x2);

}  // namespace ddfsim
