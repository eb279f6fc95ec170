#pragma once

#include <climits>
#include <vector>

#include "ddfsim/rng.hpp"
#include "ddfsim/signal.hpp"

namespace ddfsim {

/// One slow-fading realization of every link in the network. All gains are
/// i.i.d. CN(0,1) and stay constant for the whole frame.
struct NetworkChannels {
  cplx g_sd{};                          // source -> destination
  std::vector<cplx> g_sr;               // source -> relay i
  std::vector<cplx> g_rd;               // relay i -> destination
  std::vector<std::vector<cplx>> g_rr;  // [i][j]: relay j -> relay i, diagonal unused

  int n_relays() const { return static_cast<int>(g_sr.size()); }
};

NetworkChannels sample_network_channels(int n_relays, Rng& rng);

/// Total power P shared uniformly among the K simultaneous transmitters of a
/// slot; noise variance is fixed and the SNR axis sweeps P.
struct PowerModel {
  double total_power = 1.0;
  double noise_variance = 1.0;

  static PowerModel from_snr_db(double snr_db);
  double snr_db() const;
  /// Per-node transmit power when k nodes share the slot.
  double share(int k) const { return total_power / k; }
};

cplx awgn_sample(Rng& rng, const PowerModel& pw);

struct NodeId {
  enum class Kind { Destination, Relay };
  Kind kind = Kind::Destination;
  int index = 0;

  static NodeId destination() { return {Kind::Destination, 0}; }
  static NodeId relay(int i) { return {Kind::Relay, i}; }
};

/// Which nodes transmit in which slot of a frame. The source is active in
/// every slot; a relay that activated at the end of block b transmits in all
/// blocks after b (monotone activation).
class ActivityState {
 public:
  static constexpr int kNever = INT_MAX;

  ActivityState(int n_relays, int frame_length, int block_length,
                std::vector<int> activation_block);

  int n_relays() const { return n_relays_; }
  int frame_length() const { return frame_length_; }
  int block_length() const { return block_length_; }
  int num_blocks() const { return frame_length_ / block_length_; }
  /// 1-based block containing slot t (0-based).
  int block_of_slot(int t) const { return t / block_length_ + 1; }

  int activation_block(int relay) const { return activation_block_[relay]; }
  bool relay_transmitting(int relay, int t) const {
    return block_of_slot(t) > activation_block_[relay];
  }
  /// Source plus all relays forwarding in slot t.
  int num_transmitters(int t) const;

 private:
  int n_relays_;
  int frame_length_;
  int block_length_;
  std::vector<int> activation_block_;
};

/// The single complex coefficient seen by `receiver` in slot t when every
/// transmitter sends the same coded symbol (source unrotated, active relays
/// after their scheduled rotation), including the uniform power split.
cplx equivalent_gain(NodeId receiver, int t, const ActivityState& activity,
                     const RotationSchedule& rotations, const NetworkChannels& ch,
                     const PowerModel& pw);

}  // namespace ddfsim
