#include "ddfsim/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace ddfsim {

NetworkChannels sample_network_channels(int n_relays, Rng& rng) {
  if (n_relays < 0) throw std::invalid_argument("n_relays must be >= 0");
  NetworkChannels ch;
  ch.g_sd = rng.cgaussian(1.0);
  ch.g_sr.resize(n_relays);
  ch.g_rd.resize(n_relays);
  ch.g_rr.assign(n_relays, std::vector<cplx>(n_relays, cplx{0.0, 0.0}));
  for (int i = 0; i < n_relays; ++i) ch.g_sr[i] = rng.cgaussian(1.0);
  for (int i = 0; i < n_relays; ++i) ch.g_rd[i] = rng.cgaussian(1.0);
  for (int i = 0; i < n_relays; ++i)
    for (int j = 0; j < n_relays; ++j)
      if (i != j) ch.g_rr[i][j] = rng.cgaussian(1.0);
  return ch;
}

PowerModel PowerModel::from_snr_db(double snr_db) {
  PowerModel pw;
  pw.noise_variance = 1.0;
  pw.total_power = pw.noise_variance * std::pow(10.0, snr_db / 10.0);
  return pw;
}

double PowerModel::snr_db() const {
  return 10.0 * std::log10(total_power / noise_variance);
}

cplx awgn_sample(Rng& rng, const PowerModel& pw) {
  return rng.cgaussian(pw.noise_variance);
}

ActivityState::ActivityState(int n_relays, int frame_length, int block_length,
                             std::vector<int> activation_block)
    : n_relays_(n_relays),
      frame_length_(frame_length),
      block_length_(block_length),
      activation_block_(std::move(activation_block)) {
  if (block_length_ < 1 || frame_length_ < 1 || frame_length_ % block_length_ != 0)
    throw std::invalid_argument("frame length must be a multiple of block length");
  if (static_cast<int>(activation_block_.size()) != n_relays_)
    throw std::invalid_argument("activation vector size mismatch");
}

int ActivityState::num_transmitters(int t) const {
  int k = 1;  // the source transmits in every slot
  for (int r = 0; r < n_relays_; ++r)
    if (relay_transmitting(r, t)) ++k;
  return k;
}

cplx equivalent_gain(NodeId receiver, int t, const ActivityState& activity,
                     const RotationSchedule& rotations, const NetworkChannels& ch,
                     const PowerModel& pw) {
  if (receiver.kind == NodeId::Kind::Relay &&
      activity.relay_transmitting(receiver.index, t))
    throw std::invalid_argument("half-duplex: receiver is transmitting in this slot");

  cplx sum;
  if (receiver.kind == NodeId::Kind::Destination) {
    sum = ch.g_sd;
    for (int j = 0; j < activity.n_relays(); ++j)
      if (activity.relay_transmitting(j, t)) sum += ch.g_rd[j] * rotations.phase(j, t);
  } else {
    const int i = receiver.index;
    sum = ch.g_sr[i];
    for (int j = 0; j < activity.n_relays(); ++j)
      if (j != i && activity.relay_transmitting(j, t))
        sum += ch.g_rr[i][j] * rotations.phase(j, t);
  }
  const int k = activity.num_transmitters(t);
  return std::sqrt(pw.share(k)) * sum;
}

}  // namespace ddfsim
