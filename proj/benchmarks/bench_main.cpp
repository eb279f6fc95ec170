#include <benchmark/benchmark.h>

#include "ddfsim/engine.hpp"

namespace {

using namespace ddfsim;

void MlDecodeFullFrame(benchmark::State& state) {
  const int T = static_cast<int>(state.range(0));
  const Constellation c = Constellation::qpsk();
  const SpreadingMatrix u = build_spreading_matrix(T);
  const CandidateCodebook book(c, u);
  Rng rng(42);
  ObservationWindow w;
  for (int t = 0; t < T; ++t)
    w.add(t, rng.cgaussian(2.0), rng.cgaussian(1.0));
  for (auto _ : state) {
    auto d = ml_decode(w, book);
    benchmark::DoNotOptimize(d.candidate);
  }
  state.SetItemsProcessed(state.iterations() * book.num_candidates());
}
BENCHMARK(MlDecodeFullFrame)->DenseRange(3, 6);

void SignalLevelFrame(benchmark::State& state) {
  FrameConfig cfg;
  cfg.n_relays = 1;
  cfg.snr_db = 20.0;
  cfg.criterion.kind = DecisionCriterion::Kind::GenieExactDecoding;
  const FrameSimulator sim(cfg);
  long trial = 0;
  for (auto _ : state) {
    TrialStreams streams = TrialStreams::make(7, trial++, cfg.n_relays);
    const NetworkChannels ch = sample_network_channels(cfg.n_relays, streams.channel);
    const BitVec bits = sim.random_info_bits(streams.info);
    auto out = sim.run(ch, streams, bits);
    benchmark::DoNotOptimize(out.frame_error);
  }
}
BENCHMARK(SignalLevelFrame);

void OutageActivationProfile(benchmark::State& state) {
  FrameConfig cfg;
  cfg.n_relays = 3;
  cfg.snr_db = 20.0;
  const RotationSchedule rot = rotation_schedule(3, 4, cfg.frame_length);
  long trial = 0;
  for (auto _ : state) {
    TrialStreams streams = TrialStreams::make(7, trial++, cfg.n_relays);
    const NetworkChannels ch = sample_network_channels(cfg.n_relays, streams.channel);
    auto p = activation_profile_outage(ch, rot, cfg, cfg.rate);
    benchmark::DoNotOptimize(p.activation_block.data());
  }
}
BENCHMARK(OutageActivationProfile);

}  // namespace

BENCHMARK_MAIN();
