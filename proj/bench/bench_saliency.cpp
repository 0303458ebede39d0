// Times the serial grid loop against the OpenMP one on a seeded network.
//   bench_saliency [workers] [frames] [stride]

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "salient/saliency.hpp"

using namespace salient;

namespace {

template <typename F>
double seconds(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  const int workers = argc > 1 ? std::atoi(argv[1]) : 4;
  const std::size_t frames = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 4;
  SaliencyConfig cfg;
  if (argc > 3) cfg.patch_stride = std::strtoul(argv[3], nullptr, 10);

  NetworkConfig config;
  const ActorCritic net(config, synth_weights(42, config, 0.1));
  const Episode episode = synth_episode(7, frames, SynthPattern::bouncing_dot);
  const RolloutCache cache = rollout(net, episode);

  const double serial = seconds([&] {
    for (std::size_t t = 0; t < frames; ++t) saliency_maps_serial(cache, net, episode, t, cfg);
  });
  const double parallel = seconds([&] {
    for (std::size_t t = 0; t < frames; ++t) saliency_maps(cache, net, episode, t, cfg, workers);
  });

  const double passes = static_cast<double>(frames * cfg.grid_extent() * cfg.grid_extent());
  std::printf("frames=%zu stride=%zu grid=%zux%zu workers=%d\n", frames, cfg.patch_stride, cfg.grid_extent(),
              cfg.grid_extent(), workers);
  std::printf("serial    %8.3f s  %8.1f passes/s\n", serial, passes / serial);
  std::printf("parallel  %8.3f s  %8.1f passes/s\n", parallel, passes / parallel);
  std::printf("speedup   %8.2fx\n", serial / parallel);
  return 0;
}
