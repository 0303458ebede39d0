#include "salient/rollout.hpp"

#include "salient/error.hpp"

namespace salient {

RolloutCache rollout(const ActorCritic& net, const Episode& episode) {
  if (episode.frames.empty()) throw ParameterError("cannot roll out an empty episode");
  RolloutCache cache;
  cache.episode_ref = episode.source;
  cache.states.reserve(episode.length() + 1);
  cache.outputs.reserve(episode.length());
  cache.states.push_back(RecurrentState::zeros(net.config().hidden_size));
  for (const Frame& frame : episode.frames) {
    auto [out, next] = net.step(frame.pixels(), cache.states.back());
    cache.outputs.push_back(std::move(out));
    cache.states.push_back(std::move(next));
  }
  return cache;
}

}  // namespace salient
