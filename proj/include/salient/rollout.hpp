#pragma once

#include <string>
#include <vector>

#include "salient/episode.hpp"
#include "salient/network.hpp"

namespace salient {

/// states[t] is the recurrent state entering step t (states[0] is zero);
/// outputs[t] is the network output after consuming frame t.
struct RolloutCache {
  std::vector<RecurrentState> states;
  std::vector<PolicyOutput> outputs;
  std::string episode_ref;

  std::size_t length() const noexcept { return outputs.size(); }
};

RolloutCache rollout(const ActorCritic& net, const Episode& episode);

}  // namespace salient
