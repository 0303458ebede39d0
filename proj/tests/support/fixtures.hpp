#pragma once

// Hand-built networks with known saliency behaviour.

#include <cstddef>
#include <cstdint>

#include "salient/episode.hpp"
#include "salient/network.hpp"
#include "salient/saliency.hpp"

namespace salient::fixture {

struct Net {
  NetworkConfig config;
  ActorCriticParams params;

  ActorCritic build() const { return ActorCritic(config, params); }
};

inline constexpr std::size_t kHintActions = 5;
inline constexpr std::size_t kHintRows = 4;
inline constexpr std::size_t kGameTop = 40;

/// Five actions. Each logit strongly follows the brightness of its hint block
/// (rows 0..3, 16 columns) and weakly follows the lower game area.
Net hint_reader();

/// Bouncing dot confined to rows kGameTop..79, optionally with the hint band
/// lit for a seeded action sequence.
Episode hint_episode(std::uint64_t seed, std::size_t length, bool hints);

/// Two actions. Unit 0 accumulates tanh(sum of pixels / 64) over time with
/// unit gates; logit 0 and the value read tanh of that cell.
Net integrator();

/// Scalar trace of the integrator cell: c[t] = cell after step t.
std::vector<double> integrator_cells(const Episode& episode);

/// Seeded random network whose forget gates are exactly zero.
Net memoryless(std::uint64_t seed);

/// Tanh activations; reads only rows 0..31 through an odd, near-linear chain.
/// Run on frames dark in that band the output is linear to third order.
Net linear_reader();

/// Analytic d(output)/d(pixel) of linear_reader at a dark band.
double linear_reader_weight(Head head, std::size_t row, std::size_t col);

/// Seeded network whose output is invariant under a left-right flip.
Net mirror(std::uint64_t seed);

/// Pixelwise max of a frame and its left-right flip.
Frame symmetrized(const Frame& frame);

}  // namespace salient::fixture
