#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace salient::fixture {

namespace {

constexpr float kOpen = 30.0f;     // sigmoid(30) == 1.0f
constexpr float kClosed = -100.0f; // sigmoid(-100) == 0.0f

float& conv_w(ActorCriticParams& p, std::size_t layer, std::size_t o, std::size_t c, std::size_t kh, std::size_t kw) {
  Tensor& w = p.conv[layer].weights;
  return w[((o * w.dim(1) + c) * 3 + kh) * 3 + kw];
}

void pool_2x2(ActorCriticParams& p, std::size_t layer, std::size_t o, std::size_t c, float v = 1.0f) {
  for (std::size_t kh = 1; kh <= 2; ++kh)
    for (std::size_t kw = 1; kw <= 2; ++kw) conv_w(p, layer, o, c, kh, kw) = v;
}

// Top row of each pair only.
void pool_1x2(ActorCriticParams& p, std::size_t layer, std::size_t o, std::size_t c) {
  conv_w(p, layer, o, c, 1, 1) = 1.0f;
  conv_w(p, layer, o, c, 1, 2) = 1.0f;
}

std::size_t feature(std::size_t c, std::size_t y, std::size_t x) { return c * 25 + y * 5 + x; }

struct Gates {
  ActorCriticParams& p;
  std::size_t hidden;

  float& bias(std::size_t gate, std::size_t unit) { return p.lstm.bias[gate * hidden + unit]; }
  float& input(std::size_t gate, std::size_t unit, std::size_t d) {
    return p.lstm.input_weights[(gate * hidden + unit) * p.lstm.input_weights.dim(1) + d];
  }
  // Unit gates: c' = c * forget + g, h' = tanh(c').
  void pass(std::size_t unit, bool keep) {
    bias(0, unit) = kOpen;
    bias(1, unit) = keep ? kOpen : kClosed;
    bias(3, unit) = kOpen;
  }
};

float& head_w(ActorCriticParams& p, std::size_t row, std::size_t unit) {
  return p.head_weights[row * p.head_weights.dim(1) + unit];
}

Frame confine_to_game(const Frame& frame) {
  Tensor px = frame.pixels();
  for (std::size_t r = 0; r < kGameTop; ++r)
    for (std::size_t c = 0; c < kFrameSize; ++c) px.at(r, c) = 0.0f;
  return Frame(std::move(px));
}

}  // namespace

Net hint_reader() {
  Net net;
  net.config.n_actions = kHintActions;
  net.params = zero_params(net.config);
  auto& p = net.params;
  // Channel 0: sum of rows 16y..16y+3, cols 16x..16x+15. Channel 1: 16x16 block sums.
  for (std::size_t o = 0; o < 2; ++o) pool_2x2(p, 0, o, 0);
  pool_2x2(p, 1, 0, 0);
  pool_2x2(p, 1, 1, 1);
  for (std::size_t layer = 2; layer < 4; ++layer) {
    pool_1x2(p, layer, 0, 0);
    pool_2x2(p, layer, 1, 1);
  }

  Gates g{p, net.config.hidden_size};
  for (std::size_t a = 0; a < kHintActions; ++a) {
    g.pass(a, false);
    g.input(2, a, feature(0, 0, a)) = 1.0f / 64.0f;
    for (std::size_t k = 0; k < 2; ++k) {
      const std::size_t unit = 5 + 5 * k + a;
      g.pass(unit, false);
      g.input(2, unit, feature(1, 3 + k, a)) = 1.0f / 256.0f;
      head_w(p, a, unit) = 1.0f;
      head_w(p, kHintActions, unit) = 1.0f;
    }
    head_w(p, a, a) = 4.0f;
  }
  return net;
}

Episode hint_episode(std::uint64_t seed, std::size_t length, bool hints) {
  Episode ep = synth_episode(seed, length, SynthPattern::bouncing_dot);
  std::mt19937_64 rng(seed + 1);
  std::vector<int> actions;
  for (auto& frame : ep.frames) {
    frame = confine_to_game(frame);
    if (hints) {
      const std::size_t a = static_cast<std::size_t>(rng() % kHintActions);
      actions.push_back(static_cast<int>(a));
      frame = inject_hint_pixels(frame, a, kHintActions, kHintRows);
    }
  }
  if (hints) ep.actions = actions;
  ep.source = hints ? "hint fixture" : "hint fixture control";
  return ep;
}

Net integrator() {
  Net net;
  net.config.n_actions = 2;
  net.params = zero_params(net.config);
  auto& p = net.params;
  pool_2x2(p, 0, 0, 0);
  for (std::size_t layer = 1; layer < 4; ++layer) pool_2x2(p, layer, 0, 0);
  Gates g{p, net.config.hidden_size};
  for (std::size_t unit = 1; unit < net.config.hidden_size; ++unit) g.bias(1, unit) = kClosed;
  g.pass(0, true);
  for (std::size_t d = 0; d < 25; ++d) g.input(2, 0, d) = 1.0f / 64.0f;
  head_w(p, 0, 0) = 1.0f;
  head_w(p, 2, 0) = 1.0f;
  return net;
}

std::vector<double> integrator_cells(const Episode& episode) {
  std::vector<double> cells;
  double c = 0.0;
  for (const auto& frame : episode.frames) {
    double total = 0.0;
    for (float v : frame.pixels().values()) total += v;
    c += std::tanh(total / 64.0);
    cells.push_back(c);
  }
  return cells;
}

Net memoryless(std::uint64_t seed) {
  Net net;
  net.params = synth_weights(seed, net.config, 0.1);
  Gates g{net.params, net.config.hidden_size};
  for (std::size_t unit = 0; unit < net.config.hidden_size; ++unit) {
    g.bias(1, unit) = kClosed;
    for (std::size_t d = 0; d < net.config.lstm_input_size(); ++d) g.input(1, unit, d) = 0.0f;
    for (std::size_t k = 0; k < net.config.hidden_size; ++k)
      net.params.lstm.recurrent_weights[(net.config.hidden_size + unit) * net.config.hidden_size + k] = 0.0f;
  }
  return net;
}

namespace {

constexpr float kReaderScale = 0.01f;
constexpr float kTap[2][2] = {{1.0f, 0.5f}, {0.25f, 0.75f}};
constexpr float kActorCoef[10] = {-4, -2, 1, 3, 5, -5, -3, -1, 2, 4};
constexpr float kCriticCoef[10] = {0.5f, -1, 1.5f, -2, 2.5f, -0.5f, 1, -1.5f, 2, -2.5f};

}  // namespace

Net linear_reader() {
  Net net;
  net.config.n_actions = 3;
  net.config.activation = Activation::tanh;
  net.params = zero_params(net.config);
  auto& p = net.params;
  for (std::size_t dy = 0; dy < 2; ++dy)
    for (std::size_t dx = 0; dx < 2; ++dx) conv_w(p, 0, 0, 0, 1 + dy, 1 + dx) = kTap[dy][dx];
  for (std::size_t layer = 1; layer < 4; ++layer) pool_2x2(p, layer, 0, 0);
  Gates g{p, net.config.hidden_size};
  for (std::size_t unit = 0; unit < net.config.hidden_size; ++unit) g.bias(1, unit) = kClosed;
  for (std::size_t u = 0; u < 10; ++u) {
    g.pass(u, false);
    g.input(2, u, feature(0, u / 5, u % 5)) = kReaderScale;
    head_w(p, 0, u) = kActorCoef[u];
    head_w(p, 3, u) = kCriticCoef[u];
  }
  p.head_bias[1] = -1.0f;
  p.head_bias[2] = -1.0f;
  return net;
}

double linear_reader_weight(Head head, std::size_t row, std::size_t col) {
  if (row >= 32) return 0.0;
  const std::size_t u = (row / 16) * 5 + col / 16;
  const double coef = head == Head::actor ? kActorCoef[u] : kCriticCoef[u];
  return coef * static_cast<double>(kReaderScale) * kTap[row % 2][col % 2];
}

Net mirror(std::uint64_t seed) {
  Net net;
  net.params = synth_weights(seed, net.config, 0.3);
  auto& p = net.params;
  // kw = 1 and 2 share a weight, kw = 0 is zero.
  for (auto& layer : p.conv) {
    Tensor& w = layer.weights;
    for (std::size_t base = 0; base < w.size(); base += 3) {
      w[base] = 0.0f;
      w[base + 2] = w[base + 1];
    }
  }
  Tensor& wi = p.lstm.input_weights;
  const std::size_t D = wi.dim(1);
  for (std::size_t r = 0; r < wi.dim(0); ++r)
    for (std::size_t c = 0; c < kConvChannels; ++c)
      for (std::size_t y = 0; y < 5; ++y)
        for (std::size_t x = 0; x < 2; ++x) wi[r * D + feature(c, y, 4 - x)] = wi[r * D + feature(c, y, x)];
  return net;
}

Frame symmetrized(const Frame& frame) {
  Tensor px = frame.pixels();
  for (std::size_t r = 0; r < kFrameSize; ++r)
    for (std::size_t c = 0; c < kFrameSize; ++c)
      px.at(r, c) = std::max(frame.at(r, c), frame.at(r, kFrameSize - 1 - c));
  return Frame(std::move(px));
}

}  // namespace salient::fixture
