#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "salient/error.hpp"
#include "salient/kernels.hpp"

using namespace salient;
using oracle::random_tensor;

TEST_CASE("conv2d identity and shapes") {
  Conv2dParams id{Tensor({1, 1, 1, 1}, {1.0f}), Tensor({1}, {0.0f}), 1, 0};
  const Tensor x({1, 1, 1}, {0.37f});
  CHECK(conv2d(x, id) == x);

  Conv2dParams layer{Tensor({32, 1, 3, 3}), Tensor({32})};
  CHECK(conv2d(Tensor({1, 80, 80}), layer).shape() == Shape{32, 40, 40});
  CHECK(conv_output_extent(80, 3, 2, 1) == 40);
  CHECK(conv_output_extent(5 * 2, 3, 2, 1) == 5);

  CHECK_THROWS_AS(conv2d(Tensor({2, 80, 80}), layer), ShapeError);
  CHECK_THROWS_AS(conv2d(Tensor({80, 80}), layer), ShapeError);
}

TEST_CASE("conv2d matches the nested-loop oracle bit for bit") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t C = 1 + rng() % 4, O = 1 + rng() % 5, H = 3 + rng() % 14, W = 3 + rng() % 14;
    const std::size_t stride = 1 + rng() % 2, pad = rng() % 2;
    Conv2dParams p{random_tensor(rng, {O, C, 3, 3}), random_tensor(rng, {O}), stride, pad};
    const Tensor x = random_tensor(rng, {C, H, W});
    CHECK(conv2d(x, p) == oracle::conv2d_naive(x, p));
  }
}

TEST_CASE("affine") {
  std::mt19937_64 rng(5);
  const Tensor x = random_tensor(rng, {6});
  Tensor eye({6, 6});
  for (std::size_t i = 0; i < 6; ++i) eye.at(i, i) = 1.0f;
  CHECK(affine(x, eye, Tensor({6})) == x);
  const Tensor b = random_tensor(rng, {4});
  CHECK(affine(x, Tensor({4, 6}), b) == b);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t O = 1 + rng() % 40, D = 1 + rng() % 900;
    const Tensor w = random_tensor(rng, {O, D}), bias = random_tensor(rng, {O}), v = random_tensor(rng, {D});
    const Tensor expected = oracle::affine_naive(v, w, bias);
    CHECK(affine(v, w, bias) == expected);
    CHECK(affine_transposed(v, transpose(w), bias) == expected);
  }
  CHECK_THROWS_AS(affine(x, Tensor({4, 5}), b), ShapeError);
}

TEST_CASE("lstm_step") {
  SUBCASE("zero network") {
    LstmParams p{Tensor({8, 3}), Tensor({8, 2}), Tensor({8})};
    const LstmState next = lstm_step(Tensor({3}), {Tensor({2}), Tensor({2})}, p);
    CHECK(next.h == Tensor({2}));
    CHECK(next.c == Tensor({2}));
  }
  SUBCASE("forget bias 10 keeps c0 scaled by sigmoid(10)") {
    LstmParams p{Tensor({4, 1}), Tensor({4, 1}), Tensor({4})};
    p.bias[1] = 10.0f;
    const LstmState next = lstm_step(Tensor({1}), {Tensor({1}), Tensor({1}, {2.0f})}, p);
    CHECK(next.c[0] == doctest::Approx(2.0 * 0.9999546021312976).epsilon(1e-6));
  }
  SUBCASE("single unit scalar trace") {
    LstmParams p{Tensor({4, 1}, {0.5f, -0.3f, 0.8f, 0.2f}), Tensor({4, 1}, {0.1f, 0.4f, -0.6f, 0.3f}),
                 Tensor({4}, {0.05f, 0.5f, -0.1f, 0.0f})};
    LstmState s{Tensor({1}), Tensor({1})};
    double h = 0.0, c = 0.0;
    auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
    for (float x : {1.0f, -0.5f, 0.25f}) {
      s = lstm_step(Tensor({1}, {x}), s, p);
      const double i = sig(0.5 * x + 0.1 * h + 0.05), f = sig(-0.3 * x + 0.4 * h + 0.5);
      const double g = std::tanh(0.8 * x - 0.6 * h - 0.1), o = sig(0.2 * x + 0.3 * h);
      c = f * c + i * g;
      h = o * std::tanh(c);
      CHECK(s.c[0] == doctest::Approx(c).epsilon(1e-6));
      CHECK(s.h[0] == doctest::Approx(h).epsilon(1e-6));
    }
  }
  SUBCASE("matches the naive oracle, plain and transposed") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 30; ++trial) {
      const std::size_t D = 1 + rng() % 50, H = 1 + rng() % 20;
      LstmParams p{random_tensor(rng, {4 * H, D}), random_tensor(rng, {4 * H, H}), random_tensor(rng, {4 * H})};
      const LstmState s{random_tensor(rng, {H}), random_tensor(rng, {H})};
      const Tensor x = random_tensor(rng, {D});
      const LstmState expected = oracle::lstm_naive(x, s, p);
      const LstmState a = lstm_step(x, s, p);
      const LstmState b = lstm_step_transposed(x, s, transpose(p.input_weights), transpose(p.recurrent_weights), p.bias);
      CHECK(a.h == expected.h);
      CHECK(a.c == expected.c);
      CHECK(b.h == expected.h);
      CHECK(b.c == expected.c);
    }
  }
  SUBCASE("shape errors") {
    LstmParams p{Tensor({8, 3}), Tensor({8, 2}), Tensor({8})};
    CHECK_THROWS_AS(lstm_step(Tensor({4}), {Tensor({2}), Tensor({2})}, p), ShapeError);
    CHECK_THROWS_AS(lstm_step(Tensor({3}), {Tensor({3}), Tensor({3})}, p), ShapeError);
  }
}

TEST_CASE("softmax") {
  const Tensor u = softmax(Tensor({4}, {0.3f, 0.3f, 0.3f, 0.3f}));
  for (float v : u.values()) CHECK(v == doctest::Approx(0.25).epsilon(1e-7));
  const Tensor p = softmax(Tensor({2}, {0.0f, static_cast<float>(std::log(3.0))}));
  CHECK(p[0] == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(p[1] == doctest::Approx(0.75).epsilon(1e-6));
  const Tensor big = softmax(Tensor({3}, {1000.0f, 999.0f, -1000.0f}));
  CHECK(big.all_finite());
  CHECK(std::abs(big.sum() - 1.0) <= 1e-6);
}

TEST_CASE("gaussian_blur") {
  CHECK_THROWS_AS(gaussian_blur(Tensor({5, 5}), 0.0), ParameterError);
  CHECK_THROWS_AS(gaussian_kernel_1d(-1.0), ParameterError);
  CHECK(gaussian_kernel_1d(3.0).size() == 19);

  const Tensor flat({80, 80}, 0.42f);
  const Tensor blurred = gaussian_blur(flat, 3.0);
  for (float v : blurred.values()) CHECK(std::abs(v - 0.42f) <= 1e-6);

  Tensor impulse({31, 31});
  impulse.at(15, 15) = 1.0f;
  const Tensor out = gaussian_blur(impulse, 3.0);
  double norm = 0.0;
  for (int dy = -9; dy <= 9; ++dy)
    for (int dx = -9; dx <= 9; ++dx) norm += std::exp(-(dy * dy + dx * dx) / 18.0);
  for (int dy = -9; dy <= 9; ++dy)
    for (int dx = -9; dx <= 9; ++dx)
      CHECK(out.at(15 + dy, 15 + dx) == doctest::Approx(std::exp(-(dy * dy + dx * dx) / 18.0) / norm).epsilon(1e-5));

  std::mt19937_64 rng(3);
  const Tensor img = random_tensor(rng, {40, 40}, 0.0f, 1.0f);
  const oracle::Grid direct = oracle::blur_direct(oracle::to_grid(img), 3.0);
  const Tensor sep = gaussian_blur(img, 3.0);
  for (std::size_t i = 0; i < sep.size(); ++i) CHECK(std::abs(sep[i] - direct.v[i]) <= 1e-6);
}

TEST_CASE("gaussian_mask") {
  const Tensor m = gaussian_mask(40, 40, 25.0, 80, 80);
  CHECK(m.at(40, 40) == 1.0f);
  CHECK(m.at(45, 40) == doctest::Approx(0.60653066).epsilon(1e-6));
  CHECK(m.at(43, 44) == doctest::Approx(0.60653066).epsilon(1e-6));
  CHECK(m.min_value() > 0.0f);
  CHECK(m.max_value() == 1.0f);
  CHECK_THROWS_AS(gaussian_mask(80, 0, 25.0, 80, 80), ParameterError);
}

TEST_CASE("bilinear_upsample") {
  const Tensor c = bilinear_upsample(Tensor({16, 16}, 0.7f), 80, 80);
  for (float v : c.values()) CHECK(v == 0.7f);
  const Tensor one = bilinear_upsample(Tensor({1, 1}, {3.5f}), 7, 9);
  for (float v : one.values()) CHECK(v == 3.5f);
  const Tensor mid = bilinear_upsample(Tensor({2, 2}, {0.0f, 1.0f, 0.0f, 1.0f}), 2, 3);
  CHECK(mid.at(0, 1) == 0.5f);
  CHECK(mid.at(1, 1) == 0.5f);
  CHECK(mid.at(0, 0) == 0.0f);
  CHECK(mid.at(1, 2) == 1.0f);
  std::mt19937_64 rng(8);
  const Tensor r = random_tensor(rng, {80, 80});
  CHECK(bilinear_upsample(r, 80, 80) == r);
  CHECK_THROWS_AS(bilinear_upsample(Tensor({0, 0}), 80, 80), ParameterError);
}

TEST_CASE("elementwise") {
  std::mt19937_64 rng(11);
  const Tensor a = random_tensor(rng, {7, 5});
  CHECK(hadamard(a, Tensor({7, 5}, 1.0f)) == a);
  CHECK(hadamard(a, Tensor({7, 5})) == Tensor({7, 5}));
  const Tensor s = scale(a, 0.99f), d = subtract(a, scale(a, 0.01f));
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(s[i] - d[i]) <= 1e-7);
  CHECK(add(a, Tensor({7, 5})) == a);
  CHECK_THROWS_AS(hadamard(a, Tensor({5, 7})), ShapeError);
}

TEST_CASE("activations") {
  CHECK(sigmoid(-100.0f) == 0.0f);
  CHECK(sigmoid(30.0f) == 1.0f);
  CHECK(activate(-1.0f, Activation::elu) == doctest::Approx(std::expm1(-1.0)));
  CHECK(activate(2.0f, Activation::elu) == 2.0f);
  CHECK(activate(-2.0f, Activation::relu) == 0.0f);
  CHECK(parse_activation("tanh") == Activation::tanh);
  CHECK_THROWS_AS(parse_activation("gelu"), ConfigError);
}
