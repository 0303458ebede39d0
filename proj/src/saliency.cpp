#include "salient/saliency.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>

#if defined(_OPENMP)
#include <omp.h>
#endif

#include <json.hpp>

#include "salient/binary_io.hpp"
#include "salient/error.hpp"
#include "salient/kernels.hpp"

namespace salient {

namespace fs = std::filesystem;
using nlohmann::json;

Head parse_head(const std::string& name) {
  if (name == "actor") return Head::actor;
  if (name == "critic") return Head::critic;
  throw ConfigError("unknown head '" + name + "' (expected actor or critic)");
}

std::string head_name(Head head) { return head == Head::actor ? "actor" : "critic"; }

void SaliencyConfig::validate() const {
  if (patch_stride < 1 || patch_stride > kFrameSize) {
    throw ConfigError("stride must be in [1, 80], got " + std::to_string(patch_stride));
  }
  if (!(blur_sigma > 0.0) || !std::isfinite(blur_sigma)) throw ConfigError("blur-sigma must be positive");
  if (!(mask_variance > 0.0) || !std::isfinite(mask_variance)) throw ConfigError("mask-var must be positive");
}

std::size_t SaliencyConfig::grid_extent() const { return (kFrameSize + patch_stride - 1) / patch_stride; }

int default_workers() {
#if defined(_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace {

// Runs body(i) for i in [0, n). Iterations must write disjoint outputs.
template <typename Body>
void parallel_for(std::size_t n, int workers, Body body) {
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(salient_parallel_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

void check_timestep(const RolloutCache& cache, const Episode& episode, std::size_t t) {
  if (cache.length() != episode.length() || cache.states.size() != episode.length() + 1) {
    throw ParameterError("rollout cache does not match the episode length");
  }
  if (t >= episode.length()) {
    throw ParameterError("timestep " + std::to_string(t) + " outside episode of length " +
                         std::to_string(episode.length()));
  }
}

float half_squared_distance(const Tensor& a, const Tensor& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    acc += d * d;
  }
  return static_cast<float>(0.5 * acc);
}

float half_squared_difference(float a, float b) {
  const double d = static_cast<double>(a) - static_cast<double>(b);
  return static_cast<float>(0.5 * d * d);
}

}  // namespace

Tensor perturb_with_blur(const Tensor& image, const Tensor& blurred, std::size_t row, std::size_t col,
                         double mask_variance) {
  require_shape(blurred, image.shape(), "blurred image");
  const Tensor mask = gaussian_mask(row, col, mask_variance, image.dim(0), image.dim(1));
  Tensor out(image.shape());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = image[k] * (1.0f - mask[k]) + blurred[k] * mask[k];
  return out;
}

Frame perturb(const Frame& frame, std::size_t row, std::size_t col, const SaliencyConfig& cfg) {
  const Tensor blurred = gaussian_blur(frame.pixels(), cfg.blur_sigma);
  return Frame(perturb_with_blur(frame.pixels(), blurred, row, col, cfg.mask_variance));
}

FrameSaliency::FrameSaliency(const ActorCritic& net, const RolloutCache& cache, const Episode& episode, std::size_t t,
                             const SaliencyConfig& cfg)
    : net_(net),
      state_((cfg.validate(), check_timestep(cache, episode, t), cache.states[t])),
      reference_(cache.outputs[t]),
      image_(episode.frames[t].pixels()),
      blurred_(gaussian_blur(episode.frames[t].pixels(), cfg.blur_sigma)),
      t_(t),
      mask_variance_(cfg.mask_variance) {}

PointScores FrameSaliency::score(std::size_t row, std::size_t col) const {
  const Tensor perturbed = perturb_with_blur(image_, blurred_, row, col, mask_variance_);
  const auto [out, next] = net_.step(perturbed, state_);
  return {half_squared_distance(reference_.logits, out.logits), half_squared_difference(reference_.value, out.value)};
}

float policy_saliency_at(const RolloutCache& cache, const ActorCritic& net, const Episode& episode, std::size_t t,
                         std::size_t row, std::size_t col, const SaliencyConfig& cfg) {
  return FrameSaliency(net, cache, episode, t, cfg).score(row, col).policy;
}

float value_saliency_at(const RolloutCache& cache, const ActorCritic& net, const Episode& episode, std::size_t t,
                        std::size_t row, std::size_t col, const SaliencyConfig& cfg) {
  return FrameSaliency(net, cache, episode, t, cfg).score(row, col).value;
}

namespace {

SaliencyPair assemble(const std::vector<PointScores>& grid, std::size_t extent, std::size_t t, std::size_t stride) {
  SaliencyPair pair;
  pair.actor.grid_scores = Tensor({extent, extent});
  pair.critic.grid_scores = Tensor({extent, extent});
  for (std::size_t k = 0; k < grid.size(); ++k) {
    pair.actor.grid_scores[k] = grid[k].policy;
    pair.critic.grid_scores[k] = grid[k].value;
  }
  for (auto* map : {&pair.actor, &pair.critic}) {
    map->scores = bilinear_upsample(map->grid_scores, kFrameSize, kFrameSize);
    map->t = t;
    map->stride = stride;
  }
  pair.actor.head = Head::actor;
  pair.critic.head = Head::critic;
  return pair;
}

}  // namespace

SaliencyPair saliency_maps(const RolloutCache& cache, const ActorCritic& net, const Episode& episode, std::size_t t,
                           const SaliencyConfig& cfg, int workers) {
  const FrameSaliency frame(net, cache, episode, t, cfg);
  const std::size_t extent = cfg.grid_extent(), k = cfg.patch_stride;
  std::vector<PointScores> grid(extent * extent);
  parallel_for(grid.size(), workers, [&](std::size_t idx) {
    grid[idx] = frame.score((idx / extent) * k, (idx % extent) * k);
  });
  return assemble(grid, extent, t, k);
}

SaliencyPair saliency_maps_serial(const RolloutCache& cache, const ActorCritic& net, const Episode& episode,
                                  std::size_t t, const SaliencyConfig& cfg) {
  const FrameSaliency frame(net, cache, episode, t, cfg);
  const std::size_t extent = cfg.grid_extent(), k = cfg.patch_stride;
  std::vector<PointScores> grid;
  grid.reserve(extent * extent);
  for (std::size_t gi = 0; gi < extent; ++gi)
    for (std::size_t gj = 0; gj < extent; ++gj) grid.push_back(frame.score(gi * k, gj * k));
  return assemble(grid, extent, t, k);
}

SaliencyMap saliency_map(const RolloutCache& cache, const ActorCritic& net, const Episode& episode, std::size_t t,
                         const SaliencyConfig& cfg, int workers) {
  SaliencyPair pair = saliency_maps(cache, net, episode, t, cfg, workers);
  return cfg.head == Head::actor ? std::move(pair.actor) : std::move(pair.critic);
}

SaliencyMap brute_force_map(const RolloutCache& cache, const ActorCritic& net, const Episode& episode, std::size_t t,
                            const SaliencyConfig& cfg, int workers) {
  const FrameSaliency frame(net, cache, episode, t, cfg);
  SaliencyMap map;
  map.scores = Tensor({kFrameSize, kFrameSize});
  map.head = cfg.head;
  map.t = t;
  map.stride = 1;
  const bool actor = cfg.head == Head::actor;
  parallel_for(kFrameSize * kFrameSize, workers, [&](std::size_t idx) {
    const PointScores s = frame.score(idx / kFrameSize, idx % kFrameSize);
    map.scores[idx] = actor ? s.policy : s.value;
  });
  map.grid_scores = map.scores;
  return map;
}

float memory_saliency(const RolloutCache& cache, const ActorCritic& net, const Episode& episode, std::size_t t,
                      double factor, bool perturb_hidden) {
  check_timestep(cache, episode, t);
  if (!(factor > 0.0 && factor <= 1.0)) {
    throw ParameterError("memory perturbation factor must be in (0, 1], got " + std::to_string(factor));
  }
  const float f = static_cast<float>(factor);
  RecurrentState state = cache.states[t];
  state.c = scale(state.c, f);
  if (perturb_hidden) state.h = scale(state.h, f);
  const auto [out, next] = net.step(episode.frames[t].pixels(), state);
  return half_squared_distance(cache.outputs[t].logits, out.logits);
}

std::vector<float> memory_saliency_series(const RolloutCache& cache, const ActorCritic& net, const Episode& episode,
                                          double factor, bool perturb_hidden) {
  std::vector<float> series;
  series.reserve(episode.length());
  for (std::size_t t = 0; t < episode.length(); ++t) {
    series.push_back(memory_saliency(cache, net, episode, t, factor, perturb_hidden));
  }
  return series;
}

SaliencyMap jacobian_saliency(const RolloutCache& cache, const ActorCritic& net, const Episode& episode,
                              std::size_t t, Head head, double epsilon, int workers) {
  check_timestep(cache, episode, t);
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ParameterError("jacobian epsilon must be positive");
  const Tensor& logits = cache.outputs[t].logits;
  std::size_t target = 0;
  for (std::size_t a = 1; a < logits.size(); ++a)
    if (logits[a] > logits[target]) target = a;

  const RecurrentState& state = cache.states[t];
  const Tensor& image = episode.frames[t].pixels();
  const float eps = static_cast<float>(epsilon);
  auto output = [&](const Tensor& x) {
    const auto [out, next] = net.step(x, state);
    return head == Head::actor ? out.logits[target] : out.value;
  };

  SaliencyMap map;
  map.scores = Tensor({kFrameSize, kFrameSize});
  map.head = head;
  map.t = t;
  map.stride = 1;
  parallel_for(image.size(), workers, [&](std::size_t idx) {
    Tensor x = image;
    x[idx] = image[idx] + eps;
    const double up_step = static_cast<double>(x[idx]) - image[idx];
    const float up = output(x);
    x[idx] = image[idx] - eps;
    const double down_step = static_cast<double>(image[idx]) - x[idx];
    const float down = output(x);
    map.scores[idx] = static_cast<float>(std::abs((static_cast<double>(up) - down) / (up_step + down_step)));
  });
  map.grid_scores = map.scores;
  return map;
}

void export_map(const SaliencyMap& map, const SaliencyConfig& cfg, const fs::path& stem, const std::string& method) {
  fs::path bin = stem, meta = stem;
  bin += ".bin";
  meta += ".json";
  write_f32_le(bin, map.scores.values());
  json sidecar = {{"shape", map.scores.shape()},
                  {"dtype", "f32"},
                  {"byte_order", "little"},
                  {"head", head_name(map.head)},
                  {"t", map.t},
                  {"method", method},
                  {"stride", map.stride},
                  {"grid_shape", map.grid_scores.shape()},
                  {"blur_sigma", cfg.blur_sigma},
                  {"mask_variance", cfg.mask_variance}};
  std::ofstream out(meta, std::ios::trunc);
  if (!out) throw IoError("cannot write " + meta.string());
  out << sidecar.dump(2) << '\n';
}

SaliencyMap import_map(const fs::path& stem) {
  fs::path bin = stem, meta = stem;
  bin += ".bin";
  meta += ".json";
  std::ifstream in(meta);
  if (!in) throw LoadError("saliency sidecar not found: " + meta.string());
  SaliencyMap map;
  try {
    const json sidecar = json::parse(in);
    const Shape shape = sidecar.at("shape").get<Shape>();
    map.head = parse_head(sidecar.at("head").get<std::string>());
    map.t = sidecar.at("t").get<std::size_t>();
    map.stride = sidecar.value("stride", std::size_t{1});
    map.scores = Tensor(shape, read_f32_le(bin, element_count(shape), "saliency map"));
  } catch (const json::exception& e) {
    throw LoadError("malformed saliency sidecar " + meta.string() + ": " + e.what());
  } catch (const ConfigError& e) {
    throw LoadError("malformed saliency sidecar " + meta.string() + ": " + e.what());
  }
  map.grid_scores = map.scores;
  return map;
}

}  // namespace salient
