#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "salient/episode.hpp"
#include "salient/network.hpp"
#include "salient/rollout.hpp"
#include "salient/tensor.hpp"

namespace salient {

enum class Head { actor, critic };

Head parse_head(const std::string& name);
std::string head_name(Head head);

struct SaliencyConfig {
  std::size_t patch_stride = 5;
  double blur_sigma = 3.0;
  double mask_variance = 25.0;
  Head head = Head::actor;

  /// Throws ConfigError for a stride outside [1, 80] or non-positive widths.
  void validate() const;
  /// Grid points per axis: ceil(80 / stride).
  std::size_t grid_extent() const;
};

struct SaliencyMap {
  Tensor scores;       // 80 x 80, non-negative
  Tensor grid_scores;  // ceil(80/k) x ceil(80/k) before upsampling
  Head head = Head::actor;
  std::size_t t = 0;
  std::size_t stride = 1;
};

/// Blur perturbation around (row, col): image * (1 - M) + blurred * M with the
/// peak-normalized Gaussian mask M of the given variance.
Tensor perturb_with_blur(const Tensor& image, const Tensor& blurred, std::size_t row, std::size_t col,
                         double mask_variance);

Frame perturb(const Frame& frame, std::size_t row, std::size_t col, const SaliencyConfig& cfg);

/// Both saliency scores from one perturbed forward pass.
struct PointScores {
  float policy = 0.0f;  // 0.5 * ||logits - perturbed logits||^2
  float value = 0.0f;   // 0.5 * (value - perturbed value)^2
};

/// Everything needed to score perturbations of frame t against the cached
/// unperturbed rollout. Holds references; the arguments must outlive it.
class FrameSaliency {
 public:
  FrameSaliency(const ActorCritic& net, const RolloutCache& cache, const Episode& episode, std::size_t t,
                const SaliencyConfig& cfg);

  PointScores score(std::size_t row, std::size_t col) const;
  std::size_t t() const noexcept { return t_; }

 private:
  const ActorCritic& net_;
  const RecurrentState& state_;
  const PolicyOutput& reference_;
  const Tensor& image_;
  Tensor blurred_;
  std::size_t t_;
  double mask_variance_;
};

float policy_saliency_at(const RolloutCache& cache, const ActorCritic& net, const Episode& episode, std::size_t t,
                         std::size_t row, std::size_t col, const SaliencyConfig& cfg);
float value_saliency_at(const RolloutCache& cache, const ActorCritic& net, const Episode& episode, std::size_t t,
                        std::size_t row, std::size_t col, const SaliencyConfig& cfg);

struct SaliencyPair {
  SaliencyMap actor;
  SaliencyMap critic;
};

/// Scores every grid point (row, col) with row, col = 0 mod k, shared by both
/// heads, then upsamples each grid to 80 x 80. Grid cells are spread over
/// `workers` OpenMP threads; results do not depend on the worker count.
SaliencyPair saliency_maps(const RolloutCache& cache, const ActorCritic& net, const Episode& episode,
                           std::size_t t, const SaliencyConfig& cfg, int workers = 1);

/// The head selected by cfg.head.
SaliencyMap saliency_map(const RolloutCache& cache, const ActorCritic& net, const Episode& episode, std::size_t t,
                         const SaliencyConfig& cfg, int workers = 1);

/// Single-threaded reference for saliency_maps: a plain loop over the grid.
SaliencyPair saliency_maps_serial(const RolloutCache& cache, const ActorCritic& net, const Episode& episode,
                                  std::size_t t, const SaliencyConfig& cfg);

/// Stride-1 evaluation at all 6400 pixels, no upsampling.
SaliencyMap brute_force_map(const RolloutCache& cache, const ActorCritic& net, const Episode& episode, std::size_t t,
                            const SaliencyConfig& cfg, int workers = 1);

/// 0.5 * ||delta logits||^2 after shrinking the cell vector entering step t
/// by `factor` (and the hidden vector too when perturb_hidden is set).
float memory_saliency(const RolloutCache& cache, const ActorCritic& net, const Episode& episode, std::size_t t,
                      double factor = 0.99, bool perturb_hidden = false);

std::vector<float> memory_saliency_series(const RolloutCache& cache, const ActorCritic& net, const Episode& episode,
                                          double factor = 0.99, bool perturb_hidden = false);

/// |df/dx| per pixel by central differences, f being the argmax-action logit
/// (actor, action fixed from the unperturbed output) or the value (critic).
SaliencyMap jacobian_saliency(const RolloutCache& cache, const ActorCritic& net, const Episode& episode,
                              std::size_t t, Head head, double epsilon = 1e-3, int workers = 1);

/// `<stem>.bin` (little-endian f32 scores) and `<stem>.json` sidecar.
void export_map(const SaliencyMap& map, const SaliencyConfig& cfg, const std::filesystem::path& stem,
                const std::string& method = "perturbation");
SaliencyMap import_map(const std::filesystem::path& stem);

/// Default worker count: the OpenMP thread budget (1 without OpenMP).
int default_workers();

}  // namespace salient
