#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace salient {

using Shape = std::vector<std::size_t>;

std::size_t element_count(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Dense row-major float32 tensor.
///
/// The element count always equals the product of the shape. Kernels treat
/// tensors as values: they take const references and return fresh results.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, float fill = 0.0f);
  Tensor(Shape shape, std::vector<float> data);

  static Tensor zeros(Shape shape) { return Tensor(std::move(shape), 0.0f); }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::span<float> values() noexcept { return data_; }
  std::span<const float> values() const noexcept { return data_; }
  float* data() noexcept { return data_.data(); }
  const float* data() const noexcept { return data_.data(); }

  float& operator[](std::size_t i) noexcept { return data_[i]; }
  float operator[](std::size_t i) const noexcept { return data_[i]; }

  // Row-major 2-D / 3-D accessors; no bounds checks.
  float& at(std::size_t r, std::size_t c) noexcept { return data_[r * shape_[1] + c]; }
  float at(std::size_t r, std::size_t c) const noexcept { return data_[r * shape_[1] + c]; }
  float& at(std::size_t a, std::size_t r, std::size_t c) noexcept {
    return data_[(a * shape_[1] + r) * shape_[2] + c];
  }
  float at(std::size_t a, std::size_t r, std::size_t c) const noexcept {
    return data_[(a * shape_[1] + r) * shape_[2] + c];
  }

  /// Same data, new shape with identical element count.
  Tensor reshaped(Shape shape) const;

  bool all_finite() const noexcept;
  float max_value() const;
  float min_value() const;
  double sum() const noexcept;

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  Shape shape_;
  std::vector<float> data_;
};

/// Throws ShapeError naming `what` when the shapes differ.
void require_shape(const Tensor& t, const Shape& expected, const std::string& what);

}  // namespace salient
