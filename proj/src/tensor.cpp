#include "salient/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "salient/error.hpp"

namespace salient {

std::size_t element_count(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Tensor::Tensor(Shape shape, float fill)
    : shape_(std::move(shape)), data_(element_count(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<float> data) : shape_(std::move(shape)), data_(std::move(data)) {
  if (element_count(shape_) != data_.size()) {
    throw ShapeError("tensor shape " + shape_string(shape_) + " needs " +
                     std::to_string(element_count(shape_)) + " values, got " +
                     std::to_string(data_.size()));
  }
}

Tensor Tensor::reshaped(Shape shape) const {
  if (element_count(shape) != data_.size()) {
    throw ShapeError("cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
  }
  return Tensor(std::move(shape), data_);
}

bool Tensor::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](float v) { return std::isfinite(v); });
}

float Tensor::max_value() const {
  if (data_.empty()) throw ShapeError("max of empty tensor");
  return *std::max_element(data_.begin(), data_.end());
}

float Tensor::min_value() const {
  if (data_.empty()) throw ShapeError("min of empty tensor");
  return *std::min_element(data_.begin(), data_.end());
}

double Tensor::sum() const noexcept {
  double s = 0.0;
  for (float v : data_) s += v;
  return s;
}

void require_shape(const Tensor& t, const Shape& expected, const std::string& what) {
  if (t.shape() != expected) {
    throw ShapeError(what + ": expected shape " + shape_string(expected) + ", found " +
                     shape_string(t.shape()));
  }
}

}  // namespace salient
