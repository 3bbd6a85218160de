#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sdtl/rng.hpp"

namespace sdtl {

// Dense row-major array of doubles. Tensors are immutable values: every
// operation returns a fresh tensor, so they can be copied, snapshotted and
// shared across threads freely.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::vector<std::size_t> shape);
  static Tensor from_data(std::vector<std::size_t> shape, std::vector<double> data);
  static Tensor vector(std::vector<double> values);
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t ndim() const { return shape_.size(); }
  std::size_t dim(std::size_t i) const;
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  // 2-d accessors.
  std::size_t rows() const;
  std::size_t cols() const;
  double operator()(std::size_t r, std::size_t c) const;

  double operator[](std::size_t i) const { return data_[i]; }
  std::span<const double> data() const { return data_; }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  std::string shape_str() const;  // e.g. "[2x3]"

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

enum class EwOp { add, sub, mul };
Tensor elementwise(const Tensor& a, const Tensor& b, EwOp op);
inline Tensor add(const Tensor& a, const Tensor& b) { return elementwise(a, b, EwOp::add); }
inline Tensor sub(const Tensor& a, const Tensor& b) { return elementwise(a, b, EwOp::sub); }
inline Tensor mul(const Tensor& a, const Tensor& b) { return elementwise(a, b, EwOp::mul); }

Tensor scale(const Tensor& a, double c);

// I.i.d. zero-mean Gaussian entries with the given stddev.
Tensor randn(std::vector<std::size_t> shape, Rng& rng, double stddev);

}  // namespace sdtl
