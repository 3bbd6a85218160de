#include "sdtl/tensor.hpp"

#include <cmath>
#include <utility>

#include "sdtl/error.hpp"

namespace sdtl {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_to_str(const std::vector<std::size_t>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) s += "x";
    s += std::to_string(shape[i]);
  }
  s += "]";
  return s;
}

}  // namespace

Tensor Tensor::zeros(std::vector<std::size_t> shape) {
  std::vector<double> data(shape_product(shape), 0.0);
  return from_data(std::move(shape), std::move(data));
}

Tensor Tensor::from_data(std::vector<std::size_t> shape, std::vector<double> data) {
  if (shape.empty()) {
    throw ShapeError("tensor: shape must have at least one dimension");
  }
  for (std::size_t d : shape) {
    if (d == 0) {
      throw ShapeError("tensor: dimension sizes must be positive, got " + shape_to_str(shape));
    }
  }
  const std::size_t n = shape_product(shape);
  if (data.size() != n) {
    throw ShapeError("tensor: shape " + shape_to_str(shape) + " expects " + std::to_string(n) +
                     " values, got " + std::to_string(data.size()));
  }
  Tensor t;
  t.shape_ = std::move(shape);
  t.data_ = std::move(data);
  return t;
}

Tensor Tensor::vector(std::vector<double> values) {
  // The size must be read before the move: parameter construction order is
  // unspecified, so passing `values.size()` inline could see the vector
  // already emptied.
  const std::size_t n = values.size();
  return from_data({n}, std::move(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> data) {
  return from_data({rows, cols}, std::move(data));
}

std::size_t Tensor::dim(std::size_t i) const {
  if (i >= shape_.size()) {
    throw ShapeError("tensor: dimension index " + std::to_string(i) + " out of range for " +
                     shape_str());
  }
  return shape_[i];
}

std::size_t Tensor::rows() const {
  if (ndim() != 2) throw ShapeError("tensor: rows() requires a 2-d tensor, got " + shape_str());
  return shape_[0];
}

std::size_t Tensor::cols() const {
  if (ndim() != 2) throw ShapeError("tensor: cols() requires a 2-d tensor, got " + shape_str());
  return shape_[1];
}

double Tensor::operator()(std::size_t r, std::size_t c) const {
  return data_[r * cols() + c];
}

std::string Tensor::shape_str() const { return shape_to_str(shape_); }

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.ndim() != 2 || b.ndim() != 2) {
    throw ShapeError("matmul: expected 2-d tensors, got " + a.shape_str() + " and " +
                     b.shape_str());
  }
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: inner dimensions disagree: " + a.shape_str() + " vs " +
                     b.shape_str());
  }
  const std::size_t m = a.rows();
  const std::size_t k = a.cols();
  const std::size_t n = b.cols();
  std::vector<double> out(m * n, 0.0);
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  for (std::size_t i = 0; i < m; ++i) {
    double* o = out.data() + i * n;
    for (std::size_t kk = 0; kk < k; ++kk) {
      const double av = pa[i * k + kk];
      const double* row = pb + kk * n;
      for (std::size_t j = 0; j < n; ++j) {
        o[j] += av * row[j];
      }
    }
  }
  return Tensor::from_data({m, n}, std::move(out));
}

Tensor transpose(const Tensor& a) {
  if (a.ndim() != 2) {
    throw ShapeError("transpose: expected a 2-d tensor, got " + a.shape_str());
  }
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  std::vector<double> out(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out[j * m + i] = a[i * n + j];
    }
  }
  return Tensor::from_data({n, m}, std::move(out));
}

Tensor elementwise(const Tensor& a, const Tensor& b, EwOp op) {
  if (!a.same_shape(b)) {
    throw ShapeError("elementwise: shapes differ: " + a.shape_str() + " vs " + b.shape_str());
  }
  std::vector<double> out(a.size());
  const auto da = a.data();
  const auto db = b.data();
  switch (op) {
    case EwOp::add:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = da[i] + db[i];
      break;
    case EwOp::sub:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = da[i] - db[i];
      break;
    case EwOp::mul:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = da[i] * db[i];
      break;
  }
  return Tensor::from_data(a.shape(), std::move(out));
}

Tensor scale(const Tensor& a, double c) {
  if (!std::isfinite(c)) {
    throw ParameterError("scale: factor must be finite");
  }
  std::vector<double> out(a.size());
  const auto da = a.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = da[i] * c;
  return Tensor::from_data(a.shape(), std::move(out));
}

Tensor randn(std::vector<std::size_t> shape, Rng& rng, double stddev) {
  if (!(stddev > 0.0) || !std::isfinite(stddev)) {
    throw ParameterError("randn: stddev must be positive and finite");
  }
  std::vector<double> out(shape_product(shape));
  for (double& v : out) v = rng.next_gaussian() * stddev;
  return Tensor::from_data(std::move(shape), std::move(out));
}

}  // namespace sdtl
