#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace augcl {

using Shape = std::vector<std::size_t>;

// Dense row-major tensor of 64-bit floats.
//
// Most operations treat tensors as matrices: rank 0 is 1x1, rank 1 is a
// single row of length shape[0], rank 2 is shape[0] x shape[1]. Higher ranks
// are only carried through checkpoints.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor scalar(double value);
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  static Tensor zeros(std::size_t rows, std::size_t cols) { return Tensor({rows, cols}); }
  static Tensor identity(std::size_t n);
  static Tensor row_vector(std::vector<double> data);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::size_t rows() const noexcept;
  std::size_t cols() const noexcept;

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols(), cols()}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols(), cols()}; }

  // Scalar value of a size-1 tensor.
  double item() const;

  bool all_finite() const noexcept;

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  Shape shape_;
  std::vector<double> data_;
};

using NamedTensors = std::map<std::string, Tensor>;

std::string shape_string(const Shape& shape);
std::size_t shape_product(const Shape& shape);

// Row-major matrix product a (n x k) times b (k x m).
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

// In-place L2 normalization of every row; zero rows stay zero.
void normalize_rows(Tensor& a);

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> a);
double squared_distance(std::span<const double> a, std::span<const double> b);

}  // namespace augcl
