#pragma once

#include <cstddef>

#include "augcl/tensor.hpp"

namespace augcl {

// Row i holds one value per negative candidate j != i, in increasing j.
// Column c of row i refers to candidate c when c < i and c + 1 otherwise.
inline std::size_t candidate_of(std::size_t anchor, std::size_t column) {
  return column < anchor ? column : column + 1;
}
inline std::size_t column_of(std::size_t anchor, std::size_t candidate) {
  return candidate < anchor ? candidate : candidate - 1;
}

// N x (N-1) affinity uncertainties u_ij in [0, 1].
struct UncertaintyMatrix {
  Tensor values;

  std::size_t anchors() const noexcept { return values.rows(); }
  double at(std::size_t anchor, std::size_t candidate) const { return values(anchor, column_of(anchor, candidate)); }
  void validate() const;
};

// N x (N-1) hardness weights w_ij = alpha * u_ij.
struct WeightMatrix {
  Tensor values;
  double alpha = 1.0;

  std::size_t anchors() const noexcept { return values.rows(); }
  double at(std::size_t anchor, std::size_t candidate) const { return values(anchor, column_of(anchor, candidate)); }
  // N x N matrix with the weights off the diagonal and 1 on it (the positive).
  Tensor full() const;
  void validate() const;

  static WeightMatrix uniform(std::size_t n);
};

}  // namespace augcl
