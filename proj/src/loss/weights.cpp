#include "augcl/weights.hpp"

#include <cmath>

#include "augcl/error.hpp"

namespace augcl {

void UncertaintyMatrix::validate() const {
  const std::size_t n = values.rows();
  if (n < 2 || values.cols() != n - 1)
    throw ShapeError("uncertainty matrix must be N x (N-1), got " + shape_string(values.shape()));
  for (double u : values.data())
    if (!(u >= 0.0 && u <= 1.0)) throw DomainError("uncertainty " + std::to_string(u) + " outside [0, 1]");
}

Tensor WeightMatrix::full() const {
  const std::size_t n = values.rows();
  Tensor f({n, n});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) f(i, j) = i == j ? 1.0 : at(i, j);
  return f;
}

void WeightMatrix::validate() const {
  const std::size_t n = values.rows();
  if (n < 2 || values.cols() != n - 1)
    throw ShapeError("weight matrix must be N x (N-1), got " + shape_string(values.shape()));
  for (double w : values.data())
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("weight " + std::to_string(w) + " is negative or non-finite");
}

WeightMatrix WeightMatrix::uniform(std::size_t n) {
  if (n < 2) throw ContractError("uniform weights need at least 2 anchors");
  return WeightMatrix{Tensor({n, n - 1}, 1.0), 1.0};
}

}  // namespace augcl
