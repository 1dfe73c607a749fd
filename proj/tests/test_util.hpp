#pragma once

#include <gave/problem.hpp>
#include <gave/rng.hpp>

namespace gave::test {

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, RngStream& rng) {
  Matrix M(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) M(i, j) = rng.normal();
  return M;
}

inline Vector random_vector(Eigen::Index size, RngStream& rng) {
  Vector v(size);
  for (Eigen::Index i = 0; i < size; ++i) v(i) = rng.normal();
  return v;
}

}  // namespace gave::test
