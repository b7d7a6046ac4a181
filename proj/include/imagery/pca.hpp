#pragma once

#include <cstddef>
#include <vector>

#include "imagery/embedding.hpp"

namespace imagery {

struct Pca {
  Vec mean;                     // input dim
  std::vector<Vec> components;  // k orthonormal directions, each input dim
  Vec eigenvalues;              // k values, descending
  std::size_t dim = 0;
};

// Exact eigendecomposition of the sample covariance (1/(n-1)); dual Gram
// route when dim > n. Sign convention: each component's largest-|entry|
// coordinate is made nonnegative. Throws InvalidInput (< 2 rows, mixed
// dims) and DegenerateRank (data rank < k; error carries achieved rank).
Pca pca_fit(const std::vector<Vec>& rows, std::size_t k);

Vec pca_transform(const Pca& pca, const Vec& x);

// fit + transform every row, in input order.
std::vector<Vec> pca_project(const std::vector<Vec>& rows, std::size_t k);

}  // namespace imagery
