#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "ontograph/tensor.hpp"

namespace ontograph {

struct EigenResult {
    std::vector<double> values;  // ascending
    Tensor vectors;              // n x n, column j pairs with values[j]
};

/// Eigendecomposition of a small dense symmetric matrix via cyclic Jacobi
/// rotations. Deterministic; meant for pattern-graph Laplacians (n <= ~32).
EigenResult sym_eigen(const Tensor& a);

/// Laplacian positional encodings for a simple undirected graph on n nodes
/// given by its edge list: the eigenvectors of L = D - A for the k smallest
/// non-trivial eigenvalues, as an n x k matrix. Columns beyond the available
/// n - 1 non-trivial eigenvectors are zero. Each column's sign is fixed so
/// its largest-magnitude entry is positive.
Tensor laplacian_pe(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                    std::size_t k);

} // namespace ontograph
