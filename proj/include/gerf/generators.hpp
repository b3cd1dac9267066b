#pragma once

#include <cstdint>

#include "gerf/core.hpp"

namespace gerf {

/// m x N matrix with i.i.d. standard normal entries.
DenseMatrix gen_gaussian_matrix(std::size_t m, std::size_t n, std::uint64_t seed);

/// Oversampled DCT dictionary: a_j = cos(2 pi w (j - 1) / F) / sqrt(m), with one
/// shared w ~ U[0,1]^m.
DenseMatrix gen_oversampled_dct(std::size_t m, std::size_t n, double F, std::uint64_t seed);

/// Exactly k nonzeros at uniformly drawn distinct positions, standard normal values.
Vector gen_sparse_signal(std::size_t n, std::size_t k, std::uint64_t seed);

/// Largest |<a_i, a_j>| / (||a_i|| ||a_j||) over distinct columns.
double mutual_coherence(const DenseMatrix& A);

}  // namespace gerf
