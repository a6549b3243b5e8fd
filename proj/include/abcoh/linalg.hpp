#pragma once

#include <cstddef>
#include <vector>

#include "abcoh/group.hpp"

namespace abcoh {

// Eigenvalues of a dense Hermitian matrix (row-major, n x n), ascending.
std::vector<double> hermitian_eigenvalues(const std::vector<cplx>& a,
                                          std::size_t n);

inline double min_eigenvalue(const std::vector<double>& eigs) {
    return eigs.empty() ? 0.0 : eigs.front();
}

// Spectral norm = max |eigenvalue|.
double spectral_norm(const std::vector<double>& eigs);

// Count of eigenvalues with |lambda| > rel_tol * max|lambda|.
std::size_t numerical_rank(const std::vector<double>& eigs, double rel_tol);

// Solves A x = rhs for Hermitian positive semidefinite A (row-major, n x n).
std::vector<cplx> solve_hermitian(const std::vector<cplx>& a, std::size_t n,
                                  const std::vector<cplx>& rhs);

}  // namespace abcoh
