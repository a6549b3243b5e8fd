#include "abcoh/linalg.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace abcoh {

std::vector<double> hermitian_eigenvalues(const std::vector<cplx>& a,
                                          std::size_t n) {
    if (a.size() != n * n)
        throw dimension_mismatch_error("matrix storage does not match dimension");
    Eigen::MatrixXcd m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = a[i * n + j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
    std::vector<double> eigs(n);
    for (std::size_t i = 0; i < n; ++i) eigs[i] = solver.eigenvalues()[i];
    std::sort(eigs.begin(), eigs.end());
    return eigs;
}

double spectral_norm(const std::vector<double>& eigs) {
    double m = 0.0;
    for (double e : eigs) m = std::max(m, std::abs(e));
    return m;
}

std::size_t numerical_rank(const std::vector<double>& eigs, double rel_tol) {
    double scale = spectral_norm(eigs);
    if (scale == 0.0) return 0;
    std::size_t r = 0;
    for (double e : eigs)
        if (std::abs(e) > rel_tol * scale) ++r;
    return r;
}

std::vector<cplx> solve_hermitian(const std::vector<cplx>& a, std::size_t n,
                                  const std::vector<cplx>& rhs) {
    if (a.size() != n * n || rhs.size() != n)
        throw dimension_mismatch_error("system shape mismatch");
    Eigen::MatrixXcd m(n, n);
    Eigen::VectorXcd b(n);
    for (std::size_t i = 0; i < n; ++i) {
        b(i) = rhs[i];
        for (std::size_t j = 0; j < n; ++j) m(i, j) = a[i * n + j];
    }
    Eigen::VectorXcd x = m.ldlt().solve(b);
    std::vector<cplx> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = x(i);
    return out;
}

}  // namespace abcoh
