#pragma once

#include "semiflex/dirichlet.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace semiflex {

// Low part of the spectrum of an assembled operator. Eigenvalues ascend;
// eigenvectors (when requested) are orthonormal in the h-weighted grid inner
// product of the operator's mesh width, with a deterministic sign: first
// component of magnitude > 1e-9 is positive.
struct SpectrumResult {
    std::string op_tag;
    double h = 0.0;
    int order = 2; // 2 for -Δ, 4 for Δ² and the mixed operator
    std::vector<double> eigenvalues;
    Eigen::MatrixXd eigenvectors; // n x k, empty when values-only
    const GridGeometry* g = nullptr;
};

// Dense solve for n <= dense_limit, otherwise shift-invert Lanczos with full
// reorthogonalization on a sparse LDLT of A (NoConvergence if the window
// fails to settle).
SpectrumResult spectrum(const SparseOperator& op, int k, bool want_vectors);

// Iterative backend of spectrum(), exposed with an explicit iteration cap so
// callers can bound the work; max_iter < k is an immediate NoConvergence.
SpectrumResult lanczos_smallest(const SparseOperator& op, int k,
                                bool want_vectors, int max_iter);

int spectrum_dense_limit();

// Least-squares slope of log λ_j vs log j over the trusted window
// { j : λ_j <= (0.1/h)^order }. Requires >= 30 trusted modes, else
// InsufficientTrustedWindow. Expected slope 2m/d.
struct WeylCheck {
    int trusted = 0;
    double slope = 0.0;
    double expected = 0.0; // 2m/d
    double rel_err = 0.0;
};
WeylCheck weyl_check(const SpectrumResult& spec, int d, int order);

// Truncated Karhunen-Loeve field built from the lowest J modes:
// u = Σ_{j<J} λ_j^{-1/2} ξ_j e_j with counter-based ξ.
struct SeriesField {
    Eigen::VectorXd u;     // coefficient vector on the unknowns
    std::vector<double> xi;
    int J = 0;
};
SeriesField series_field(const SpectrumResult& spec, uint64_t seed, int J);

// Partial sums Σ λ^{-1-s/2} ξ² over dyadic blocks; the tail-halving test
// asserts each block at least halves when J doubles.
std::vector<double> series_tail_sums(const SpectrumResult& spec, double s,
                                     uint64_t seed, int J_max);

// Spectral negative norm: ‖f‖² = Σ_j λ_j^{-t} ⟨f, e_j⟩²_h with t = s for
// order-2 operators and t = s/2 for order-4 ones, h-weighted inner product.
double negative_norm(const Eigen::VectorXd& f, const SpectrumResult& spec,
                     double s, int order);

} // namespace semiflex
