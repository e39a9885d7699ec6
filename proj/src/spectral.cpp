#include "semiflex/spectral.hpp"

#include "semiflex/errors.hpp"
#include "semiflex/rng.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

namespace semiflex {

namespace {

constexpr uint64_t kStartSeed = 0xC0FFEE;

int op_order(const MixedOperatorSpec& spec) { return spec.m == 1 ? 2 : 4; }

// Deterministic orientation: first component of magnitude > 1e-9 positive.
void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > 1e-9) {
            if (v[i] < 0.0) v = -v;
            return;
        }
    }
}

SpectrumResult make_result(const SparseOperator& op) {
    SpectrumResult r;
    r.op_tag = op_name(op.spec.base);
    r.h = op.spec.h;
    r.order = op_order(op.spec);
    r.g = op.g;
    return r;
}

// Eigenvectors are stored orthonormal in <u,v>_{h,grid} = h^d Σ u v, so the
// l2-unit columns of the solver are scaled by h^{-d/2}.
double vector_scale(const SparseOperator& op) {
    const int d = op.g ? op.g->d() : 1;
    return std::pow(op.spec.h, -0.5 * d);
}

SpectrumResult dense_spectrum(const SparseOperator& op, int k, bool want_vectors) {
    Eigen::MatrixXd A(op.A);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        A, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NoConvergence("dense eigensolver did not converge");
    SpectrumResult r = make_result(op);
    r.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + k);
    if (want_vectors) {
        r.eigenvectors = es.eigenvectors().leftCols(k) * vector_scale(op);
        for (int j = 0; j < k; ++j) fix_sign(r.eigenvectors.col(j));
    }
    return r;
}

} // namespace

int spectrum_dense_limit() { return 2200; }

SpectrumResult lanczos_smallest(const SparseOperator& op, int k,
                                bool want_vectors, int max_iter) {
    const int n = op.n;
    if (k < 1 || k > n) throw Error("spectrum: k out of range");
    if (max_iter < k)
        throw NoConvergence("lanczos: iteration budget below k");
    const int m_max = std::min(n, max_iter);

    // Shift-invert at 0: Lanczos on A^{-1} through the sparse factor, so the
    // smallest eigenvalues of A are the dominant, fast-converging end.
    Factorization fact(op);

    Eigen::MatrixXd V(n, m_max);
    Eigen::VectorXd alpha(m_max), beta(m_max);

    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = counter_normal(kStartSeed, 0, i);
    v.normalize();
    V.col(0) = v;

    Eigen::VectorXd theta;        // converged Ritz values of A^{-1}, descending
    Eigen::MatrixXd tvecs;        // eigenvectors of the tridiagonal section
    int m = 0;
    bool converged = false;
    uint64_t restarts = 0;

    while (m < m_max && !converged) {
        Eigen::VectorXd w = fact.solve_once(V.col(m));
        if (m > 0) w -= beta[m - 1] * V.col(m - 1);
        alpha[m] = V.col(m).dot(w);
        w -= alpha[m] * V.col(m);

        // Full reorthogonalization; a second pass only when cancellation ate
        // most of the vector (the usual twice-is-enough rule).
        const auto basis = V.leftCols(m + 1);
        const double pre = w.norm();
        w -= basis * (basis.transpose() * w);
        if (w.norm() < 0.7071 * pre) w -= basis * (basis.transpose() * w);

        beta[m] = w.norm();
        ++m;

        if (m >= k + 10 && (m % 10 == 0 || m == m_max)) {
            // Ritz extraction from the tridiagonal section; the largest k
            // values of A^{-1} carry residual bound |beta_m * s_last|.
            Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
            for (int i = 0; i < m; ++i) {
                T(i, i) = alpha[i];
                if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
            if (es.info() == Eigen::Success) {
                bool ok = true;
                for (int j = 0; j < k; ++j) {
                    const int col = m - 1 - j;
                    const double th = es.eigenvalues()[col];
                    const double res =
                        std::abs(beta[m - 1] * es.eigenvectors()(m - 1, col));
                    if (res > std::max(1e-12, 1e-10 * std::abs(th))) {
                        ok = false;
                        break;
                    }
                }
                if (ok) {
                    theta.resize(k);
                    tvecs.resize(m, k);
                    for (int j = 0; j < k; ++j) {
                        theta[j] = es.eigenvalues()[m - 1 - j];
                        tvecs.col(j) = es.eigenvectors().col(m - 1 - j);
                    }
                    converged = true;
                }
            }
        }
        if (converged || m == m_max) break;

        if (beta[m - 1] < 1e-13 * std::max(1.0, std::abs(alpha[m - 1]))) {
            // Invariant subspace: continue with a fresh orthogonalized vector.
            for (int i = 0; i < n; ++i)
                w[i] = counter_normal(kStartSeed, 1 + (++restarts), i);
            w -= basis * (basis.transpose() * w);
            w -= basis * (basis.transpose() * w);
            beta[m - 1] = 0.0;
            const double nw = w.norm();
            if (nw < 1e-12) throw NoConvergence("lanczos: basis exhausted");
            V.col(m) = w / nw;
        } else {
            V.col(m) = w / beta[m - 1];
        }
    }

    if (!converged)
        throw NoConvergence("lanczos: top-" + std::to_string(k) +
                            " window failed to settle in " +
                            std::to_string(m) + " iterations");

    SpectrumResult r = make_result(op);
    r.eigenvalues.resize(k);
    for (int j = 0; j < k; ++j) r.eigenvalues[j] = 1.0 / theta[j];
    if (want_vectors) {
        const double scale = vector_scale(op);
        r.eigenvectors = V.leftCols(m) * tvecs;
        for (int j = 0; j < k; ++j) {
            r.eigenvectors.col(j) *= scale / r.eigenvectors.col(j).norm();
            fix_sign(r.eigenvectors.col(j));
        }
    }
    return r;
}

SpectrumResult spectrum(const SparseOperator& op, int k, bool want_vectors) {
    if (k < 1 || k > op.n) throw Error("spectrum: k out of range");
    if (op.n <= spectrum_dense_limit()) return dense_spectrum(op, k, want_vectors);
    const int budget = std::min(op.n, std::max(3 * k, k + 120));
    return lanczos_smallest(op, k, want_vectors, budget);
}

WeylCheck weyl_check(const SpectrumResult& spec, int d, int order) {
    const double cutoff = std::pow(0.1 / spec.h, order);
    WeylCheck wc;
    wc.expected = static_cast<double>(order) / d;
    for (double lam : spec.eigenvalues)
        if (lam <= cutoff) ++wc.trusted;
    if (wc.trusted < 30)
        throw InsufficientTrustedWindow(
            "weyl_check: " + std::to_string(wc.trusted) +
            " trusted eigenvalues below cutoff, need 30");
    // Least squares of log lambda_j on log j over the trusted window.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int j = 0; j < wc.trusted; ++j) {
        const double x = std::log(static_cast<double>(j + 1));
        const double y = std::log(spec.eigenvalues[j]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const int nfit = wc.trusted;
    wc.slope = (nfit * sxy - sx * sy) / (nfit * sxx - sx * sx);
    wc.rel_err = std::abs(wc.slope - wc.expected) / wc.expected;
    return wc;
}

SeriesField series_field(const SpectrumResult& spec, uint64_t seed, int J) {
    const int k = static_cast<int>(spec.eigenvalues.size());
    if (J < 1 || J > k) throw Error("series_field: J out of range");
    if (spec.eigenvectors.cols() < J)
        throw Error("series_field: spectrum was computed values-only");
    SeriesField sf;
    sf.J = J;
    sf.xi.resize(J);
    sf.u = Eigen::VectorXd::Zero(spec.eigenvectors.rows());
    for (int j = 0; j < J; ++j) {
        sf.xi[j] = counter_normal(seed, 0, j);
        sf.u += std::pow(spec.eigenvalues[j], -0.5) * sf.xi[j] * spec.eigenvectors.col(j);
    }
    return sf;
}

std::vector<double> series_tail_sums(const SpectrumResult& spec, double s,
                                     uint64_t seed, int J_max) {
    const int k = static_cast<int>(spec.eigenvalues.size());
    if (J_max < 1 || J_max > k) throw Error("series_tail_sums: J_max out of range");
    // Dyadic blocks [1,2), [2,4), ... of the summands lambda^{-1-s/2} xi^2.
    std::vector<double> blocks;
    int lo = 1;
    while (lo <= J_max) {
        const int hi = std::min(2 * lo, J_max + 1);
        double sum = 0.0;
        for (int j = lo; j < hi; ++j) {
            const double xi = counter_normal(seed, 0, j - 1);
            sum += std::pow(spec.eigenvalues[j - 1], -1.0 - 0.5 * s) * xi * xi;
        }
        blocks.push_back(sum);
        lo = hi;
    }
    return blocks;
}

double negative_norm(const Eigen::VectorXd& f, const SpectrumResult& spec,
                     double s, int order) {
    if (spec.eigenvectors.cols() == 0)
        throw Error("negative_norm: spectrum was computed values-only");
    if (f.size() != spec.eigenvectors.rows())
        throw Error("negative_norm: size mismatch");
    const int d = spec.g ? spec.g->d() : 1;
    const double hd = std::pow(spec.h, d);
    const double t = (order == 2) ? s : 0.5 * s;
    double acc = 0.0;
    for (int j = 0; j < spec.eigenvectors.cols(); ++j) {
        const double c = hd * spec.eigenvectors.col(j).dot(f);
        acc += std::pow(spec.eigenvalues[j], -t) * c * c;
    }
    return acc;
}

} // namespace semiflex
