#include "semiflex/spectral.hpp"

#include "semiflex/errors.hpp"
#include "semiflex/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace semiflex;

namespace {

GridGeometry chain(int N) {
    return build_grid({DomainKind::box, 1}, N, Classification::chain);
}

Eigen::VectorXd sample_unknowns(const GridGeometry& g, double freq) {
    Eigen::VectorXd f(g.n_unknowns);
    for (int u = 0; u < g.n_unknowns; ++u) {
        const Coord& k = g.points[g.point_of_unknown[u]];
        f[u] = std::sqrt(2.0) * std::sin(freq * M_PI * k[0] * g.h);
    }
    return f;
}

} // namespace

TEST_CASE("chain laplacian eigenvalues match the closed form") {
    const int N = 64;
    const GridGeometry g = chain(N);
    const SparseOperator op = model_precision(g, 0.0);
    const SpectrumResult sp = spectrum(op, 10, false);
    for (int j = 1; j <= 10; ++j)
        CHECK(sp.eigenvalues[j - 1] ==
              doctest::Approx(1.0 - std::cos(j * M_PI / N)).epsilon(1e-12));
}

TEST_CASE("smallest mesh eigenvalue approaches pi^2") {
    const int N = 256;
    const GridGeometry g = chain(N);
    const SparseOperator op =
        assemble(make_spec(OpBase::neg_laplacian, 0.0, g.h), g, false);
    const SpectrumResult sp = spectrum(op, 1, false);
    CHECK(sp.eigenvalues[0] == doctest::Approx(9.869481).epsilon(1e-6));
    CHECK(std::abs(sp.eigenvalues[0] - M_PI * M_PI) / (M_PI * M_PI) < 5e-5);
}

TEST_CASE("iterative backend agrees with the closed form past the dense limit") {
    const int N = 2500;
    const GridGeometry g = chain(N);
    REQUIRE(g.n_unknowns > spectrum_dense_limit());
    const SparseOperator op = model_precision(g, 0.0);

    const SpectrumResult sp = spectrum(op, 12, false); // dispatches to Lanczos
    for (int j = 1; j <= 12; ++j)
        CHECK(sp.eigenvalues[j - 1] ==
              doctest::Approx(1.0 - std::cos(j * M_PI / N)).epsilon(1e-9));

    const SpectrumResult sv = lanczos_smallest(op, 40, true, 500);
    // orthonormal basis (h = 1 here, so plain l2)
    const Eigen::MatrixXd gram =
        sv.eigenvectors.transpose() * sv.eigenvectors;
    CHECK((gram - Eigen::MatrixXd::Identity(40, 40)).cwiseAbs().maxCoeff() <=
          1e-8);
    for (int j : {0, 20, 39}) {
        const Eigen::VectorXd v = sv.eigenvectors.col(j);
        const double lam = sv.eigenvalues[j];
        CHECK((op.A * v - lam * v).norm() <= 1e-7 * lam * v.norm());
        CHECK(v[0] > 0.0); // deterministic sign
        CHECK(lam == doctest::Approx(1.0 - std::cos((j + 1) * M_PI / N))
                         .epsilon(1e-9));
    }
}

TEST_CASE("too small an iteration budget reports no convergence") {
    const GridGeometry g = chain(10);
    const SparseOperator op = model_precision(g, 1.0);
    CHECK_THROWS_AS(lanczos_smallest(op, 5, false, 3), NoConvergence);

    const GridGeometry g2 = chain(2500);
    const SparseOperator op2 = model_precision(g2, 0.0);
    CHECK_THROWS_AS(lanczos_smallest(op2, 12, false, 25), NoConvergence);

    CHECK_THROWS_AS(spectrum(op, 0, false), Error);
    CHECK_THROWS_AS(spectrum(op, op.n + 1, false), Error);
}

TEST_CASE("eigenpair series reassembles the covariance") {
    const GridGeometry g = chain(20);
    const SparseOperator op = model_precision(g, 1.5);
    const int n = g.n_unknowns;
    const SpectrumResult sp = spectrum(op, n, true);
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j)
        S.noalias() += (1.0 / sp.eigenvalues[j]) * sp.eigenvectors.col(j) *
                       sp.eigenvectors.col(j).transpose();
    const GreenFunction G(g, 1.5);
    CHECK((S - G.dense()).cwiseAbs().maxCoeff() <=
          1e-8 * G.dense().cwiseAbs().maxCoeff());
}

TEST_CASE("eigenvalues increase strictly with the stiffness") {
    const GridGeometry g = chain(40);
    std::vector<std::vector<double>> spectra;
    for (double kappa : {0.0, 0.5, 1.0, 2.0})
        spectra.push_back(spectrum(model_precision(g, kappa), 10, false).eigenvalues);
    for (size_t c = 1; c < spectra.size(); ++c)
        for (int j = 0; j < 10; ++j)
            CHECK(spectra[c][j] > spectra[c - 1][j]);
}

TEST_CASE("mixed ground state dominates both pure parts") {
    const GridGeometry g = chain(30);
    const double kappa = 2.0;
    const double mu =
        spectrum(model_precision(g, kappa), 1, false).eigenvalues[0];
    const double lam =
        spectrum(assemble(make_spec(OpBase::neg_laplacian, 0.0, 1.0), g, true), 1,
                 false)
            .eigenvalues[0];
    const double nu =
        kappa * spectrum(assemble(make_spec(OpBase::bilaplacian, 0.0, 1.0), g, true),
                         1, false)
                    .eigenvalues[0];
    CHECK(mu >= std::max(lam, nu) - 1e-12);
}

TEST_CASE("eigenvector normalization carries the mesh weight") {
    const GridGeometry g = chain(512);
    const SparseOperator op =
        assemble(make_spec(OpBase::neg_laplacian, 0.0, g.h), g, false);
    const SpectrumResult sp = spectrum(op, 8, true);
    const Eigen::MatrixXd gram =
        g.h * sp.eigenvectors.transpose() * sp.eigenvectors;
    CHECK((gram - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("negative norm reproduces 1/pi^2 for the first sine") {
    const GridGeometry g = chain(512);
    const SparseOperator op =
        assemble(make_spec(OpBase::neg_laplacian, 0.0, g.h), g, false);
    const SpectrumResult sp = spectrum(op, 5, true);
    const Eigen::VectorXd f = sample_unknowns(g, 1.0);
    const double nn = negative_norm(f, sp, 1.0, sp.order);
    const double target = 1.0 / (M_PI * M_PI);
    CHECK(std::abs(nn - target) / target < 0.005);

    // a mode with no overlap contributes nothing
    const SpectrumResult sp1 = spectrum(op, 1, true);
    const Eigen::VectorXd f2 = sample_unknowns(g, 2.0);
    CHECK(negative_norm(f2, sp1, 1.0, sp1.order) <= 1e-20);
}

TEST_CASE("fourth-order negative norm approaches the clamped-end value") {
    const GridGeometry g = chain(512);
    const SparseOperator op =
        assemble(make_spec(OpBase::bilaplacian, 0.0, g.h), g, false);
    const SpectrumResult sp = spectrum(op, 60, true);
    const Eigen::VectorXd f = sample_unknowns(g, 1.0);
    const double nn = negative_norm(f, sp, 2.0, sp.order);
    const double p4 = std::pow(M_PI, 4), p6 = std::pow(M_PI, 6);
    const double target = 1.0 / p4 - 8.0 / p6;
    const double rel = std::abs(nn - target) / target;
    CHECK(rel < 0.010);
    CHECK(rel > 0.006); // stable discretization bias at h = 1/512
}

TEST_CASE("power-law eigenvalue counting in d=1") {
    const GridGeometry g = build_grid({DomainKind::box, 1}, 1024);
    REQUIRE(g.n_unknowns == 1021);
    const double h = g.h;

    const SparseOperator neg =
        assemble(make_spec(OpBase::neg_laplacian, 0.0, h), g, false);
    const WeylCheck wn = weyl_check(spectrum(neg, 40, false), 1, 2);
    CHECK(wn.trusted == 32);
    CHECK(wn.expected == doctest::Approx(2.0));
    CHECK(wn.slope == doctest::Approx(1.9998).epsilon(1e-3));
    CHECK(std::abs(wn.slope - 2.0) <= 0.3);

    const SparseOperator bil =
        assemble(make_spec(OpBase::bilaplacian, 0.0, h), g, false);
    const WeylCheck wb = weyl_check(spectrum(bil, 40, false), 1, 4);
    CHECK(wb.trusted == 32);
    CHECK(wb.slope == doctest::Approx(3.6714).epsilon(1e-3));
    CHECK(std::abs(wb.slope - 4.0) <= 0.5);

    const SparseOperator mix =
        assemble(make_spec(OpBase::mixed, 1.0, h), g, false);
    const WeylCheck wm = weyl_check(spectrum(mix, 40, false), 1, 4);
    CHECK(wm.trusted == 32);
    CHECK(wm.slope == doctest::Approx(3.6669).epsilon(1e-3));
    CHECK(std::abs(wm.slope - 4.0) <= 0.5);
}

TEST_CASE("a 1/64 mesh in d=2 has too few trusted modes") {
    const GridGeometry g = build_grid({DomainKind::box, 2}, 64);
    const SparseOperator op =
        assemble(make_spec(OpBase::neg_laplacian, 0.0, g.h), g, false);
    const SpectrumResult sp = lanczos_smallest(op, 35, false, 600);
    CHECK_THROWS_AS(weyl_check(sp, 2, 2), InsufficientTrustedWindow);
}

TEST_CASE("series field is the deterministic mode sum") {
    const GridGeometry g = chain(24);
    const SparseOperator op = model_precision(g, 0.5);
    const SpectrumResult sp = spectrum(op, 10, true);
    const SeriesField sf = series_field(sp, 77, 6);
    REQUIRE(sf.J == 6);
    Eigen::VectorXd want = Eigen::VectorXd::Zero(g.n_unknowns);
    for (int j = 0; j < 6; ++j) {
        CHECK(sf.xi[j] == counter_normal(77, 0, j));
        want += std::pow(sp.eigenvalues[j], -0.5) * sf.xi[j] *
                sp.eigenvectors.col(j);
    }
    CHECK((sf.u - want).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(series_field(sp, 77, 0), Error);
    CHECK_THROWS_AS(series_field(sp, 77, 11), Error);
    const SpectrumResult vals = spectrum(op, 10, false);
    CHECK_THROWS_AS(series_field(vals, 77, 3), Error);

    Eigen::VectorXd bad(3);
    bad.setZero();
    CHECK_THROWS_AS(negative_norm(bad, sp, 1.0, sp.order), Error);
    CHECK_THROWS_AS(negative_norm(sf.u, vals, 1.0, vals.order), Error);
}

TEST_CASE("dyadic tail blocks of the mode series at least halve") {
    const GridGeometry g = chain(256);
    const SparseOperator op = model_precision(g, 0.0);
    const SpectrumResult sp = spectrum(op, 128, false);
    const std::vector<double> blocks = series_tail_sums(sp, 2.0, 4, 128);
    REQUIRE(blocks.size() >= 7);
    for (size_t b = 1; b + 1 < blocks.size(); ++b)
        CHECK(blocks[b] <= 0.5 * blocks[b - 1]);
    CHECK_THROWS_AS(series_tail_sums(sp, 2.0, 4, 129), Error);
}
