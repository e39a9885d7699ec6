#include "semiflex/operators.hpp"

#include "semiflex/errors.hpp"
#include "semiflex/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace semiflex;

namespace {

GridFunction delta_at_origin(int d, double h, int pad = 0) {
    Coord lo{}, hi{};
    for (int i = 0; i < d; ++i) {
        lo[i] = -pad;
        hi[i] = pad;
    }
    GridFunction u(d, h, lo, hi);
    u.ref(Coord{0, 0, 0}) = 1.0;
    return u;
}

GridFunction random_window(int d, double h, const Coord& lo, const Coord& hi,
                           uint64_t seed) {
    GridFunction u(d, h, lo, hi);
    for (size_t i = 0; i < u.v.size(); ++i)
        u.v[i] = counter_normal(seed, 0, i);
    return u;
}

} // namespace

TEST_CASE("forward and backward differences on a quadratic are exact") {
    const double h = 0.5;
    GridFunction u(1, h, {-4, 0, 0}, {4, 0, 0});
    for (int x = -4; x <= 4; ++x) u.ref({x, 0, 0}) = (x * h) * (x * h);

    const GridFunction fw = forward_diff(u, 0);
    const GridFunction bw = backward_diff(u, 0);
    // interior values, away from the window edge where the zero extension bites
    for (int x = -3; x <= 3; ++x) {
        const double xx = x * h;
        CHECK(fw.at({x, 0, 0}) == doctest::Approx(2 * xx + h).epsilon(1e-12));
        CHECK(bw.at({x, 0, 0}) == doctest::Approx(2 * xx - h).epsilon(1e-12));
    }
    // the forward difference extends one site below the window
    CHECK(fw.lo[0] == -5);
    CHECK(fw.at({-5, 0, 0}) == doctest::Approx(u.at({-4, 0, 0}) / h));
    CHECK(bw.hi[0] == 5);
}

TEST_CASE("summation by parts carries the minus sign") {
    for (int d : {1, 2}) {
        Coord lo_u{}, hi_u{}, lo_v{}, hi_v{};
        for (int i = 0; i < d; ++i) {
            lo_u[i] = -3;
            hi_u[i] = 4;
            lo_v[i] = -5;
            hi_v[i] = 2;
        }
        const GridFunction u = random_window(d, 0.5, lo_u, hi_u, 11 + d);
        const GridFunction v = random_window(d, 0.5, lo_v, hi_v, 97 + d);
        for (int axis = 0; axis < d; ++axis) {
            const double lhs = grid_inner(forward_diff(u, axis), v);
            const double rhs = -grid_inner(backward_diff(v, axis), u);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
    }
}

TEST_CASE("bilaplacian of the unit mass is the 1,-4,6,-4,1 stencil") {
    const GridFunction u = delta_at_origin(1, 1.0);
    const GridFunction b = bilaplacian_h(u, false);
    CHECK(b.at({0, 0, 0}) == doctest::Approx(6.0));
    CHECK(b.at({1, 0, 0}) == doctest::Approx(-4.0));
    CHECK(b.at({-1, 0, 0}) == doctest::Approx(-4.0));
    CHECK(b.at({2, 0, 0}) == doctest::Approx(1.0));
    CHECK(b.at({-2, 0, 0}) == doctest::Approx(1.0));
    CHECK(b.at({3, 0, 0}) == 0.0);
}

TEST_CASE("normalized laplacian divides by 2d") {
    const GridFunction u2 = delta_at_origin(2, 1.0);
    const GridFunction ln = laplacian_h(u2, true);
    const GridFunction lu = laplacian_h(u2, false);
    CHECK(lu.at({0, 0, 0}) == doctest::Approx(-4.0));
    CHECK(ln.at({0, 0, 0}) == doctest::Approx(-1.0));
    CHECK(ln.at({1, 0, 0}) == doctest::Approx(0.25));
}

TEST_CASE("operator consistency: -Δ_h sin(πx) -> π² sin(πx) at rate >= 1.9") {
    std::vector<double> hs = {1.0 / 8, 1.0 / 16, 1.0 / 32};
    std::vector<double> errs;
    for (double h : hs) {
        const int N = (int)std::lround(1.0 / h);
        GridFunction u(1, h, {0, 0, 0}, {N, 0, 0});
        for (int x = 0; x <= N; ++x) u.ref({x, 0, 0}) = std::sin(M_PI * x * h);
        const GridFunction Lu = laplacian_h(u, false);
        double acc = 0.0;
        for (int x = 1; x < N; ++x) {
            const double e = -Lu.at({x, 0, 0}) - M_PI * M_PI * u.at({x, 0, 0});
            acc += e * e;
        }
        errs.push_back(std::sqrt(h * acc));
    }
    const double slope01 = std::log(errs[0] / errs[1]) / std::log(2.0);
    const double slope12 = std::log(errs[1] / errs[2]) / std::log(2.0);
    CHECK(slope01 >= 1.9);
    CHECK(slope12 >= 1.9);
}

TEST_CASE("grid norm of the unit mass is h^{d/2}") {
    const GridFunction u = delta_at_origin(2, 0.25);
    const double n = grid_norm(u);
    CHECK(n * n == doctest::Approx(1.0 / 16).epsilon(1e-14));
}

TEST_CASE("stencil extraction is symmetric and matches the operators") {
    const MixedOperatorSpec neg = make_spec(OpBase::neg_laplacian, 0.0, 1.0);
    const Stencil s = stencil_of(neg, 2, false);
    CHECK(s.entries.size() == 5);
    double center = 0.0, edge = 0.0;
    for (const auto& [off, c] : s.entries) {
        if (off == Coord{0, 0, 0}) center = c;
        if (off == Coord{1, 0, 0}) edge = c;
    }
    CHECK(center == doctest::Approx(4.0));
    CHECK(edge == doctest::Approx(-1.0));

    const MixedOperatorSpec mixed = make_spec(OpBase::mixed, 0.5, 0.5);
    const Stencil sm = stencil_of(mixed, 2, false);
    for (const auto& [off, c] : sm.entries) {
        Coord neg_off = off;
        for (int i = 0; i < 3; ++i) neg_off[i] = -neg_off[i];
        double cneg = 0.0;
        bool found = false;
        for (const auto& [o2, c2] : sm.entries)
            if (o2 == neg_off) {
                cneg = c2;
                found = true;
            }
        CHECK(found);
        CHECK(c == cneg); // bitwise: assembly relies on it
    }
}

TEST_CASE("characteristic polynomial closed forms in d=1") {
    const MixedOperatorSpec neg = make_spec(OpBase::neg_laplacian, 0.0, 0.25);
    const MixedOperatorSpec bil = make_spec(OpBase::bilaplacian, 0.0, 0.25);
    for (double th : {0.3, 1.1, 2.0, 3.0, -2.4}) {
        const double pn = char_poly(neg, {th}, false);
        const double pb = char_poly(bil, {th}, false);
        CHECK(pn == doctest::Approx(2.0 * (1.0 - std::cos(th))).epsilon(1e-12));
        const double q = 2.0 * (1.0 - std::cos(th));
        CHECK(pb == doctest::Approx(q * q).epsilon(1e-12));
    }
    // d=2 additivity over axes for the laplacian
    const double p2 = char_poly(neg, {0.7, 2.1}, false);
    CHECK(p2 == doctest::Approx(2.0 * (2.0 - std::cos(0.7) - std::cos(2.1)))
                    .epsilon(1e-12));
}

TEST_CASE("Plancherel identity for the symbol") {
    // <L_h u, u>_{h,grid} = h^{d-2m} (2π)^{-d} ∫ p(θ) |û(θ)|² dθ
    auto check_plancherel = [](const MixedOperatorSpec& spec, int d,
                               const GridFunction& u) {
        const GridFunction Lu = apply_Lh(spec, u, false);
        const double lhs = grid_inner(Lu, u);

        const int M = 64;
        double integral = 0.0;
        std::vector<double> theta(d, 0.0);
        const double step = 2.0 * M_PI / M;
        const int reps = (d == 1) ? M : M * M;
        for (int idx = 0; idx < reps; ++idx) {
            int rem = idx;
            for (int i = 0; i < d; ++i) {
                theta[i] = -M_PI + step * (rem % M);
                rem /= M;
            }
            double re = 0.0, im = 0.0;
            u.for_each([&](const Coord& k, double val) {
                double phase = 0.0;
                for (int i = 0; i < d; ++i) phase += k[i] * theta[i];
                re += val * std::cos(phase);
                im -= val * std::sin(phase);
            });
            integral += char_poly(spec, theta, false) * (re * re + im * im);
        }
        integral *= std::pow(step, d); // trapezoid == rectangle on the torus
        const double rhs = std::pow(spec.h, d - 2 * spec.m) * integral /
                           std::pow(2.0 * M_PI, d);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
    };

    const GridFunction u1 = random_window(1, 0.25, {0, 0, 0}, {5, 0, 0}, 3);
    check_plancherel(make_spec(OpBase::mixed, 0.7, 0.25), 1, u1);
    check_plancherel(make_spec(OpBase::neg_laplacian, 0.0, 0.25), 1, u1);

    const GridFunction u2 = random_window(2, 0.5, {0, 0, 0}, {3, 3, 0}, 5);
    check_plancherel(make_spec(OpBase::bilaplacian, 0.2, 0.5), 2, u2);
}

TEST_CASE("symbol coercivity on 10^4 sampled frequencies") {
    for (int d : {1, 2}) {
        for (double rho : {0.0, 0.5}) {
            const MixedOperatorSpec neg = make_spec(OpBase::neg_laplacian, rho, 1.0);
            const MixedOperatorSpec bil = make_spec(OpBase::bilaplacian, rho, 1.0);
            std::vector<double> theta(d);
            for (int s = 0; s < 10000; ++s) {
                for (int i = 0; i < d; ++i)
                    theta[i] = -M_PI + 2.0 * M_PI * counter_uniform(42, i, s);
                double lower1 = 0.0, lower2 = 0.0;
                for (int i = 0; i < d; ++i) {
                    const double c = 1.0 - std::cos(theta[i]);
                    lower1 += 2.0 * c;
                    lower2 += 4.0 * c * c;
                }
                CHECK(char_poly(neg, theta, false) >= lower1 - 1e-12);
                CHECK(char_poly(bil, theta, false) >= lower2 - 1e-12);
            }
        }
    }
}

TEST_CASE("asymmetric stencils are rejected") {
    Stencil s;
    s.entries = {{Coord{0, 0, 0}, 2.0}, {Coord{1, 0, 0}, -1.0}};
    CHECK_THROWS_AS(char_poly_from_stencil(s, 1.0, {1.0}), NonSymmetricStencil);
    // symmetric table passes
    s.entries.push_back({Coord{-1, 0, 0}, -1.0});
    CHECK(char_poly_from_stencil(s, 1.0, {1.0}) ==
          doctest::Approx(2.0 * (1.0 - std::cos(1.0))));
}

TEST_CASE("L_{h,2} truncation: full rows on R*, h²-scaled rows on B*") {
    const GridGeometry g = build_grid({DomainKind::box, 1}, 8);
    const MixedOperatorSpec spec = make_spec(OpBase::bilaplacian, 0.0, g.h);
    GridFunction u = GridFunction::zeros_like(g);
    for (size_t i = 0; i < u.v.size(); ++i) u.v[i] = counter_normal(7, 0, i);

    const GridFunction full = apply_Lh(spec, u, false);
    const GridFunction trunc = apply_Lh2(spec, u, g, false);
    const double h2 = g.h * g.h;
    for (const Coord& k : g.points) {
        switch (g.classify(k)) {
            case PointClass::Rstar:
                CHECK(trunc.at(k) == doctest::Approx(full.at(k)).epsilon(1e-14));
                break;
            case PointClass::Bstar:
                CHECK(trunc.at(k) ==
                      doctest::Approx(h2 * full.at(k)).epsilon(1e-14));
                break;
            default:
                CHECK(trunc.at(k) == 0.0);
        }
    }
}

TEST_CASE("Sobolev and weighted norms on hand-checked masses") {
    const GridFunction u = delta_at_origin(1, 1.0);
    CHECK(sobolev_norm_m(u, 0) == doctest::Approx(1.0));
    CHECK(sobolev_norm_m(u, 1) == doctest::Approx(std::sqrt(3.0)));
    CHECK(sobolev_norm_m(u, 2) == doctest::Approx(3.0));

    const GridGeometry g = build_grid({DomainKind::box, 1}, 8);
    GridFunction w = GridFunction::zeros_like(g);
    w.ref({4, 0, 0}) = 1.0; // R*
    w.ref({2, 0, 0}) = 1.0; // B*
    const double expect = (1.0 + std::pow(8.0, 4)) / 8.0;
    const double got = weighted_norm_m(w, 2, g);
    CHECK(got * got == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("the operator's mesh width governs the difference scaling") {
    GridFunction u = delta_at_origin(1, 0.25);
    const MixedOperatorSpec spec = make_spec(OpBase::neg_laplacian, 0.0, 1.0);
    const GridFunction r = apply_Lh(spec, u, false);
    CHECK(r.h == 1.0);
    CHECK(r.at({0, 0, 0}) == doctest::Approx(2.0));
}
