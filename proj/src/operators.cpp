#include "semiflex/operators.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "semiflex/errors.hpp"

namespace semiflex {

GridFunction::GridFunction(int d_, double h_, const Coord& lo_in,
                           const Coord& hi_in, const GridGeometry* g)
    : d(d_), h(h_), lo(lo_in), hi(hi_in), geom(g) {
    for (int i = d; i < 3; ++i) {
        lo[i] = 0;
        hi[i] = 0;
    }
    std::size_t n = 1;
    for (int i = 0; i < d; ++i)
        n *= static_cast<std::size_t>(hi[i] - lo[i] + 1);
    v.assign(n, 0.0);
}

GridFunction GridFunction::zeros_like(const GridGeometry& g, int pad) {
    Coord lo = g.window_lo(), hi = g.window_hi();
    for (int i = 0; i < g.d(); ++i) {
        lo[i] -= pad;
        hi[i] += pad;
    }
    return GridFunction(g.d(), g.h, lo, hi, &g);
}

Coord GridFunction::coord_of(std::size_t idx) const {
    Coord k{0, 0, 0};
    for (int i = d - 1; i >= 0; --i) {
        const std::size_t ext = static_cast<std::size_t>(hi[i] - lo[i] + 1);
        k[i] = lo[i] + static_cast<int>(idx % ext);
        idx /= ext;
    }
    return k;
}

MixedOperatorSpec make_spec(OpBase base, double rho, double h) {
    MixedOperatorSpec s;
    s.base = base;
    s.rho = rho;
    s.h = h;
    s.m = (base == OpBase::neg_laplacian) ? 1 : 2;
    return s;
}

const char* op_name(OpBase base) {
    switch (base) {
        case OpBase::neg_laplacian: return "neg-laplacian";
        case OpBase::bilaplacian: return "bilaplacian";
        default: return "neg-laplacian-plus-bilaplacian";
    }
}

GridFunction forward_diff(const GridFunction& u, int axis) {
    Coord lo = u.lo, hi = u.hi;
    lo[axis] -= 1;
    GridFunction r(u.d, u.h, lo, hi, u.geom);
    const double inv_h = 1.0 / u.h;
    for (std::size_t i = 0; i < r.v.size(); ++i) {
        Coord k = r.coord_of(i);
        Coord kp = k;
        kp[axis] += 1;
        r.v[i] = (u.at(kp) - u.at(k)) * inv_h;
    }
    return r;
}

GridFunction backward_diff(const GridFunction& u, int axis) {
    Coord lo = u.lo, hi = u.hi;
    hi[axis] += 1;
    GridFunction r(u.d, u.h, lo, hi, u.geom);
    const double inv_h = 1.0 / u.h;
    for (std::size_t i = 0; i < r.v.size(); ++i) {
        Coord k = r.coord_of(i);
        Coord km = k;
        km[axis] -= 1;
        r.v[i] = (u.at(k) - u.at(km)) * inv_h;
    }
    return r;
}

GridFunction diff_alpha(const GridFunction& u, const std::array<int, 3>& alpha) {
    GridFunction r = u;
    for (int ax = 0; ax < u.d; ++ax)
        for (int rep = 0; rep < alpha[ax]; ++rep) r = forward_diff(r, ax);
    return r;
}

GridFunction laplacian_h(const GridFunction& u, bool normalized) {
    Coord lo = u.lo, hi = u.hi;
    for (int i = 0; i < u.d; ++i) {
        lo[i] -= 1;
        hi[i] += 1;
    }
    GridFunction r(u.d, u.h, lo, hi, u.geom);
    const double scale =
        (normalized ? 1.0 / (2.0 * u.d) : 1.0) / (u.h * u.h);
    for (std::size_t i = 0; i < r.v.size(); ++i) {
        const Coord k = r.coord_of(i);
        double acc = 0.0;
        const double center = u.at(k);
        for (int ax = 0; ax < u.d; ++ax) {
            Coord kp = k, km = k;
            kp[ax] += 1;
            km[ax] -= 1;
            acc += u.at(kp) + u.at(km) - 2.0 * center;
        }
        r.v[i] = scale * acc;
    }
    return r;
}

GridFunction bilaplacian_h(const GridFunction& u, bool normalized) {
    return laplacian_h(laplacian_h(u, normalized), normalized);
}

GridFunction apply_Lh(const MixedOperatorSpec& spec, const GridFunction& u,
                      bool normalized) {
    // coefficient pair (a, b) on a·(-Δ) + b·(Δ²)
    double a = 1.0, b = spec.rho;
    if (spec.base == OpBase::bilaplacian) {
        a = spec.rho;
        b = 1.0;
    }
    GridFunction w = u;
    w.h = spec.h; // the operator's mesh width governs the difference scaling
    const GridFunction lap = laplacian_h(w, normalized);
    const GridFunction bil = laplacian_h(lap, normalized);
    GridFunction r(u.d, spec.h, bil.lo, bil.hi, u.geom);
    for (std::size_t i = 0; i < r.v.size(); ++i) {
        const Coord k = r.coord_of(i);
        r.v[i] = -a * lap.at(k) + b * bil.at(k);
    }
    return r;
}

GridFunction apply_Lh2(const MixedOperatorSpec& spec, const GridFunction& u,
                       const GridGeometry& g, bool normalized) {
    const GridFunction Lu = apply_Lh(spec, u, normalized);
    GridFunction r(u.d, spec.h, Lu.lo, Lu.hi, &g);
    const double h2 = spec.h * spec.h;
    for (std::size_t i = 0; i < r.v.size(); ++i) {
        const Coord k = r.coord_of(i);
        switch (g.classify(k)) {
            case PointClass::Rstar: r.v[i] = Lu.v[i]; break;
            case PointClass::Bstar: r.v[i] = h2 * Lu.v[i]; break;
            default: r.v[i] = 0.0; break;
        }
    }
    return r;
}

double grid_inner(const GridFunction& u, const GridFunction& v) {
    double acc = 0.0;
    for (std::size_t i = 0; i < u.v.size(); ++i) {
        if (u.v[i] == 0.0) continue;
        acc += u.v[i] * v.at(u.coord_of(i));
    }
    double hd = 1.0;
    for (int i = 0; i < u.d; ++i) hd *= u.h;
    return hd * acc;
}

double grid_norm(const GridFunction& u) { return std::sqrt(grid_inner(u, u)); }

double sobolev_norm_m(const GridFunction& u, int m) {
    double acc = 0.0;
    for (int a0 = 0; a0 <= m; ++a0) {
        const int r1 = (u.d > 1) ? m - a0 : 0;
        for (int a1 = 0; a1 <= r1; ++a1) {
            const int r2 = (u.d > 2) ? m - a0 - a1 : 0;
            for (int a2 = 0; a2 <= r2; ++a2) {
                const GridFunction w = diff_alpha(u, {a0, a1, a2});
                const double nrm = grid_norm(w);
                acc += nrm * nrm;
            }
        }
    }
    return std::sqrt(acc);
}

double weighted_norm_m(const GridFunction& u, int m, const GridGeometry& g) {
    const double wB = std::pow(u.h, -2.0 * m);
    double acc = 0.0;
    for (std::size_t p = 0; p < g.points.size(); ++p) {
        const PointClass c = g.point_class[p];
        if (c != PointClass::Rstar && c != PointClass::Bstar) continue;
        const double val = u.at(g.points[p]);
        acc += (c == PointClass::Rstar ? 1.0 : wB) * val * val;
    }
    double hd = 1.0;
    for (int i = 0; i < u.d; ++i) hd *= u.h;
    return std::sqrt(hd * acc);
}

Stencil stencil_of(const MixedOperatorSpec& spec, int d, bool normalized) {
    const Coord z{0, 0, 0};
    GridFunction delta(d, spec.h, z, z, nullptr);
    delta.v[0] = 1.0;
    const GridFunction L = apply_Lh(spec, delta, normalized);
    Stencil s;
    for (std::size_t i = 0; i < L.v.size(); ++i) {
        if (L.v[i] == 0.0) continue;
        const Coord x = L.coord_of(i);
        // (L u)(x) = Σ_η c_η u(x+η) means c_η = (L δ₀)(−η)
        s.entries.push_back({Coord{-x[0], -x[1], -x[2]}, L.v[i]});
    }
    std::sort(s.entries.begin(), s.entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return s;
}

double char_poly_from_stencil(const Stencil& s, double scale,
                              const std::vector<double>& theta) {
    const int d = static_cast<int>(theta.size());
    std::complex<double> acc(0.0, 0.0);
    for (const auto& e : s.entries) {
        double dot = 0.0;
        for (int i = 0; i < d; ++i) dot += e.first[i] * theta[i];
        acc += scale * e.second * std::exp(std::complex<double>(0.0, dot));
    }
    if (std::abs(acc.imag()) > 1e-12)
        throw NonSymmetricStencil("char_poly: imaginary part " +
                                  std::to_string(acc.imag()));
    return acc.real();
}

double char_poly(const MixedOperatorSpec& spec, const std::vector<double>& theta,
                 bool normalized) {
    const int d = static_cast<int>(theta.size());
    const Stencil s = stencil_of(spec, d, normalized);
    return char_poly_from_stencil(s, std::pow(spec.h, 2.0 * spec.m), theta);
}

} // namespace semiflex
