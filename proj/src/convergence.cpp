#include "semiflex/convergence.hpp"

#include "semiflex/dirichlet.hpp"
#include "semiflex/errors.hpp"
#include "semiflex/rng.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace semiflex {

double RhoRule::operator()(double h) const { return a + c * std::pow(h, p); }

std::string RhoRule::str() const {
    char buf[96];
    if (a == 0.0)
        std::snprintf(buf, sizeof buf, "%g*h^%g", c, p);
    else
        std::snprintf(buf, sizeof buf, "%g + %g*h^%g", a, c, p);
    return buf;
}

namespace {

constexpr uint64_t kSampleSeed = 0xA11CE;

// Derivatives of the m=2 factor g(t) = sin²(πt); g and g' vanish at 0 and 1,
// which is exactly the clamped boundary data of the fourth-order problems.
double g2_deriv(int k, double t) {
    const double w = 2.0 * M_PI * t;
    switch (k) {
        case 0: {
            const double s = std::sin(M_PI * t);
            return s * s;
        }
        case 1: return M_PI * std::sin(w);
        case 2: return 2.0 * M_PI * M_PI * std::cos(w);
        case 3: return -4.0 * std::pow(M_PI, 3) * std::sin(w);
        case 4: return -8.0 * std::pow(M_PI, 4) * std::cos(w);
        case 5: return 16.0 * std::pow(M_PI, 5) * std::sin(w);
        default: return 0.0;
    }
}

// Derivatives of the m=1 factor sin(πt).
double g1_deriv(int k, double t) {
    return std::pow(M_PI, k) * std::sin(M_PI * t + 0.5 * M_PI * k);
}

double tensor_deriv(int m, int d, const int* alpha, const double* x) {
    double prod = 1.0;
    for (int i = 0; i < d; ++i)
        prod *= (m == 2) ? g2_deriv(alpha[i], x[i]) : g1_deriv(alpha[i], x[i]);
    return prod;
}

// M_k = Σ_{|α| ≤ k} sup|∂^α u|, each per-α sup estimated on a fixed
// counter-seeded sample.
double estimate_Mk(int m, int d, int k) {
    const int n_pts = 10000;
    std::vector<std::array<int, 3>> alphas;
    for (int a0 = 0; a0 <= k; ++a0) {
        const int r1 = (d > 1) ? k - a0 : 0;
        for (int a1 = 0; a1 <= r1; ++a1) {
            const int r2 = (d > 2) ? k - a0 - a1 : 0;
            for (int a2 = 0; a2 <= r2; ++a2) alphas.push_back({a0, a1, a2});
        }
    }
    std::vector<double> sup(alphas.size(), 0.0);
    double x[3] = {0, 0, 0};
    for (int p = 0; p < n_pts; ++p) {
        for (int i = 0; i < d; ++i) x[i] = counter_uniform(kSampleSeed, i, p);
        for (std::size_t a = 0; a < alphas.size(); ++a)
            sup[a] = std::max(sup[a],
                              std::abs(tensor_deriv(m, d, alphas[a].data(), x)));
    }
    double acc = 0.0;
    for (double s : sup) acc += s;
    return acc;
}

void coefficient_pair(OpBase base, double rho, double& a, double& b) {
    // Mirrors apply_Lh: a·(-Δ) + b·Δ².
    switch (base) {
        case OpBase::neg_laplacian: a = 1.0; b = rho; break;
        case OpBase::bilaplacian: a = rho; b = 1.0; break;
        case OpBase::mixed: a = 1.0; b = rho; break;
    }
}

} // namespace

ConvergenceCase manufactured(OpBase base, int d, const RhoRule& rho) {
    if (d < 1 || d > 3) throw Error("manufactured: d out of range");
    ConvergenceCase c;
    c.base = base;
    c.d = d;
    c.rho = rho;
    const int m = (base == OpBase::neg_laplacian) ? 1 : 2;

    if (m == 2) {
        c.u = [d](const double* x) {
            double prod = 1.0;
            for (int i = 0; i < d; ++i) prod *= g2_deriv(0, x[i]);
            return prod;
        };
        c.lap_u = [d](const double* x) {
            double acc = 0.0;
            for (int i = 0; i < d; ++i) {
                double term = g2_deriv(2, x[i]);
                for (int j = 0; j < d; ++j)
                    if (j != i) term *= g2_deriv(0, x[j]);
                acc += term;
            }
            return acc;
        };
        c.bilap_u = [d](const double* x) {
            double acc = 0.0;
            for (int i = 0; i < d; ++i) {
                double term = g2_deriv(4, x[i]);
                for (int j = 0; j < d; ++j)
                    if (j != i) term *= g2_deriv(0, x[j]);
                acc += term;
            }
            for (int i = 0; i < d; ++i)
                for (int j = i + 1; j < d; ++j) {
                    double term = 2.0 * g2_deriv(2, x[i]) * g2_deriv(2, x[j]);
                    for (int l = 0; l < d; ++l)
                        if (l != i && l != j) term *= g2_deriv(0, x[l]);
                    acc += term;
                }
            return acc;
        };
        c.name = "sin2-tensor";
    } else {
        c.u = [d](const double* x) {
            double prod = 1.0;
            for (int i = 0; i < d; ++i) prod *= std::sin(M_PI * x[i]);
            return prod;
        };
        c.lap_u = [d, u = c.u](const double* x) {
            return -d * M_PI * M_PI * u(x);
        };
        c.bilap_u = [d, u = c.u](const double* x) {
            return d * d * std::pow(M_PI, 4) * u(x);
        };
        c.name = "sin-tensor";
    }

    c.M1 = estimate_Mk(m, d, 1);
    c.M2 = estimate_Mk(m, d, 2);
    c.M3 = estimate_Mk(m, d, 3);
    c.M4 = estimate_Mk(m, d, 4);
    c.M5 = estimate_Mk(m, d, 5);
    return c;
}

ErrorPair measure_error(const ConvergenceCase& c, double h) {
    const int N = static_cast<int>(std::llround(1.0 / h));
    if (N < 4) throw Error("measure_error: mesh too coarse");
    GridGeometry g = build_grid({DomainKind::box, c.d}, N);

    const double rho = c.rho(h);
    const MixedOperatorSpec spec = make_spec(c.base, rho, h);
    SparseOperator A = assemble(spec, g, false);

    double a = 0.0, b = 0.0;
    coefficient_pair(c.base, rho, a, b);
    GridFunction f = sample_on_grid(
        g, [&](const double* x) { return -a * c.lap_u(x) + b * c.bilap_u(x); });

    const GridFunction uh = solve_dirichlet(A, f);
    const GridFunction uex = sample_on_grid(g, c.u);

    // Error restricted to R_h, zero elsewhere.
    GridFunction e = GridFunction::zeros_like(g);
    for (int t = 0; t < g.n_unknowns; ++t) {
        const Coord& k = g.points[g.point_of_unknown[t]];
        e.ref(k) = uh.at(k) - uex.at(k);
    }

    ErrorPair out;
    const double en = weighted_norm_m(e, spec.m, g);
    out.error = en * en;

    const double h2 = h * h;
    switch (c.base) {
        case OpBase::bilaplacian:
            out.bound = c.M5 * c.M5 * h2 + c.M2 * c.M2 * rho * rho + c.M2 * c.M2 * h;
            break;
        case OpBase::mixed:
            out.bound = c.M5 * c.M5 * h2 + c.M4 * c.M4 * (rho - 1.0) * (rho - 1.0) +
                        c.M4 * c.M4 * h2 * h2 + c.M2 * c.M2 * h;
            break;
        case OpBase::neg_laplacian: {
            const double delta = std::max(h, std::sqrt(rho));
            out.bound = c.M4 * c.M4 * std::pow(delta, 4) + c.M2 * c.M2 * rho * delta +
                        c.M1 * c.M1 * delta;
            break;
        }
    }
    return out;
}

RateReport rate_report(const ConvergenceCase& c, const std::vector<double>& ladder) {
    if (ladder.size() < 3)
        throw InsufficientLadder("rate_report: need at least 3 mesh widths");
    RateReport rep;
    rep.c = &c;
    for (double h : ladder) {
        const ErrorPair ep = measure_error(c, h);
        RateRow row;
        row.h = h;
        row.error = ep.error;
        row.bound = ep.bound;
        row.ratio = ep.bound / ep.error;
        rep.rows.push_back(row);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double rmin = rep.rows[0].ratio, rmax = rep.rows[0].ratio;
    for (const RateRow& r : rep.rows) {
        const double x = std::log(r.h), y = std::log(r.error);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        rmin = std::min(rmin, r.ratio);
        rmax = std::max(rmax, r.ratio);
    }
    const double n = static_cast<double>(rep.rows.size());
    rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    rep.ratio_spread = rmax / rmin;
    return rep;
}

} // namespace semiflex
