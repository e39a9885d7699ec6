#pragma once

#include "semiflex/operators.hpp"

#include <functional>
#include <string>
#include <vector>

namespace semiflex {

// Coupling schedule ρ(h) = a + c h^p for the mixed-operator families.
struct RhoRule {
    double a = 0.0;
    double c = 1.0;
    double p = 1.0;
    double operator()(double h) const;
    std::string str() const;
};

// Manufactured problem: continuum solution u with exact tensor derivatives,
// all as closures over x in [0,1]^d. The datum f = a·(-Δu) + b·(Δ²u) is
// assembled per mesh because the coupling rho(h) enters the coefficients.
struct ConvergenceCase {
    OpBase base = OpBase::neg_laplacian;
    int d = 1;
    RhoRule rho;
    std::function<double(const double*)> u;
    std::function<double(const double*)> lap_u;   // continuum Δu
    std::function<double(const double*)> bilap_u; // continuum Δ²u
    // Sup-norm estimates |u|_k over a fixed sample, filled by manufactured().
    double M1 = 0, M2 = 0, M3 = 0, M4 = 0, M5 = 0;
    std::string name;
};

// Product-of-sines family: m = 2 uses ∏ sin²(πx_i), m = 1 uses ∏ sin(πx_i).
// The mixed and bilaplacian cases take the m = 2 solution; f is assembled
// from the exact tensor derivatives at the h-dependent coupling.
ConvergenceCase manufactured(OpBase base, int d, const RhoRule& rho);

// Discrete solve at mesh width h: returns (measured error, bound) in the
// squared weighted norm ||| u_h - u |||²_{h,m}.
struct ErrorPair {
    double error = 0.0;
    double bound = 0.0;
};
ErrorPair measure_error(const ConvergenceCase& c, double h);

struct RateRow {
    double h = 0.0;
    double error = 0.0;
    double bound = 0.0;
    double ratio = 0.0; // bound / error
};
struct RateReport {
    ConvergenceCase const* c = nullptr;
    std::vector<RateRow> rows;
    double slope = 0.0;       // LS slope of log error vs log h
    double ratio_spread = 0.0;// max ratio / min ratio across the ladder
};

// Ladder of at least three mesh widths (InsufficientLadder otherwise),
// finest last.
RateReport rate_report(const ConvergenceCase& c, const std::vector<double>& ladder);

} // namespace semiflex
