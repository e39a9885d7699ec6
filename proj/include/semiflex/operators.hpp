#pragma once

#include <utility>
#include <vector>

#include "semiflex/grid_function.hpp"

namespace semiflex {

// The base names the dominant limit; every case is a two-coefficient mix
// (a, b) applied as a·(-Δ_h) + b·(Δ_h²):
//   neg_laplacian: a=1,   b=rho (rho₁)
//   bilaplacian:   a=rho, b=1   (rho₂)
//   mixed:         a=1,   b=rho (rho₃, expected near 1)
enum class OpBase { neg_laplacian, bilaplacian, mixed };

struct MixedOperatorSpec {
    OpBase base = OpBase::mixed;
    double rho = 0.0;
    double h = 1.0;
    int m = 2; // operator order parameter: 1 for the -Δ limit, 2 otherwise
};

MixedOperatorSpec make_spec(OpBase base, double rho, double h);
const char* op_name(OpBase base);

// (∂_j u)(x) = (u(x+he_j) - u(x))/h ; backward uses u(x) - u(x-he_j).
GridFunction forward_diff(const GridFunction& u, int axis);
GridFunction backward_diff(const GridFunction& u, int axis);
GridFunction diff_alpha(const GridFunction& u, const std::array<int, 3>& alpha);

// normalized=true divides by 2d (the probabilistic-model Laplacian);
// normalized=false is the plain h^{-2} second-difference sum. The
// bilaplacian is the composition laplacian∘laplacian with the same flag.
GridFunction laplacian_h(const GridFunction& u, bool normalized);
GridFunction bilaplacian_h(const GridFunction& u, bool normalized);

GridFunction apply_Lh(const MixedOperatorSpec& spec, const GridFunction& u,
                      bool normalized);

// L_h u on R*_h, h²·L_h u on B*_h, zero elsewhere.
GridFunction apply_Lh2(const MixedOperatorSpec& spec, const GridFunction& u,
                       const GridGeometry& g, bool normalized);

double grid_inner(const GridFunction& u, const GridFunction& v);
double grid_norm(const GridFunction& u);

// ‖u‖²_{h,m} = Σ_{|α|≤m} ‖∂^α u‖²_{h,grid}
double sobolev_norm_m(const GridFunction& u, int m);

// |||u|||²_{h,m} = h^d ( Σ_{R*_h} u² + Σ_{B*_h} (h^{-m} u)² )
double weighted_norm_m(const GridFunction& u, int m, const GridGeometry& g);

// Stencil of the operator: coefficients c_η with L u(x) = Σ_η c_η u(x+η).
struct Stencil {
    std::vector<std::pair<Coord, double>> entries;
};
Stencil stencil_of(const MixedOperatorSpec& spec, int d, bool normalized);

// Fourier symbol of h^{2m}L_h: p(θ) = Σ_η c_η e^{i<η,θ>}. Throws
// NonSymmetricStencil if the imaginary part exceeds 1e-12.
double char_poly(const MixedOperatorSpec& spec, const std::vector<double>& theta,
                 bool normalized);

// Symbol of an explicit coefficient table scaled by `scale` (char_poly calls
// this with scale = h^{2m}); same symmetry check.
double char_poly_from_stencil(const Stencil& s, double scale,
                              const std::vector<double>& theta);

} // namespace semiflex
