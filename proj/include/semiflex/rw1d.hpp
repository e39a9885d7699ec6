#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace semiflex {

// Walk parameters. The bridge-equality cross-check (conditional walk
// covariance == chain Green's function) pins beta = kappa; a separate
// beta-level entry point serves tests stated directly in beta.
struct RWParams {
    int N = 0;
    double kappa = 0.0;
    double beta = 0.0;   // = kappa
    double gamma = 0.0;  // β/(1+β+√(1+2β))
    double sigma2 = 2.0; // 4γ/β, with the β=0 limit 2
    double zeta = 0.0;   // (1+√(1+2β))/β; γ = 1/(1+ζ)
};

std::pair<double, double> walk_gamma_sigma_from_beta(double beta);
std::pair<double, double> gamma_sigma(double kappa);
RWParams make_rw_params(int N, double kappa);

// Trajectories of W_n = S_n - U_n via the O(N) recursion
// U_n = γ(U_{n-1} + ε̃_n), with ε̃ ~ N(0, σ²/(1-γ)²) = N(0,2) for every κ.
struct WalkPaths {
    int N = 0;
    int n_paths = 0;
    uint64_t seed = 0;
    std::vector<double> W; // row-major: path p holds W_1..W_N
    double at(int path, int n) const { return W[(size_t)path * N + (n - 1)]; }
};
WalkPaths simulate_W(const RWParams& params, uint64_t seed, int n_paths);

// Terminal values W_N only (streaming; used by the large figure ensembles).
std::vector<double> simulate_W_terminal(const RWParams& params, uint64_t seed,
                                        int n_paths);
// W at selected indices per path, row-major n_paths x checkpoints.
std::vector<double> simulate_W_at(const RWParams& params, uint64_t seed,
                                  int n_paths, const std::vector<int>& checkpoints);

// Var(W_n) = 2[ n - (q² + 2q(1+ζ))/(ζ(2+ζ)) ], q = 1-γⁿ: the exact
// ζ-stable rearrangement of the closed form, valid up to κ ~ 1e9.
double var_W(int n, const RWParams& params);

// Brute-force Var(W_n) from the S/U covariance double sums (test arbiter).
double var_W_bruteforce(int n, const RWParams& params);

// Cov(W_m, W_n) = σ² Σ_{i≤min} r_{m-i} r_{n-i}, r_j = (1-γ^{j+1})/(1-γ),
// built with the stable recurrence r_j = 1 + γ r_{j-1}; (n_max x n_max),
// indices 1..n_max.
Eigen::MatrixXd walk_covariance(int n_max, const RWParams& params);

// Projection coefficients of the bridge Ŵ_k = W_k - r1(k)W_N - r2(k)W_{N+1}:
// r1 = s1/r, r2 = s2/r as N-dependent polynomials in γ. Evaluated in long
// double when high precision is requested (γ^{2N} cancellation for N >= 1e4).
struct BridgeCoeffs {
    double r1 = 0.0, r2 = 0.0;
};
BridgeCoeffs bridge_coefficients(int k, int N, double gamma,
                                 bool high_precision = false);

// Joint-covariance conditioning data: cond = A - B D^{-1} Bᵀ.
struct ConditionalGaussian {
    Eigen::MatrixXd A;    // target block, indices 1..N-1
    Eigen::MatrixXd B;    // target x conditioning, 2 columns
    Eigen::MatrixXd D;    // conditioning block, 2x2
    Eigen::MatrixXd cond; // Schur complement
    double detD = 0.0;
};

// target 'W': mixed walk bridge (W_1..W_{N-1} | W_N = W_{N+1} = 0).
// target 'Y': membrane slopes (Y_1..Y_{N-1} | Z_N = Z_{N+1} = 0), X ~ N(0,1).
// target 'Z': membrane heights (Z_1..Z_{N-1} | Z_N = Z_{N+1} = 0).
// Y and Z ignore params.kappa (pure integrated walk).
ConditionalGaussian conditional_covariance(int N, const RWParams& params,
                                           char target);

// Membrane closed forms. The _printed variants evaluate the book-keeping
// constants exactly as displayed in the source derivation; the plain ones
// carry the corrected algebra (the Schur route is the arbiter in tests).
double membrane_bdc_diagonal(int N, int i); // (B D^{-1} C)(i,i)
double membrane_detD(int N);                // det D = N(N+1)²(N+2)/12
double membrane_bdc_diagonal_printed(int N, int i);
double membrane_detD_printed(int N);

struct KappaRule {
    double c = 0.0;
    double p = 0.0;
    bool has_power = false;
    double operator()(double N) const;
    std::string str() const;
};
// Grammar: <float> | N^<float> | <float>*N^<float>
KappaRule parse_kappa_rule(const std::string& text);

struct RegimeRow {
    int N = 0;
    double kappa = 0.0;
    double var = 0.0;             // Var(W_{N-1})
    double var_over_N = 0.0;      // walk-dominated normalization
    double var_beta_over_N3 = 0.0;// Laplacian-dominated normalization
};
std::vector<RegimeRow> regime_table(const std::vector<int>& N_list,
                                    const KappaRule& rule);

} // namespace semiflex
