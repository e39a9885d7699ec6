#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "semiflex/dirichlet.hpp"

namespace semiflex {

enum class Regime { sub, critical, super };
const char* regime_name(Regime r);

// Informational regime tag: κ against the critical window 2dN².
Regime classify_regime(int d, int N, double kappa);

struct ModelParams {
    int d = 1;
    int N = 0;
    double kappa = 0.0;
    Regime regime = Regime::sub;
};
ModelParams make_model(int d, int N, double kappa);

struct FieldEnsemble {
    ModelParams params;
    const GridGeometry* g = nullptr;
    uint64_t seed = 0;
    std::vector<Eigen::VectorXd> samples; // each over the unknowns
};

// Exact i.i.d. samples of the Gibbs field via the precision factorization;
// sample i is a pure function of (seed, i) regardless of thread count.
FieldEnsemble sample(const ModelParams& params, const GridGeometry& g,
                     int n_samples, uint64_t seed);

// Streaming empirical covariance of n_samples exact samples (nothing retained).
Eigen::MatrixXd sample_covariance(const ModelParams& params, const GridGeometry& g,
                                  int n_samples, uint64_t seed);

void export_ensemble_csv(const FieldEnsemble& e, const std::string& path);

// Continuous interpolation Ψ_N: linear in d=1, the simplex rule keyed on the
// descending order of the fractional parts {Nt_i} in d=2,3.
struct InterpolatedField {
    const GridGeometry* g = nullptr;
    Eigen::VectorXd phi; // unknown values
    int d = 1;
    double cN = 1.0;
};

InterpolatedField interpolate(const FieldEnsemble& e, int sample_index, double c_N);
InterpolatedField interpolate(const GridGeometry& g, const Eigen::VectorXd& phi,
                              double c_N);
double eval(const InterpolatedField& psi, const std::vector<double>& t);

// Scaling constants c_N(d): (2d)^{-1}√κ N^{(d-4)/2} for critical/super,
// (2d)^{-1/2} N^{-1/2} for the d=1 sub regime.
double interpolation_scale(const ModelParams& params);

struct TestFunction {
    std::function<double(const double*)> f;
    std::string name;
};
TestFunction sin_test_function(int d); // √2·∏ sin(πx_i), L²-normalized

// Per-sample pairing (Ψ_N, f) = scale·Σ_{x∈Λ_N} φ_x f(x/N), with
// scale = (2d)^{-1}√κ N^{-(d+4)/2} (critical/super) or
//         (2d)^{-1/2} N^{-(d+2)/2} (sub).
double pairing_scale(const ModelParams& params);
std::vector<double> pair(const FieldEnsemble& e, const TestFunction& f);

// Exact Var[(Ψ_N,f)] = scale²·f̃ᵀ Q^{-1} f̃ with Q the model precision.
double exact_pairing_variance(const ModelParams& params, const GridGeometry& g,
                              const TestFunction& f);

} // namespace semiflex
