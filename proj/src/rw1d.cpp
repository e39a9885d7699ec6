#include "semiflex/rw1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "semiflex/csvio.hpp"
#include "semiflex/errors.hpp"
#include "semiflex/rng.hpp"

namespace semiflex {

std::pair<double, double> walk_gamma_sigma_from_beta(double beta) {
    if (!(beta >= 0.0)) throw Error("walk parameters: beta must be >= 0");
    const double s = std::sqrt(1.0 + 2.0 * beta);
    const double den = 1.0 + beta + s;
    return {beta / den, 4.0 / den};
}

std::pair<double, double> gamma_sigma(double kappa) {
    return walk_gamma_sigma_from_beta(kappa);
}

RWParams make_rw_params(int N, double kappa) {
    RWParams p;
    p.N = N;
    p.kappa = kappa;
    p.beta = kappa;
    const auto gs = walk_gamma_sigma_from_beta(p.beta);
    p.gamma = gs.first;
    p.sigma2 = gs.second;
    p.zeta = p.beta > 0.0
                 ? (1.0 + std::sqrt(1.0 + 2.0 * p.beta)) / p.beta
                 : std::numeric_limits<double>::infinity();
    return p;
}

namespace {

// One walk path: S accumulates the ε̃ increments, U is the AR(γ) shadow,
// W_n = S_n - U_n. ε̃ ~ N(0, σ²/(1-γ)²) = N(0,2) identically in κ.
template <class Sink>
void run_paths(const RWParams& P, uint64_t seed, int p0, int p1, Sink sink) {
    const double sqrt2 = std::sqrt(2.0);
    for (int p = p0; p < p1; ++p) {
        double S = 0.0, U = 0.0;
        sink.begin_path(p);
        for (int i = 0; i < P.N; i += 2) {
            const NormalPair np =
                counter_normal_pair(seed, static_cast<uint64_t>(p), i / 2);
            double eps = sqrt2 * np.first;
            S += eps;
            U = P.gamma * (U + eps);
            sink.step(p, i + 1, S - U);
            if (i + 1 < P.N) {
                eps = sqrt2 * np.second;
                S += eps;
                U = P.gamma * (U + eps);
                sink.step(p, i + 2, S - U);
            }
        }
    }
}

template <class Sink>
void run_all_paths(const RWParams& P, uint64_t seed, int n_paths, const Sink& proto) {
    const int T = std::min(max_threads(), std::max(1, n_paths));
    if (T <= 1) {
        run_paths(P, seed, 0, n_paths, proto);
        return;
    }
    std::vector<std::thread> pool;
    const int chunk = (n_paths + T - 1) / T;
    for (int t = 0; t < T; ++t) {
        const int p0 = t * chunk, p1 = std::min(n_paths, p0 + chunk);
        if (p0 >= p1) break;
        pool.emplace_back([&, p0, p1] { run_paths(P, seed, p0, p1, proto); });
    }
    for (auto& th : pool) th.join();
}

struct FullSink {
    double* W;
    int N;
    void begin_path(int) const {}
    void step(int p, int n, double w) const {
        W[static_cast<std::size_t>(p) * N + (n - 1)] = w;
    }
};

struct TerminalSink {
    double* out;
    int N;
    void begin_path(int) const {}
    void step(int p, int n, double w) const {
        if (n == N) out[p] = w;
    }
};

struct CheckpointSink {
    double* out;
    const int* cp;
    int k;
    mutable std::vector<int> cursor; // per-path next checkpoint
    void begin_path(int p) const { cursor[p] = 0; }
    void step(int p, int n, double w) const {
        int& c = cursor[p];
        if (c < k && n == cp[c]) {
            out[static_cast<std::size_t>(p) * k + c] = w;
            ++c;
        }
    }
};

} // namespace

WalkPaths simulate_W(const RWParams& params, uint64_t seed, int n_paths) {
    WalkPaths out;
    out.N = params.N;
    out.n_paths = n_paths;
    out.seed = seed;
    out.W.assign(static_cast<std::size_t>(n_paths) * params.N, 0.0);
    run_all_paths(params, seed, n_paths, FullSink{out.W.data(), params.N});
    return out;
}

std::vector<double> simulate_W_terminal(const RWParams& params, uint64_t seed,
                                        int n_paths) {
    std::vector<double> out(n_paths, 0.0);
    run_all_paths(params, seed, n_paths, TerminalSink{out.data(), params.N});
    return out;
}

std::vector<double> simulate_W_at(const RWParams& params, uint64_t seed,
                                  int n_paths, const std::vector<int>& checkpoints) {
    const int k = static_cast<int>(checkpoints.size());
    for (int i = 0; i < k; ++i) {
        if (checkpoints[i] < 1 || checkpoints[i] > params.N)
            throw Error("simulate_W_at: checkpoint out of range");
        if (i && checkpoints[i] <= checkpoints[i - 1])
            throw Error("simulate_W_at: checkpoints must increase");
    }
    std::vector<double> out(static_cast<std::size_t>(n_paths) * k, 0.0);
    CheckpointSink sink{out.data(), checkpoints.data(), k, {}};
    sink.cursor.assign(n_paths, 0);
    run_all_paths(params, seed, n_paths, sink);
    return out;
}

double var_W(int n, const RWParams& params) {
    if (params.beta == 0.0) return 2.0 * n;
    const double z = params.zeta;
    const double q = -std::expm1(-n * std::log1p(z)); // 1 - γⁿ
    return 2.0 * (n - (q * q + 2.0 * q * (1.0 + z)) / (z * (2.0 + z)));
}

double var_W_bruteforce(int n, const RWParams& params) {
    // S/U decomposition with explicit γ-power sums
    const double g = params.gamma;
    const double om = 1.0 - g;
    const double var_eps = params.sigma2 / (om * om);
    double varU = 0.0, covSU = 0.0, gp = 1.0;
    for (int t = 1; t <= n; ++t) {
        gp *= g;
        covSU += gp;
        varU += gp * gp;
    }
    return var_eps * (n + varU - 2.0 * covSU);
}

Eigen::MatrixXd walk_covariance(int n_max, const RWParams& params) {
    std::vector<double> r(n_max);
    r[0] = 1.0;
    for (int j = 1; j < n_max; ++j) r[j] = 1.0 + params.gamma * r[j - 1];
    Eigen::MatrixXd M(n_max, n_max);
    for (int q = 0; q < n_max; ++q) {
        double acc = 0.0;
        for (int a = 0; a + q < n_max; ++a) {
            acc += params.sigma2 * r[a] * r[a + q];
            M(a, a + q) = acc;
            M(a + q, a) = acc;
        }
    }
    return M;
}

namespace {

template <class Real>
BridgeCoeffs eval_bridge(int k, int N, Real g) {
    auto pw = [&](long e) { return std::pow(g, static_cast<Real>(e)); };
    const Real K = static_cast<Real>(k), n = static_cast<Real>(N);

    const Real r = (g - 1) * (pw(N + 1) - 1) *
                   (-n + g * (2 + n + pw(N) * (-2 + (g - 1) * n)));

    const Real s1 =
        (-K + g * (1 - pw(k) + K)) +
        pw(3 + 2 * N - k) * (1 + pw(k) * (-1 + (g - 1) * K)) +
        pw(N - k) * (pw(k) * (g * g * g - g) * (1 - K + n) +
                     pw(2 + 2 * k) * (2 + n - g * (1 + n)) +
                     g * (1 + n - g * (2 + n)));

    const Real s2 =
        g * (pw(1 + k) + K - g * (1 + K)) +
        pw(2 + 2 * N - k) * (-1 + pw(k) * (1 + K - g * K)) +
        pw(1 + N - k) * (g + pw(k) * (g * g - 1) * (K - n) - n + g * n +
                         pw(1 + 2 * k) * (-1 + (g - 1) * n));

    if (std::abs(static_cast<double>(r)) < 1e-14)
        throw DegenerateDenominator("bridge_coefficients: r(N) ~ 0 at gamma=" +
                                    format_g17(static_cast<double>(g)));
    BridgeCoeffs out;
    out.r1 = static_cast<double>(s1 / r);
    out.r2 = static_cast<double>(s2 / r);
    return out;
}

} // namespace

BridgeCoeffs bridge_coefficients(int k, int N, double gamma, bool high_precision) {
    if (high_precision || N >= 10000)
        return eval_bridge<long double>(k, N, static_cast<long double>(gamma));
    return eval_bridge<double>(k, N, gamma);
}

namespace {

double cov_YY(int i, int j) { return static_cast<double>(std::min(i, j)); }

// Cov(Y_i, Z_j) = Σ_{m≤j} min(i,m)
double cov_YZ(int i, int j) {
    if (i <= j) return 0.5 * i * (2.0 * j - i + 1.0);
    return 0.5 * j * (j + 1.0);
}

// Cov(Z_i, Z_j) = Σ_{a≤min} a(2·max−a+1)/2
double cov_ZZ(int i, int j) {
    const double mi = std::min(i, j), ma = std::max(i, j);
    const double sa = 0.5 * mi * (mi + 1.0);
    const double sa2 = mi * (mi + 1.0) * (2.0 * mi + 1.0) / 6.0;
    return 0.5 * ((2.0 * ma + 1.0) * sa - sa2);
}

} // namespace

ConditionalGaussian conditional_covariance(int N, const RWParams& params,
                                           char target) {
    if (N < 3) throw Error("conditional_covariance: N >= 3 required");
    const int n = N - 1;
    ConditionalGaussian out;
    out.A.resize(n, n);
    out.B.resize(n, 2);
    out.D.resize(2, 2);

    if (target == 'W') {
        const Eigen::MatrixXd M = walk_covariance(N + 1, params); // rows = W_1..W_{N+1}
        out.A = M.topLeftCorner(n, n);
        for (int i = 0; i < n; ++i) {
            out.B(i, 0) = M(i, N - 1);
            out.B(i, 1) = M(i, N);
        }
        out.D << M(N - 1, N - 1), M(N - 1, N), M(N, N - 1), M(N, N);
    } else if (target == 'Y' || target == 'Z') {
        // pure integrated walk: X i.i.d. N(0,1), Y = ΣX, Z = ΣY; κ plays no role
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                out.A(i, j) = target == 'Y' ? cov_YY(i + 1, j + 1)
                                            : cov_ZZ(i + 1, j + 1);
        for (int i = 0; i < n; ++i) {
            out.B(i, 0) = target == 'Y' ? cov_YZ(i + 1, N) : cov_ZZ(i + 1, N);
            out.B(i, 1) = target == 'Y' ? cov_YZ(i + 1, N + 1) : cov_ZZ(i + 1, N + 1);
        }
        out.D << cov_ZZ(N, N), cov_ZZ(N, N + 1), cov_ZZ(N + 1, N),
            cov_ZZ(N + 1, N + 1);
    } else {
        throw Error("conditional_covariance: target must be W, Y, or Z");
    }

    out.detD = out.D(0, 0) * out.D(1, 1) - out.D(0, 1) * out.D(1, 0);
    if (out.detD <= 0.0)
        throw SingularConditioning("conditional_covariance: det D = " +
                                   format_g17(out.detD));
    Eigen::Matrix2d Dinv;
    Dinv << out.D(1, 1), -out.D(0, 1), -out.D(1, 0), out.D(0, 0);
    Dinv /= out.detD;
    out.cond = out.A - out.B * Dinv * out.B.transpose();
    return out;
}

double membrane_detD(int N) {
    const double n = N;
    return n * (n + 1.0) * (n + 1.0) * (n + 2.0) / 12.0;
}

double membrane_detD_printed(int N) {
    const double n = N;
    return n * (n + 1.0) * (n + 1.0) * (8.0 * n * n + 3.0 * n + 6.0) / 36.0;
}

double membrane_bdc_diagonal(int N, int i) {
    const double n = N, x = i;
    const double bracket =
        2.0 * (2.0 * n + 1.0) * (2.0 * n + 3.0) - 12.0 * (n + 1.0) * x + 6.0 * x * x;
    return x * x * (n + 1.0) * bracket / (24.0 * membrane_detD(N));
}

double membrane_bdc_diagonal_printed(int N, int i) {
    const double n = N, x = i;
    const double bracket = 6.0 * n * n - 12.0 * n * x + 6.0 * x * x + 4.0 * n;
    return x * x * (n + 1.0) * bracket / (24.0 * membrane_detD_printed(N));
}

double KappaRule::operator()(double N) const {
    return has_power ? c * std::pow(N, p) : c;
}

std::string KappaRule::str() const {
    if (!has_power) return format_g17(c);
    if (c == 1.0) return "N^" + format_g17(p);
    return format_g17(c) + "*N^" + format_g17(p);
}

namespace {

double parse_full_double(const std::string& s) {
    if (s.empty()) throw Error("kappa rule: empty number");
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size())
        throw Error("kappa rule: bad number '" + s + "'");
    return v;
}

} // namespace

KappaRule parse_kappa_rule(const std::string& text) {
    KappaRule r;
    if (text.rfind("N^", 0) == 0) {
        r.c = 1.0;
        r.p = parse_full_double(text.substr(2));
        r.has_power = true;
    } else if (const auto star = text.find("*N^"); star != std::string::npos) {
        r.c = parse_full_double(text.substr(0, star));
        r.p = parse_full_double(text.substr(star + 3));
        r.has_power = true;
    } else {
        r.c = parse_full_double(text);
        r.p = 0.0;
        r.has_power = false;
    }
    if (!(r.c >= 0.0) || !std::isfinite(r.c) || !std::isfinite(r.p))
        throw Error("kappa rule: coefficient must be finite and >= 0");
    return r;
}

std::vector<RegimeRow> regime_table(const std::vector<int>& N_list,
                                    const KappaRule& rule) {
    if (N_list.empty()) throw Error("regime_table: empty N list");
    std::vector<RegimeRow> rows;
    rows.reserve(N_list.size());
    for (int N : N_list) {
        RegimeRow row;
        row.N = N;
        row.kappa = rule(static_cast<double>(N));
        const RWParams P = make_rw_params(N, row.kappa);
        row.var = var_W(N - 1, P);
        row.var_over_N = row.var / N;
        row.var_beta_over_N3 =
            row.var * 2.0 * P.beta / (static_cast<double>(N) * N * N);
        rows.push_back(row);
    }
    return rows;
}

} // namespace semiflex
