#include "semiflex/field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "semiflex/csvio.hpp"
#include "semiflex/errors.hpp"
#include "semiflex/rng.hpp"

namespace semiflex {

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::sub: return "sub";
        case Regime::critical: return "critical";
        default: return "super";
    }
}

Regime classify_regime(int d, int N, double kappa) {
    const double window = 2.0 * d * static_cast<double>(N) * N;
    if (kappa < 0.1 * window) return Regime::sub;
    if (kappa <= 10.0 * window) return Regime::critical;
    return Regime::super;
}

ModelParams make_model(int d, int N, double kappa) {
    ModelParams p;
    p.d = d;
    p.N = N;
    p.kappa = kappa;
    p.regime = classify_regime(d, N, kappa);
    return p;
}

namespace {

Eigen::VectorXd draw_sample(const Factorization& fact, int n, uint64_t seed,
                            uint64_t s) {
    Eigen::VectorXd xi(n);
    for (int i = 0; i < n; ++i)
        xi[i] = counter_normal(seed, s, static_cast<uint64_t>(i));
    return fact.sqrt_precision_inv_t(xi);
}

} // namespace

FieldEnsemble sample(const ModelParams& params, const GridGeometry& g,
                     int n_samples, uint64_t seed) {
    if (n_samples < 1) throw Error("sample: n_samples must be >= 1");
    FieldEnsemble e;
    e.params = params;
    e.g = &g;
    e.seed = seed;
    e.samples.resize(n_samples);

    const Factorization fact(model_precision(g, params.kappa));
    const int n = g.n_unknowns;
    const int T = std::min(max_threads(), n_samples);
    if (T <= 1) {
        for (int s = 0; s < n_samples; ++s)
            e.samples[s] = draw_sample(fact, n, seed, static_cast<uint64_t>(s));
    } else {
        std::vector<std::thread> pool;
        const int chunk = (n_samples + T - 1) / T;
        for (int t = 0; t < T; ++t) {
            const int s0 = t * chunk, s1 = std::min(n_samples, s0 + chunk);
            if (s0 >= s1) break;
            pool.emplace_back([&, s0, s1] {
                for (int s = s0; s < s1; ++s)
                    e.samples[s] =
                        draw_sample(fact, n, seed, static_cast<uint64_t>(s));
            });
        }
        for (auto& th : pool) th.join();
    }
    return e;
}

Eigen::MatrixXd sample_covariance(const ModelParams& params, const GridGeometry& g,
                                  int n_samples, uint64_t seed) {
    if (n_samples < 2) throw Error("sample_covariance: need at least 2 samples");
    const Factorization fact(model_precision(g, params.kappa));
    const int n = g.n_unknowns;
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd M2 = Eigen::MatrixXd::Zero(n, n);
    for (int s = 0; s < n_samples; ++s) {
        const Eigen::VectorXd z = draw_sample(fact, n, seed, static_cast<uint64_t>(s));
        const Eigen::VectorXd d1 = z - mean;
        mean += d1 / (s + 1.0);
        M2.noalias() += d1 * (z - mean).transpose();
    }
    return M2 / (n_samples - 1.0);
}

void export_ensemble_csv(const FieldEnsemble& e, const std::string& path) {
    CsvWriter w(path);
    w.comment("d=" + std::to_string(e.params.d) + " N=" + std::to_string(e.params.N) +
              " kappa=" + format_g17(e.params.kappa) +
              " regime=" + regime_name(e.params.regime) +
              " seed=" + std::to_string(e.seed));
    w.header({"sample_id", "x_index", "value"});
    for (std::size_t s = 0; s < e.samples.size(); ++s)
        for (int i = 0; i < e.samples[s].size(); ++i)
            w.row({std::to_string(s), std::to_string(i),
                   format_g17(e.samples[s][i])});
    w.close();
}

double interpolation_scale(const ModelParams& params) {
    const double d = params.d, N = params.N;
    if (params.regime == Regime::sub)
        return std::pow(2.0 * d, -0.5) * std::pow(N, -0.5);
    return std::sqrt(params.kappa) / (2.0 * d) * std::pow(N, (d - 4.0) / 2.0);
}

double pairing_scale(const ModelParams& params) {
    return interpolation_scale(params) * std::pow(params.N, -params.d);
}

InterpolatedField interpolate(const GridGeometry& g, const Eigen::VectorXd& phi,
                              double c_N) {
    if (phi.size() != g.n_unknowns)
        throw Error("interpolate: value vector does not match the unknowns");
    InterpolatedField psi;
    psi.g = &g;
    psi.phi = phi;
    psi.d = g.d();
    psi.cN = c_N;
    return psi;
}

InterpolatedField interpolate(const FieldEnsemble& e, int sample_index,
                              double c_N) {
    return interpolate(*e.g, e.samples.at(sample_index), c_N);
}

double eval(const InterpolatedField& psi, const std::vector<double>& t) {
    const GridGeometry& g = *psi.g;
    const int d = psi.d;
    if (static_cast<int>(t.size()) != d)
        throw Error("eval: wrong point dimension");
    if (g.domain.kind == DomainKind::box) {
        for (int i = 0; i < d; ++i)
            if (t[i] < 0.0 || t[i] > 1.0) throw OutOfDomain("eval: point outside the box");
    } else {
        double s = 0.0;
        for (int i = 0; i < d; ++i) s += t[i] * t[i];
        if (s > 1.0 + 1e-12) throw OutOfDomain("eval: point outside the disc");
    }

    auto phi_at = [&](const Coord& k) {
        const int u = g.unknown_index(k);
        return u >= 0 ? psi.phi[u] : 0.0;
    };

    Coord base{0, 0, 0};
    double frac[3] = {0, 0, 0};
    for (int i = 0; i < d; ++i) {
        const double s = g.N * t[i];
        base[i] = static_cast<int>(std::floor(s));
        frac[i] = s - base[i];
    }
    int order[3] = {0, 1, 2};
    std::sort(order, order + d, [&](int a, int b) {
        if (frac[a] != frac[b]) return frac[a] > frac[b];
        return a < b;
    });

    // telescoping simplex rule: walk the axes in decreasing fractional part
    double val = phi_at(base);
    Coord cur = base;
    for (int s = 0; s < d; ++s) {
        const int ax = order[s];
        Coord nxt = cur;
        nxt[ax] += 1;
        val += frac[ax] * (phi_at(nxt) - phi_at(cur));
        cur = nxt;
    }
    return psi.cN * val;
}

TestFunction sin_test_function(int d) {
    TestFunction tf;
    tf.name = "sin";
    tf.f = [d](const double* x) {
        double v = std::sqrt(2.0);
        for (int i = 0; i < d; ++i) v *= std::sin(M_PI * x[i]);
        return v;
    };
    return tf;
}

namespace {

Eigen::VectorXd values_at_unknowns(const GridGeometry& g, const TestFunction& f) {
    Eigen::VectorXd fv(g.n_unknowns);
    double x[3] = {0, 0, 0};
    for (int u = 0; u < g.n_unknowns; ++u) {
        const Coord& k = g.points[g.point_of_unknown[u]];
        for (int i = 0; i < g.d(); ++i) x[i] = k[i] * g.h;
        fv[u] = f.f(x);
    }
    return fv;
}

} // namespace

std::vector<double> pair(const FieldEnsemble& e, const TestFunction& f) {
    const Eigen::VectorXd fv = values_at_unknowns(*e.g, f);
    const double scale = pairing_scale(e.params);
    std::vector<double> out;
    out.reserve(e.samples.size());
    for (const auto& s : e.samples) out.push_back(scale * s.dot(fv));
    return out;
}

double exact_pairing_variance(const ModelParams& params, const GridGeometry& g,
                              const TestFunction& f) {
    const Eigen::VectorXd fv = values_at_unknowns(g, f);
    const Factorization fact(model_precision(g, params.kappa));
    const Eigen::VectorXd y = fact.solve(fv);
    const double scale = pairing_scale(params);
    return scale * scale * fv.dot(y);
}

} // namespace semiflex
