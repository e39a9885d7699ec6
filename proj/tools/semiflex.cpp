// semiflex: command-line laboratory for the mixed gradient+bending interface
// model. Subcommands: trajectories, phase-scan, green, sample, converge,
// spectrum. Exit codes: 0 ok, 2 usage, 3 numerical/domain failure, 4 I/O.
#include "semiflex/convergence.hpp"
#include "semiflex/csvio.hpp"
#include "semiflex/errors.hpp"
#include "semiflex/field.hpp"
#include "semiflex/rw1d.hpp"
#include "semiflex/spectral.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace sf = semiflex;

namespace {

// Resolved-parameter echo shared by every CSV: '#' block with the regime tag,
// every parameter, the seed, and a content hash of the echo itself.
struct Echo {
    std::vector<std::pair<std::string, std::string>> kv;

    void add(const std::string& k, const std::string& v) { kv.emplace_back(k, v); }
    void add(const std::string& k, double v) { kv.emplace_back(k, sf::format_g17(v)); }
    void add(const std::string& k, int v) { kv.emplace_back(k, std::to_string(v)); }
    void add(const std::string& k, uint64_t v) { kv.emplace_back(k, std::to_string(v)); }

    void stamp(sf::CsvWriter& w) const {
        std::string blob;
        for (const auto& [k, v] : kv) blob += k + "=" + v + "\n";
        for (const auto& [k, v] : kv) w.comment(k + " = " + v);
        w.comment("config_sha1 = " + sf::sha1_hex(blob));
    }
};

std::string out_file(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    return (std::filesystem::path(dir) / name).string();
}

const char* kColors[8] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

sf::Domain domain_of(const std::string& name, int d) {
    if (name == "box") return {sf::DomainKind::box, d};
    if (name == "disc") return {sf::DomainKind::disc, d};
    throw sf::Error("unknown domain: " + name);
}

struct GridChoice {
    sf::Domain domain;
    sf::Classification cls;
};

// d=1 defaults to the chain lattice of the walk representation; d>=2 to the
// unit box. "chain" is only meaningful in d=1.
GridChoice grid_choice(const std::string& name, int d) {
    if (name == "chain" || (name.empty() && d == 1)) {
        if (d != 1) throw sf::Error("chain domain requires d=1");
        return {{sf::DomainKind::box, 1}, sf::Classification::chain};
    }
    if (name.empty()) return {{sf::DomainKind::box, d}, sf::Classification::general};
    return {domain_of(name, d), sf::Classification::general};
}

// ladder grammar: "16..256" (doubling) or "16,32,64".
std::vector<int> parse_ladder(const std::string& text) {
    std::vector<int> out;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const int lo = std::stoi(text.substr(0, dots));
        const int hi = std::stoi(text.substr(dots + 2));
        if (lo < 2 || hi < lo) throw sf::Error("bad ladder range: " + text);
        for (int v = lo; v <= hi; v *= 2) out.push_back(v);
        return out;
    }
    std::string cur;
    for (char ch : text + ",") {
        if (ch == ',') {
            if (!cur.empty()) out.push_back(std::stoi(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (out.empty()) throw sf::Error("empty ladder: " + text);
    return out;
}

// rho grammar: "<a>+<c>*h^<p>" with shortcuts "h", "h^p", "c*h^p", "a+h", "c".
sf::RhoRule parse_rho_rule(std::string text) {
    sf::RhoRule r;
    std::string tail = text;
    const auto plus = text.find('+');
    if (plus != std::string::npos) {
        r.a = std::stod(text.substr(0, plus));
        tail = text.substr(plus + 1);
    }
    const auto hpos = tail.find('h');
    if (hpos == std::string::npos) {
        if (plus != std::string::npos) throw sf::Error("bad rho rule: " + text);
        r.a = std::stod(tail);
        r.c = 0.0;
        r.p = 0.0;
        return r;
    }
    const std::string coef = tail.substr(0, hpos);
    if (coef.empty()) {
        r.c = 1.0;
    } else if (coef.back() == '*') {
        r.c = std::stod(coef.substr(0, coef.size() - 1));
    } else {
        throw sf::Error("bad rho rule: " + text);
    }
    const std::string rest = tail.substr(hpos + 1);
    if (rest.empty()) {
        r.p = 1.0;
    } else if (rest.size() > 1 && rest[0] == '^') {
        r.p = std::stod(rest.substr(1));
    } else {
        throw sf::Error("bad rho rule: " + text);
    }
    return r;
}

sf::OpBase parse_op(const std::string& name) {
    if (name == "neg-laplacian" || name == "neg_laplacian") return sf::OpBase::neg_laplacian;
    if (name == "bilaplacian") return sf::OpBase::bilaplacian;
    if (name == "mixed") return sf::OpBase::mixed;
    throw sf::Error("unknown operator: " + name);
}

// ---------------------------------------------------------------- trajectories

int cmd_trajectories(const std::string& preset, int N, std::vector<double> kappas,
                     int paths, int terminal_paths, uint64_t seed,
                     const std::string& out, const std::string& format,
                     std::string kappa_note) {
    if (preset == "fig1") {
        N = 10000;
        kappas = {0.0, 2e2, 2e4, 2e6};
    } else if (preset == "fig2") {
        N = 1000;
        kappas = {2.0 * std::pow(10.0, 6.5), 2e7, 2e8};
        kappa_note = "2*10^6.5, 2*10^7, 2*10^8";
    } else if (!preset.empty()) {
        throw sf::Error("unknown preset: " + preset);
    }
    if (kappas.empty()) kappas = {0.0};

    const std::string tag = preset.empty() ? ("N" + std::to_string(N)) : preset;
    std::vector<sf::SvgSeries> series;

    for (size_t ki = 0; ki < kappas.size(); ++ki) {
        const sf::RWParams P = sf::make_rw_params(N, kappas[ki]);
        const sf::Regime regime = sf::classify_regime(1, N, P.kappa);
        const sf::WalkPaths wp = sf::simulate_W(P, seed, paths);

        Echo echo;
        echo.add("command", std::string("trajectories"));
        if (!preset.empty()) echo.add("preset", preset);
        echo.add("d", 1);
        echo.add("N", N);
        echo.add("kappa", P.kappa);
        if (!kappa_note.empty()) echo.add("kappa_set", kappa_note);
        echo.add("beta", P.beta);
        echo.add("gamma", P.gamma);
        echo.add("sigma2", P.sigma2);
        echo.add("regime", sf::regime_name(regime));
        echo.add("paths", paths);
        echo.add("seed", seed);

        char fname[128];
        std::snprintf(fname, sizeof fname, "trajectories_%s_k%zu.csv", tag.c_str(), ki);
        {
            sf::CsvWriter w(out_file(out, fname));
            echo.stamp(w);
            w.header({"path", "n", "W"});
            for (int p = 0; p < paths; ++p)
                for (int n = 1; n <= N; ++n)
                    w.row_numeric({(double)p, (double)n, wp.at(p, n)});
            w.close();
        }

        // Large terminal-only ensemble for distributional comparisons.
        const std::vector<double> terminal =
            sf::simulate_W_terminal(P, seed, terminal_paths);
        std::snprintf(fname, sizeof fname, "trajectories_%s_k%zu_terminal.csv",
                      tag.c_str(), ki);
        {
            sf::CsvWriter w(out_file(out, fname));
            echo.stamp(w);
            w.comment("terminal_paths = " + std::to_string(terminal_paths));
            w.header({"path", "W_N"});
            for (int p = 0; p < terminal_paths; ++p)
                w.row_numeric({(double)p, terminal[p]});
            w.close();
        }

        if (format == "csv+svg") {
            const int stride = std::max(1, N / 2000);
            for (int p = 0; p < paths; ++p) {
                sf::SvgSeries s;
                if (p == 0) {
                    char lab[64];
                    std::snprintf(lab, sizeof lab, "kappa=%g", P.kappa);
                    s.label = lab;
                }
                s.color = kColors[ki % 8];
                for (int n = 1; n <= N; n += stride) {
                    s.x.push_back(n);
                    s.y.push_back(wp.at(p, n));
                }
                series.push_back(std::move(s));
            }
        }
    }

    if (format == "csv+svg")
        sf::write_svg_polylines(out_file(out, "trajectories_" + tag + ".svg"),
                                "W_n trajectories (" + tag + ")", series);
    return 0;
}

// ----------------------------------------------------------------- phase-scan

int cmd_phase_scan(int d, const std::vector<int>& Ns, const std::string& kappa_rule,
                   const std::string& fname_arg, int samples, uint64_t seed,
                   const std::string& out) {
    if (fname_arg != "sin") throw sf::Error("only --f sin is supported");
    const sf::KappaRule rule = sf::parse_kappa_rule(kappa_rule);
    const sf::TestFunction f = sf::sin_test_function(d);

    // Fine-grid reference for the limit column, same kappa rule.
    const int N_ref = (d == 1) ? 2048 : (d == 2 ? 64 : 24);
    const GridChoice ref_choice = grid_choice("", d);
    const sf::GridGeometry g_ref =
        sf::build_grid(ref_choice.domain, N_ref, ref_choice.cls);
    const sf::ModelParams mp_ref = sf::make_model(d, N_ref, rule((double)N_ref));
    const double limit = sf::exact_pairing_variance(mp_ref, g_ref, f);

    Echo echo;
    echo.add("command", std::string("phase-scan"));
    echo.add("d", d);
    echo.add("kappa_rule", rule.str());
    echo.add("f", f.name);
    echo.add("samples", samples);
    echo.add("seed", seed);
    echo.add("N_ref", N_ref);

    sf::CsvWriter w(out_file(out, "phase_scan.csv"));
    echo.stamp(w);
    w.header({"N", "kappa", "var_exact", "var_mc", "limit", "ratio"});
    for (int N : Ns) {
        const double kappa = rule((double)N);
        const GridChoice choice = grid_choice("", d);
        const sf::GridGeometry g = sf::build_grid(choice.domain, N, choice.cls);
        const sf::ModelParams mp = sf::make_model(d, N, kappa);
        const double var_exact = sf::exact_pairing_variance(mp, g, f);

        sf::FieldEnsemble ens = sf::sample(mp, g, samples, seed);
        const std::vector<double> pairs = sf::pair(ens, f);
        double mean = 0.0;
        for (double v : pairs) mean += v;
        mean /= (double)pairs.size();
        double var_mc = 0.0;
        for (double v : pairs) var_mc += (v - mean) * (v - mean);
        var_mc /= (double)(pairs.size() - 1);

        w.row_numeric({(double)N, kappa, var_exact, var_mc, limit,
                       var_exact / limit});
    }
    w.close();
    return 0;
}

// ---------------------------------------------------------------------- green

int cmd_green(int d, int N, double kappa, const std::string& domain,
              const std::string& out) {
    const GridChoice choice = grid_choice(domain, d);
    const sf::GridGeometry g = sf::build_grid(choice.domain, N, choice.cls);
    if (g.n_unknowns > 4096)
        throw sf::Error("green: grid has " + std::to_string(g.n_unknowns) +
                        " unknowns; the dense pair export caps at 4096");
    const sf::GreenFunction G = sf::green_function(g, kappa);

    char fname[96];
    std::snprintf(fname, sizeof fname, "green_d%d_N%d.csv", d, N);
    const std::string path = out_file(out, fname);
    // export_csv writes the value table; prepend echo via a fresh writer.
    sf::CsvWriter w(path);
    Echo echo;
    echo.add("command", std::string("green"));
    echo.add("d", d);
    echo.add("N", N);
    echo.add("kappa", kappa);
    echo.add("regime", sf::regime_name(sf::classify_regime(d, N, kappa)));
    echo.add("unknowns", g.n_unknowns);
    echo.stamp(w);
    w.header({"x_index", "y_index", "value"});
    for (int x = 0; x < g.n_unknowns; ++x)
        for (int y = 0; y < g.n_unknowns; ++y)
            w.row_numeric({(double)x, (double)y, G(x, y)});
    w.close();
    return 0;
}

// --------------------------------------------------------------------- sample

int cmd_sample(int d, int N, double kappa, const std::string& domain, int samples,
               uint64_t seed, const std::string& out) {
    const GridChoice choice = grid_choice(domain, d);
    const sf::GridGeometry g = sf::build_grid(choice.domain, N, choice.cls);
    const sf::ModelParams mp = sf::make_model(d, N, kappa);
    sf::FieldEnsemble ens = sf::sample(mp, g, samples, seed);
    char fname[96];
    std::snprintf(fname, sizeof fname, "ensemble_d%d_N%d.csv", d, N);
    sf::export_ensemble_csv(ens, out_file(out, fname));
    return 0;
}

// ------------------------------------------------------------------- converge

int cmd_converge(int d, const std::string& op_name_arg, const std::string& rho_text,
                 const std::string& ladder_text, const std::string& out) {
    const sf::OpBase base = parse_op(op_name_arg);
    const sf::RhoRule rho = parse_rho_rule(rho_text);
    const std::vector<int> ladder_N = parse_ladder(ladder_text);
    std::vector<double> ladder;
    for (int n : ladder_N) ladder.push_back(1.0 / n);

    const sf::ConvergenceCase c = sf::manufactured(base, d, rho);
    const sf::RateReport rep = sf::rate_report(c, ladder);

    // Envelope: constant fitted on the two coarsest meshes, then every finer
    // mesh must stay under 1.1x the fitted envelope.
    double C = 0.0;
    for (size_t i = 0; i < 2 && i < rep.rows.size(); ++i)
        C = std::max(C, rep.rows[i].error / rep.rows[i].bound);
    bool pass = true;
    for (size_t i = 2; i < rep.rows.size(); ++i)
        if (rep.rows[i].error > 1.1 * C * rep.rows[i].bound) pass = false;

    Echo echo;
    echo.add("command", std::string("converge"));
    echo.add("d", d);
    echo.add("op", op_name_arg);
    echo.add("rho", rho.str());
    echo.add("solution", c.name);
    echo.add("slope", rep.slope);
    echo.add("ratio_spread", rep.ratio_spread);
    echo.add("C_fit", C);
    echo.add("envelope", std::string(pass ? "PASS" : "FAIL"));

    sf::CsvWriter w(out_file(out, "converge_" + op_name_arg + ".csv"));
    echo.stamp(w);
    w.header({"h", "error", "bound", "ratio"});
    for (const sf::RateRow& r : rep.rows)
        w.row_numeric({r.h, r.error, r.bound, r.ratio});
    w.close();

    std::printf("%s slope=%.4f spread=%.4f C=%.6g\n", pass ? "PASS" : "FAIL",
                rep.slope, rep.ratio_spread, C);
    return 0;
}

// ------------------------------------------------------------------- spectrum

int cmd_spectrum(int d, int N, const std::string& op_name_arg, double rho_value,
                 int k, const std::string& domain, bool do_weyl, bool normalized,
                 const std::string& out) {
    const sf::OpBase base = parse_op(op_name_arg);
    const GridChoice choice = grid_choice(domain, d);
    const sf::GridGeometry g = sf::build_grid(choice.domain, N, choice.cls);
    const sf::MixedOperatorSpec spec = sf::make_spec(base, rho_value, 1.0 / N);
    const sf::SparseOperator A = sf::assemble(spec, g, normalized);
    const sf::SpectrumResult res = sf::spectrum(A, k, false);

    Echo echo;
    echo.add("command", std::string("spectrum"));
    echo.add("d", d);
    echo.add("N", N);
    echo.add("op", res.op_tag);
    echo.add("rho", rho_value);
    echo.add("order", res.order);
    echo.add("k", k);
    echo.add("unknowns", A.n);

    char fname[96];
    std::snprintf(fname, sizeof fname, "spectrum_%s_N%d.csv", op_name_arg.c_str(), N);
    {
        sf::CsvWriter w(out_file(out, fname));
        echo.stamp(w);
        w.header({"j", "eigenvalue"});
        for (size_t j = 0; j < res.eigenvalues.size(); ++j)
            w.row_numeric({(double)(j + 1), res.eigenvalues[j]});
        w.close();
    }

    if (do_weyl) {
        const sf::WeylCheck wc = sf::weyl_check(res, d, res.order);
        std::snprintf(fname, sizeof fname, "weyl_%s_N%d.csv", op_name_arg.c_str(), N);
        sf::CsvWriter w(out_file(out, fname));
        echo.stamp(w);
        w.header({"trusted", "slope", "expected", "rel_err"});
        w.row_numeric({(double)wc.trusted, wc.slope, wc.expected, wc.rel_err});
        w.close();
        std::printf("weyl trusted=%d slope=%.4f expected=%.4f rel_err=%.4f\n",
                    wc.trusted, wc.slope, wc.expected, wc.rel_err);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for the mixed gradient+bending interface model"};
    app.set_config("--config");
    app.require_subcommand(1);

    // trajectories
    auto* tr = app.add_subcommand("trajectories", "d=1 walk trajectories (figure presets)");
    std::string tr_preset, tr_out = "out", tr_format = "csv+svg";
    int tr_N = 1000, tr_paths = 8, tr_terminal = 1 << 14;
    uint64_t tr_seed = 1;
    std::vector<double> tr_kappas;
    tr->add_option("--preset", tr_preset, "fig1 or fig2");
    tr->add_option("--N", tr_N, "walk length when no preset is given");
    tr->add_option("--kappa", tr_kappas, "kappa values")->delimiter(',');
    tr->add_option("--paths", tr_paths, "trajectory count per kappa");
    tr->add_option("--terminal-paths", tr_terminal, "terminal ensemble size");
    tr->add_option("--seed", tr_seed, "RNG seed");
    tr->add_option("--out", tr_out, "output directory");
    tr->add_option("--format", tr_format)->check(CLI::IsMember({"csv", "csv+svg"}));

    // phase-scan
    auto* ps = app.add_subcommand("phase-scan", "variance of (Psi_N, f) across N");
    int ps_d = 1, ps_samples = 2000;
    uint64_t ps_seed = 1;
    std::string ps_rule = "N^2", ps_f = "sin", ps_out = "out";
    std::vector<int> ps_N{64, 128, 256};
    ps->add_option("--d", ps_d)->check(CLI::Range(1, 3));
    ps->add_option("--N", ps_N, "N ladder")->delimiter(',');
    ps->add_option("--kappa-rule", ps_rule, "kappa as a function of N");
    ps->add_option("--f", ps_f, "test function (sin)");
    ps->add_option("--samples", ps_samples, "Monte Carlo sample count");
    ps->add_option("--seed", ps_seed);
    ps->add_option("--out", ps_out);

    // green
    auto* gr = app.add_subcommand("green", "export the covariance table");
    int gr_d = 1, gr_N = 16;
    double gr_kappa = 1.0;
    std::string gr_domain, gr_out = "out";
    gr->add_option("--d", gr_d)->check(CLI::Range(1, 3));
    gr->add_option("--N", gr_N);
    gr->add_option("--kappa", gr_kappa);
    gr->add_option("--domain", gr_domain, "box, disc, or chain (d=1 default: chain)");
    gr->add_option("--out", gr_out);

    // sample
    auto* sa = app.add_subcommand("sample", "draw exact field samples");
    int sa_d = 1, sa_N = 16, sa_samples = 100;
    double sa_kappa = 1.0;
    uint64_t sa_seed = 1;
    std::string sa_domain, sa_out = "out";
    sa->add_option("--d", sa_d)->check(CLI::Range(1, 3));
    sa->add_option("--N", sa_N);
    sa->add_option("--kappa", sa_kappa);
    sa->add_option("--samples", sa_samples);
    sa->add_option("--seed", sa_seed);
    sa->add_option("--domain", sa_domain);
    sa->add_option("--out", sa_out);

    // converge
    auto* cv = app.add_subcommand("converge", "manufactured-solution rate report");
    int cv_d = 1;
    std::string cv_op = "bilaplacian", cv_rho, cv_ladder, cv_out = "out";
    cv->add_option("--d", cv_d)->check(CLI::Range(1, 3));
    cv->add_option("--op", cv_op, "neg-laplacian, bilaplacian, or mixed");
    cv->add_option("--rho1", cv_rho, "coupling rule for --op neg-laplacian");
    cv->add_option("--rho2", cv_rho, "coupling rule for --op bilaplacian");
    cv->add_option("--rho3", cv_rho, "coupling rule for --op mixed");
    cv->add_option("--ladder", cv_ladder, "mesh ladder, e.g. 16..256");
    cv->add_option("--out", cv_out);

    // spectrum
    auto* sp = app.add_subcommand("spectrum", "low eigenvalues and Weyl fit");
    int sp_d = 1, sp_N = 64, sp_k = 40;
    double sp_rho = 0.0;
    bool sp_weyl = false, sp_norm = false;
    std::string sp_op = "neg-laplacian", sp_domain, sp_out = "out";
    sp->add_option("--d", sp_d)->check(CLI::Range(1, 3));
    sp->add_option("--N", sp_N);
    sp->add_option("--op", sp_op);
    sp->add_option("--rho", sp_rho, "mixing coefficient");
    sp->add_option("--k", sp_k, "number of eigenvalues");
    sp->add_option("--domain", sp_domain, "box or disc (d=1 default: chain)");
    sp->add_flag("--weyl", sp_weyl, "append the Weyl slope report");
    sp->add_flag("--normalized", sp_norm, "use the probabilistic Laplacian");
    sp->add_option("--out", sp_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (tr->parsed()) {
            if (tr_paths < 1) {
                std::fprintf(stderr, "trajectories: --paths must be >= 1\n");
                return 2;
            }
            if (tr_terminal < 2) {
                std::fprintf(stderr, "trajectories: --terminal-paths must be >= 2\n");
                return 2;
            }
            return cmd_trajectories(tr_preset, tr_N, tr_kappas, tr_paths, tr_terminal,
                                    tr_seed, tr_out, tr_format, "");
        }
        if (ps->parsed()) {
            if (ps_samples < 2) {
                std::fprintf(stderr, "phase-scan: --samples must be >= 2\n");
                return 2;
            }
            return cmd_phase_scan(ps_d, ps_N, ps_rule, ps_f, ps_samples, ps_seed, ps_out);
        }
        if (gr->parsed()) return cmd_green(gr_d, gr_N, gr_kappa, gr_domain, gr_out);
        if (sa->parsed()) {
            if (sa_samples < 1) {
                std::fprintf(stderr, "sample: --samples must be >= 1\n");
                return 2;
            }
            return cmd_sample(sa_d, sa_N, sa_kappa, sa_domain, sa_samples, sa_seed, sa_out);
        }
        if (cv->parsed()) {
            if (cv_rho.empty())
                cv_rho = (cv_op == "mixed") ? "1+h" : (cv_op == "bilaplacian" ? "h" : "h^2");
            if (cv_ladder.empty()) cv_ladder = (cv_d == 1) ? "16..256" : "8..64";
            return cmd_converge(cv_d, cv_op, cv_rho, cv_ladder, cv_out);
        }
        if (sp->parsed())
            return cmd_spectrum(sp_d, sp_N, sp_op, sp_rho, sp_k, sp_domain, sp_weyl,
                                sp_norm, sp_out);
    } catch (const sf::IOFailure& e) {
        std::fprintf(stderr, "I/O error: %s\n", e.what());
        return 4;
    } catch (const sf::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 2;
}
