#include "semiflex/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "semiflex/csvio.hpp"
#include "semiflex/errors.hpp"

namespace semiflex {

SparseOperator assemble(const MixedOperatorSpec& spec, const GridGeometry& g,
                        bool normalized) {
    if (g.n_unknowns == 0) throw EmptyInterior("assemble: no unknowns");
    const Stencil st = stencil_of(spec, g.d(), normalized);

    // exact central symmetry of the stencil makes the assembled matrix
    // symmetric bit-for-bit
    for (const auto& e : st.entries) {
        const Coord neg{-e.first[0], -e.first[1], -e.first[2]};
        bool found = false;
        for (const auto& e2 : st.entries)
            if (e2.first == neg) {
                if (e2.second != e.second)
                    throw NonSymmetricStencil("assemble: stencil asymmetry");
                found = true;
                break;
            }
        if (!found) throw NonSymmetricStencil("assemble: stencil asymmetry");
    }

    SparseOperator op;
    op.n = g.n_unknowns;
    op.spec = spec;
    op.normalized = normalized;
    op.g = &g;

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(op.n) * st.entries.size());
    for (int u = 0; u < op.n; ++u) {
        const Coord& x = g.points[g.point_of_unknown[u]];
        for (const auto& e : st.entries) {
            const Coord y{x[0] + e.first[0], x[1] + e.first[1], x[2] + e.first[2]};
            const int vu = g.unknown_index(y);
            if (vu >= 0) trips.emplace_back(u, vu, e.second);
        }
    }
    op.A.resize(op.n, op.n);
    op.A.setFromTriplets(trips.begin(), trips.end());
    op.A.makeCompressed();
    return op;
}

Factorization::Factorization(const SparseOperator& op, Backend backend)
    : op_(op), backend_(backend) {
    if (backend_ == Backend::ldlt) {
        ldlt_.compute(op_.A);
        if (ldlt_.info() != Eigen::Success)
            throw FactorizationFailure("sparse LDLT failed");
        if ((ldlt_.vectorD().array() <= 0.0).any())
            throw FactorizationFailure("assembled operator is not positive definite");
    } else {
        lu_.compute(op_.A);
        if (lu_.info() != Eigen::Success)
            throw FactorizationFailure("sparse LU failed");
    }
}

Eigen::VectorXd Factorization::solve_once(const Eigen::VectorXd& b) const {
    return backend_ == Backend::ldlt ? ldlt_.solve(b).eval() : lu_.solve(b).eval();
}

Eigen::VectorXd Factorization::solve(const Eigen::VectorXd& b) const {
    Eigen::VectorXd x = solve_once(b);
    const Eigen::VectorXd r = b - op_.A * x;
    x += solve_once(r);
    return x;
}

Eigen::VectorXd Factorization::sqrt_precision_inv_t(const Eigen::VectorXd& xi) const {
    if (backend_ != Backend::ldlt)
        throw Error("sampler transform requires the LDLT backend");
    const Eigen::VectorXd y =
        xi.array() / ldlt_.vectorD().array().sqrt();
    const Eigen::VectorXd w = ldlt_.matrixU().solve(y);
    return ldlt_.permutationPinv() * w;
}

Eigen::VectorXd restrict_to_unknowns(const GridGeometry& g, const GridFunction& f) {
    Eigen::VectorXd b(g.n_unknowns);
    for (int u = 0; u < g.n_unknowns; ++u)
        b[u] = f.at(g.points[g.point_of_unknown[u]]);
    return b;
}

GridFunction extend_to_grid(const GridGeometry& g, const Eigen::VectorXd& u) {
    GridFunction out = GridFunction::zeros_like(g);
    for (int i = 0; i < g.n_unknowns; ++i)
        out.ref(g.points[g.point_of_unknown[i]]) = u[i];
    return out;
}

GridFunction solve_dirichlet(const SparseOperator& A, const GridFunction& f) {
    const Eigen::VectorXd b = restrict_to_unknowns(*A.g, f);
    const Factorization fact(A);
    const Eigen::VectorXd x = fact.solve(b);
    const double bn = b.norm();
    if (bn > 0.0) {
        const double res = (A.A * x - b).norm() / bn;
        if (res > 1e-10)
            throw FactorizationFailure("dirichlet solve residual " +
                                       format_g17(res));
    }
    return extend_to_grid(*A.g, x);
}

SparseOperator model_precision(const GridGeometry& g, double kappa) {
    // -Δ + κΔ² with the normalized Laplacian, lattice spacing 1
    return assemble(make_spec(OpBase::mixed, kappa, 1.0), g, true);
}

GreenFunction::GreenFunction(const GridGeometry& g, double kappa)
    : g_(&g), kappa_(kappa), n_(g.n_unknowns) {
    fact_ = std::make_shared<Factorization>(model_precision(g, kappa));
    if (n_ <= dense_limit) {
        dense_.resize(n_, n_);
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n_);
        for (int j = 0; j < n_; ++j) {
            e[j] = 1.0;
            dense_.col(j) = fact_->solve(e);
            e[j] = 0.0;
        }
    } else {
        // column budget ~50 MB
        cache_cap_ = std::max<std::size_t>(
            4, 50'000'000 / (8 * static_cast<std::size_t>(n_)));
    }
}

Eigen::VectorXd GreenFunction::column(int uy) const {
    if (is_dense()) return dense_.col(uy);
    std::lock_guard<std::mutex> lock(mu_);
    auto it = where_.find(uy);
    if (it != where_.end()) {
        cache_.splice(cache_.begin(), cache_, it->second);
        return cache_.front().second;
    }
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n_);
    e[uy] = 1.0;
    Eigen::VectorXd col = fact_->solve(e);
    cache_.emplace_front(uy, col);
    where_[uy] = cache_.begin();
    while (cache_.size() > cache_cap_) {
        where_.erase(cache_.back().first);
        cache_.pop_back();
    }
    return col;
}

double GreenFunction::operator()(int ux, int uy) const {
    if (is_dense()) return dense_(ux, uy);
    return column(uy)[ux];
}

void GreenFunction::export_csv(const std::string& path) const {
    CsvWriter w(path);
    w.comment("green function, kappa=" + format_g17(kappa_) +
              ", n_unknowns=" + std::to_string(n_));
    w.header({"x_index", "y_index", "value"});
    for (int y = 0; y < n_; ++y) {
        const Eigen::VectorXd col = column(y);
        for (int x = 0; x < n_; ++x)
            w.row({std::to_string(x), std::to_string(y), format_g17(col[x])});
    }
    w.close();
}

GreenFunction green_function(const GridGeometry& g, double kappa) {
    return GreenFunction(g, kappa);
}

} // namespace semiflex
