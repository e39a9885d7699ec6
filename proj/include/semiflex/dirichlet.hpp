#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <list>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "semiflex/operators.hpp"

namespace semiflex {

using SpMat = Eigen::SparseMatrix<double>;

struct SparseOperator {
    int n = 0;
    SpMat A; // symmetric, unknowns of R_h, zero Dirichlet data eliminated
    MixedOperatorSpec spec;
    bool normalized = false;
    const GridGeometry* g = nullptr;
};

// Rows of L_h applied to unit vectors of the R_h unknowns, zero extension
// outside; exactly symmetric by construction.
SparseOperator assemble(const MixedOperatorSpec& spec, const GridGeometry& g,
                        bool normalized);

// Sparse LDLT with one step of iterative refinement per solve. The LU
// backend exists for the large disc spectra, where the supernodal solver
// factors far faster than the simplicial one.
class Factorization {
  public:
    enum class Backend { ldlt, lu };
    explicit Factorization(const SparseOperator& op, Backend backend = Backend::ldlt);

    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;            // refined
    Eigen::VectorXd solve_once(const Eigen::VectorXd& b) const;       // raw
    Eigen::VectorXd sqrt_precision_inv_t(const Eigen::VectorXd& xi) const;
    // ^ z = P^T L^{-T} D^{-1/2} ξ, so Cov(z) = A^{-1} (sampler transform;
    //   LDLT backend only)

    const SparseOperator& op() const { return op_; }

  private:
    SparseOperator op_;
    Backend backend_;
    Eigen::SimplicialLDLT<SpMat> ldlt_;
    Eigen::SparseLU<SpMat> lu_;
};

Eigen::VectorXd restrict_to_unknowns(const GridGeometry& g, const GridFunction& f);
GridFunction extend_to_grid(const GridGeometry& g, const Eigen::VectorXd& u);

// L_h u = f on R_h, u = 0 on B_h and outside; relative residual <= 1e-10.
GridFunction solve_dirichlet(const SparseOperator& A, const GridFunction& f);

// Covariance of the field: columns solve (-Δ + κΔ²) G(x,·) = δ_x with the
// normalized Laplacian on the unknowns, zero outside. Dense storage up to
// `dense_limit` unknowns, column-on-demand LRU above it.
class GreenFunction {
  public:
    static constexpr int dense_limit = 20000;

    GreenFunction(const GridGeometry& g, double kappa);

    double operator()(int ux, int uy) const;
    Eigen::VectorXd column(int uy) const;
    bool is_dense() const { return dense_.size() > 0; }
    const Eigen::MatrixXd& dense() const { return dense_; }

    double kappa() const { return kappa_; }
    const GridGeometry& geometry() const { return *g_; }
    const Factorization& factorization() const { return *fact_; }
    int n() const { return n_; }

    void export_csv(const std::string& path) const; // x_index,y_index,value

  private:
    const GridGeometry* g_;
    double kappa_;
    int n_;
    std::shared_ptr<Factorization> fact_;
    Eigen::MatrixXd dense_;
    // LRU cache of factor solves for the column-on-demand regime
    mutable std::mutex mu_;
    mutable std::unordered_map<int, std::list<std::pair<int, Eigen::VectorXd>>::iterator> where_;
    mutable std::list<std::pair<int, Eigen::VectorXd>> cache_;
    std::size_t cache_cap_ = 0;
};

GreenFunction green_function(const GridGeometry& g, double kappa);

// Model precision operator -Δ + κΔ² (normalized) on the lattice (h=1).
SparseOperator model_precision(const GridGeometry& g, double kappa);

} // namespace semiflex
