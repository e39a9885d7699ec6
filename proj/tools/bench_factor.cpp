// Factorization backend bench on the large disc bilaplacian: prints factor
// and solve timings for the simplicial LDLT and the supernodal LU so the
// spectral backend choice stays an informed one.
#include "semiflex/dirichlet.hpp"

#include <chrono>
#include <cstdio>

using clk = std::chrono::steady_clock;

static double secs(clk::time_point a, clk::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

int main(int argc, char** argv) {
    const int N = (argc > 1) ? std::atoi(argv[1]) : 256;
    const semiflex::GridGeometry g =
        semiflex::build_grid({semiflex::DomainKind::disc, 2}, N);
    const semiflex::MixedOperatorSpec spec =
        semiflex::make_spec(semiflex::OpBase::bilaplacian, 0.0, 1.0 / N);
    const semiflex::SparseOperator A = semiflex::assemble(spec, g, false);
    std::printf("disc N=%d unknowns=%d nnz=%lld\n", N, A.n, (long long)A.A.nonZeros());

    const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(A.n, 0.3, 1.7);
    for (auto backend : {semiflex::Factorization::Backend::ldlt,
                         semiflex::Factorization::Backend::lu}) {
        const char* name =
            backend == semiflex::Factorization::Backend::ldlt ? "ldlt" : "lu";
        const auto t0 = clk::now();
        const semiflex::Factorization F(A, backend);
        const auto t1 = clk::now();
        Eigen::VectorXd x;
        for (int r = 0; r < 5; ++r) x = F.solve_once(b);
        const auto t2 = clk::now();
        std::printf("%-4s factor %6.2fs   solve %6.3fs   checksum %.6g\n", name,
                    secs(t0, t1), secs(t1, t2) / 5, x.sum());
    }
    return 0;
}
