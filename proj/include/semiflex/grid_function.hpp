#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "semiflex/grid.hpp"

namespace semiflex {

// Real values on an integer window of the lattice, read as zero outside the
// window. Difference operators enlarge the window so that identities like
// summation by parts hold exactly over the whole lattice.
struct GridFunction {
    int d = 1;
    double h = 1.0;
    Coord lo{}, hi{}; // inclusive window
    std::vector<double> v;
    const GridGeometry* geom = nullptr; // optional backing geometry

    GridFunction() = default;
    GridFunction(int d_, double h_, const Coord& lo_, const Coord& hi_,
                 const GridGeometry* g = nullptr);

    static GridFunction zeros_like(const GridGeometry& g, int pad = 0);

    std::size_t size() const { return v.size(); }

    bool inside(const Coord& k) const {
        for (int i = 0; i < d; ++i)
            if (k[i] < lo[i] || k[i] > hi[i]) return false;
        return true;
    }

    std::size_t flat(const Coord& k) const {
        std::size_t idx = 0;
        for (int i = 0; i < d; ++i)
            idx = idx * static_cast<std::size_t>(hi[i] - lo[i] + 1) +
                  static_cast<std::size_t>(k[i] - lo[i]);
        return idx;
    }

    double at(const Coord& k) const { return inside(k) ? v[flat(k)] : 0.0; }
    double& ref(const Coord& k) { return v[flat(k)]; }

    Coord coord_of(std::size_t idx) const; // inverse of flat()

    // f(coord, value) over the window in lex order
    template <class F>
    void for_each(F&& f) const {
        const std::size_t n = v.size();
        for (std::size_t i = 0; i < n; ++i) f(coord_of(i), v[i]);
    }
};

// Sample a continuum function (arguments in physical coordinates x = k*h) on
// the geometry's grid points; zero stays outside the domain closure.
template <class F>
GridFunction sample_on_grid(const GridGeometry& g, F&& f) {
    GridFunction u = GridFunction::zeros_like(g);
    double x[3] = {0, 0, 0};
    for (std::size_t p = 0; p < g.points.size(); ++p) {
        const Coord& k = g.points[p];
        for (int i = 0; i < g.d(); ++i) x[i] = k[i] * g.h;
        u.ref(k) = f(x);
    }
    return u;
}

} // namespace semiflex
