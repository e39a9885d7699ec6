#include "semiflex/grid.hpp"

#include <algorithm>
#include <cstddef>

#include "semiflex/csvio.hpp"
#include "semiflex/errors.hpp"

namespace semiflex {

namespace {

std::vector<Coord> make_offsets(int d) {
    std::vector<Coord> out;
    for (int i = 0; i < d; ++i)
        for (int s : {-1, 1}) {
            Coord k{0, 0, 0};
            k[i] = s;
            out.push_back(k);
            k[i] = 2 * s;
            out.push_back(k);
        }
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            for (int si : {-1, 1})
                for (int sj : {-1, 1}) {
                    Coord k{0, 0, 0};
                    k[i] = si;
                    k[j] = sj;
                    out.push_back(k);
                }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace

const std::vector<Coord>& neighbor_offsets(int d) {
    static const std::vector<Coord> o1 = make_offsets(1);
    static const std::vector<Coord> o2 = make_offsets(2);
    static const std::vector<Coord> o3 = make_offsets(3);
    switch (d) {
        case 1: return o1;
        case 2: return o2;
        case 3: return o3;
        default: throw Error("neighbor_offsets: d must be 1, 2, or 3");
    }
}

std::vector<Coord> neighbors(const GridGeometry& g, const Coord& x) {
    const auto& offs = neighbor_offsets(g.d());
    std::vector<Coord> out;
    out.reserve(offs.size());
    for (const Coord& o : offs)
        out.push_back({x[0] + o[0], x[1] + o[1], x[2] + o[2]});
    return out;
}

bool GridGeometry::in_closure(const Coord& k) const { return point_index(k) >= 0; }

int GridGeometry::point_index(const Coord& k) const {
    std::size_t idx = 0;
    for (int i = 0; i < domain.d; ++i) {
        if (k[i] < lo_[i] || k[i] > hi_[i]) return -1;
        idx = idx * static_cast<std::size_t>(hi_[i] - lo_[i] + 1) +
              static_cast<std::size_t>(k[i] - lo_[i]);
    }
    return lookup_[idx];
}

PointClass GridGeometry::classify(const Coord& k) const {
    const int p = point_index(k);
    return p < 0 ? PointClass::outside : point_class[p];
}

int GridGeometry::unknown_index(const Coord& k) const {
    const int p = point_index(k);
    return p < 0 ? -1 : unknown_of_point[p];
}

GridGeometry build_grid(Domain domain, int N, Classification cls) {
    if (domain.d < 1 || domain.d > 3) throw Error("build_grid: d must be 1, 2, or 3");
    if (domain.kind == DomainKind::disc && domain.d < 2)
        throw Error("build_grid: the disc domain needs d in {2,3}");
    if (N < 1) throw EmptyInterior("build_grid: N must be positive");
    if (cls == Classification::chain &&
        (domain.d != 1 || domain.kind != DomainKind::box))
        throw Error("build_grid: chain classification is a d=1 box convention");

    GridGeometry g;
    g.domain = domain;
    g.N = N;
    g.h = 1.0 / N;
    g.classification = cls;

    const int d = domain.d;
    g.lo_ = {0, 0, 0};
    g.hi_ = {0, 0, 0};
    for (int i = 0; i < d; ++i) {
        if (cls == Classification::chain) {
            g.lo_[i] = 0;
            g.hi_[i] = N + 1;
        } else if (domain.kind == DomainKind::box) {
            g.lo_[i] = 0;
            g.hi_[i] = N;
        } else {
            g.lo_[i] = -N;
            g.hi_[i] = N;
        }
    }

    auto member = [&](const Coord& k) -> bool {
        for (int i = 0; i < d; ++i)
            if (k[i] < g.lo_[i] || k[i] > g.hi_[i]) return false;
        if (domain.kind == DomainKind::disc) {
            long long s = 0;
            for (int i = 0; i < d; ++i) s += 1LL * k[i] * k[i];
            return s <= 1LL * N * N;
        }
        return true;
    };

    std::size_t window = 1;
    for (int i = 0; i < d; ++i)
        window *= static_cast<std::size_t>(g.hi_[i] - g.lo_[i] + 1);
    g.lookup_.assign(window, -1);

    // lex-ordered closure points
    Coord k{0, 0, 0};
    Coord it_lo = g.lo_, it_hi = g.hi_;
    for (int i = d; i < 3; ++i) it_lo[i] = it_hi[i] = 0;
    for (k[0] = it_lo[0]; k[0] <= it_hi[0]; ++k[0])
        for (k[1] = it_lo[1]; k[1] <= it_hi[1]; ++k[1])
            for (k[2] = it_lo[2]; k[2] <= it_hi[2]; ++k[2]) {
                if (!member(k)) continue;
                std::size_t idx = 0;
                for (int i = 0; i < d; ++i)
                    idx = idx * static_cast<std::size_t>(g.hi_[i] - g.lo_[i] + 1) +
                          static_cast<std::size_t>(k[i] - g.lo_[i]);
                g.lookup_[idx] = static_cast<int>(g.points.size());
                g.points.push_back(k);
            }

    const std::size_t np = g.points.size();
    const auto& offs = neighbor_offsets(d);

    // interior pass: every neighbor offset stays inside the domain
    std::vector<char> interior(np, 0);
    for (std::size_t p = 0; p < np; ++p) {
        const Coord& x = g.points[p];
        if (cls == Classification::chain) {
            interior[p] = (x[0] >= 1 && x[0] <= N - 1);
            continue;
        }
        bool ok = true;
        for (const Coord& o : offs) {
            const Coord y{x[0] + o[0], x[1] + o[1], x[2] + o[2]};
            if (!member(y)) {
                ok = false;
                break;
            }
        }
        interior[p] = ok;
    }

    g.point_class.assign(np, PointClass::B);
    g.unknown_of_point.assign(np, -1);
    for (std::size_t p = 0; p < np; ++p) {
        if (!interior[p]) continue;
        const Coord& x = g.points[p];
        bool deep = true;
        for (const Coord& o : offs) {
            const Coord y{x[0] + o[0], x[1] + o[1], x[2] + o[2]};
            const int q = g.point_index(y);
            if (q < 0 || !interior[q]) {
                deep = false;
                break;
            }
        }
        g.point_class[p] = deep ? PointClass::Rstar : PointClass::Bstar;
        g.unknown_of_point[p] = g.n_unknowns++;
        g.point_of_unknown.push_back(static_cast<int>(p));
    }
    for (std::size_t p = 0; p < np; ++p) {
        switch (g.point_class[p]) {
            case PointClass::Rstar: ++g.n_rstar; break;
            case PointClass::Bstar: ++g.n_bstar; break;
            case PointClass::B: ++g.n_b; break;
            default: break;
        }
    }

    if (g.n_unknowns == 0)
        throw EmptyInterior("build_grid: no interior points (N too small)");
    return g;
}

const char* class_name(PointClass c) {
    switch (c) {
        case PointClass::Rstar: return "Rstar";
        case PointClass::Bstar: return "Bstar";
        case PointClass::B: return "B";
        default: return "outside";
    }
}

void export_grid_csv(const GridGeometry& g, const std::string& path) {
    CsvWriter w(path);
    std::vector<std::string> names;
    for (int i = 0; i < g.d(); ++i) names.push_back("x_" + std::to_string(i + 1));
    names.push_back("class");
    w.header(names);
    for (std::size_t p = 0; p < g.points.size(); ++p) {
        std::vector<std::string> cells;
        for (int i = 0; i < g.d(); ++i)
            cells.push_back(std::to_string(g.points[p][i]));
        cells.push_back(class_name(g.point_class[p]));
        w.row(cells);
    }
    w.close();
}

} // namespace semiflex
