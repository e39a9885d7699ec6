#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "semiflex/errors.hpp"

namespace semiflex {

enum class DomainKind { box, disc };

// Bounded domain: the open unit box (0,1)^d or the unit disc, d <= 3.
struct Domain {
    DomainKind kind = DomainKind::box;
    int d = 1;
};

// Point classes. Rstar: interior points all of whose neighbors are interior.
// Bstar: remaining interior points. B: domain points that are not interior.
enum class PointClass : uint8_t { Rstar, Bstar, B, outside };

// `general`: interior = points whose full neighbor set stays in the domain
// closure (two layers of boundary points). `chain`: the d=1 convention with
// unknowns {1..N-1} and zeros at {0, N, N+1}, used by the walk-bridge
// cross-validation.
enum class Classification { general, chain };

using Coord = std::array<int, 3>; // lattice integers; unused trailing axes are 0

struct GridGeometry {
    Domain domain;
    int N = 0;
    double h = 0.0;
    Classification classification = Classification::general;

    std::vector<Coord> points;           // lex-ordered lattice points of the closure
    std::vector<PointClass> point_class; // parallel to points
    std::vector<int> unknown_of_point;   // -1 when the point is not an unknown
    std::vector<int> point_of_unknown;
    int n_unknowns = 0;
    int n_rstar = 0, n_bstar = 0, n_b = 0;

    int d() const { return domain.d; }

    bool in_closure(const Coord& k) const;
    int point_index(const Coord& k) const;     // -1 if not a grid point
    PointClass classify(const Coord& k) const; // outside for non-closure points
    int unknown_index(const Coord& k) const;   // -1 if not an unknown

    // integer bounding window of the point table
    Coord window_lo() const { return lo_; }
    Coord window_hi() const { return hi_; }

    Coord lo_{}, hi_{};
    std::vector<int> lookup_; // dense window -> point index or -1
};

// Deduplicated offsets {±e_i} ∪ {±(e_i±e_j)} over all i,j (i=j contributes
// ±2e_i), lexicographically ordered: 4, 12, 24 offsets for d = 1, 2, 3.
const std::vector<Coord>& neighbor_offsets(int d);

// The neighbor points x+offset in offset order; membership is the caller's check.
std::vector<Coord> neighbors(const GridGeometry& g, const Coord& x);

GridGeometry build_grid(Domain domain, int N,
                        Classification cls = Classification::general);

// Debug export: one row per grid point, columns x_1..x_d,class.
void export_grid_csv(const GridGeometry& g, const std::string& path);

const char* class_name(PointClass c);

} // namespace semiflex
