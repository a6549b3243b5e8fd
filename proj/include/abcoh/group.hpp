#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "abcoh/errors.hpp"

namespace abcoh {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

// Distance reported between dual points whose torsion characters differ.
// Acts as an "infinitely far" sentinel; genuine angular distances are <= pi.
inline constexpr double kTorsionMismatchDistance = kTwoPi;

// A finitely generated abelian group Z^d x Z_{n1} x ... x Z_{nk}.
// Its Pontryagin dual is T^d x Z_{n1} x ... x Z_{nk}.
struct GroupDescriptor {
    int free_rank = 0;
    std::vector<std::int64_t> torsion_orders;

    bool is_finite() const { return free_rank == 0; }
    int torsion_rank() const { return static_cast<int>(torsion_orders.size()); }
    int generator_count() const { return free_rank + torsion_rank(); }
    // Product of the torsion orders (1 when there is no torsion).
    std::int64_t torsion_size() const;
    bool operator==(const GroupDescriptor&) const = default;

    // Throws invalid input if free_rank < 0 or some torsion order < 2.
    void validate() const;
};

// Element of the group: integer vector on the free part, residues on the
// torsion part. Torsion residues are kept reduced to [0, n_j).
struct GroupElement {
    std::vector<std::int64_t> free_part;
    std::vector<std::int64_t> torsion_part;

    bool operator==(const GroupElement&) const = default;
};

// Point of the dual group: angles on the torus factors, character indices on
// the finite factors. Angles are kept canonicalized to (-pi, pi], with the
// trivial character at theta = 0.
struct DualPoint {
    std::vector<double> torus_angles;
    std::vector<std::int64_t> torsion_characters;

    bool operator==(const DualPoint&) const = default;
};

// Maps any angle to its canonical representative in (-pi, pi].
double canonical_angle(double theta);

// Arc-length distance between two angles on the circle, in [0, pi].
double circle_distance(double a, double b);

GroupElement make_element(const GroupDescriptor& g,
                          std::vector<std::int64_t> free_part,
                          std::vector<std::int64_t> torsion_part = {});
GroupElement zero_element(const GroupDescriptor& g);
// The i-th standard generator (free generators first, then torsion).
GroupElement generator(const GroupDescriptor& g, int i);
std::vector<GroupElement> generators(const GroupDescriptor& g);

GroupElement group_add(const GroupDescriptor& g, const GroupElement& a,
                       const GroupElement& b);
GroupElement group_negate(const GroupDescriptor& g, const GroupElement& a);
GroupElement group_subtract(const GroupDescriptor& g, const GroupElement& a,
                            const GroupElement& b);
// n * a for any signed integer n.
GroupElement group_scale(const GroupDescriptor& g, std::int64_t n,
                         const GroupElement& a);

// max-norm of the free part (0 for purely torsion elements).
std::int64_t free_linf_norm(const GroupElement& a);

DualPoint make_dual_point(const GroupDescriptor& g, std::vector<double> angles,
                          std::vector<std::int64_t> characters = {});
DualPoint trivial_character(const GroupDescriptor& g);
bool is_trivial_character(const DualPoint& xi);

// xi(x) = exp(i <theta, m>) * prod_j exp(2 pi i c_j r_j / n_j).
// Unit modulus up to round-off. Throws dimension_mismatch_error when the
// shapes of xi or x do not match g.
cplx evaluate_character(const GroupDescriptor& g, const DualPoint& xi,
                        const GroupElement& x);

// dim Hom(G, C) = free rank; zero exactly when the group is finite.
int hom_to_C_dimension(const GroupDescriptor& g);

// Max over torus coordinates of the circle distance; the 2*pi sentinel when
// the torsion characters differ. Symmetric, zero iff equal.
double dual_distance(const DualPoint& xi, const DualPoint& eta);

// All elements with free max-norm <= radius, every torsion residue.
// Odometer order: torsion fastest, free coordinates from -radius to radius.
std::vector<GroupElement> box_elements(const GroupDescriptor& g,
                                       std::int64_t radius);
// Same but free coordinates restricted to 0..radius. Differences of two
// half-box elements stay in the symmetric box of the same radius.
std::vector<GroupElement> half_box_elements(const GroupDescriptor& g,
                                            std::int64_t radius);

}  // namespace abcoh
