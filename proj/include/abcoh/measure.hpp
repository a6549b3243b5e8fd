#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "abcoh/group.hpp"

namespace abcoh {

// Positivity cutoff defining the numerical support of a density grid.
inline constexpr double kSupportThreshold = 1e-12;
// Slack accepted on the total mass of a probability measure.
inline constexpr double kMassTolerance = 1e-9;
// Default grid size per torus dimension.
inline constexpr std::int64_t kDefaultGridSize = 4096;

struct Atom {
    DualPoint point;
    double weight = 0.0;
};

// One quadrature cell of the gridded density part. The cell is the product of
// angular intervals of half-width `half_width(g, M)` centered at `point`
// (torsion coordinates are exact). Mass carried = density * quad_weight.
struct GridCell {
    DualPoint point;
    double density = 0.0;
    double quad_weight = 0.0;
};

// Probability measure on the dual group: finitely many atoms plus a density
// sampled on a uniform midpoint grid. Purely atomic measures leave the grid
// empty; measures on finite duals are purely atomic.
struct DualMeasure {
    GroupDescriptor group;
    std::vector<Atom> atoms;
    std::vector<GridCell> grid;
    // Grid resolution per torus dimension (0 when the grid is empty).
    std::int64_t grid_size = 0;

    std::size_t point_count() const { return atoms.size() + grid.size(); }
    const DualPoint& point(std::size_t i) const {
        return i < atoms.size() ? atoms[i].point : grid[i - atoms.size()].point;
    }
    // Mass carried by point i (atom weight, or density * quad_weight).
    double mass(std::size_t i) const {
        return i < atoms.size() ? atoms[i].weight
                                : grid[i - atoms.size()].density *
                                      grid[i - atoms.size()].quad_weight;
    }
    double total_mass() const;
    // Half-width of one grid cell per torus dimension.
    double cell_half_width() const;

    // Checks shapes, nonnegativity, distinct atoms, and total mass within
    // kMassTolerance of 1.
    void validate() const;
};

// Scales all weights/densities so the total mass is exactly 1; stores the
// applied factor (old_mass) in *factor_out when given.
DualMeasure normalize(DualMeasure mu, double* factor_out = nullptr);

// mu = trivial_mass * delta_{1_G} + (1 - trivial_mass) * perp.
struct Decomposition {
    double trivial_mass = 0.0;
    DualMeasure perp;
};

// Splits off the atom at the trivial character and renormalizes the rest.
// Throws constant_function_error when mu is delta_{1_G} within tolerance.
Decomposition decompose(const DualMeasure& mu);

DualMeasure reconstruct(const Decomposition& dec);

// Total-variation distance between two measures sharing the same point
// layout (same atoms order, same grid).
double tv_distance(const DualMeasure& a, const DualMeasure& b);

// Distance from xi to the numerical support: atoms plus grid cells with
// density > support_threshold; grid cells count with their full angular
// extent, so a density covering 1_G's cell boundary yields distance 0.
double distance_to_support(const DualPoint& xi, const DualMeasure& mu,
                           double support_threshold = kSupportThreshold);

// distance_to_support from the trivial character.
double support_gap(const DualMeasure& mu,
                   double support_threshold = kSupportThreshold);

// Weight of the atom sitting at xi (0 when absent).
double atom_weight_at(const DualMeasure& mu, const DualPoint& xi);

// Element of the discretized L^2(dual, mu): one value per atom and per cell.
struct MeasureVector {
    std::vector<cplx> atom_values;
    std::vector<cplx> grid_values;

    std::size_t size() const { return atom_values.size() + grid_values.size(); }
    cplx& operator[](std::size_t i) {
        return i < atom_values.size() ? atom_values[i]
                                      : grid_values[i - atom_values.size()];
    }
    const cplx& operator[](std::size_t i) const {
        return i < atom_values.size() ? atom_values[i]
                                      : grid_values[i - atom_values.size()];
    }
};

MeasureVector zero_vector(const DualMeasure& mu);
MeasureVector constant_vector(const DualMeasure& mu, cplx value);
// f evaluated pointwise on atoms and grid.
MeasureVector sample_function(const DualMeasure& mu,
                              const std::function<cplx(const DualPoint&)>& f);

// <u, v> = sum u_i conj(v_i) mass_i.
cplx inner_product(const MeasureVector& u, const MeasureVector& v,
                   const DualMeasure& mu);
double l2_norm(const MeasureVector& u, const DualMeasure& mu);

// xi |-> xi(x) at every measure point.
MeasureVector character_values(const DualMeasure& mu, const GroupElement& x);
// integral of xi(x) d mu(xi).
cplx integrate_character(const DualMeasure& mu, const GroupElement& x);

// dest += c * src (shapes must match).
void add_scaled(MeasureVector& dest, const MeasureVector& src, cplx c);
// (rho(x) - 1) u, i.e. pointwise (xi(x) - 1) * u(xi).
MeasureVector apply_rho_minus_one(const DualMeasure& mu, const GroupElement& x,
                                  const MeasureVector& u);

// --- Constructors for the measure families used by the CLI and tests ---

// Uniform midpoint grid over (-pi, pi]^d crossed with every torsion
// character; densities zero. Throws for finite groups (no torus factor).
DualMeasure empty_grid_measure(const GroupDescriptor& g, std::int64_t grid_size);

// Purely atomic measure (normalized).
DualMeasure make_atomic_measure(const GroupDescriptor& g,
                                std::vector<Atom> atoms);

// Poisson kernel P_r(theta) = (1-r^2) / (2 pi (1 - 2 r cos theta + r^2)) on
// the dual of Z. Requires free_rank == 1, no torsion, 0 < r < 1.
DualMeasure make_poisson_measure(const GroupDescriptor& g, double r,
                                 std::int64_t grid_size = kDefaultGridSize);

// Uniform density on the angular arc [a, b] (dual of Z).
DualMeasure make_uniform_arc_measure(const GroupDescriptor& g, double a,
                                     double b,
                                     std::int64_t grid_size = kDefaultGridSize);

// Uniform density on the full torus crossed with all torsion characters.
DualMeasure make_uniform_measure(const GroupDescriptor& g,
                                 std::int64_t grid_size = kDefaultGridSize);

// weights[i] * components[i], all sharing one group; grids must agree in
// size (or be absent). Result is normalized.
DualMeasure make_mixture(const std::vector<DualMeasure>& components,
                         const std::vector<double>& weights);

}  // namespace abcoh
