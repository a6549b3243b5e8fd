#include "abcoh/measure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace abcoh {

namespace {

constexpr double kPointMatchTolerance = 1e-12;

bool same_point(const DualPoint& a, const DualPoint& b) {
    return dual_distance(a, b) <= kPointMatchTolerance;
}

}  // namespace

double DualMeasure::total_mass() const {
    double m = 0.0;
    for (const Atom& a : atoms) m += a.weight;
    for (const GridCell& c : grid) m += c.density * c.quad_weight;
    return m;
}

double DualMeasure::cell_half_width() const {
    return grid_size > 0 ? kPi / static_cast<double>(grid_size) : 0.0;
}

void DualMeasure::validate() const {
    group.validate();
    for (const Atom& a : atoms) {
        if (static_cast<int>(a.point.torus_angles.size()) != group.free_rank)
            throw dimension_mismatch_error("atom point shape mismatch");
        if (a.weight < 0.0)
            throw inconsistent_input_error("negative atom weight");
    }
    for (const GridCell& c : grid) {
        if (static_cast<int>(c.point.torus_angles.size()) != group.free_rank)
            throw dimension_mismatch_error("grid point shape mismatch");
        if (c.density < 0.0)
            throw inconsistent_input_error("negative density value");
        if (c.quad_weight <= 0.0)
            throw inconsistent_input_error("quadrature weights must be positive");
    }
    for (std::size_t i = 0; i < atoms.size(); ++i)
        for (std::size_t j = i + 1; j < atoms.size(); ++j)
            if (same_point(atoms[i].point, atoms[j].point))
                throw inconsistent_input_error("atoms must be pairwise distinct");
    double m = total_mass();
    if (std::abs(m - 1.0) > kMassTolerance)
        throw inconsistent_input_error("total mass " + std::to_string(m) +
                                       " is not 1 within tolerance");
}

DualMeasure normalize(DualMeasure mu, double* factor_out) {
    double m = mu.total_mass();
    if (m <= 0.0)
        throw inconsistent_input_error("cannot normalize a measure with mass <= 0");
    for (Atom& a : mu.atoms) a.weight /= m;
    for (GridCell& c : mu.grid) c.density /= m;
    if (factor_out) *factor_out = m;
    return mu;
}

Decomposition decompose(const DualMeasure& mu) {
    mu.validate();
    const DualPoint triv = trivial_character(mu.group);
    double tm = 0.0;
    DualMeasure rest = mu;
    rest.atoms.clear();
    for (const Atom& a : mu.atoms) {
        if (same_point(a.point, triv))
            tm += a.weight;
        else
            rest.atoms.push_back(a);
    }
    if (tm >= 1.0 - kMassTolerance)
        throw constant_function_error(
            "measure is the Dirac mass at the trivial character");
    const double scale = 1.0 / (1.0 - tm);
    for (Atom& a : rest.atoms) a.weight *= scale;
    for (GridCell& c : rest.grid) c.density *= scale;
    return Decomposition{tm, std::move(rest)};
}

DualMeasure reconstruct(const Decomposition& dec) {
    DualMeasure mu = dec.perp;
    const double scale = 1.0 - dec.trivial_mass;
    for (Atom& a : mu.atoms) a.weight *= scale;
    for (GridCell& c : mu.grid) c.density *= scale;
    if (dec.trivial_mass > 0.0)
        mu.atoms.insert(mu.atoms.begin(),
                        Atom{trivial_character(mu.group), dec.trivial_mass});
    return mu;
}

double tv_distance(const DualMeasure& a, const DualMeasure& b) {
    if (a.grid.size() != b.grid.size())
        throw dimension_mismatch_error("grids differ; total variation undefined");
    double tv = 0.0;
    for (std::size_t i = 0; i < a.grid.size(); ++i)
        tv += std::abs(a.grid[i].density * a.grid[i].quad_weight -
                       b.grid[i].density * b.grid[i].quad_weight);
    // Atoms matched by location; unmatched atoms count in full.
    std::vector<bool> used(b.atoms.size(), false);
    for (const Atom& x : a.atoms) {
        double w = x.weight;
        for (std::size_t j = 0; j < b.atoms.size(); ++j) {
            if (!used[j] && same_point(x.point, b.atoms[j].point)) {
                tv += std::abs(x.weight - b.atoms[j].weight);
                used[j] = true;
                w = 0.0;
                break;
            }
        }
        tv += w;
    }
    for (std::size_t j = 0; j < b.atoms.size(); ++j)
        if (!used[j]) tv += b.atoms[j].weight;
    return 0.5 * tv;
}

double distance_to_support(const DualPoint& xi, const DualMeasure& mu,
                           double support_threshold) {
    double best = kTorsionMismatchDistance;
    for (const Atom& a : mu.atoms)
        if (a.weight > 0.0) best = std::min(best, dual_distance(xi, a.point));
    const double hw = mu.cell_half_width();
    for (const GridCell& c : mu.grid) {
        if (c.density <= support_threshold) continue;
        if (xi.torsion_characters != c.point.torsion_characters) continue;
        double d = 0.0;
        for (std::size_t i = 0; i < xi.torus_angles.size(); ++i) {
            double di = circle_distance(xi.torus_angles[i], c.point.torus_angles[i]);
            // Excess over the cell extent; sub-1e-12 excess is rounding noise.
            const double excess = di - hw;
            d = std::max(d, excess > 1e-12 ? excess : 0.0);
        }
        best = std::min(best, d);
        if (best == 0.0) return 0.0;
    }
    return best;
}

double support_gap(const DualMeasure& mu, double support_threshold) {
    return distance_to_support(trivial_character(mu.group), mu, support_threshold);
}

double atom_weight_at(const DualMeasure& mu, const DualPoint& xi) {
    double w = 0.0;
    for (const Atom& a : mu.atoms)
        if (same_point(a.point, xi)) w += a.weight;
    return w;
}

MeasureVector zero_vector(const DualMeasure& mu) {
    return MeasureVector{std::vector<cplx>(mu.atoms.size(), cplx{}),
                         std::vector<cplx>(mu.grid.size(), cplx{})};
}

MeasureVector constant_vector(const DualMeasure& mu, cplx value) {
    return MeasureVector{std::vector<cplx>(mu.atoms.size(), value),
                         std::vector<cplx>(mu.grid.size(), value)};
}

MeasureVector sample_function(const DualMeasure& mu,
                              const std::function<cplx(const DualPoint&)>& f) {
    MeasureVector v = zero_vector(mu);
    for (std::size_t i = 0; i < mu.point_count(); ++i) v[i] = f(mu.point(i));
    return v;
}

namespace {

void check_vector_shape(const MeasureVector& u, const DualMeasure& mu) {
    if (u.atom_values.size() != mu.atoms.size() ||
        u.grid_values.size() != mu.grid.size())
        throw dimension_mismatch_error("vector shape does not match measure");
}

}  // namespace

cplx inner_product(const MeasureVector& u, const MeasureVector& v,
                   const DualMeasure& mu) {
    check_vector_shape(u, mu);
    check_vector_shape(v, mu);
    cplx s{};
    for (std::size_t i = 0; i < mu.point_count(); ++i)
        s += u[i] * std::conj(v[i]) * mu.mass(i);
    return s;
}

double l2_norm(const MeasureVector& u, const DualMeasure& mu) {
    check_vector_shape(u, mu);
    double s = 0.0;
    for (std::size_t i = 0; i < mu.point_count(); ++i)
        s += std::norm(u[i]) * mu.mass(i);
    return std::sqrt(s);
}

MeasureVector character_values(const DualMeasure& mu, const GroupElement& x) {
    MeasureVector v = zero_vector(mu);
    for (std::size_t i = 0; i < mu.point_count(); ++i)
        v[i] = evaluate_character(mu.group, mu.point(i), x);
    return v;
}

cplx integrate_character(const DualMeasure& mu, const GroupElement& x) {
    cplx s{};
    for (std::size_t i = 0; i < mu.point_count(); ++i)
        s += evaluate_character(mu.group, mu.point(i), x) * mu.mass(i);
    return s;
}

void add_scaled(MeasureVector& dest, const MeasureVector& src, cplx c) {
    if (dest.size() != src.size())
        throw dimension_mismatch_error("vector shapes differ");
    for (std::size_t i = 0; i < dest.size(); ++i) dest[i] += c * src[i];
}

MeasureVector apply_rho_minus_one(const DualMeasure& mu, const GroupElement& x,
                                  const MeasureVector& u) {
    check_vector_shape(u, mu);
    MeasureVector out = u;
    for (std::size_t i = 0; i < mu.point_count(); ++i)
        out[i] *= evaluate_character(mu.group, mu.point(i), x) - 1.0;
    return out;
}

DualMeasure empty_grid_measure(const GroupDescriptor& g, std::int64_t grid_size) {
    g.validate();
    if (g.free_rank == 0)
        throw precondition_error("finite duals carry atoms, not a grid");
    if (grid_size < 2)
        throw precondition_error("grid size must be at least 2");
    DualMeasure mu;
    mu.group = g;
    mu.grid_size = grid_size;
    const double h = kTwoPi / static_cast<double>(grid_size);
    double qw = 1.0;
    for (int i = 0; i < g.free_rank; ++i) qw *= h;

    std::vector<std::int64_t> idx(g.free_rank, 0);
    std::vector<std::int64_t> tors(g.torsion_orders.size(), 0);
    const double half_count = 0.5 * static_cast<double>(grid_size);
    for (;;) {
        std::vector<double> angles(g.free_rank);
        for (int i = 0; i < g.free_rank; ++i)
            angles[i] = canonical_angle(
                (static_cast<double>(idx[i]) + 0.5 - half_count) * h);
        std::fill(tors.begin(), tors.end(), 0);
        for (;;) {
            mu.grid.push_back(GridCell{DualPoint{angles, tors}, 0.0, qw});
            std::size_t j = 0;
            for (; j < tors.size(); ++j) {
                if (++tors[j] < g.torsion_orders[j]) break;
                tors[j] = 0;
            }
            if (j == tors.size()) break;
        }
        int i = 0;
        for (; i < g.free_rank; ++i) {
            if (++idx[i] < grid_size) break;
            idx[i] = 0;
        }
        if (i == g.free_rank) break;
    }
    return mu;
}

DualMeasure make_atomic_measure(const GroupDescriptor& g,
                                std::vector<Atom> atoms) {
    DualMeasure mu;
    mu.group = g;
    mu.atoms = std::move(atoms);
    for (Atom& a : mu.atoms)
        a.point = make_dual_point(g, a.point.torus_angles, a.point.torsion_characters);
    mu = normalize(std::move(mu));
    mu.validate();
    return mu;
}

DualMeasure make_poisson_measure(const GroupDescriptor& g, double r,
                                 std::int64_t grid_size) {
    if (g.free_rank != 1 || !g.torsion_orders.empty())
        throw precondition_error("Poisson kernel measure requires G = Z");
    if (!(r > 0.0 && r < 1.0))
        throw precondition_error("Poisson parameter must lie in (0, 1)");
    DualMeasure mu = empty_grid_measure(g, grid_size);
    for (GridCell& c : mu.grid) {
        double t = c.point.torus_angles[0];
        c.density = (1.0 - r * r) / (kTwoPi * (1.0 - 2.0 * r * std::cos(t) + r * r));
    }
    mu = normalize(std::move(mu));
    mu.validate();
    return mu;
}

DualMeasure make_uniform_arc_measure(const GroupDescriptor& g, double a,
                                     double b, std::int64_t grid_size) {
    if (g.free_rank != 1 || !g.torsion_orders.empty())
        throw precondition_error("arc measure requires G = Z");
    if (!(b > a) || b - a > kTwoPi)
        throw precondition_error("arc must satisfy a < b <= a + 2 pi");
    DualMeasure mu = empty_grid_measure(g, grid_size);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (GridCell& c : mu.grid)
        if (circle_distance(c.point.torus_angles[0], mid) <= half)
            c.density = 1.0 / (b - a);
    mu = normalize(std::move(mu));
    mu.validate();
    return mu;
}

DualMeasure make_uniform_measure(const GroupDescriptor& g,
                                 std::int64_t grid_size) {
    if (g.free_rank == 0) {
        // Finite dual: uniform over all characters, as atoms.
        std::vector<Atom> atoms;
        std::vector<std::int64_t> c(g.torsion_orders.size(), 0);
        for (;;) {
            atoms.push_back(Atom{DualPoint{{}, c}, 1.0});
            std::size_t j = 0;
            for (; j < c.size(); ++j) {
                if (++c[j] < g.torsion_orders[j]) break;
                c[j] = 0;
            }
            if (j == c.size()) break;
        }
        return make_atomic_measure(g, std::move(atoms));
    }
    DualMeasure mu = empty_grid_measure(g, grid_size);
    for (GridCell& c : mu.grid) c.density = 1.0;
    mu = normalize(std::move(mu));
    mu.validate();
    return mu;
}

DualMeasure make_mixture(const std::vector<DualMeasure>& components,
                         const std::vector<double>& weights) {
    if (components.empty() || components.size() != weights.size())
        throw precondition_error("mixture needs matching components and weights");
    DualMeasure out;
    out.group = components.front().group;
    for (std::size_t k = 0; k < components.size(); ++k) {
        const DualMeasure& c = components[k];
        if (!(c.group == out.group))
            throw dimension_mismatch_error("mixture components on different groups");
        if (weights[k] < 0.0)
            throw precondition_error("mixture weights must be nonnegative");
        for (const Atom& a : c.atoms) {
            bool merged = false;
            for (Atom& existing : out.atoms) {
                if (same_point(existing.point, a.point)) {
                    existing.weight += weights[k] * a.weight;
                    merged = true;
                    break;
                }
            }
            if (!merged) out.atoms.push_back(Atom{a.point, weights[k] * a.weight});
        }
        if (!c.grid.empty()) {
            if (out.grid.empty()) {
                out.grid = c.grid;
                out.grid_size = c.grid_size;
                for (GridCell& cell : out.grid) cell.density *= weights[k];
            } else {
                if (c.grid.size() != out.grid.size() || c.grid_size != out.grid_size)
                    throw dimension_mismatch_error(
                        "mixture components use incompatible grids");
                for (std::size_t i = 0; i < out.grid.size(); ++i)
                    out.grid[i].density += weights[k] * c.grid[i].density;
            }
        }
    }
    out = normalize(std::move(out));
    out.validate();
    return out;
}

}  // namespace abcoh
