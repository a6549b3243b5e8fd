#include "abcoh/cohomology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace abcoh {

namespace {

// Phase of xi(g_j) for the j-th generator: a torus angle for free
// generators, 2 pi c / n for torsion generators.
double generator_phase(const GroupDescriptor& g, const DualPoint& xi, int j) {
    if (j < g.free_rank) return xi.torus_angles[j];
    const int t = j - g.free_rank;
    return kTwoPi * static_cast<double>(xi.torsion_characters[t]) /
           static_cast<double>(g.torsion_orders[t]);
}

// S_t(alpha) = sum_{s=0}^{t-1} e^{i s alpha}, extended to negative t by
// S_{-u} = -z^{-u} S_u, so that b(t g) = S_t(xi(g)) b(g).
cplx geom_sum(double alpha, std::int64_t t) {
    const double s = std::sin(0.5 * alpha);
    if (s == 0.0) return cplx(static_cast<double>(t), 0.0);
    const double td = static_cast<double>(t);
    return std::polar(1.0, 0.5 * (td - 1.0) * alpha) *
           (std::sin(0.5 * td * alpha) / s);
}

// (1/m) sum_{t=0}^{m-1} e^{i t alpha}.
cplx mean_power(double alpha, std::int64_t m) {
    const double s = std::sin(0.5 * alpha);
    if (s == 0.0) return cplx(1.0, 0.0);
    const double md = static_cast<double>(m);
    return std::polar(1.0, 0.5 * (md - 1.0) * alpha) *
           (std::sin(0.5 * md * alpha) / (md * s));
}

// (1/m) sum_{t=0}^{m-1} S_t(alpha). The closed form divides by 1 - e^{i
// alpha}; when that is cancellation-prone the sum is taken directly.
cplx mean_geom_sum(double alpha, std::int64_t m) {
    const double s = std::sin(0.5 * alpha);
    if (s == 0.0) return cplx(0.5 * static_cast<double>(m - 1), 0.0);
    if (std::abs(s) >= 1e-7) {
        const cplx z = std::polar(1.0, alpha);
        return (1.0 - mean_power(alpha, m)) / (1.0 - z);
    }
    cplx acc{};
    for (std::int64_t t = 0; t < m; ++t) acc += geom_sum(alpha, t);
    return acc / static_cast<double>(m);
}

void check_cocycle_shape(const Cocycle& b) {
    const GroupDescriptor& g = b.measure.group;
    if (static_cast<int>(b.generator_values.size()) != g.generator_count())
        throw dimension_mismatch_error("cocycle needs one vector per generator");
    for (const MeasureVector& v : b.generator_values)
        if (v.atom_values.size() != b.measure.atoms.size() ||
            v.grid_values.size() != b.measure.grid.size())
            throw dimension_mismatch_error("cocycle vector shape mismatch");
}

std::vector<std::int64_t> coefficients_of(const GroupDescriptor& g,
                                          const GroupElement& x) {
    std::vector<std::int64_t> c;
    c.reserve(g.generator_count());
    for (std::int64_t v : x.free_part) c.push_back(v);
    for (std::int64_t v : x.torsion_part) c.push_back(v);
    return c;
}

}  // namespace

double Cocycle::norm() const {
    double n = 0.0;
    for (const MeasureVector& v : generator_values)
        n = std::max(n, l2_norm(v, measure));
    return n;
}

MeasureVector evaluate_cocycle(const Cocycle& b, const GroupElement& x) {
    check_cocycle_shape(b);
    const GroupDescriptor& g = b.measure.group;
    if (static_cast<int>(x.free_part.size()) != g.free_rank ||
        x.torsion_part.size() != g.torsion_orders.size())
        throw dimension_mismatch_error("element shape mismatch");
    const auto coeff = coefficients_of(g, x);
    MeasureVector out = zero_vector(b.measure);
    for (std::size_t p = 0; p < b.measure.point_count(); ++p) {
        const DualPoint& xi = b.measure.point(p);
        cplx prefix(1.0, 0.0);
        cplx val{};
        for (int j = 0; j < g.generator_count(); ++j) {
            const double alpha = generator_phase(g, xi, j);
            val += prefix * geom_sum(alpha, coeff[j]) * b.generator_values[j][p];
            prefix *= std::polar(1.0, alpha * static_cast<double>(coeff[j]));
        }
        out[p] = val;
    }
    return out;
}

CocycleCheck validate_cocycle(const Cocycle& b, double tol, int random_pairs,
                              std::uint64_t seed) {
    check_cocycle_shape(b);
    const DualMeasure& mu = b.measure;
    const GroupDescriptor& g = mu.group;
    CocycleCheck check;

    auto pair_violation = [&](const MeasureVector& bx, const MeasureVector& by,
                              const GroupElement& x, const GroupElement& y) {
        MeasureVector lhs = zero_vector(mu);
        for (std::size_t p = 0; p < mu.point_count(); ++p) {
            const cplx zx = evaluate_character(g, mu.point(p), x);
            const cplx zy = evaluate_character(g, mu.point(p), y);
            lhs[p] = (1.0 - zx) * by[p] - (1.0 - zy) * bx[p];
        }
        return l2_norm(lhs, mu);
    };

    const auto gens = generators(g);
    for (int i = 0; i < g.generator_count(); ++i)
        for (int j = i + 1; j < g.generator_count(); ++j)
            check.max_violation = std::max(
                check.max_violation,
                pair_violation(b.generator_values[i], b.generator_values[j],
                               gens[i], gens[j]));

    // Torsion consistency: b(n_j * t_j) = 0.
    for (int j = g.free_rank; j < g.generator_count(); ++j) {
        const std::int64_t n = g.torsion_orders[j - g.free_rank];
        MeasureVector v = b.generator_values[j];
        for (std::size_t p = 0; p < mu.point_count(); ++p)
            v[p] *= geom_sum(generator_phase(g, mu.point(p), j), n);
        check.max_violation = std::max(check.max_violation, l2_norm(v, mu));
    }

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::int64_t> small(-3, 3);
    for (int r = 0; r < random_pairs; ++r) {
        GroupElement x = zero_element(g), y = zero_element(g);
        for (int i = 0; i < g.free_rank; ++i) {
            x.free_part[i] = small(rng);
            y.free_part[i] = small(rng);
        }
        for (std::size_t j = 0; j < g.torsion_orders.size(); ++j) {
            std::uniform_int_distribution<std::int64_t> res(0, g.torsion_orders[j] - 1);
            x.torsion_part[j] = res(rng);
            y.torsion_part[j] = res(rng);
        }
        check.max_violation =
            std::max(check.max_violation,
                     pair_violation(evaluate_cocycle(b, x), evaluate_cocycle(b, y),
                                    x, y));
    }
    check.pass = check.max_violation <= tol;
    return check;
}

cplx SmoothingMeasure::fourier(const DualPoint& xi) const {
    for (std::int64_t c : xi.torsion_characters)
        if (c != 0) return cplx{};
    cplx f(1.0, 0.0);
    for (double theta : xi.torus_angles) f *= mean_power(theta, box_side);
    return f;
}

std::vector<std::pair<GroupElement, double>> SmoothingMeasure::support_points()
    const {
    std::vector<std::pair<GroupElement, double>> pts;
    std::vector<std::int64_t> free(group.free_rank, 0);
    double total = static_cast<double>(group.torsion_size());
    for (int i = 0; i < group.free_rank; ++i)
        total *= static_cast<double>(box_side);
    const double w = 1.0 / total;
    for (;;) {
        std::vector<std::int64_t> tors(group.torsion_orders.size(), 0);
        for (;;) {
            pts.push_back({GroupElement{free, tors}, w});
            std::size_t j = 0;
            for (; j < tors.size(); ++j) {
                if (++tors[j] < group.torsion_orders[j]) break;
                tors[j] = 0;
            }
            if (j == tors.size()) break;
        }
        int i = 0;
        for (; i < group.free_rank; ++i) {
            if (++free[i] < box_side) break;
            free[i] = 0;
        }
        if (i == group.free_rank) break;
    }
    return pts;
}

SmoothingMeasure find_smoothing_measure(const DualMeasure& mu_perp,
                                        double support_threshold) {
    const GroupDescriptor& g = mu_perp.group;
    const double gap = support_gap(mu_perp, support_threshold);
    if (gap <= 0.0)
        throw no_gap_error(
            "support touches the trivial character; no smoothing measure exists");

    // Support points whose torsion characters are all trivial are the only
    // ones the box factor has to beat (torsion averaging kills the rest).
    std::vector<const DualPoint*> support;
    double min_angle = kTwoPi;
    auto consider = [&](const DualPoint& pt) {
        support.push_back(&pt);
        bool torsion_trivial = true;
        for (std::int64_t c : pt.torsion_characters)
            if (c != 0) torsion_trivial = false;
        if (torsion_trivial) {
            double d = 0.0;
            for (double t : pt.torus_angles)
                d = std::max(d, std::abs(t));
            min_angle = std::min(min_angle, d);
        }
    };
    for (const Atom& a : mu_perp.atoms)
        if (a.weight > 0.0) consider(a.point);
    for (const GridCell& c : mu_perp.grid)
        if (c.density > support_threshold) consider(c.point);
    if (support.empty())
        throw precondition_error("measure has empty numerical support");

    SmoothingMeasure nu;
    nu.group = g;
    auto sup_on_support = [&](std::int64_t m) {
        nu.box_side = m;
        double sup = 0.0;
        for (const DualPoint* pt : support)
            sup = std::max(sup, std::abs(nu.fourier(*pt)));
        return sup;
    };

    if (min_angle >= kTwoPi) {
        // Every support point carries a nontrivial torsion character.
        nu.box_side = 1;
        nu.verified_sup = sup_on_support(1);
        return nu;
    }

    const std::int64_t guess = static_cast<std::int64_t>(
        std::ceil(2.0 / std::sin(0.5 * std::min(min_angle, kPi)))) + 1;
    // Scan small sides one by one so the returned side is minimal in the
    // common regimes; fall back to the analytic bound for tiny gaps.
    const std::int64_t scan_limit = std::min<std::int64_t>(guess, 256);
    for (std::int64_t m = 1; m <= scan_limit; ++m) {
        const double sup = sup_on_support(m);
        if (sup <= 0.5) {
            nu.box_side = m;
            nu.verified_sup = sup;
            return nu;
        }
    }
    for (std::int64_t m = std::max<std::int64_t>(guess, scan_limit + 1);; ++m) {
        const double sup = sup_on_support(m);
        if (sup <= 0.5) {
            nu.box_side = m;
            nu.verified_sup = sup;
            return nu;
        }
    }
}

namespace {

struct RegionSolve {
    MeasureVector primitive;
    SmoothingMeasure smoothing;
    bool empty_region = false;
};

// Solves (rho(g_i) - 1) w = b(g_i) on the sub-measure selected by `region`
// (pointwise projection; w vanishes off the region). Uses the averaged
// relation (1 - xi(x)) v = (1 - nu_hat) b(x) with v = sum_y nu(y) b(y),
// evaluated through the factorized means over the box of nu.
RegionSolve solve_on_region(const Cocycle& b, const std::vector<char>& region,
                            double support_threshold) {
    const DualMeasure& mu = b.measure;
    const GroupDescriptor& g = mu.group;

    DualMeasure masked = mu;
    for (std::size_t i = 0; i < masked.atoms.size(); ++i)
        if (!region[i]) masked.atoms[i].weight = 0.0;
    for (std::size_t i = 0; i < masked.grid.size(); ++i)
        if (!region[masked.atoms.size() + i]) masked.grid[i].density = 0.0;

    RegionSolve out;
    out.primitive = zero_vector(mu);
    bool has_support = false;
    for (const Atom& a : masked.atoms)
        if (a.weight > 0.0) has_support = true;
    for (const GridCell& c : masked.grid)
        if (c.density > support_threshold) has_support = true;
    if (!has_support) {
        out.empty_region = true;
        out.smoothing.group = g;
        return out;
    }

    out.smoothing = find_smoothing_measure(masked, support_threshold);
    const std::int64_t m = out.smoothing.box_side;

    for (std::size_t p = 0; p < mu.point_count(); ++p) {
        if (!region[p] || mu.mass(p) <= 0.0) continue;
        const DualPoint& xi = mu.point(p);
        cplx prefix(1.0, 0.0);
        cplx v{};
        cplx nuhat(1.0, 0.0);
        for (int j = 0; j < g.generator_count(); ++j) {
            const double alpha = generator_phase(g, xi, j);
            const std::int64_t range =
                j < g.free_rank ? m : g.torsion_orders[j - g.free_rank];
            v += prefix * mean_geom_sum(alpha, range) * b.generator_values[j][p];
            const cplx mp = mean_power(alpha, range);
            prefix *= mp;
            nuhat *= mp;
        }
        const cplx denom = 1.0 - nuhat;
        // On the verified support |denom| >= 1/2; below-threshold stragglers
        // keep w = 0.
        if (std::abs(denom) >= 0.25) out.primitive[p] = -v / denom;
    }
    return out;
}

double max_generator_residual(const Cocycle& b, const MeasureVector& w) {
    const DualMeasure& mu = b.measure;
    const auto gens = generators(mu.group);
    double res = 0.0;
    for (std::size_t j = 0; j < gens.size(); ++j) {
        MeasureVector r = apply_rho_minus_one(mu, gens[j], w);
        add_scaled(r, b.generator_values[j], cplx(-1.0, 0.0));
        res = std::max(res, l2_norm(r, mu));
    }
    return res;
}

}  // namespace

CoboundarySolution solve_coboundary(const Cocycle& b, double support_threshold) {
    check_cocycle_shape(b);
    if (support_gap(b.measure, support_threshold) <= 0.0)
        throw no_gap_error(
            "trivial character lies in the support; the coboundary equation "
            "is not solvable by smoothing");
    std::vector<char> all(b.measure.point_count(), 1);
    RegionSolve solve = solve_on_region(b, all, support_threshold);
    CoboundarySolution sol;
    sol.primitive = std::move(solve.primitive);
    sol.smoothing = std::move(solve.smoothing);
    sol.cocycle_norm = b.norm();
    sol.residual = max_generator_residual(b, sol.primitive);
    sol.certified = sol.residual <= 1e-8 * (1.0 + sol.cocycle_norm);
    return sol;
}

namespace {

// Elements entering K_k at level k, where K_k is the free box of radius k
// crossed with the whole torsion subgroup (K_0 = {0}).
std::vector<GroupElement> elements_at_level(const GroupDescriptor& g,
                                            std::int64_t k) {
    std::vector<GroupElement> out;
    for (GroupElement& e : box_elements(g, k)) {
        const std::int64_t fn = free_linf_norm(e);
        bool torsion_nonzero = false;
        for (std::int64_t t : e.torsion_part)
            if (t != 0) torsion_nonzero = true;
        const std::int64_t level =
            std::max<std::int64_t>(fn, (fn == 0 && torsion_nonzero) ? 1 : 0);
        if (level == k) out.push_back(std::move(e));
    }
    return out;
}

}  // namespace

ShellCocycle build_nontrivial_cocycle(const DualMeasure& mu_perp, int shell_count,
                                      double support_threshold) {
    mu_perp.validate();
    if (shell_count < 1)
        throw precondition_error("shell count must be positive");
    const GroupDescriptor& g = mu_perp.group;
    const DualPoint triv = trivial_character(g);
    if (atom_weight_at(mu_perp, triv) > 1e-12)
        throw precondition_error(
            "measure carries an atom at the trivial character");
    if (support_gap(mu_perp, support_threshold) > 0.0)
        throw wrong_regime_error(
            "support stays away from the trivial character; use the "
            "coboundary solver instead");

    const std::size_t npts = mu_perp.point_count();
    std::vector<double> mass(npts), dist(npts);
    for (std::size_t p = 0; p < npts; ++p) {
        mass[p] = mu_perp.mass(p);
        dist[p] = dual_distance(mu_perp.point(p), triv);
    }

    // exit[p] = largest k with p in U_k; the U_k are nested, so membership is
    // decided incrementally while k grows.
    constexpr std::int64_t kNotExited = std::numeric_limits<std::int64_t>::max();
    std::vector<std::int64_t> exit_level(npts, kNotExited);
    std::vector<double> deviation(npts, 0.0);
    // u_mass[k] tracks mu(U_k); U_0 is the whole dual.
    std::vector<double> u_mass(1, 0.0);
    for (std::size_t p = 0; p < npts; ++p) u_mass[0] += mass[p];

    std::int64_t explored = 0;
    auto explore_level = [&](std::int64_t k) {
        const auto boundary = elements_at_level(g, k);
        double in_mass = 0.0;
        const double bound = std::pow(2.0, -static_cast<double>(k));
        for (std::size_t p = 0; p < npts; ++p) {
            if (exit_level[p] != kNotExited) continue;
            double dev = deviation[p];
            const DualPoint& xi = mu_perp.point(p);
            for (const GroupElement& e : boundary)
                dev = std::max(dev, std::abs(evaluate_character(g, xi, e) - 1.0));
            deviation[p] = dev;
            if (dev < bound)
                in_mass += mass[p];
            else
                exit_level[p] = k - 1;
        }
        u_mass.push_back(in_mass);
        explored = k;
    };

    std::vector<std::int64_t> ks = {0};
    const int needed = shell_count + 1;  // k_1 .. k_{shell_count+1}
    for (int n = 1; n <= needed; ++n) {
        const double target = u_mass[static_cast<std::size_t>(ks.back())];
        std::int64_t k = ks.back();
        bool found = false;
        while (k - ks.back() < 64) {
            ++k;
            if (k > explored) explore_level(k);
            if (u_mass[static_cast<std::size_t>(k)] < target) {
                found = true;
                break;
            }
            if (u_mass[static_cast<std::size_t>(k)] == 0.0) break;
        }
        if (!found) {
            const int usable = std::max<int>(0, static_cast<int>(ks.size()) - 2);
            throw resolution_error(
                "grid resolves only " + std::to_string(usable) +
                    " shells (requested " + std::to_string(shell_count) + ")",
                usable);
        }
        ks.push_back(k);
    }

    ShellCocycle sc;
    sc.cocycle.measure = mu_perp;
    sc.shells.resize(shell_count);
    for (int n = 1; n <= shell_count; ++n) {
        Shell& shell = sc.shells[n - 1];
        shell.k = ks[n];
        shell.u_mass = u_mass[static_cast<std::size_t>(ks[n])];
        shell.inner_distance = kTorsionMismatchDistance;
        for (std::size_t p = 0; p < npts; ++p) {
            const std::int64_t e = exit_level[p];
            if (e >= ks[n] && e < ks[n + 1] && mass[p] > 0.0) {
                shell.members.push_back(p);
                shell.mass += mass[p];
                shell.inner_distance = std::min(shell.inner_distance, dist[p]);
            }
        }
        if (!(shell.mass > 0.0))
            throw resolution_error("shell " + std::to_string(n) +
                                       " has no grid mass",
                                   n - 1);
    }

    const auto gens = generators(g);
    sc.cocycle.generator_values.assign(gens.size(), zero_vector(mu_perp));
    for (const Shell& shell : sc.shells) {
        const double inv_sqrt = 1.0 / std::sqrt(shell.mass);
        for (std::size_t p : shell.members) {
            const DualPoint& xi = mu_perp.point(p);
            for (std::size_t j = 0; j < gens.size(); ++j)
                sc.cocycle.generator_values[j][p] =
                    (evaluate_character(g, xi, gens[j]) - 1.0) * inv_sqrt;
        }
    }

    // Truncated obstruction integrals I(delta) = int_{dist > delta} |sum_n
    // eta_n|^2 dmu, evaluated just inside each shell; each boundary crossing
    // adds one full unit.
    for (const Shell& shell : sc.shells) {
        const double delta = shell.inner_distance * (1.0 - 1e-9);
        double value = 0.0;
        for (const Shell& other : sc.shells) {
            double inside = 0.0;
            for (std::size_t p : other.members)
                if (dist[p] > delta) inside += mass[p];
            value += inside / other.mass;
        }
        sc.obstruction_delta.push_back(delta);
        sc.obstruction_value.push_back(value);
    }
    return sc;
}

double shell_translate_defect(const ShellCocycle& sc, const GroupElement& x,
                              std::size_t n) {
    if (n >= sc.shells.size())
        throw dimension_mismatch_error("shell index out of range");
    const DualMeasure& mu = sc.cocycle.measure;
    const Shell& shell = sc.shells[n];
    double acc = 0.0;
    for (std::size_t p : shell.members)
        acc += std::norm(evaluate_character(mu.group, mu.point(p), x) - 1.0) *
               mu.mass(p);
    return acc / shell.mass;
}

std::vector<ApproxStage> approximate_by_coboundaries(const Cocycle& b,
                                                     int stage_count,
                                                     double initial_radius) {
    check_cocycle_shape(b);
    const DualMeasure& mu = b.measure;
    const DualPoint triv = trivial_character(mu.group);
    if (atom_weight_at(mu, triv) > 1e-12)
        throw precondition_error(
            "measure carries an atom at the trivial character");
    if (stage_count < 1 || initial_radius <= 0.0)
        throw precondition_error("need a positive stage count and radius");

    const std::size_t npts = mu.point_count();
    std::vector<double> dist(npts);
    for (std::size_t p = 0; p < npts; ++p)
        dist[p] = dual_distance(mu.point(p), triv);

    std::vector<ApproxStage> stages;
    for (int n = 1; n <= stage_count; ++n) {
        ApproxStage stage;
        stage.radius = initial_radius * std::pow(0.5, n - 1);
        std::vector<char> region(npts, 0);
        for (std::size_t p = 0; p < npts; ++p) {
            if (dist[p] >= stage.radius)
                region[p] = 1;
            else
                stage.neighborhood_mass += mu.mass(p);
        }
        RegionSolve solve = [&] {
            try {
                return solve_on_region(b, region, kSupportThreshold);
            } catch (const no_gap_error&) {
                throw precondition_error(
                    "stage " + std::to_string(n) +
                    " radius falls below the grid resolution");
            }
        }();
        stage.primitive = std::move(solve.primitive);
        stage.residual = max_generator_residual(b, stage.primitive);
        double tail = 0.0;
        const auto gens = generators(mu.group);
        for (std::size_t j = 0; j < gens.size(); ++j)
            for (std::size_t p = 0; p < npts; ++p)
                if (!region[p])
                    tail += std::norm(b.generator_values[j][p]) * mu.mass(p);
        stage.tail_bound = std::sqrt(tail);
        stages.push_back(std::move(stage));
    }
    return stages;
}

ClassificationReport classify(const DualMeasure& mu, const ClassifyOptions& opts) {
    const Decomposition dec = decompose(mu);
    ClassificationReport report;
    report.trivial_mass = dec.trivial_mass;
    report.hom_dim = hom_to_C_dimension(mu.group);
    report.support_distance = support_gap(dec.perp, opts.support_threshold);

    const bool atom_condition =
        report.trivial_mass <= opts.atom_tol || report.hom_dim == 0;
    const bool gap_condition = report.support_distance > 0.0;
    report.reduced_h1 = atom_condition ? Verdict::vanishes : Verdict::nonvanishing;
    report.h1 = (atom_condition && gap_condition) ? Verdict::vanishes
                                                  : Verdict::nonvanishing;

    if (!atom_condition) {
        // Homomorphism witness on the fixed-vector summand C * delta_{1_G}:
        // b(x) = (sum of free coordinates of x) * delta. Never a coboundary,
        // since the trivial subrepresentation has none.
        Cocycle witness;
        witness.measure =
            make_atomic_measure(mu.group, {Atom{trivial_character(mu.group), 1.0}});
        const int gens = mu.group.generator_count();
        witness.generator_values.assign(gens, zero_vector(witness.measure));
        for (int i = 0; i < mu.group.free_rank; ++i)
            witness.generator_values[i] = constant_vector(witness.measure, 1.0);
        report.witness = std::move(witness);
        report.witness_kind = WitnessKind::homomorphism;
    } else if (!gap_condition) {
        int shells = opts.witness_shell_count;
        try {
            ShellCocycle sc = build_nontrivial_cocycle(dec.perp, shells,
                                                       opts.support_threshold);
            report.witness = std::move(sc.cocycle);
            report.witness_shells = std::move(sc.shells);
            report.witness_kind = WitnessKind::shell_cocycle;
        } catch (const resolution_error& e) {
            if (e.usable_shell_count >= 1) {
                ShellCocycle sc = build_nontrivial_cocycle(
                    dec.perp, e.usable_shell_count, opts.support_threshold);
                report.witness = std::move(sc.cocycle);
                report.witness_shells = std::move(sc.shells);
                report.witness_kind = WitnessKind::shell_cocycle;
            }
        }
    }
    return report;
}

}  // namespace abcoh
