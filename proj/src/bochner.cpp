#include "abcoh/bochner.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "abcoh/linalg.hpp"

namespace abcoh {

namespace {

constexpr double kPsdRelTolerance = 1e-8;
// Largest Gram matrix diagonalized in full during a PSD scan.
constexpr std::size_t kMaxGramDim = 129;

std::int64_t torsion_flat_index(const GroupDescriptor& g,
                                const std::vector<std::int64_t>& t) {
    std::int64_t idx = 0, stride = 1;
    for (std::size_t j = 0; j < t.size(); ++j) {
        idx += t[j] * stride;
        stride *= g.torsion_orders[j];
    }
    return idx;
}

}  // namespace

bool PdFunction::contains(const GroupElement& x) const {
    if (static_cast<int>(x.free_part.size()) != group.free_rank) return false;
    return free_linf_norm(x) <= window_radius;
}

std::size_t PdFunction::index_of(const GroupElement& x) const {
    if (static_cast<int>(x.free_part.size()) != group.free_rank ||
        x.torsion_part.size() != group.torsion_orders.size())
        throw dimension_mismatch_error("element shape does not match function group");
    if (free_linf_norm(x) > window_radius)
        throw window_too_small_error("element outside stored window");
    const std::int64_t side = 2 * window_radius + 1;
    const std::int64_t tsize = group.torsion_size();
    std::int64_t idx = 0, stride = 1;
    for (int i = 0; i < group.free_rank; ++i) {
        idx += (x.free_part[i] + window_radius) * stride;
        stride *= side;
    }
    return static_cast<std::size_t>(torsion_flat_index(group, x.torsion_part) +
                                    tsize * idx);
}

const cplx& PdFunction::value(const GroupElement& x) const {
    return values[index_of(x)];
}

std::vector<GroupElement> PdFunction::window_elements() const {
    return box_elements(group, window_radius);
}

void PdFunction::validate(double tol) const {
    group.validate();
    std::int64_t expected = group.torsion_size();
    for (int i = 0; i < group.free_rank; ++i) expected *= 2 * window_radius + 1;
    if (static_cast<std::int64_t>(values.size()) != expected)
        throw dimension_mismatch_error("window storage size mismatch");
    const cplx at_zero = value(zero_element(group));
    if (std::abs(at_zero - 1.0) > tol)
        throw inconsistent_input_error("function is not normalized: phi(0) != 1");
    for (const GroupElement& x : window_elements()) {
        const cplx v = value(x);
        if (std::abs(v) > 1.0 + tol)
            throw inconsistent_input_error("|phi| exceeds phi(0) = 1");
        const cplx w = value(group_negate(group, x));
        if (std::abs(w - std::conj(v)) > 1e-12)
            throw inconsistent_input_error("Hermitian symmetry violated");
    }
}

PdFunction make_pd_function(const GroupDescriptor& g, std::int64_t window_radius,
                            const std::function<cplx(const GroupElement&)>& f) {
    PdFunction phi;
    phi.group = g;
    phi.window_radius = window_radius;
    const auto window = box_elements(g, window_radius);
    phi.values.resize(window.size());
    for (const GroupElement& x : window) phi.values[phi.index_of(x)] = f(x);
    phi.validate();
    return phi;
}

namespace {

// Min eigenvalue (and norm) of the Gram matrix over the given points.
void gram_extremes(const PdFunction& phi, const std::vector<GroupElement>& pts,
                   double& min_eig, double& norm) {
    const std::size_t n = pts.size();
    std::vector<cplx> k(n * n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            k[a * n + b] = phi.value(group_subtract(phi.group, pts[a], pts[b]));
    auto eigs = hermitian_eigenvalues(k, n);
    min_eig = min_eigenvalue(eigs);
    norm = spectral_norm(eigs);
}

}  // namespace

PsdReport check_positive_definite(
    const PdFunction& phi, int sample_count, std::uint64_t seed,
    const std::vector<std::vector<GroupElement>>& requested_subsets) {
    const auto half = half_box_elements(phi.group, phi.window_radius);
    std::vector<std::vector<GroupElement>> subsets = requested_subsets;

    // Structured subset: the half box itself, decimated when too large. Its
    // pairwise differences stay inside the stored window; for G = Z this is
    // the full Toeplitz matrix on 0..N.
    std::vector<GroupElement> structured;
    const std::size_t stride = (half.size() + kMaxGramDim - 1) / kMaxGramDim;
    for (std::size_t i = 0; i < half.size(); i += stride)
        structured.push_back(half[i]);
    subsets.push_back(std::move(structured));

    std::mt19937_64 rng(seed);
    const std::size_t pick = std::min<std::size_t>(16, half.size());
    for (int s = 0; s < sample_count; ++s) {
        std::vector<std::size_t> ids(half.size());
        for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
        for (std::size_t i = 0; i < pick; ++i) {
            std::uniform_int_distribution<std::size_t> d(i, ids.size() - 1);
            std::swap(ids[i], ids[d(rng)]);
        }
        std::vector<GroupElement> subset;
        subset.reserve(pick);
        for (std::size_t i = 0; i < pick; ++i) subset.push_back(half[ids[i]]);
        subsets.push_back(std::move(subset));
    }

    PsdReport report;
    double worst_rel = 0.0;
    for (const auto& subset : subsets) {
        if (subset.empty()) continue;
        double min_eig = 0.0, norm = 0.0;
        gram_extremes(phi, subset, min_eig, norm);
        const double rel = norm > 0.0 ? min_eig / norm : min_eig;
        if (report.witness.empty() || rel < worst_rel) {
            worst_rel = rel;
            report.min_eigenvalue = min_eig;
            report.matrix_norm = norm;
            report.witness = subset;
        }
        if (min_eig < -kPsdRelTolerance * norm) {
            report.positive = false;
            report.min_eigenvalue = min_eig;
            report.matrix_norm = norm;
            report.witness = subset;
            return report;
        }
    }
    report.positive = true;
    return report;
}

PdFunction bochner_forward(const DualMeasure& mu, std::int64_t window_radius) {
    mu.validate();
    PdFunction phi;
    phi.group = mu.group;
    phi.window_radius = window_radius;
    const auto window = box_elements(mu.group, window_radius);
    phi.values.resize(window.size());
    for (const GroupElement& x : window)
        phi.values[phi.index_of(x)] = integrate_character(mu, x);
    // The quadrature mass may differ from 1 by rounding; pin phi(0) = 1.
    const double at_zero = phi.values[phi.index_of(zero_element(mu.group))].real();
    for (cplx& v : phi.values) v /= at_zero;
    phi.validate();
    return phi;
}

namespace {

double cesaro_average(const PdFunction& phi, const DualPoint& xi,
                      std::int64_t radius) {
    cplx sum{};
    std::size_t count = 0;
    for (const GroupElement& x : box_elements(phi.group, radius)) {
        sum += phi.value(x) *
               std::conj(evaluate_character(phi.group, xi, x));
        ++count;
    }
    return (sum / static_cast<double>(count)).real();
}

}  // namespace

AtomEstimate atom_at(const PdFunction& phi, const DualPoint& xi,
                     std::int64_t min_window) {
    AtomEstimate est;
    if (phi.group.is_finite()) {
        est.value = std::clamp(cesaro_average(phi, xi, 0), 0.0, 1.0);
        est.cesaro_trace = {est.value};
        est.converged = true;
        return est;
    }
    if (phi.window_radius < std::max<std::int64_t>(min_window, 4))
        throw precondition_error("window radius " +
                                 std::to_string(phi.window_radius) +
                                 " below the configured minimum for atom detection");
    const std::int64_t n = phi.window_radius;
    const double a4 = cesaro_average(phi, xi, n / 4);
    const double a2 = cesaro_average(phi, xi, n / 2);
    const double a1 = cesaro_average(phi, xi, n);
    est.cesaro_trace = {a4, a2, a1};
    est.value = std::clamp(a1, 0.0, 1.0);
    est.converged = std::abs(a1 - a2) <= std::abs(a2 - a4) + 1e-3;
    return est;
}

AtomEstimate atom_at_trivial(const PdFunction& phi, std::int64_t min_window) {
    return atom_at(phi, trivial_character(phi.group), min_window);
}

namespace {

// Subtracts w * xi(x) from every stored coefficient.
void subtract_atom(PdFunction& phi, const DualPoint& xi, double w) {
    for (const GroupElement& x : phi.window_elements())
        phi.values[phi.index_of(x)] -=
            w * evaluate_character(phi.group, xi, x);
}

// Estimated weights below this are Cesaro noise (the density part of the
// measure leaks O(1/N) into every candidate), not atoms.
constexpr double kInferredAtomTolerance = 1e-2;

// Joint atom-weight estimate at the candidate points: solves the Gram system
// A w = c with A[j][k] = box-average of xi_k conj(xi_j) and c[j] =
// box-average of phi conj(xi_j). Removes the O(1/N) cross-talk between
// candidates; purely atomic inputs are recovered to rounding.
std::vector<Atom> extract_atoms(const PdFunction& phi,
                                const std::vector<DualPoint>& candidates,
                                std::int64_t min_window) {
    if (phi.window_radius < std::max<std::int64_t>(min_window, 4))
        throw precondition_error("window radius below the minimum for atom detection");
    const GroupDescriptor& g = phi.group;
    const auto window = phi.window_elements();
    const double count = static_cast<double>(window.size());
    std::vector<std::size_t> active(candidates.size());
    for (std::size_t j = 0; j < candidates.size(); ++j) active[j] = j;

    std::vector<Atom> atoms;
    for (int pass = 0; pass < 2; ++pass) {
        const std::size_t n = active.size();
        if (n == 0) break;
        std::vector<cplx> gram(n * n), rhs(n);
        for (std::size_t j = 0; j < n; ++j) {
            cplx c{};
            for (const GroupElement& x : window)
                c += phi.value(x) *
                     std::conj(evaluate_character(g, candidates[active[j]], x));
            rhs[j] = c / count;
            for (std::size_t k = 0; k < n; ++k) {
                cplx a{};
                for (const GroupElement& x : window)
                    a += evaluate_character(g, candidates[active[k]], x) *
                         std::conj(evaluate_character(g, candidates[active[j]], x));
                gram[j * n + k] = a / count;
            }
        }
        const std::vector<cplx> w = solve_hermitian(gram, n, rhs);
        std::vector<std::size_t> keep;
        atoms.clear();
        for (std::size_t j = 0; j < n; ++j) {
            const double wj = std::clamp(w[j].real(), 0.0, 1.0);
            if (wj > kInferredAtomTolerance) {
                keep.push_back(active[j]);
                atoms.push_back(Atom{candidates[active[j]], wj});
            }
        }
        if (keep.size() == active.size()) break;  // nothing dropped; done
        active = std::move(keep);
    }
    return atoms;
}

double fejer_weight(const GroupElement& x, std::int64_t n) {
    double w = 1.0;
    for (std::int64_t m : x.free_part)
        w *= 1.0 - static_cast<double>(std::abs(m)) / static_cast<double>(n + 1);
    return w;
}

// Fejer-smoothed density of the coefficient remainder, evaluated (signed)
// on the grid of `mu`. Fast path for G = Z; generic odometer path otherwise.
void fejer_density(const PdFunction& psi, DualMeasure& mu) {
    const GroupDescriptor& g = psi.group;
    const std::int64_t n = psi.window_radius;
    double norm = 1.0;
    for (int i = 0; i < g.free_rank; ++i) norm /= kTwoPi;
    norm /= static_cast<double>(g.torsion_size());

    if (g.free_rank == 1 && g.torsion_orders.empty()) {
        std::vector<cplx> coeff(2 * n + 1);
        for (std::int64_t m = -n; m <= n; ++m) {
            GroupElement x{{m}, {}};
            coeff[m + n] = psi.value(x) * fejer_weight(x, n);
        }
        for (GridCell& c : mu.grid) {
            const double theta = c.point.torus_angles[0];
            const cplx z = std::polar(1.0, -theta);
            cplx p = std::polar(1.0, static_cast<double>(n) * theta);  // z^{-n}
            cplx sum{};
            for (std::int64_t m = -n; m <= n; ++m) {
                sum += coeff[m + n] * p;
                p *= z;
            }
            c.density = (norm * sum).real();
        }
        return;
    }

    const auto window = psi.window_elements();
    for (GridCell& c : mu.grid) {
        cplx sum{};
        for (const GroupElement& x : window)
            sum += psi.value(x) * fejer_weight(x, n) *
                   std::conj(evaluate_character(g, c.point, x));
        c.density = (norm * sum).real();
    }
}

}  // namespace

InverseResult bochner_inverse(const PdFunction& phi, std::int64_t grid_size,
                              const std::vector<DualPoint>& candidate_atoms,
                              std::int64_t min_window) {
    phi.validate();
    PsdReport psd = check_positive_definite(phi);
    if (!psd.positive)
        throw not_positive_definite_error(
            "inverse transform rejected: input is not positive definite "
            "(min eigenvalue " + std::to_string(psd.min_eigenvalue) + ")",
            std::move(psd));

    InverseResult result;
    const GroupDescriptor& g = phi.group;

    if (g.is_finite()) {
        // Exact inverse DFT onto the finite dual.
        std::vector<Atom> atoms;
        double neg = 0.0;
        std::vector<std::int64_t> c(g.torsion_orders.size(), 0);
        for (;;) {
            DualPoint xi{{}, c};
            double w = cesaro_average(phi, xi, 0);
            if (w < 0.0) {
                neg += -w;
                w = 0.0;
            }
            if (w > 1e-12) atoms.push_back(Atom{xi, w});
            std::size_t j = 0;
            for (; j < c.size(); ++j) {
                if (++c[j] < g.torsion_orders[j]) break;
                c[j] = 0;
            }
            if (j == c.size()) break;
        }
        if (neg > 1e-3)
            throw inconsistent_input_error(
                "inverse DFT produced negative mass " + std::to_string(neg));
        result.clipped_negative_mass = neg;
        DualMeasure mu;
        mu.group = g;
        mu.atoms = std::move(atoms);
        result.measure = normalize(std::move(mu), &result.normalization);
        result.measure.validate();
    } else {
        PdFunction psi = phi;
        std::vector<DualPoint> candidates = {trivial_character(g)};
        for (const DualPoint& xi : candidate_atoms) {
            bool seen = false;
            for (const DualPoint& prev : candidates)
                if (dual_distance(prev, xi) <= 1e-12) seen = true;
            if (!seen) candidates.push_back(xi);
        }
        std::vector<Atom> atoms = extract_atoms(psi, candidates, min_window);
        for (const Atom& a : atoms) subtract_atom(psi, a.point, a.weight);

        DualMeasure mu = empty_grid_measure(g, grid_size);
        fejer_density(psi, mu);

        double neg = 0.0;
        for (GridCell& c : mu.grid) {
            if (c.density < 0.0) {
                neg += -c.density * c.quad_weight;
                c.density = 0.0;
            }
        }
        result.clipped_negative_mass = neg;
        if (result.clipped_negative_mass > 1e-3)
            throw inconsistent_input_error(
                "Fejer density required clipping mass " +
                std::to_string(result.clipped_negative_mass) +
                "; coefficients are inconsistent with a positive measure");

        mu.atoms = std::move(atoms);
        result.measure = normalize(std::move(mu), &result.normalization);
        result.measure.validate();
    }

    // Roundtrip diagnostic on the inner half window.
    const std::int64_t half = std::max<std::int64_t>(phi.window_radius / 2, 0);
    PdFunction back = bochner_forward(result.measure, half);
    double err = 0.0;
    for (const GroupElement& x : back.window_elements())
        err = std::max(err, std::abs(back.value(x) - phi.value(x)));
    result.roundtrip_error = err;
    return result;
}

}  // namespace abcoh
