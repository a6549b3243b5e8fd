#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "abcoh/measure.hpp"

namespace abcoh {

// Normalized positive definite function on G, stored on the window
// { x : |free part|_inf <= window_radius } x (all torsion residues).
// Invariants: phi(0) = 1, phi(-x) = conj(phi(x)), |phi(x)| <= 1.
struct PdFunction {
    GroupDescriptor group;
    std::int64_t window_radius = 0;
    // Values in box_elements(group, window_radius) order.
    std::vector<cplx> values;

    std::size_t size() const { return values.size(); }
    bool contains(const GroupElement& x) const;
    std::size_t index_of(const GroupElement& x) const;  // throws window_too_small_error
    const cplx& value(const GroupElement& x) const;
    std::vector<GroupElement> window_elements() const;

    void validate(double tol = 1e-9) const;
};

// Samples f over the window and validates the invariants.
PdFunction make_pd_function(const GroupDescriptor& g, std::int64_t window_radius,
                            const std::function<cplx(const GroupElement&)>& f);

struct PsdReport {
    bool positive = true;
    // Most negative (relative to matrix norm) eigenvalue observed, and the
    // matrix it came from.
    double min_eigenvalue = 0.0;
    double matrix_norm = 0.0;
    std::vector<GroupElement> witness;
};

struct not_positive_definite_error : error {
    not_positive_definite_error(const std::string& what, PsdReport r)
        : error(what), report(std::move(r)) {}
    PsdReport report;
};

// Gram criterion: K[a][b] = phi(x_a - x_b) over structured and randomized
// subsets of the half window (differences stay inside the stored window),
// plus any caller-requested subsets. Positive iff every sampled matrix has
// min eigenvalue >= -1e-8 * norm. A requested subset whose differences
// escape the window raises window_too_small_error.
PsdReport check_positive_definite(
    const PdFunction& phi, int sample_count = 8,
    std::uint64_t seed = 0x9e3779b97f4a7c15ull,
    const std::vector<std::vector<GroupElement>>& requested_subsets = {});

// phi(x) = integral of xi(x) d mu(xi) over the window, renormalized so that
// phi(0) = 1 exactly.
PdFunction bochner_forward(const DualMeasure& mu, std::int64_t window_radius);

struct AtomEstimate {
    double value = 0.0;
    // Cesaro averages at window_radius/4, /2, and full, for diagnostics.
    std::vector<double> cesaro_trace;
    bool converged = true;
};

inline constexpr std::int64_t kAtomMinWindow = 64;

// Mass of the atom of mu_phi at xi, recovered by Cesaro averaging of
// phi(x) * conj(xi(x)) over growing boxes (exact DFT for finite groups).
AtomEstimate atom_at(const PdFunction& phi, const DualPoint& xi,
                     std::int64_t min_window = kAtomMinWindow);
AtomEstimate atom_at_trivial(const PdFunction& phi,
                             std::int64_t min_window = kAtomMinWindow);

struct InverseResult {
    DualMeasure measure;
    // Max |bochner_forward(measure) - phi| over the inner half window.
    double roundtrip_error = 0.0;
    // Mass removed when clipping the smoothed density at zero.
    double clipped_negative_mass = 0.0;
    // Total mass before the final renormalization.
    double normalization = 1.0;
};

// Inverse transform. Finite groups: exact inverse DFT onto atoms. Groups with
// a torus factor: atoms are extracted at the trivial character and at the
// declared candidate points by Cesaro averaging, then the remaining
// coefficients are smoothed with the Fejer kernel into a density on an
// M-per-dimension grid, clipped at zero and renormalized.
InverseResult bochner_inverse(const PdFunction& phi, std::int64_t grid_size,
                              const std::vector<DualPoint>& candidate_atoms = {},
                              std::int64_t min_window = kAtomMinWindow);

}  // namespace abcoh
