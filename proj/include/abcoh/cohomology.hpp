#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "abcoh/measure.hpp"

namespace abcoh {

// 1-cocycle for the multiplication representation on L^2(dual, mu), stored by
// its values on the group generators. Values elsewhere follow from the
// extension rule b(x + y) = rho(x) b(y) + b(x); compatibility across
// generators is the symmetric relation
//   (1 - xi(g_i)) b(g_j)(xi) = (1 - xi(g_j)) b(g_i)(xi).
struct Cocycle {
    DualMeasure measure;
    // One vector per generators(measure.group), free generators first.
    std::vector<MeasureVector> generator_values;

    // max over generators of ||b(g_i)||_{L^2(mu)}.
    double norm() const;
};

// b evaluated at an arbitrary element via the extension rule (generator
// order fixed: free, then torsion).
MeasureVector evaluate_cocycle(const Cocycle& b, const GroupElement& x);

struct CocycleCheck {
    bool pass = true;
    double max_violation = 0.0;
};

// Checks the compatibility relation on all generator pairs, the vanishing of
// b(n_j * t_j) for torsion generators, and the relation on random derived
// pairs produced through the extension rule.
CocycleCheck validate_cocycle(const Cocycle& b, double tol = 1e-9,
                              int random_pairs = 10,
                              std::uint64_t seed = 0x5eed5eedull);

// Finitely supported probability measure on G whose Fourier transform is
// uniformly small on the support of a measure staying away from the trivial
// character: uniform on the box {0..box_side-1}^d, averaged over the full
// torsion subgroup (which kills nontrivial torsion characters exactly).
struct SmoothingMeasure {
    GroupDescriptor group;
    std::int64_t box_side = 1;
    // Largest |fourier| value observed on the support during construction.
    double verified_sup = 0.0;

    cplx fourier(const DualPoint& xi) const;
    std::vector<std::pair<GroupElement, double>> support_points() const;
};

// Smallest box side whose transform stays <= 1/2 in modulus on the numerical
// support (so |1 - nu_hat| >= 1/2 there). Throws no_gap_error when the
// support touches the trivial character.
SmoothingMeasure find_smoothing_measure(const DualMeasure& mu_perp,
                                        double support_threshold = kSupportThreshold);

struct CoboundarySolution {
    // w with (rho(g_i) - 1) w = b(g_i) up to the certified residual.
    MeasureVector primitive;
    double residual = 0.0;
    double cocycle_norm = 0.0;
    bool certified = false;  // residual <= 1e-8 * (1 + cocycle_norm)
    SmoothingMeasure smoothing;
};

// Solves the coboundary equation by averaging b against the smoothing
// measure: v = sum_y nu(y) b(y), w = -v / (1 - nu_hat). Requires the support
// of b's measure to stay away from the trivial character.
CoboundarySolution solve_coboundary(const Cocycle& b,
                                    double support_threshold = kSupportThreshold);

// One dyadic shell C_n = U_{k_n} \ U_{k_{n+1}} around the trivial character,
// where U_k = { xi : max_{|g| <= k} |xi(g) - 1| < 2^{-k} }.
struct Shell {
    std::int64_t k = 0;       // the index k_n
    double u_mass = 0.0;      // mu(U_{k_n})
    double mass = 0.0;        // mu(C_n) > 0
    double inner_distance = 0.0;  // min distance of members to 1_G
    std::vector<std::size_t> members;  // measure point indices
};

struct ShellCocycle {
    Cocycle cocycle;
    std::vector<Shell> shells;
    // Truncated obstruction integrals: I(delta_n) where delta_n sits just
    // inside shell n. Strict unit increments across shell boundaries certify
    // that the cocycle is not a coboundary at this resolution.
    std::vector<double> obstruction_delta;
    std::vector<double> obstruction_value;
};

// The nontrivial cocycle b(g)(xi) = sum_n (xi(g) - 1) eta_n(xi), eta_n the
// normalized indicator of C_n. Requires 1_G in the support of mu_perp but
// carrying no atom; throws wrong_regime_error when the support has a gap and
// resolution_error when the grid resolves fewer shells than requested.
ShellCocycle build_nontrivial_cocycle(const DualMeasure& mu_perp, int shell_count,
                                      double support_threshold = kSupportThreshold);

// ||(rho(x) - 1) eta_n||^2 for shell index n (0-based).
double shell_translate_defect(const ShellCocycle& sc, const GroupElement& x,
                              std::size_t n);

struct ApproxStage {
    double radius = 0.0;             // r_n of the neighborhood V_n
    double neighborhood_mass = 0.0;  // mu(V_n)
    double residual = 0.0;           // max_i ||(rho(g_i)-1) w_n - b(g_i)||
    double tail_bound = 0.0;         // sqrt(sum_i int_{V_n} |b(g_i)|^2 dmu)
    MeasureVector primitive;
};

// Projects b onto the complement of shrinking neighborhoods V_n of 1_G
// (radius halving from initial_radius) and solves each projection, realizing
// b as a limit of coboundaries. Residuals are non-increasing and bounded by
// the tail mass of b over V_n.
std::vector<ApproxStage> approximate_by_coboundaries(const Cocycle& b,
                                                     int stage_count,
                                                     double initial_radius = 1.0);

enum class Verdict { vanishes, nonvanishing };

struct ClassifyOptions {
    // Atom-mass cutoff deciding "mu(1_G) = 0". Explicit measures warrant
    // 1e-6; use 1e-2 for masses inferred by Cesaro averaging.
    double atom_tol = 1e-6;
    int witness_shell_count = 4;
    double support_threshold = kSupportThreshold;
};

enum class WitnessKind { none, homomorphism, shell_cocycle };

struct ClassificationReport {
    double trivial_mass = 0.0;
    int hom_dim = 0;
    double support_distance = 0.0;
    Verdict h1 = Verdict::vanishes;
    Verdict reduced_h1 = Verdict::vanishes;
    WitnessKind witness_kind = WitnessKind::none;
    std::optional<Cocycle> witness;
    std::vector<Shell> witness_shells;  // filled for shell witnesses
};

// Decision rule:
//   reduced H^1 vanishes  iff  trivial_mass <= atom_tol or hom_dim == 0
//   H^1 vanishes          iff  the above and support_distance > 0
// Nonvanishing verdicts come with a witness: the homomorphism cocycle on the
// fixed-vector summand when the atom/hom condition fails, else the shell
// cocycle over mu_perp.
ClassificationReport classify(const DualMeasure& mu,
                              const ClassifyOptions& opts = {});

}  // namespace abcoh
