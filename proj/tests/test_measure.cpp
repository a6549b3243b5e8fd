#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "abcoh/measure.hpp"

using namespace abcoh;

namespace {

const GroupDescriptor kZ{1, {}};

DualMeasure atom_at_angle(double theta, double weight = 1.0) {
    return make_atomic_measure(kZ, {Atom{make_dual_point(kZ, {theta}), weight}});
}

}  // namespace

TEST_CASE("decompose splits off the trivial atom") {
    // No trivial atom: mass 0 and the measure unchanged.
    DualMeasure delta = atom_at_angle(1.0);
    Decomposition d1 = decompose(delta);
    CHECK(d1.trivial_mass == 0.0);
    CHECK(d1.perp.atoms.size() == 1);
    CHECK(d1.perp.atoms[0].weight == doctest::Approx(1.0));

    // Half-half split.
    DualMeasure two = make_atomic_measure(
        kZ, {Atom{make_dual_point(kZ, {0.0}), 0.5},
             Atom{make_dual_point(kZ, {2.0}), 0.5}});
    Decomposition d2 = decompose(two);
    CHECK(d2.trivial_mass == doctest::Approx(0.5));
    CHECK(d2.perp.atoms.size() == 1);
    CHECK(d2.perp.atoms[0].weight == doctest::Approx(1.0));
    CHECK(d2.perp.total_mass() == doctest::Approx(1.0).epsilon(1e-12));

    // Absolutely continuous measure: no atom detected.
    DualMeasure poisson = make_poisson_measure(kZ, 0.5, 2048);
    Decomposition d3 = decompose(poisson);
    CHECK(d3.trivial_mass == 0.0);
    CHECK(tv_distance(d3.perp, poisson) < 1e-12);

    // The excluded Dirac mass at the trivial character.
    CHECK_THROWS_AS(decompose(atom_at_angle(0.0)), constant_function_error);
}

TEST_CASE("decompose then reconstruct is the identity") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    for (int round = 0; round < 20; ++round) {
        std::vector<DualMeasure> parts;
        std::vector<double> weights;
        parts.push_back(make_poisson_measure(kZ, 0.3 + 0.4 * round / 20.0, 512));
        weights.push_back(0.25 + 0.5 * (round % 3) / 3.0);
        std::vector<Atom> atoms = {Atom{make_dual_point(kZ, {0.0}), 0.4},
                                   Atom{make_dual_point(kZ, {angle(rng)}), 0.6}};
        DualMeasure atomic = make_atomic_measure(kZ, std::move(atoms));
        atomic.grid_size = 0;
        parts.push_back(atomic);
        weights.push_back(1.0 - weights[0]);
        DualMeasure mu = make_mixture(parts, weights);
        CHECK(tv_distance(reconstruct(decompose(mu)), mu) < 1e-9);
    }
}

TEST_CASE("distance to support") {
    // Single atom away from the trivial character.
    CHECK(support_gap(atom_at_angle(1.0)) == doctest::Approx(1.0).epsilon(1e-12));

    // Full-support density reaches the trivial character.
    CHECK(support_gap(make_uniform_measure(kZ, 4096)) == 0.0);
    CHECK(support_gap(make_poisson_measure(kZ, 0.5, 4096)) == 0.0);

    // Arc [0.5, 1.0]: gap 0.5 up to one grid cell, matching a brute-force
    // scan over the same grid.
    DualMeasure arc = make_uniform_arc_measure(kZ, 0.5, 1.0, 4096);
    const double got = support_gap(arc);
    double oracle = kTwoPi;
    const double hw = arc.cell_half_width();
    for (const GridCell& c : arc.grid)
        if (c.density > kSupportThreshold)
            oracle = std::min(
                oracle, std::max(0.0, std::abs(c.point.torus_angles[0]) - hw));
    CHECK(got == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(got == doctest::Approx(0.5).epsilon(2e-3));

    // Inside the support the distance is zero.
    CHECK(distance_to_support(make_dual_point(kZ, {0.75}), arc) == 0.0);
}

TEST_CASE("a positive gap means the ball around 1_G is clean") {
    DualMeasure arc = make_uniform_arc_measure(kZ, 0.7, 1.4, 2048);
    const double gap = support_gap(arc);
    REQUIRE(gap > 0.0);
    const DualPoint triv = trivial_character(kZ);
    const double hw = arc.cell_half_width();
    for (const GridCell& c : arc.grid)
        if (dual_distance(c.point, triv) + hw < gap)
            CHECK(c.density <= kSupportThreshold);
    for (const Atom& a : arc.atoms) CHECK(dual_distance(a.point, triv) >= gap);
}

TEST_CASE("support gap ignores cells at or below the threshold") {
    DualMeasure arc = make_uniform_arc_measure(kZ, 0.5, 1.0, 1024);
    const double gap = support_gap(arc);
    // Planting sub-threshold dust near the trivial character changes nothing.
    DualMeasure dusted = arc;
    for (GridCell& c : dusted.grid)
        if (std::abs(c.point.torus_angles[0]) < 0.1 && c.density == 0.0)
            c.density = 1e-13;
    CHECK(support_gap(dusted) == doctest::Approx(gap));
}

TEST_CASE("l2 norms") {
    // Constant 1 has norm 1 on any probability measure.
    DualMeasure poisson = make_poisson_measure(kZ, 0.5, 1024);
    CHECK(l2_norm(constant_vector(poisson, 1.0), poisson) ==
          doctest::Approx(1.0).epsilon(1e-12));

    // Indicator of a single atom of weight 1/4 has norm 1/2.
    DualMeasure atoms = make_atomic_measure(
        kZ, {Atom{make_dual_point(kZ, {1.0}), 0.25},
             Atom{make_dual_point(kZ, {2.0}), 0.75}});
    MeasureVector ind = zero_vector(atoms);
    ind.atom_values[0] = 1.0;
    CHECK(l2_norm(ind, atoms) == doctest::Approx(0.5).epsilon(1e-12));

    // f(theta) = theta on the uniform measure: closed form pi/sqrt(3),
    // quadrature agrees to O(h^2).
    DualMeasure uniform = make_uniform_measure(kZ, 4096);
    MeasureVector f = sample_function(
        uniform, [](const DualPoint& p) { return cplx(p.torus_angles[0], 0.0); });
    CHECK(l2_norm(f, uniform) == doctest::Approx(kPi / std::sqrt(3.0)).epsilon(1e-6));
}

TEST_CASE("parallelogram law holds for the weighted l2 norm") {
    DualMeasure mu = make_poisson_measure(kZ, 0.4, 512);
    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int round = 0; round < 25; ++round) {
        MeasureVector u = zero_vector(mu), v = zero_vector(mu), s = zero_vector(mu),
                      d = zero_vector(mu);
        for (std::size_t i = 0; i < u.size(); ++i) {
            u[i] = cplx(gauss(rng), gauss(rng));
            v[i] = cplx(gauss(rng), gauss(rng));
            s[i] = u[i] + v[i];
            d[i] = u[i] - v[i];
        }
        const double lhs = std::pow(l2_norm(s, mu), 2) + std::pow(l2_norm(d, mu), 2);
        const double rhs =
            2.0 * std::pow(l2_norm(u, mu), 2) + 2.0 * std::pow(l2_norm(v, mu), 2);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
}

TEST_CASE("measure validation catches broken inputs") {
    DualMeasure dup;
    dup.group = kZ;
    dup.atoms = {Atom{make_dual_point(kZ, {1.0}), 0.5},
                 Atom{make_dual_point(kZ, {1.0}), 0.5}};
    CHECK_THROWS_AS(dup.validate(), inconsistent_input_error);

    DualMeasure off_mass;
    off_mass.group = kZ;
    off_mass.atoms = {Atom{make_dual_point(kZ, {1.0}), 0.7}};
    CHECK_THROWS_AS(off_mass.validate(), inconsistent_input_error);
    double factor = 0.0;
    DualMeasure fixed = normalize(off_mass, &factor);
    CHECK(factor == doctest::Approx(0.7));
    CHECK_NOTHROW(fixed.validate());

    DualMeasure negative;
    negative.group = kZ;
    negative.atoms = {Atom{make_dual_point(kZ, {1.0}), -1.0}};
    CHECK_THROWS_AS(negative.validate(), inconsistent_input_error);
}

TEST_CASE("integrate_character matches a direct sum") {
    DualMeasure mu = make_mixture(
        {make_poisson_measure(kZ, 0.5, 512), atom_at_angle(2.0)}, {0.5, 0.5});
    const GroupElement x = make_element(kZ, {3});
    cplx direct{};
    for (std::size_t i = 0; i < mu.point_count(); ++i)
        direct += evaluate_character(kZ, mu.point(i), x) * mu.mass(i);
    CHECK(std::abs(integrate_character(mu, x) - direct) == 0.0);
}
