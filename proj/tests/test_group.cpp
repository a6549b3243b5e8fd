#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "abcoh/group.hpp"

using namespace abcoh;

namespace {

// Brute-force circle distance: minimize |a - b + 2 pi k| over shifts.
double circle_distance_oracle(double a, double b) {
    double best = 1e300;
    for (int k = -4; k <= 4; ++k)
        best = std::min(best, std::abs(a - b + kTwoPi * k));
    return best;
}

}  // namespace

TEST_CASE("character values on canonical examples") {
    GroupDescriptor z{1, {}};
    const GroupElement two = make_element(z, {2});
    // Trivial character maps everything to 1.
    CHECK(std::abs(evaluate_character(z, trivial_character(z), two) - 1.0) < 1e-15);
    // theta = pi at x = 2 wraps to exp(2 pi i) = 1.
    const DualPoint pi_char = make_dual_point(z, {kPi});
    CHECK(std::abs(evaluate_character(z, pi_char, two) - 1.0) < 1e-12);

    // Z_4, character 1 at element 1: fourth root of unity table gives i.
    GroupDescriptor z4{0, {4}};
    const DualPoint chi1 = make_dual_point(z4, {}, {1});
    const GroupElement one = make_element(z4, {}, {1});
    const cplx got = evaluate_character(z4, chi1, one);
    const cplx expected = std::polar(1.0, kTwoPi * 1.0 * 1.0 / 4.0);  // = i
    CHECK(std::abs(got - expected) < 1e-15);
    CHECK(got.real() == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(got.imag() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("characters have unit modulus") {
    GroupDescriptor g{2, {3, 4}};
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    std::uniform_int_distribution<std::int64_t> coord(-50, 50);
    for (int i = 0; i < 200; ++i) {
        const DualPoint xi = make_dual_point(
            g, {angle(rng), angle(rng)},
            {static_cast<std::int64_t>(rng() % 3), static_cast<std::int64_t>(rng() % 4)});
        const GroupElement x =
            make_element(g, {coord(rng), coord(rng)}, {coord(rng), coord(rng)});
        CHECK(std::abs(std::abs(evaluate_character(g, xi, x)) - 1.0) < 1e-12);
    }
}

TEST_CASE("character is a homomorphism and conjugates under negation") {
    GroupDescriptor g{2, {6}};
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    std::uniform_int_distribution<std::int64_t> coord(-30, 30);
    for (int i = 0; i < 200; ++i) {
        const DualPoint xi = make_dual_point(
            g, {angle(rng), angle(rng)}, {static_cast<std::int64_t>(rng() % 6)});
        const GroupElement x = make_element(g, {coord(rng), coord(rng)}, {coord(rng)});
        const GroupElement y = make_element(g, {coord(rng), coord(rng)}, {coord(rng)});
        const cplx prod = evaluate_character(g, xi, x) * evaluate_character(g, xi, y);
        CHECK(std::abs(evaluate_character(g, xi, group_add(g, x, y)) - prod) < 1e-10);
        CHECK(std::abs(evaluate_character(g, xi, group_negate(g, x)) -
                       std::conj(evaluate_character(g, xi, x))) < 1e-12);
    }
}

TEST_CASE("hom_to_C_dimension") {
    CHECK(hom_to_C_dimension(GroupDescriptor{0, {6}}) == 0);
    CHECK(hom_to_C_dimension(GroupDescriptor{1, {}}) == 1);
    CHECK(hom_to_C_dimension(GroupDescriptor{2, {3}}) == 2);
    // Invariant under reordering torsion orders.
    CHECK(hom_to_C_dimension(GroupDescriptor{2, {3, 5, 4}}) ==
          hom_to_C_dimension(GroupDescriptor{2, {5, 4, 3}}));
}

TEST_CASE("dual distance") {
    GroupDescriptor z{1, {}};
    const DualPoint a = make_dual_point(z, {0.1});
    const DualPoint b = make_dual_point(z, {-0.1});
    CHECK(dual_distance(a, a) == 0.0);
    CHECK(dual_distance(a, b) == doctest::Approx(0.2).epsilon(1e-12));

    // Wraparound case checked against brute-force minimization over shifts.
    const DualPoint c = make_dual_point(z, {3.0});
    const DualPoint d = make_dual_point(z, {-3.0});
    const double expected = circle_distance_oracle(3.0, -3.0);
    CHECK(expected == doctest::Approx(kTwoPi - 6.0).epsilon(1e-12));
    CHECK(dual_distance(c, d) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(dual_distance(c, d) == dual_distance(d, c));

    // Torsion mismatch uses the sentinel.
    GroupDescriptor g{1, {4}};
    const DualPoint e = make_dual_point(g, {0.3}, {1});
    const DualPoint f = make_dual_point(g, {0.3}, {2});
    CHECK(dual_distance(e, f) == kTorsionMismatchDistance);

    CHECK_THROWS_AS(dual_distance(a, e), dimension_mismatch_error);
}

TEST_CASE("canonical angles and element reduction") {
    CHECK(canonical_angle(kPi) == doctest::Approx(kPi));
    CHECK(canonical_angle(-kPi) == doctest::Approx(kPi));
    CHECK(canonical_angle(3.0 * kPi) == doctest::Approx(kPi));
    CHECK(canonical_angle(0.0) == 0.0);

    GroupDescriptor g{1, {3}};
    const GroupElement x = make_element(g, {5}, {-1});
    CHECK(x.torsion_part[0] == 2);
    const GroupElement y = group_scale(g, 3, make_element(g, {1}, {1}));
    CHECK(y.free_part[0] == 3);
    CHECK(y.torsion_part[0] == 0);
}

TEST_CASE("boxes enumerate the expected counts") {
    GroupDescriptor g{1, {2}};
    CHECK(box_elements(g, 2).size() == 5 * 2);
    CHECK(half_box_elements(g, 2).size() == 3 * 2);
    GroupDescriptor z6{0, {6}};
    CHECK(box_elements(z6, 99).size() == 6);
    GroupDescriptor invalid{-1, {}};
    CHECK_THROWS_AS(invalid.validate(), dimension_mismatch_error);
    GroupDescriptor bad_torsion{0, {1}};
    CHECK_THROWS_AS(bad_torsion.validate(), dimension_mismatch_error);
}
