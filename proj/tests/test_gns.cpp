#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "abcoh/gns.hpp"
#include "abcoh/linalg.hpp"

using namespace abcoh;

namespace {

const GroupDescriptor kZ{1, {}};

std::vector<GroupElement> shifts_upto(const GroupDescriptor& g, std::int64_t s) {
    std::vector<GroupElement> out;
    for (std::int64_t k = 0; k <= s; ++k)
        out.push_back(group_scale(g, k, generator(g, 0)));
    return out;
}

}  // namespace

TEST_CASE("GNS kernel on Z2 with phi = delta_0 is the identity") {
    GroupDescriptor z2{0, {2}};
    PdFunction phi = make_pd_function(z2, 0, [](const GroupElement& x) {
        return cplx(x.torsion_part[0] == 0 ? 1.0 : 0.0, 0.0);
    });
    GnsModel model = build_gns(phi, 0);
    REQUIRE(model.dim() == 2);
    CHECK(std::abs(model.kernel_at(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(model.kernel_at(1, 1) - 1.0) < 1e-15);
    CHECK(std::abs(model.kernel_at(0, 1)) < 1e-15);
    CHECK(std::abs(model.kernel_at(1, 0)) < 1e-15);
}

TEST_CASE("GNS kernel of a single character has numerical rank 1") {
    const double theta0 = 1.3;
    PdFunction phi = make_pd_function(kZ, 16, [theta0](const GroupElement& x) {
        return std::polar(1.0, theta0 * static_cast<double>(x.free_part[0]));
    });
    GnsModel model = build_gns(phi, 8);
    REQUIRE(model.dim() == 17);
    auto eigs = hermitian_eigenvalues(model.kernel, model.dim());
    CHECK(numerical_rank(eigs, 1e-10) == 1);
    // All columns proportional to the first.
    for (std::size_t a = 0; a < model.dim(); ++a) {
        const cplx ratio = model.kernel_at(a, 0);
        for (std::size_t c = 0; c < model.dim(); ++c)
            CHECK(std::abs(model.kernel_at(a, c) - ratio * model.kernel_at(0, c)) <
                  1e-12);
    }
}

TEST_CASE("GNS kernel of the geometric function is the positive KMS matrix") {
    PdFunction phi = make_pd_function(kZ, 16, [](const GroupElement& x) {
        return cplx(std::pow(0.5, std::abs(static_cast<double>(x.free_part[0]))), 0.0);
    });
    GnsModel model = build_gns(phi, 8);
    REQUIRE(model.dim() == 17);
    for (std::size_t a = 0; a < model.dim(); ++a)
        for (std::size_t b = 0; b < model.dim(); ++b) {
            const auto da = model.window[a].free_part[0] - model.window[b].free_part[0];
            CHECK(model.kernel_at(a, b).real() ==
                  doctest::Approx(std::pow(0.5, std::abs(static_cast<double>(da)))));
        }
    auto eigs = hermitian_eigenvalues(model.kernel, model.dim());
    CHECK(min_eigenvalue(eigs) > 0.0);
}

TEST_CASE("build_gns rejects non positive definite input with a witness") {
    PdFunction bad = make_pd_function(kZ, 2, [](const GroupElement& x) {
        switch (std::abs(x.free_part[0])) {
            case 0: return cplx(1.0, 0.0);
            case 1: return cplx(0.9, 0.0);
            default: return cplx(-0.9, 0.0);
        }
    });
    try {
        build_gns(bad, 1);
        FAIL("expected rejection");
    } catch (const not_positive_definite_error& e) {
        CHECK_FALSE(e.report.positive);
        CHECK(e.report.min_eigenvalue < 0.0);
        CHECK_FALSE(e.report.witness.empty());
    }
}

TEST_CASE("cyclic orbit Grams agree: single atom") {
    const double theta0 = 1.0;
    DualMeasure mu =
        make_atomic_measure(kZ, {Atom{make_dual_point(kZ, {theta0}), 1.0}});
    PdFunction phi = make_pd_function(kZ, 16, [theta0](const GroupElement& x) {
        return std::polar(1.0, theta0 * static_cast<double>(x.free_part[0]));
    });
    GnsModel model = build_gns(phi, 8);
    CHECK(verify_equivalence(model, mu, shifts_upto(kZ, 8)) <= 1e-12);
}

TEST_CASE("cyclic orbit Grams agree: Poisson kernel at quadrature accuracy") {
    DualMeasure mu = make_poisson_measure(kZ, 0.5, 4096);
    PdFunction phi = make_pd_function(kZ, 16, [](const GroupElement& x) {
        return cplx(std::pow(0.5, std::abs(static_cast<double>(x.free_part[0]))), 0.0);
    });
    GnsModel model = build_gns(phi, 8);
    CHECK(verify_equivalence(model, mu, shifts_upto(kZ, 8)) <= 1e-8);
}

TEST_CASE("cyclic orbit Grams agree: finite group, exact") {
    GroupDescriptor z6{0, {6}};
    DualMeasure mu = make_atomic_measure(
        z6, {Atom{make_dual_point(z6, {}, {1}), 0.5},
             Atom{make_dual_point(z6, {}, {3}), 0.3},
             Atom{make_dual_point(z6, {}, {5}), 0.2}});
    PdFunction phi = bochner_forward(mu, 0);
    GnsModel model = build_gns(phi, 0);
    CHECK(verify_equivalence(model, mu, shifts_upto(z6, 8)) <= 1e-12);
}

TEST_CASE("shifts outside the model window are refused") {
    PdFunction phi = make_pd_function(kZ, 8, [](const GroupElement& x) {
        return cplx(std::pow(0.5, std::abs(static_cast<double>(x.free_part[0]))), 0.0);
    });
    GnsModel model = build_gns(phi);  // radius 4
    DualMeasure mu = make_poisson_measure(kZ, 0.5, 256);
    CHECK_THROWS_AS(verify_equivalence(model, mu, shifts_upto(kZ, 5)),
                    window_too_small_error);
    CHECK_THROWS_AS(build_gns(phi, 5), window_too_small_error);
}

TEST_CASE("kernels built from random measures are PSD") {
    std::mt19937_64 rng(59);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    std::uniform_real_distribution<double> unit(0.1, 1.0);
    for (int round = 0; round < 10; ++round) {
        std::vector<DualMeasure> parts = {
            make_poisson_measure(kZ, 0.1 + 0.8 * unit(rng), 512),
            make_atomic_measure(kZ, {Atom{make_dual_point(kZ, {angle(rng)}), 1.0}})};
        DualMeasure mu = make_mixture(parts, {unit(rng), unit(rng)});
        GnsModel model = build_gns(bochner_forward(mu, 12), 6);
        auto eigs = hermitian_eigenvalues(model.kernel, model.dim());
        CHECK(min_eigenvalue(eigs) >= -1e-8 * spectral_norm(eigs));
    }
}

TEST_CASE("model kernel certifies <translate(t) delta_0, delta_0> = phi(t)") {
    DualMeasure mu = make_poisson_measure(kZ, 0.7, 2048);
    PdFunction phi = bochner_forward(mu, 20);
    GnsModel model = build_gns(phi, 10);
    for (const GroupElement& t : model.window)
        CHECK(std::abs(model.kernel_at(model.index_of(t), model.cyclic_index) -
                       phi.value(t)) < 1e-12);
}
