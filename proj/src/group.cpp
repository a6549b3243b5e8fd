#include "abcoh/group.hpp"

#include <cmath>
#include <string>

namespace abcoh {

namespace {

std::int64_t positive_mod(std::int64_t v, std::int64_t n) {
    std::int64_t r = v % n;
    return r < 0 ? r + n : r;
}

void check_element_shape(const GroupDescriptor& g, const GroupElement& x) {
    if (static_cast<int>(x.free_part.size()) != g.free_rank ||
        x.torsion_part.size() != g.torsion_orders.size())
        throw dimension_mismatch_error("group element shape does not match descriptor");
}

void check_dual_shape(const GroupDescriptor& g, const DualPoint& xi) {
    if (static_cast<int>(xi.torus_angles.size()) != g.free_rank ||
        xi.torsion_characters.size() != g.torsion_orders.size())
        throw dimension_mismatch_error("dual point shape does not match descriptor");
}

}  // namespace

std::int64_t GroupDescriptor::torsion_size() const {
    std::int64_t s = 1;
    for (std::int64_t n : torsion_orders) s *= n;
    return s;
}

void GroupDescriptor::validate() const {
    if (free_rank < 0)
        throw dimension_mismatch_error("free_rank must be nonnegative");
    for (std::int64_t n : torsion_orders)
        if (n < 2)
            throw dimension_mismatch_error("torsion orders must be >= 2, got " +
                                           std::to_string(n));
}

double canonical_angle(double theta) {
    double r = std::remainder(theta, kTwoPi);  // in [-pi, pi]
    if (r <= -kPi) r += kTwoPi;
    return r;
}

double circle_distance(double a, double b) {
    return std::abs(std::remainder(a - b, kTwoPi));
}

GroupElement make_element(const GroupDescriptor& g,
                          std::vector<std::int64_t> free_part,
                          std::vector<std::int64_t> torsion_part) {
    GroupElement x{std::move(free_part), std::move(torsion_part)};
    if (x.torsion_part.empty()) x.torsion_part.resize(g.torsion_orders.size(), 0);
    check_element_shape(g, x);
    for (std::size_t j = 0; j < x.torsion_part.size(); ++j)
        x.torsion_part[j] = positive_mod(x.torsion_part[j], g.torsion_orders[j]);
    return x;
}

GroupElement zero_element(const GroupDescriptor& g) {
    return GroupElement{std::vector<std::int64_t>(g.free_rank, 0),
                        std::vector<std::int64_t>(g.torsion_orders.size(), 0)};
}

GroupElement generator(const GroupDescriptor& g, int i) {
    GroupElement x = zero_element(g);
    if (i < 0 || i >= g.generator_count())
        throw dimension_mismatch_error("generator index out of range");
    if (i < g.free_rank)
        x.free_part[i] = 1;
    else
        x.torsion_part[i - g.free_rank] = 1;
    return x;
}

std::vector<GroupElement> generators(const GroupDescriptor& g) {
    std::vector<GroupElement> gens;
    gens.reserve(g.generator_count());
    for (int i = 0; i < g.generator_count(); ++i) gens.push_back(generator(g, i));
    return gens;
}

GroupElement group_add(const GroupDescriptor& g, const GroupElement& a,
                       const GroupElement& b) {
    check_element_shape(g, a);
    check_element_shape(g, b);
    GroupElement out = a;
    for (int i = 0; i < g.free_rank; ++i) out.free_part[i] += b.free_part[i];
    for (std::size_t j = 0; j < out.torsion_part.size(); ++j)
        out.torsion_part[j] =
            positive_mod(out.torsion_part[j] + b.torsion_part[j], g.torsion_orders[j]);
    return out;
}

GroupElement group_negate(const GroupDescriptor& g, const GroupElement& a) {
    check_element_shape(g, a);
    GroupElement out = a;
    for (auto& v : out.free_part) v = -v;
    for (std::size_t j = 0; j < out.torsion_part.size(); ++j)
        out.torsion_part[j] = positive_mod(-out.torsion_part[j], g.torsion_orders[j]);
    return out;
}

GroupElement group_subtract(const GroupDescriptor& g, const GroupElement& a,
                            const GroupElement& b) {
    return group_add(g, a, group_negate(g, b));
}

GroupElement group_scale(const GroupDescriptor& g, std::int64_t n,
                         const GroupElement& a) {
    check_element_shape(g, a);
    GroupElement out = a;
    for (auto& v : out.free_part) v *= n;
    for (std::size_t j = 0; j < out.torsion_part.size(); ++j)
        out.torsion_part[j] = positive_mod(out.torsion_part[j] * n, g.torsion_orders[j]);
    return out;
}

std::int64_t free_linf_norm(const GroupElement& a) {
    std::int64_t m = 0;
    for (std::int64_t v : a.free_part) m = std::max(m, std::abs(v));
    return m;
}

DualPoint make_dual_point(const GroupDescriptor& g, std::vector<double> angles,
                          std::vector<std::int64_t> characters) {
    DualPoint xi{std::move(angles), std::move(characters)};
    if (xi.torsion_characters.empty())
        xi.torsion_characters.resize(g.torsion_orders.size(), 0);
    check_dual_shape(g, xi);
    for (auto& t : xi.torus_angles) t = canonical_angle(t);
    for (std::size_t j = 0; j < xi.torsion_characters.size(); ++j)
        xi.torsion_characters[j] =
            positive_mod(xi.torsion_characters[j], g.torsion_orders[j]);
    return xi;
}

DualPoint trivial_character(const GroupDescriptor& g) {
    return DualPoint{std::vector<double>(g.free_rank, 0.0),
                     std::vector<std::int64_t>(g.torsion_orders.size(), 0)};
}

bool is_trivial_character(const DualPoint& xi) {
    for (double t : xi.torus_angles)
        if (t != 0.0) return false;
    for (std::int64_t c : xi.torsion_characters)
        if (c != 0) return false;
    return true;
}

cplx evaluate_character(const GroupDescriptor& g, const DualPoint& xi,
                        const GroupElement& x) {
    check_dual_shape(g, xi);
    check_element_shape(g, x);
    double phase = 0.0;
    for (int i = 0; i < g.free_rank; ++i)
        phase += xi.torus_angles[i] * static_cast<double>(x.free_part[i]);
    for (std::size_t j = 0; j < g.torsion_orders.size(); ++j) {
        std::int64_t n = g.torsion_orders[j];
        std::int64_t cr = positive_mod(xi.torsion_characters[j] * x.torsion_part[j], n);
        phase += kTwoPi * static_cast<double>(cr) / static_cast<double>(n);
    }
    return std::polar(1.0, phase);
}

int hom_to_C_dimension(const GroupDescriptor& g) { return g.free_rank; }

double dual_distance(const DualPoint& xi, const DualPoint& eta) {
    if (xi.torus_angles.size() != eta.torus_angles.size() ||
        xi.torsion_characters.size() != eta.torsion_characters.size())
        throw dimension_mismatch_error("dual points have different shapes");
    if (xi.torsion_characters != eta.torsion_characters)
        return kTorsionMismatchDistance;
    double d = 0.0;
    for (std::size_t i = 0; i < xi.torus_angles.size(); ++i)
        d = std::max(d, circle_distance(xi.torus_angles[i], eta.torus_angles[i]));
    return d;
}

namespace {

// Runs fn over the odometer of torsion residues.
template <typename Fn>
void for_each_torsion(const GroupDescriptor& g, Fn&& fn) {
    std::vector<std::int64_t> t(g.torsion_orders.size(), 0);
    for (;;) {
        fn(t);
        std::size_t j = 0;
        for (; j < t.size(); ++j) {
            if (++t[j] < g.torsion_orders[j]) break;
            t[j] = 0;
        }
        if (j == t.size()) return;
    }
}

std::vector<GroupElement> box_impl(const GroupDescriptor& g, std::int64_t lo,
                                   std::int64_t hi) {
    std::vector<GroupElement> out;
    std::vector<std::int64_t> m(g.free_rank, lo);
    for (;;) {
        for_each_torsion(g, [&](const std::vector<std::int64_t>& t) {
            out.push_back(GroupElement{m, t});
        });
        int i = 0;
        for (; i < g.free_rank; ++i) {
            if (++m[i] <= hi) break;
            m[i] = lo;
        }
        if (i == g.free_rank) return out;
    }
}

}  // namespace

std::vector<GroupElement> box_elements(const GroupDescriptor& g,
                                       std::int64_t radius) {
    return box_impl(g, -radius, radius);
}

std::vector<GroupElement> half_box_elements(const GroupDescriptor& g,
                                            std::int64_t radius) {
    return box_impl(g, 0, radius);
}

}  // namespace abcoh
