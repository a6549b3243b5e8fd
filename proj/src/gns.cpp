#include "abcoh/gns.hpp"

#include <cmath>
#include <string>

#include "abcoh/linalg.hpp"

namespace abcoh {

std::size_t GnsModel::index_of(const GroupElement& x) const {
    if (static_cast<int>(x.free_part.size()) != group.free_rank ||
        x.torsion_part.size() != group.torsion_orders.size())
        throw dimension_mismatch_error("element shape does not match model group");
    if (free_linf_norm(x) > radius)
        throw window_too_small_error("shift outside the model window");
    const std::int64_t side = 2 * radius + 1;
    std::int64_t idx = 0, stride = 1;
    for (int i = 0; i < group.free_rank; ++i) {
        idx += (x.free_part[i] + radius) * stride;
        stride *= side;
    }
    std::int64_t tidx = 0, tstride = 1;
    for (std::size_t j = 0; j < x.torsion_part.size(); ++j) {
        tidx += x.torsion_part[j] * tstride;
        tstride *= group.torsion_orders[j];
    }
    return static_cast<std::size_t>(tidx + group.torsion_size() * idx);
}

GnsModel build_gns(const PdFunction& phi, std::int64_t radius) {
    PsdReport psd = check_positive_definite(phi);
    if (!psd.positive)
        throw not_positive_definite_error(
            "GNS construction rejected: phi is not positive definite "
            "(min eigenvalue " + std::to_string(psd.min_eigenvalue) + ")",
            std::move(psd));

    GnsModel model;
    model.group = phi.group;
    model.radius = radius >= 0 ? radius : phi.window_radius / 2;
    if (2 * model.radius > phi.window_radius)
        throw window_too_small_error(
            "model radius needs phi on differences up to twice the radius");
    model.window = box_elements(model.group, model.radius);
    model.cyclic_index = model.index_of(zero_element(model.group));

    const std::size_t n = model.dim();
    model.kernel.resize(n * n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            model.kernel[a * n + b] =
                phi.value(group_subtract(model.group, model.window[a], model.window[b]));

    // Kernel invariants: unit diagonal, <delta_t, delta_0> = phi(t), PSD.
    for (std::size_t a = 0; a < n; ++a)
        if (std::abs(model.kernel_at(a, a) - 1.0) > 1e-12)
            throw inconsistent_input_error("kernel diagonal is not 1");
    for (const GroupElement& t : model.window)
        if (std::abs(model.kernel_at(model.index_of(t), model.cyclic_index) -
                     phi.value(t)) > 1e-12)
            throw inconsistent_input_error("cyclic matrix coefficient mismatch");
    auto eigs = hermitian_eigenvalues(model.kernel, n);
    if (min_eigenvalue(eigs) < -1e-8 * spectral_norm(eigs))
        throw inconsistent_input_error("kernel matrix is not PSD");
    return model;
}

double verify_equivalence(const GnsModel& model, const DualMeasure& mu,
                          const std::vector<GroupElement>& shifts) {
    if (!(mu.group == model.group))
        throw dimension_mismatch_error("measure and model groups differ");
    double discrepancy = 0.0;
    for (const GroupElement& s : shifts) {
        for (const GroupElement& t : shifts) {
            const GroupElement d = group_subtract(model.group, s, t);
            const cplx a =
                model.kernel_at(model.index_of(s), model.index_of(t));
            const cplx b = integrate_character(mu, d);
            discrepancy = std::max(discrepancy, std::abs(a - b));
        }
    }
    return discrepancy;
}

}  // namespace abcoh
