#pragma once

#include <cstdint>
#include <vector>

#include "abcoh/bochner.hpp"
#include "abcoh/measure.hpp"

namespace abcoh {

// Finite-window GNS model of phi: the Hilbert space spanned by translates of
// the cyclic vector delta_0 over the box of the given radius, with inner
// product <u, v> = u* K v where K[x][y] = phi(x - y). Translation acts by
// index shift and is partial (no wraparound on the free part).
struct GnsModel {
    GroupDescriptor group;
    std::int64_t radius = 0;
    std::vector<GroupElement> window;  // box_elements(group, radius) order
    std::vector<cplx> kernel;          // row-major, dim() x dim()
    std::size_t cyclic_index = 0;      // position of the identity element

    std::size_t dim() const { return window.size(); }
    std::size_t index_of(const GroupElement& x) const;  // throws window_too_small_error
    const cplx& kernel_at(std::size_t a, std::size_t b) const {
        return kernel[a * dim() + b];
    }
};

// Builds the kernel model from phi. radius < 0 selects the largest box whose
// pairwise differences stay inside phi's window (window_radius / 2).
// Rejects inputs failing the PSD gate, with the witness attached.
GnsModel build_gns(const PdFunction& phi, std::int64_t radius = -1);

// Certifies the unitary equivalence between the GNS representation of phi and
// the multiplication representation on L^2(dual, mu) by comparing the Gram
// matrices of the two cyclic orbits over the given shifts:
//   A[s][t] = phi(s - t)          (kernel side)
//   B[s][t] = integral of xi(s - t) d mu   (multiplication side)
// Returns max |A - B|; a discrepancy at quadrature level certifies
// equivalence on the window.
double verify_equivalence(const GnsModel& model, const DualMeasure& mu,
                          const std::vector<GroupElement>& shifts);

}  // namespace abcoh
