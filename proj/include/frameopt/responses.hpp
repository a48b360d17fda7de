#ifndef FRAMEOPT_RESPONSES_HPP
#define FRAMEOPT_RESPONSES_HPP

#include <Eigen/Dense>

#include "frameopt/assembly.hpp"

// Scalar structural responses evaluated from an assembled system and its
// solution.

namespace frameopt {

inline Vec12 gather_element_u(const Eigen::VectorXd& u_full, const std::array<int, 12>& packed) {
    Vec12 u;
    for (int i = 0; i < 12; ++i) u(i) = u_full(packed[i]);
    return u;
}

// 0.5 u'Ku over all dofs (free and prescribed), summed over load cases.
inline double strain_energy(const Assembled& a, const Solution& sol) {
    double e = 0.0;
    for (const Eigen::VectorXd& u : sol.u_free)
        e += 0.5 * u.dot(a.k * u) + u.dot(a.corr) + a.pp_energy;
    return e;
}

// Work of the applied loads through the free displacements, summed over
// load cases.
inline double compliance(const Assembled& a, const Solution& sol) {
    double c = 0.0;
    for (std::size_t lc = 0; lc < sol.u_free.size(); ++lc) c += a.f[lc].dot(sol.u_free[lc]);
    return c;
}

// Normal stress magnitude of one element under one load case.
inline double element_stress(const ModelState& s, const Assembled& a,
                             const Eigen::VectorXd& u_full, int elem_index) {
    const std::array<int, 12>& packed = a.packed[elem_index];
    const ElementState& es = s.elem[elem_index];
    if (const TrussKernel* tk = std::get_if<TrussKernel>(&a.kernels[elem_index])) {
        const Eigen::Vector3d ua(u_full(packed[0]), u_full(packed[1]), u_full(packed[2]));
        const Eigen::Vector3d ub(u_full(packed[6]), u_full(packed[7]), u_full(packed[8]));
        return std::abs(truss_stress_signed(*tk, es, ua, ub));
    }
    const BeamKernel& bk = std::get<BeamKernel>(a.kernels[elem_index]);
    return beam_stress(bk, es, gather_element_u(u_full, packed));
}

} // namespace frameopt

#endif
