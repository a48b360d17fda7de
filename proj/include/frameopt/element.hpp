#ifndef FRAMEOPT_ELEMENT_HPP
#define FRAMEOPT_ELEMENT_HPP

#include <Eigen/Dense>
#include <cmath>

#include "frameopt/error.hpp"
#include "frameopt/model.hpp"

// Element-level kernels: local/global stiffness, lumped mass and consistent
// load vectors for 3D truss bars and 12-dof Euler-Bernoulli beams. All
// functions are pure in their geometric/section inputs so that parameter
// sensitivities can be finite-differenced element by element.

namespace frameopt {

using Mat12 = Eigen::Matrix<double, 12, 12>;
using Vec12 = Eigen::Matrix<double, 12, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

// Local axes as rows of R: x along the element, y/z transverse. Near-vertical
// elements fall back to the global X axis as reference; otherwise global Z is
// used. `roll` rotates y/z about the element axis.
inline Eigen::Matrix3d local_axes(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                                  double roll) {
    const Eigen::Vector3d ex = (b - a).normalized();
    Eigen::Vector3d ref;
    if (std::abs(ex.dot(Eigen::Vector3d::UnitZ())) > 1.0 - 1e-8)
        ref = Eigen::Vector3d::UnitX();
    else
        ref = Eigen::Vector3d::UnitZ();
    Eigen::Vector3d ey = ref.cross(ex).normalized();
    Eigen::Vector3d ez = ex.cross(ey);
    if (roll != 0.0) {
        const double c = std::cos(roll), s = std::sin(roll);
        const Eigen::Vector3d ey2 = c * ey + s * ez;
        ez = -s * ey + c * ez;
        ey = ey2;
    }
    Eigen::Matrix3d r;
    r.row(0) = ex;
    r.row(1) = ey;
    r.row(2) = ez;
    return r;
}

struct TrussKernel {
    Mat6 k_global;
    Eigen::Vector3d dir;
    double length = 0.0;
    double mass = 0.0;
    double ea_over_l = 0.0;
};

inline TrussKernel truss_kernel(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                                const ElementState& es, const Material& mat) {
    TrussKernel k;
    const Eigen::Vector3d d = b - a;
    const double geom_len = d.norm();
    if (geom_len < 1e-12) throw ModelError("truss element with zero length");
    k.length = es.length > 0.0 ? es.length : geom_len;
    k.dir = d / geom_len;
    k.ea_over_l = mat.youngs_modulus * es.area / k.length;
    k.mass = mat.density * es.area * k.length;
    const Eigen::Matrix3d block = k.ea_over_l * (k.dir * k.dir.transpose());
    k.k_global.topLeftCorner<3, 3>() = block;
    k.k_global.bottomRightCorner<3, 3>() = block;
    k.k_global.topRightCorner<3, 3>() = -block;
    k.k_global.bottomLeftCorner<3, 3>() = -block;
    return k;
}

struct BeamKernel {
    Mat12 k_local;
    Mat12 t; // block-diagonal transformation, u_local = t * u_global
    Mat12 k_global;
    Eigen::Matrix3d rot;
    double length = 0.0;
    double mass = 0.0;
};

inline BeamKernel beam_kernel(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                              const ElementState& es, const Material& mat) {
    BeamKernel k;
    const double geom_len = (b - a).norm();
    if (geom_len < 1e-12) throw ModelError("beam element with zero length");
    const double l = es.length > 0.0 ? es.length : geom_len;
    k.length = l;
    k.mass = mat.density * es.area * l;
    k.rot = local_axes(a, b, es.roll);

    const double e = mat.youngs_modulus;
    const double g = mat.shear_modulus();
    const double ka = e * es.area / l;
    const double kt = g * es.torsion / l;
    const double bz1 = 12.0 * e * es.izz / (l * l * l);
    const double bz2 = 6.0 * e * es.izz / (l * l);
    const double bz3 = 4.0 * e * es.izz / l;
    const double bz4 = 2.0 * e * es.izz / l;
    const double by1 = 12.0 * e * es.iyy / (l * l * l);
    const double by2 = 6.0 * e * es.iyy / (l * l);
    const double by3 = 4.0 * e * es.iyy / l;
    const double by4 = 2.0 * e * es.iyy / l;

    Mat12& m = k.k_local;
    m.setZero();
    // axial
    m(0, 0) = ka;
    m(0, 6) = -ka;
    m(6, 6) = ka;
    // torsion
    m(3, 3) = kt;
    m(3, 9) = -kt;
    m(9, 9) = kt;
    // bending about local z (deflection along local y)
    m(1, 1) = bz1;
    m(1, 5) = bz2;
    m(1, 7) = -bz1;
    m(1, 11) = bz2;
    m(5, 5) = bz3;
    m(5, 7) = -bz2;
    m(5, 11) = bz4;
    m(7, 7) = bz1;
    m(7, 11) = -bz2;
    m(11, 11) = bz3;
    // bending about local y (deflection along local z); the 6EI/L^2 terms
    // carry the opposite sign pattern
    m(2, 2) = by1;
    m(2, 4) = -by2;
    m(2, 8) = -by1;
    m(2, 10) = -by2;
    m(4, 4) = by3;
    m(4, 8) = by2;
    m(4, 10) = by4;
    m(8, 8) = by1;
    m(8, 10) = by2;
    m(10, 10) = by3;
    m = m.selfadjointView<Eigen::Upper>();

    k.t.setZero();
    for (int blk = 0; blk < 4; ++blk) k.t.block<3, 3>(3 * blk, 3 * blk) = k.rot;
    k.k_global = k.t.transpose() * k.k_local * k.t;
    return k;
}

// Consistent nodal loads for a uniform distributed load (global frame,
// force per unit length) on a beam; returns the global 12-dof vector.
inline Vec12 beam_distributed_load(const BeamKernel& k, const Eigen::Vector3d& w_global) {
    const Eigen::Vector3d w = k.rot * w_global;
    const double l = k.length;
    Vec12 f;
    f.setZero();
    f(0) = w.x() * l / 2.0;
    f(1) = w.y() * l / 2.0;
    f(2) = w.z() * l / 2.0;
    f(4) = -w.z() * l * l / 12.0;
    f(5) = w.y() * l * l / 12.0;
    f(6) = w.x() * l / 2.0;
    f(7) = w.y() * l / 2.0;
    f(8) = w.z() * l / 2.0;
    f(10) = w.z() * l * l / 12.0;
    f(11) = -w.y() * l * l / 12.0;
    return k.t.transpose() * f;
}

// End-section normal stress magnitudes from the element displacement vector:
// |N/A| + |My| cz/Iyy + |Mz| cy/Izz at each end. Returns max over both ends.
inline double beam_stress(const BeamKernel& k, const ElementState& es, const Vec12& u_global,
                          int* active_end = nullptr) {
    const Vec12 f = k.k_local * (k.t * u_global);
    const double s_a =
        std::abs(f(0)) / es.area + std::abs(f(4)) * es.cz / es.iyy + std::abs(f(5)) * es.cy / es.izz;
    const double s_b =
        std::abs(f(6)) / es.area + std::abs(f(10)) * es.cz / es.iyy + std::abs(f(11)) * es.cy / es.izz;
    if (active_end) *active_end = s_a >= s_b ? 0 : 1;
    return std::max(s_a, s_b);
}

// Gradient of beam_stress with respect to the 12 global element dofs, taken
// on the currently active end/sign branch.
inline Vec12 beam_stress_du(const BeamKernel& k, const ElementState& es, const Vec12& u_global) {
    int end = 0;
    beam_stress(k, es, u_global, &end);
    const Mat12 rows = k.k_local * k.t;
    const Vec12 f = rows * u_global;
    const int in = end == 0 ? 0 : 6, iy = end == 0 ? 4 : 10, iz = end == 0 ? 5 : 11;
    const auto sgn = [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); };
    Vec12 g = sgn(f(in)) / es.area * rows.row(in).transpose();
    g += sgn(f(iy)) * es.cz / es.iyy * rows.row(iy).transpose();
    g += sgn(f(iz)) * es.cy / es.izz * rows.row(iz).transpose();
    return g;
}

// Axial stress of a truss bar (signed: positive in tension).
inline double truss_stress_signed(const TrussKernel& k, const ElementState& es,
                                  const Eigen::Vector3d& ua, const Eigen::Vector3d& ub) {
    const double n = k.ea_over_l * k.dir.dot(ub - ua);
    return n / es.area;
}

} // namespace frameopt

#endif
