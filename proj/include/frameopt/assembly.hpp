#ifndef FRAMEOPT_ASSEMBLY_HPP
#define FRAMEOPT_ASSEMBLY_HPP

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "frameopt/element.hpp"
#include "frameopt/error.hpp"
#include "frameopt/model.hpp"

// Global assembly and the direct solver. The reduced symmetric stiffness is
// factored once per evaluation (Cholesky); the factor is kept for adjoint
// back-substitutions and the inverse-iteration eigensolve.

namespace frameopt {

inline const char* dof_name(int c) {
    static const char* names[] = {"ux", "uy", "uz", "rx", "ry", "rz"};
    return names[c];
}

struct DofMap {
    int n_nodes = 0;
    int n_free = 0;
    std::vector<int> index;         // packed dof (6*node+c) -> free index or -1
    std::vector<double> prescribed; // packed dof -> imposed value (0 unless fixed)
    std::vector<int> free_dofs;     // free index -> packed dof
    bool any_prescribed = false;
};

// Supports fix dofs explicitly; rotations of nodes touched only by truss
// elements are fixed automatically (truss bars carry no rotational
// stiffness, so leaving them free would make every such model singular).
inline DofMap build_dof_map(const FrameModel& m) {
    DofMap d;
    d.n_nodes = static_cast<int>(m.nodes.size());
    const int n = 6 * d.n_nodes;
    std::vector<bool> fixed(n, false);
    d.prescribed.assign(n, 0.0);

    std::vector<bool> has_beam(m.nodes.size(), false);
    for (const Element& e : m.elements)
        if (e.kind == ElementKind::Beam) {
            has_beam[m.node_index(e.node_a)] = true;
            has_beam[m.node_index(e.node_b)] = true;
        }
    for (std::size_t i = 0; i < m.nodes.size(); ++i)
        if (!has_beam[i])
            for (int c = 3; c < 6; ++c) fixed[6 * i + c] = true;

    for (const Support& s : m.supports) {
        const int base = 6 * m.node_index(s.node);
        for (int c = 0; c < 6; ++c)
            if (s.fixed[c]) {
                fixed[base + c] = true;
                d.prescribed[base + c] = s.prescribed[c];
                if (s.prescribed[c] != 0.0) d.any_prescribed = true;
            }
    }

    d.index.assign(n, -1);
    for (int i = 0; i < n; ++i)
        if (!fixed[i]) {
            d.index[i] = d.n_free++;
            d.free_dofs.push_back(i);
        }
    if (d.n_free == 0) throw ModelError("model has no free degrees of freedom");
    return d;
}

using ElemKernel = std::variant<TrussKernel, BeamKernel>;

struct Assembled {
    Eigen::MatrixXd k;              // reduced stiffness
    Eigen::VectorXd mass_diag;      // reduced lumped translational mass
    Eigen::VectorXd corr;           // K_fp * u_p
    double pp_energy = 0.0;         // 0.5 * u_p' K_pp u_p
    std::vector<Eigen::VectorXd> f; // applied load per case, reduced
    double total_mass = 0.0;        // sum over elements of rho*A*L
    std::vector<ElemKernel> kernels;
    std::vector<std::array<int, 12>> packed; // element -> packed dof ids (a then b)
};

inline std::array<int, 12> element_packed_dofs(const FrameModel& m, const Element& e) {
    std::array<int, 12> p;
    const int a = m.node_index(e.node_a), b = m.node_index(e.node_b);
    for (int c = 0; c < 6; ++c) {
        p[c] = 6 * a + c;
        p[6 + c] = 6 * b + c;
    }
    return p;
}

namespace detail {

template <int N>
void scatter_k(const Eigen::Matrix<double, N, N>& ke, const std::array<int, 12>& packed,
               const DofMap& d, Assembled& out) {
    // A 6x6 truss kernel orders its dofs [a translations | b translations], so
    // kernel index i lives at packed slot 6*(i/3) + i%3, not packed[i].
    const auto slot = [&packed](int i) { return N == 6 ? packed[6 * (i / 3) + i % 3] : packed[i]; };
    for (int i = 0; i < N; ++i) {
        const int pi = slot(i);
        const int ri = d.index[pi];
        for (int j = 0; j < N; ++j) {
            const int pj = slot(j);
            const int cj = d.index[pj];
            if (ri >= 0 && cj >= 0)
                out.k(ri, cj) += ke(i, j);
            else if (ri >= 0)
                out.corr(ri) += ke(i, j) * d.prescribed[pj];
            else if (cj < 0)
                out.pp_energy += 0.5 * d.prescribed[pi] * ke(i, j) * d.prescribed[pj];
        }
    }
}

inline void add_force(Eigen::VectorXd& f, const DofMap& d, int packed_dof, double v) {
    const int idx = d.index[packed_dof];
    if (idx >= 0) f(idx) += v;
}

} // namespace detail

inline Assembled assemble(const FrameModel& m, const ModelState& s, const DofMap& d) {
    Assembled out;
    out.k = Eigen::MatrixXd::Zero(d.n_free, d.n_free);
    out.mass_diag = Eigen::VectorXd::Zero(d.n_free);
    out.corr = Eigen::VectorXd::Zero(d.n_free);
    out.kernels.reserve(m.elements.size());
    out.packed.reserve(m.elements.size());

    for (const Element& e : m.elements) {
        const Eigen::Vector3d& pa = s.pos[m.node_index(e.node_a)];
        const Eigen::Vector3d& pb = s.pos[m.node_index(e.node_b)];
        const ElementState& es = s.elem[e.id - 1];
        const Material& mat = m.materials[e.material];
        const std::array<int, 12> packed = element_packed_dofs(m, e);
        double mass = 0.0;
        if (e.kind == ElementKind::Truss) {
            TrussKernel k = truss_kernel(pa, pb, es, mat);
            detail::scatter_k<6>(k.k_global, packed, d, out);
            mass = k.mass;
            out.kernels.emplace_back(std::move(k));
        } else {
            BeamKernel k = beam_kernel(pa, pb, es, mat);
            detail::scatter_k<12>(k.k_global, packed, d, out);
            mass = k.mass;
            out.kernels.emplace_back(std::move(k));
        }
        out.total_mass += mass;
        for (int node = 0; node < 2; ++node)
            for (int c = 0; c < 3; ++c)
                detail::add_force(out.mass_diag, d, packed[6 * node + c], mass / 2.0);
        out.packed.push_back(packed);
    }

    out.f.assign(m.load_cases.size(), Eigen::VectorXd::Zero(d.n_free));
    for (std::size_t lc = 0; lc < m.load_cases.size(); ++lc) {
        const LoadCase& c = m.load_cases[lc];
        Eigen::VectorXd& f = out.f[lc];
        for (const PointLoad& pl : c.point_loads) {
            const int base = 6 * m.node_index(pl.node);
            for (int i = 0; i < 3; ++i) {
                detail::add_force(f, d, base + i, pl.force(i));
                detail::add_force(f, d, base + 3 + i, pl.moment(i));
            }
        }
        for (const DistributedLoad& dl : c.distributed) {
            const int ei = m.element_index(dl.element);
            const std::array<int, 12>& packed = out.packed[ei];
            if (const TrussKernel* tk = std::get_if<TrussKernel>(&out.kernels[ei])) {
                const Eigen::Vector3d half = dl.force_per_length * tk->length / 2.0;
                for (int node = 0; node < 2; ++node)
                    for (int i = 0; i < 3; ++i)
                        detail::add_force(f, d, packed[6 * node + i], half(i));
            } else {
                const BeamKernel& bk = std::get<BeamKernel>(out.kernels[ei]);
                const Vec12 fe = beam_distributed_load(bk, dl.force_per_length);
                for (int i = 0; i < 12; ++i) detail::add_force(f, d, packed[i], fe(i));
            }
        }
        if (c.gravity.squaredNorm() > 0.0) {
            for (std::size_t ei = 0; ei < m.elements.size(); ++ei) {
                const double mass = std::holds_alternative<TrussKernel>(out.kernels[ei])
                                        ? std::get<TrussKernel>(out.kernels[ei]).mass
                                        : std::get<BeamKernel>(out.kernels[ei]).mass;
                const Eigen::Vector3d half = c.gravity * mass / 2.0;
                for (int node = 0; node < 2; ++node)
                    for (int i = 0; i < 3; ++i)
                        detail::add_force(f, d, out.packed[ei][6 * node + i], half(i));
            }
        }
    }
    return out;
}

// Best-effort diagnosis for a singular reduced stiffness: report where the
// softest mode moves most.
inline std::string describe_mechanism(const Eigen::MatrixXd& k, const DofMap& d) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
    std::string msg = "stiffness matrix is not positive definite (mechanism)";
    if (es.info() == Eigen::Success) {
        const Eigen::VectorXd mode = es.eigenvectors().col(0);
        int worst = 0;
        mode.cwiseAbs().maxCoeff(&worst);
        const int packed = d.free_dofs[worst];
        msg += ": dominant motion at node " + std::to_string(packed / 6 + 1) + " (" +
               dof_name(packed % 6) + "), smallest eigenvalue " + std::to_string(es.eigenvalues()(0));
    }
    return msg;
}

struct Solution {
    Eigen::LLT<Eigen::MatrixXd> llt;
    std::vector<Eigen::VectorXd> u_free; // per case
    std::vector<Eigen::VectorXd> u_full; // per case, 6*n_nodes with prescribed values
};

inline Solution solve(const FrameModel& m, const DofMap& d, const Assembled& a) {
    Solution sol;
    sol.llt.compute(a.k);
    if (sol.llt.info() != Eigen::Success) throw MechanismError(describe_mechanism(a.k, d));

    sol.u_free.reserve(a.f.size());
    sol.u_full.reserve(a.f.size());
    for (std::size_t lc = 0; lc < a.f.size(); ++lc) {
        const Eigen::VectorXd rhs = a.f[lc] - a.corr;
        Eigen::VectorXd u = sol.llt.solve(rhs);
        if (!u.allFinite()) throw MechanismError(describe_mechanism(a.k, d));
        const double rhs_scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
        const double residual = (a.k * u - rhs).cwiseAbs().maxCoeff();
        if (residual > 1e-8 * rhs_scale)
            throw NumericalError("linear solve residual " + std::to_string(residual) +
                                 " exceeds tolerance in load case '" + m.load_cases[lc].name + "'");
        Eigen::VectorXd full = Eigen::VectorXd::Zero(6 * d.n_nodes);
        for (int i = 0; i < 6 * d.n_nodes; ++i)
            full(i) = d.index[i] >= 0 ? u(d.index[i]) : d.prescribed[i];
        sol.u_free.push_back(std::move(u));
        sol.u_full.push_back(std::move(full));
    }
    return sol;
}

struct ModalResult {
    double lambda = 0.0;    // smallest generalized eigenvalue of (K, M)
    double frequency = 0.0; // sqrt(lambda) / (2 pi)
    Eigen::VectorXd phi;    // mode shape, unit M-norm
};

namespace detail {

// Inverse power iteration on K^-1 M, optionally M-deflated against a known
// mode. Lumped M may be singular (rotational dofs); iteration stays inside
// the mass-supported subspace.
inline double inverse_iteration(const Eigen::LLT<Eigen::MatrixXd>& llt,
                                const Eigen::VectorXd& mass, const Eigen::VectorXd* deflate,
                                Eigen::VectorXd* mode_out) {
    const int n = static_cast<int>(mass.size());
    Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
    if (deflate) {
        const double denom = deflate->dot(mass.cwiseProduct(*deflate));
        x -= (*deflate) * (deflate->dot(mass.cwiseProduct(x)) / denom);
    }
    double lambda = 0.0;
    for (int it = 0; it < 20000; ++it) {
        const Eigen::VectorXd mx = mass.cwiseProduct(x);
        Eigen::VectorXd y = llt.solve(mx);
        if (deflate) {
            const double denom = deflate->dot(mass.cwiseProduct(*deflate));
            y -= (*deflate) * (deflate->dot(mass.cwiseProduct(y)) / denom);
        }
        const double ymy = y.dot(mass.cwiseProduct(y));
        if (!(ymy > 0.0) || !y.allFinite())
            throw NumericalError("modal analysis: iteration left the mass-supported subspace");
        const double lambda_new = y.dot(mass.cwiseProduct(x)) / ymy;
        y /= std::sqrt(ymy);
        x = y;
        if (it > 0 && std::abs(lambda_new - lambda) <= 1e-13 * std::abs(lambda_new)) {
            lambda = lambda_new;
            if (mode_out) *mode_out = x;
            return lambda;
        }
        lambda = lambda_new;
    }
    throw NumericalError("modal analysis: inverse iteration did not converge");
}

} // namespace detail

inline ModalResult smallest_mode(const Assembled& a, const Eigen::LLT<Eigen::MatrixXd>& llt) {
    if (!(a.mass_diag.maxCoeff() > 0.0))
        throw NumericalError("modal analysis: model has no mass");
    ModalResult r;
    r.lambda = detail::inverse_iteration(llt, a.mass_diag, nullptr, &r.phi);
    if (!(r.lambda > 0.0))
        throw NumericalError("modal analysis: non-positive smallest eigenvalue");
    r.frequency = std::sqrt(r.lambda) / (2.0 * M_PI);
    return r;
}

// Second-smallest eigenvalue via M-orthogonal deflation; used to detect
// (nearly) repeated fundamental modes before differentiating them.
inline double second_eigenvalue(const Assembled& a, const Eigen::LLT<Eigen::MatrixXd>& llt,
                                const Eigen::VectorXd& phi1) {
    return detail::inverse_iteration(llt, a.mass_diag, &phi1, nullptr);
}

} // namespace frameopt

#endif
