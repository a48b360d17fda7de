#ifndef FRAMEOPT_ADJOINT_HPP
#define FRAMEOPT_ADJOINT_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "frameopt/problem.hpp"

// Gradients of the objective and every constraint with respect to the
// continuous variables and the categorical attribute values, via the adjoint
// method: one stiffness factorization (reused from the primal solve), one
// back-substitution per response function, and cheap element-local
// derivatives of K, M, f. Section properties enter the element matrices
// linearly and are differentiated analytically; geometric parameters (node
// coordinates, roll, length overrides) are differentiated by central
// differences on the affected elements only.

namespace frameopt {

struct Gradients {
    Eigen::VectorXd dj_dx;               // objective wrt continuous variables
    Eigen::MatrixXd dg_dx;               // constraints (rows) wrt continuous variables
    std::vector<Eigen::VectorXd> dj_da;  // per categorical var: objective wrt attribute values
    std::vector<Eigen::MatrixXd> dg_da;  // per categorical var: constraints wrt attribute values
};

namespace detail {

// Sparse element-level contribution keyed by packed dof (duplicates allowed).
using Entries = std::vector<std::pair<int, double>>;

inline double dot_full(const Entries& e, const Eigen::VectorXd& full) {
    double s = 0.0;
    for (const auto& [pk, v] : e) s += v * full(pk);
    return s;
}

inline double dot_free(const Entries& e, const Eigen::VectorXd& free_vec, const DofMap& d) {
    double s = 0.0;
    for (const auto& [pk, v] : e) {
        const int fi = d.index[pk];
        if (fi >= 0) s += v * free_vec(fi);
    }
    return s;
}

inline Mat12 pad_truss(const Mat6& k6) {
    Mat12 k = Mat12::Zero();
    k.block<3, 3>(0, 0) = k6.block<3, 3>(0, 0);
    k.block<3, 3>(0, 6) = k6.block<3, 3>(0, 3);
    k.block<3, 3>(6, 0) = k6.block<3, 3>(3, 0);
    k.block<3, 3>(6, 6) = k6.block<3, 3>(3, 3);
    return k;
}

// Element stiffness/mass/load view at an arbitrary model state, padded to the
// full 12-dof layout.
struct ElemSnapshot {
    bool is_beam = false;
    Mat12 k = Mat12::Zero();
    double mass = 0.0;
    TrussKernel tk;
    BeamKernel bk;
};

inline ElemSnapshot make_snapshot(const FrameModel& m, const ModelState& s, int ei) {
    ElemSnapshot out;
    const Element& e = m.elements[ei];
    const Eigen::Vector3d& pa = s.pos[m.node_index(e.node_a)];
    const Eigen::Vector3d& pb = s.pos[m.node_index(e.node_b)];
    const Material& mat = m.materials[e.material];
    if (e.kind == ElementKind::Truss) {
        out.tk = truss_kernel(pa, pb, s.elem[ei], mat);
        out.k = pad_truss(out.tk.k_global);
        out.mass = out.tk.mass;
    } else {
        out.is_beam = true;
        out.bk = beam_kernel(pa, pb, s.elem[ei], mat);
        out.k = out.bk.k_global;
        out.mass = out.bk.mass;
    }
    return out;
}

inline Vec12 elem_distributed(const ElemSnapshot& s, const Eigen::Vector3d& w) {
    if (s.is_beam) return beam_distributed_load(s.bk, w);
    Vec12 f = Vec12::Zero();
    const Eigen::Vector3d half = w * s.tk.length / 2.0;
    for (int node = 0; node < 2; ++node)
        for (int i = 0; i < 3; ++i) f(6 * node + i) = half(i);
    return f;
}

inline double elem_sigma(const ElemSnapshot& s, const ElementState& es, const Vec12& ue) {
    if (s.is_beam) return beam_stress(s.bk, es, ue);
    return std::abs(truss_stress_signed(s.tk, es, ue.segment<3>(0), ue.segment<3>(6)));
}

struct ParamAccum {
    std::vector<Entries> dku;  // per case: d(K u)/dp scattered over packed dofs
    std::vector<Entries> df;   // per case: d(f)/dp
    Entries dkphi;             // d(K phi)/dp (frequency constraints)
    double phi_dm_phi = 0.0;
    double dmass_total = 0.0;
    std::vector<double> dsigma;  // per constraint: explicit stress partial

    ParamAccum(int n_cases, int n_g) : dku(n_cases), df(n_cases), dsigma(n_g, 0.0) {}
    void reset() {
        for (Entries& e : dku) e.clear();
        for (Entries& e : df) e.clear();
        dkphi.clear();
        phi_dm_phi = 0.0;
        dmass_total = 0.0;
        std::fill(dsigma.begin(), dsigma.end(), 0.0);
    }
};

inline SectionAttr attr_of_target(BindTarget t) {
    switch (t) {
        case BindTarget::Area: return SectionAttr::Area;
        case BindTarget::Iyy: return SectionAttr::Iyy;
        case BindTarget::Izz: return SectionAttr::Izz;
        case BindTarget::Torsion: return SectionAttr::Torsion;
        default: throw ConfigError("target has no section attribute");
    }
}

} // namespace detail

inline Gradients compute_gradients(const Evaluator& eval, const Evaluation& ev,
                                   EvalCounters& counters) {
    using detail::Entries;
    const Problem& p = eval.problem();
    const FrameModel& model = p.model;
    const DofMap& d = eval.dofs();
    const Assembled& a = ev.assembled;
    const int n_cases = static_cast<int>(model.load_cases.size());
    const int n_g = static_cast<int>(p.constraints.size());
    const int n_x = p.space.n_continuous();
    const int n_cat = p.space.n_categorical();
    const int n_elems = static_cast<int>(model.elements.size());

    // Cost model: one adjoint back-substitution per response function on the
    // stored factor. Functions whose adjoint is available algebraically
    // (mass, compliance, strain energy reuse the primal solution) still count,
    // so the counter reflects the documented per-iteration cost 1 + n_g.
    counters.adjoint_solves += 1 + n_g;

    Gradients out;
    out.dj_dx = Eigen::VectorXd::Zero(n_x);
    out.dg_dx = Eigen::MatrixXd::Zero(n_g, n_x);
    out.dj_da.resize(n_cat);
    out.dg_da.resize(n_cat);
    for (int m = 0; m < n_cat; ++m) {
        const int na = static_cast<int>(p.space.categorical[m].attrs.size());
        out.dj_da[m] = Eigen::VectorXd::Zero(na);
        out.dg_da[m] = Eigen::MatrixXd::Zero(n_g, na);
    }

    // --- adjoint vectors -------------------------------------------------
    std::vector<Eigen::VectorXd> lam_obj(n_cases);
    switch (p.objective) {
        case ObjectiveKind::Compliance:
            for (int lc = 0; lc < n_cases; ++lc) lam_obj[lc] = ev.sol.u_free[lc];
            break;
        case ObjectiveKind::StrainEnergy: {
            Eigen::VectorXd corr_adj;
            if (d.any_prescribed) {
                corr_adj = ev.sol.llt.solve(a.corr);
            }
            for (int lc = 0; lc < n_cases; ++lc) {
                lam_obj[lc] = ev.sol.u_free[lc];
                if (corr_adj.size()) lam_obj[lc] += corr_adj;
            }
            break;
        }
        case ObjectiveKind::Mass:
        case ObjectiveKind::Zero: break;
    }

    std::vector<Eigen::VectorXd> lam_g(n_g);
    bool want_freq = false;
    for (int i = 0; i < n_g; ++i) {
        const Constraint& c = p.constraints[i];
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d.n_free);
        switch (c.kind) {
            case Constraint::Kind::MinFrequency: want_freq = true; continue;
            case Constraint::Kind::Stress: {
                const int ei = model.element_index(c.element);
                const ElementState& es = ev.state.elem[ei];
                const std::array<int, 12>& packed = a.packed[ei];
                const Eigen::VectorXd& u_full = ev.sol.u_full[c.load_case];
                if (const TrussKernel* tk = std::get_if<TrussKernel>(&a.kernels[ei])) {
                    const Eigen::Vector3d ua(u_full(packed[0]), u_full(packed[1]), u_full(packed[2]));
                    const Eigen::Vector3d ub(u_full(packed[6]), u_full(packed[7]), u_full(packed[8]));
                    const double sv = truss_stress_signed(*tk, es, ua, ub);
                    const double sgn = sv > 0.0 ? 1.0 : (sv < 0.0 ? -1.0 : 0.0);
                    const Eigen::Vector3d gdir = sgn * tk->ea_over_l / es.area * tk->dir / c.limit;
                    for (int i3 = 0; i3 < 3; ++i3) {
                        if (d.index[packed[i3]] >= 0) rhs(d.index[packed[i3]]) -= gdir(i3);
                        if (d.index[packed[6 + i3]] >= 0) rhs(d.index[packed[6 + i3]]) += gdir(i3);
                    }
                } else {
                    const BeamKernel& bk = std::get<BeamKernel>(a.kernels[ei]);
                    const Vec12 du = beam_stress_du(bk, es, gather_element_u(u_full, packed));
                    for (int k = 0; k < 12; ++k)
                        if (d.index[packed[k]] >= 0) rhs(d.index[packed[k]]) += du(k) / c.limit;
                }
                break;
            }
            case Constraint::Kind::Displacement: {
                const int dof = 6 * model.node_index(c.node) + c.axis;
                const int fi = d.index[dof];
                if (fi < 0) continue;
                const double u = ev.sol.u_full[c.load_case](dof);
                const double sgn = u > 0.0 ? 1.0 : (u < 0.0 ? -1.0 : 0.0);
                if (sgn == 0.0) continue;
                rhs(fi) = sgn / c.limit;
                break;
            }
            case Constraint::Kind::Outward: {
                if (c.ref == 0.0) continue;
                const int dof = 6 * model.node_index(c.node) + c.axis;
                const int fi = d.index[dof];
                if (fi < 0) continue;
                rhs(fi) = -(c.ref > 0.0 ? 1.0 : -1.0) / std::abs(c.ref);
                break;
            }
        }
        if (rhs.isZero(0.0)) continue;
        lam_g[i] = ev.sol.llt.solve(rhs);
    }

    // --- frequency mode preparation --------------------------------------
    double lambda1 = 0.0, f1 = 0.0;
    Eigen::VectorXd phi_full;
    if (want_freq) {
        if (!ev.has_modal)
            throw NumericalError("frequency gradient requested without a modal solve");
        lambda1 = ev.modal.lambda;
        f1 = ev.modal.frequency;
        const double lambda2 = second_eigenvalue(a, ev.sol.llt, ev.modal.phi);
        ++counters.modal_solves;
        if (lambda2 - lambda1 <= 1e-6 * std::abs(lambda1))
            throw NumericalError(
                "fundamental frequency is (nearly) repeated; its gradient is not well defined");
        phi_full = Eigen::VectorXd::Zero(6 * d.n_nodes);
        for (int fi = 0; fi < d.n_free; ++fi) phi_full(d.free_dofs[fi]) = ev.modal.phi(fi);
    }

    // --- cached per-element data ------------------------------------------
    std::vector<std::vector<int>> stress_cons_on_elem(n_elems);
    for (int i = 0; i < n_g; ++i)
        if (p.constraints[i].kind == Constraint::Kind::Stress)
            stress_cons_on_elem[model.element_index(p.constraints[i].element)].push_back(i);

    std::vector<std::vector<std::pair<int, Eigen::Vector3d>>> dist_on_elem(n_elems);
    std::vector<Eigen::Vector3d> gravity(n_cases);
    std::vector<bool> has_gravity(n_cases, false);
    for (int lc = 0; lc < n_cases; ++lc) {
        gravity[lc] = model.load_cases[lc].gravity;
        has_gravity[lc] = gravity[lc].squaredNorm() > 0.0;
        for (const DistributedLoad& dl : model.load_cases[lc].distributed)
            dist_on_elem[model.element_index(dl.element)].emplace_back(lc, dl.force_per_length);
    }

    std::vector<std::vector<int>> node_elems(model.nodes.size());
    for (int ei = 0; ei < n_elems; ++ei) {
        node_elems[model.node_index(model.elements[ei].node_a)].push_back(ei);
        node_elems[model.node_index(model.elements[ei].node_b)].push_back(ei);
    }

    std::vector<std::vector<Vec12>> ue(n_elems, std::vector<Vec12>(n_cases));
    std::vector<Vec12> phie(want_freq ? n_elems : 0);
    for (int ei = 0; ei < n_elems; ++ei) {
        for (int lc = 0; lc < n_cases; ++lc)
            ue[ei][lc] = gather_element_u(ev.sol.u_full[lc], a.packed[ei]);
        if (want_freq) phie[ei] = gather_element_u(phi_full, a.packed[ei]);
    }

    // --- per-element contribution builders --------------------------------
    detail::ParamAccum acc(n_cases, n_g);

    auto finish_elem = [&](int ei, const Mat12& dk, double dmass) {
        const std::array<int, 12>& packed = a.packed[ei];
        for (int lc = 0; lc < n_cases; ++lc) {
            const Vec12 due = dk * ue[ei][lc];
            for (int k = 0; k < 12; ++k)
                if (due(k) != 0.0) acc.dku[lc].emplace_back(packed[k], due(k));
            if (has_gravity[lc] && dmass != 0.0) {
                const Eigen::Vector3d half = gravity[lc] * dmass / 2.0;
                for (int node = 0; node < 2; ++node)
                    for (int i3 = 0; i3 < 3; ++i3)
                        acc.df[lc].emplace_back(packed[6 * node + i3], half(i3));
            }
        }
        if (want_freq) {
            const Vec12 dphi = dk * phie[ei];
            for (int k = 0; k < 12; ++k)
                if (dphi(k) != 0.0) acc.dkphi.emplace_back(packed[k], dphi(k));
            double t2 = 0.0;
            for (int node = 0; node < 2; ++node)
                for (int i3 = 0; i3 < 3; ++i3) {
                    const double v = phi_full(packed[6 * node + i3]);
                    t2 += v * v;
                }
            acc.phi_dm_phi += dmass / 2.0 * t2;
        }
        acc.dmass_total += dmass;
    };

    auto add_elem_analytic = [&](int ei, SectionAttr attr) {
        const Element& el = model.elements[ei];
        const ElementState& es = ev.state.elem[ei];
        if (el.kind == ElementKind::Truss) {
            if (attr != SectionAttr::Area) return;
            const TrussKernel& tk = std::get<TrussKernel>(a.kernels[ei]);
            finish_elem(ei, detail::pad_truss(tk.k_global) / es.area, tk.mass / es.area);
            return;
        }
        if (attr == SectionAttr::Cy || attr == SectionAttr::Cz) {
            // Only the stress recovery reads the fiber distances.
            const BeamKernel& bk = std::get<BeamKernel>(a.kernels[ei]);
            for (int ci : stress_cons_on_elem[ei]) {
                const Constraint& c = p.constraints[ci];
                const Vec12 f = bk.k_local * (bk.t * ue[ei][c.load_case]);
                const double s_a = std::abs(f(0)) / es.area + std::abs(f(4)) * es.cz / es.iyy +
                                   std::abs(f(5)) * es.cy / es.izz;
                const double s_b = std::abs(f(6)) / es.area + std::abs(f(10)) * es.cz / es.iyy +
                                   std::abs(f(11)) * es.cy / es.izz;
                const int end = s_a >= s_b ? 0 : 1;
                acc.dsigma[ci] += attr == SectionAttr::Cy
                                      ? std::abs(f(end == 0 ? 5 : 11)) / es.izz
                                      : std::abs(f(end == 0 ? 4 : 10)) / es.iyy;
            }
            return;
        }
        // Area/Iyy/Izz/Torsion enter the beam matrices linearly: the
        // derivative is the kernel built with that attribute alone set to 1.
        ElementState unit = es;
        unit.area = unit.iyy = unit.izz = unit.torsion = 0.0;
        set_element_attr(unit, attr, 1.0);
        const Eigen::Vector3d& pa = ev.state.pos[model.node_index(el.node_a)];
        const Eigen::Vector3d& pb = ev.state.pos[model.node_index(el.node_b)];
        const BeamKernel dbk = beam_kernel(pa, pb, unit, model.materials[el.material]);
        finish_elem(ei, dbk.k_global, dbk.mass);
        // Stress explicit partials vanish: end forces scale with the same
        // attribute that divides them in the recovery formula.
    };

    auto add_elems_fd = [&](const ContinuousVar& v, double p0, const std::vector<int>& elems) {
        const double h = 1e-6 * std::max(1.0, std::abs(p0));
        ModelState sp = ev.state, sm = ev.state;
        apply_continuous_var(model, sp, v, p0 + h);
        apply_continuous_var(model, sm, v, p0 - h);
        for (int ei : elems) {
            const detail::ElemSnapshot up = detail::make_snapshot(model, sp, ei);
            const detail::ElemSnapshot dn = detail::make_snapshot(model, sm, ei);
            const Mat12 dk = (up.k - dn.k) / (2.0 * h);
            const double dmass = (up.mass - dn.mass) / (2.0 * h);
            finish_elem(ei, dk, dmass);
            for (const auto& [lc, w] : dist_on_elem[ei]) {
                const Vec12 dfe =
                    (detail::elem_distributed(up, w) - detail::elem_distributed(dn, w)) / (2.0 * h);
                const std::array<int, 12>& packed = a.packed[ei];
                for (int k = 0; k < 12; ++k)
                    if (dfe(k) != 0.0) acc.df[lc].emplace_back(packed[k], dfe(k));
            }
            for (int ci : stress_cons_on_elem[ei]) {
                const Constraint& c = p.constraints[ci];
                const Vec12& u_e = ue[ei][c.load_case];
                acc.dsigma[ci] += (detail::elem_sigma(up, sp.elem[ei], u_e) -
                                   detail::elem_sigma(dn, sm.elem[ei], u_e)) /
                                  (2.0 * h);
            }
        }
    };

    // --- combine accumulators into one gradient column ---------------------
    auto combine = [&](double& dj_out, auto&& set_g) {
        double dj = 0.0;
        switch (p.objective) {
            case ObjectiveKind::Mass: dj = acc.dmass_total; break;
            case ObjectiveKind::StrainEnergy:
                for (int lc = 0; lc < n_cases; ++lc)
                    dj += 0.5 * detail::dot_full(acc.dku[lc], ev.sol.u_full[lc]);
                break;
            case ObjectiveKind::Compliance:
                for (int lc = 0; lc < n_cases; ++lc)
                    dj += detail::dot_free(acc.df[lc], ev.sol.u_free[lc], d);
                break;
            case ObjectiveKind::Zero: break;
        }
        for (int lc = 0; lc < n_cases; ++lc)
            if (lam_obj[lc].size())
                dj += detail::dot_free(acc.df[lc], lam_obj[lc], d) -
                      detail::dot_free(acc.dku[lc], lam_obj[lc], d);
        dj_out = dj;
        for (int i = 0; i < n_g; ++i) {
            const Constraint& c = p.constraints[i];
            double gi = 0.0;
            if (c.kind == Constraint::Kind::MinFrequency) {
                const double dlam =
                    detail::dot_full(acc.dkphi, phi_full) - lambda1 * acc.phi_dm_phi;
                const double df1 = dlam / (8.0 * M_PI * M_PI * f1);
                gi = -df1 / c.limit;
            } else {
                if (c.kind == Constraint::Kind::Stress) gi = acc.dsigma[i] / c.limit;
                if (lam_g[i].size())
                    gi += detail::dot_free(acc.df[c.load_case], lam_g[i], d) -
                          detail::dot_free(acc.dku[c.load_case], lam_g[i], d);
            }
            set_g(i, gi);
        }
    };

    // --- continuous variables ----------------------------------------------
    for (int i = 0; i < n_x; ++i) {
        acc.reset();
        const ContinuousVar& v = p.space.continuous[i];
        std::vector<int> elems;
        if (bind_target_is_nodal(v.target)) {
            elems = node_elems[model.node_index(v.node)];
        } else {
            elems.reserve(v.elements.size());
            for (int id : v.elements) elems.push_back(model.element_index(id));
        }
        if (v.target == BindTarget::Area || v.target == BindTarget::Iyy ||
            v.target == BindTarget::Izz || v.target == BindTarget::Torsion) {
            const SectionAttr attr = detail::attr_of_target(v.target);
            for (int ei : elems) add_elem_analytic(ei, attr);
        } else {
            add_elems_fd(v, ev.x(i), elems);
        }
        combine(out.dj_dx(i), [&](int gi, double val) { out.dg_dx(gi, i) = val; });
    }

    // --- categorical attribute values ---------------------------------------
    for (int m = 0; m < n_cat; ++m) {
        const CategoricalVar& cv = p.space.categorical[m];
        std::vector<int> elems;
        elems.reserve(cv.elements.size());
        for (int id : cv.elements) elems.push_back(model.element_index(id));
        for (std::size_t r = 0; r < cv.attrs.size(); ++r) {
            acc.reset();
            for (int ei : elems) add_elem_analytic(ei, cv.attrs[r]);
            combine(out.dj_da[m](static_cast<Eigen::Index>(r)),
                    [&](int gi, double val) { out.dg_da[m](gi, static_cast<Eigen::Index>(r)) = val; });
        }
    }

    return out;
}

// ---------------------------------------------------------------------------
// Finite-difference verification of the adjoint gradients.

struct FdRow {
    std::string function;  // "objective" or the constraint description
    std::string param;     // variable name or "var[attr]"
    bool wrt_continuous = false;
    double analytic = 0.0;
    double fd = 0.0;
    double rel_err = 0.0;
};

struct FdReport {
    std::vector<FdRow> rows;
    double max_rel = 0.0;
    double max_rel_x = 0.0;
    double max_rel_attr = 0.0;
};

// Continuous variables use h = step_rel * max(1, |x|). Attribute perturbations
// are relative to the attribute itself (areas and inertias span ~1e-10..30),
// with a larger default step: at 1e-6 relative the function difference for a
// tiny I_yy sits at the linear solver's roundoff floor, so the quadratic
// truncation/roundoff trade-off lands near 3e-4.
inline FdReport fd_check(const Evaluator& eval, const Eigen::VectorXd& x,
                         const std::vector<Eigen::VectorXd>& attrs, double step_rel = 1e-6,
                         double attr_step_rel = 3e-4) {
    const Problem& p = eval.problem();
    EvalCounters c;
    const Evaluation ev = eval.evaluate(x, attrs, c);
    const Gradients g = compute_gradients(eval, ev, c);
    const int n_g = static_cast<int>(p.constraints.size());

    auto values = [&](const Eigen::VectorXd& xx, const std::vector<Eigen::VectorXd>& aa) {
        const Evaluation e2 = eval.evaluate(xx, aa, c);
        Eigen::VectorXd v(1 + n_g);
        v(0) = e2.objective;
        v.tail(n_g) = e2.g;
        return v;
    };
    auto fname = [&](int fi) {
        return fi == 0 ? std::string("objective") : p.constraints[fi - 1].describe();
    };
    auto analytic_of = [&](int fi, double dj, const Eigen::VectorXd& dg_col) {
        return fi == 0 ? dj : dg_col(fi - 1);
    };

    FdReport rep;
    std::vector<int> row_fn;  // function index per row, for per-function scaling
    auto record = [&](const std::string& pname, const Eigen::VectorXd& fd_col, int fi,
                      double analytic, bool is_x) {
        FdRow row;
        row.function = fname(fi);
        row.param = pname;
        row.wrt_continuous = is_x;
        row.analytic = analytic;
        row.fd = fd_col(fi);
        row_fn.push_back(fi);
        rep.rows.push_back(std::move(row));
    };

    for (int i = 0; i < p.space.n_continuous(); ++i) {
        const double h = step_rel * std::max(1.0, std::abs(x(i)));
        Eigen::VectorXd xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        const Eigen::VectorXd fd_col = (values(xp, attrs) - values(xm, attrs)) / (2.0 * h);
        for (int fi = 0; fi <= n_g; ++fi)
            record(p.space.continuous[i].name, fd_col, fi, analytic_of(fi, g.dj_dx(i), g.dg_dx.col(i)),
                   true);
    }
    for (int m = 0; m < p.space.n_categorical(); ++m) {
        const CategoricalVar& cv = p.space.categorical[m];
        for (std::size_t r = 0; r < cv.attrs.size(); ++r) {
            const Eigen::Index ri = static_cast<Eigen::Index>(r);
            const double h = attr_step_rel * std::abs(attrs[m](ri));
            std::vector<Eigen::VectorXd> ap = attrs, am = attrs;
            ap[m](ri) += h;
            am[m](ri) -= h;
            const Eigen::VectorXd fd_col = (values(x, ap) - values(x, am)) / (2.0 * h);
            const std::string pname = cv.name + "[" + section_attr_name(cv.attrs[r]) + "]";
            for (int fi = 0; fi <= n_g; ++fi)
                record(pname, fd_col, fi, analytic_of(fi, g.dj_da[m](ri), g.dg_da[m].col(ri)), false);
        }
    }

    // Entries far below the gradient's own scale cannot be resolved by central
    // differences (fd noise ~ ulp(f)/h), so the error denominator is floored at
    // 1% of each function's largest gradient entry: dominant entries are
    // compared strictly, sub-percent entries in proportion to the row scale
    // (still loud for missing terms, sign flips, or wrong factors).
    Eigen::VectorXd fn_scale = Eigen::VectorXd::Zero(1 + n_g);
    for (std::size_t i = 0; i < rep.rows.size(); ++i)
        fn_scale(row_fn[i]) = std::max(fn_scale(row_fn[i]), std::abs(rep.rows[i].analytic));
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        FdRow& row = rep.rows[i];
        const double floor = 1e-2 * std::max(1.0, fn_scale(row_fn[i]));
        const double denom = std::max({std::abs(row.analytic), std::abs(row.fd), floor});
        row.rel_err = std::abs(row.analytic - row.fd) / denom;
        rep.max_rel = std::max(rep.max_rel, row.rel_err);
        (row.wrt_continuous ? rep.max_rel_x : rep.max_rel_attr) =
            std::max(row.wrt_continuous ? rep.max_rel_x : rep.max_rel_attr, row.rel_err);
    }
    return rep;
}

} // namespace frameopt

#endif
