#ifndef FRAMEOPT_PROBLEM_HPP
#define FRAMEOPT_PROBLEM_HPP

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "frameopt/assembly.hpp"
#include "frameopt/design.hpp"
#include "frameopt/gsm.hpp"
#include "frameopt/responses.hpp"

// Optimization problem definition and a cached evaluator producing objective
// and constraint values for a candidate design.

namespace frameopt {

enum class ObjectiveKind { Mass, Compliance, StrainEnergy, Zero };

inline const char* objective_name(ObjectiveKind k) {
    switch (k) {
        case ObjectiveKind::Mass: return "mass";
        case ObjectiveKind::Compliance: return "compliance";
        case ObjectiveKind::StrainEnergy: return "strain_energy";
        case ObjectiveKind::Zero: return "zero";
    }
    return "?";
}

// All constraints are expressed dimensionless as g <= 0.
struct Constraint {
    enum class Kind {
        Stress,        // |sigma| / limit - 1, per element, per load case
        Displacement,  // |u| / limit - 1, per node dof, per load case
        MinFrequency,  // 1 - f1 / limit
        Outward        // -u * sign(ref) / |ref|, per node dof, per load case
    };
    Kind kind = Kind::Stress;
    int element = 0;    // element id (Stress)
    int node = 0;       // node id (Displacement, Outward)
    int axis = 0;       // 0..2 translation axis (Displacement, Outward)
    int load_case = 0;  // load case index (not used by MinFrequency)
    double limit = 0.0; // stress/displacement limit or minimum frequency
    double ref = 0.0;   // reference coordinate (Outward)

    std::string describe() const {
        switch (kind) {
            case Kind::Stress:
                return "stress e" + std::to_string(element) + " lc" + std::to_string(load_case);
            case Kind::Displacement:
                return "disp n" + std::to_string(node) + " axis" + std::to_string(axis) + " lc" +
                       std::to_string(load_case);
            case Kind::MinFrequency: return "min_frequency";
            case Kind::Outward:
                return "outward n" + std::to_string(node) + " axis" + std::to_string(axis) +
                       " lc" + std::to_string(load_case);
        }
        return "?";
    }
};

struct OptimizerConfig {
    double step_size = 1e-3;
    int max_iterations = 100;
    double penalty_factor = 1000.0;
    AnnealSchedule anneal;
    int bilevel_outer = 10;
    int bilevel_inner = 10;
    int samples = 1;
    double convergence_tol = 0.0;  // <= 0 disables early stopping
    bool jacobian_temperature_scaling = true;

    void validate() const {
        if (!(step_size > 0.0)) throw ConfigError("step_size must be positive");
        if (max_iterations < 1) throw ConfigError("max_iterations must be at least 1");
        if (penalty_factor < 0.0) throw ConfigError("penalty_factor must be non-negative");
        if (bilevel_outer < 1 || bilevel_inner < 1)
            throw ConfigError("bilevel loop counts must be at least 1");
        if (samples < 1) throw ConfigError("samples must be at least 1");
        anneal.check();
    }
};

struct Problem {
    std::string name;
    FrameModel model;
    DesignSpace space;
    ObjectiveKind objective = ObjectiveKind::Mass;
    std::vector<Constraint> constraints;
    OptimizerConfig opt;

    void validate() const {
        model.validate();
        space.validate(model);
        opt.validate();
        const int n_cases = static_cast<int>(model.load_cases.size());
        for (const Constraint& c : constraints) {
            if (c.kind != Constraint::Kind::MinFrequency) {
                if (c.load_case < 0 || c.load_case >= n_cases)
                    throw ConfigError("constraint references missing load case " +
                                      std::to_string(c.load_case));
            }
            switch (c.kind) {
                case Constraint::Kind::Stress:
                    model.element_index(c.element);
                    if (!(c.limit > 0.0)) throw ConfigError("stress limit must be positive");
                    break;
                case Constraint::Kind::Displacement:
                    model.node_index(c.node);
                    if (c.axis < 0 || c.axis > 2) throw ConfigError("displacement axis out of range");
                    if (!(c.limit > 0.0)) throw ConfigError("displacement limit must be positive");
                    break;
                case Constraint::Kind::MinFrequency:
                    if (!(c.limit > 0.0)) throw ConfigError("frequency limit must be positive");
                    break;
                case Constraint::Kind::Outward:
                    model.node_index(c.node);
                    if (c.axis < 0 || c.axis > 2) throw ConfigError("outward axis out of range");
                    break;
            }
        }
    }
};

struct EvalCounters {
    long fe_solves = 0;       // primal factorizations
    long modal_solves = 0;    // smallest-eigenpair extractions
    long adjoint_solves = 0;  // extra back-substitutions on a stored factor
};

// One full analysis of a candidate design.
struct Evaluation {
    Eigen::VectorXd x;                   // continuous values (absolute units)
    std::vector<Eigen::VectorXd> attrs;  // per categorical variable
    ModelState state;
    Assembled assembled;
    Solution sol;
    double objective = 0.0;
    Eigen::VectorXd g;  // one entry per constraint
    bool has_modal = false;
    ModalResult modal;
};

class Evaluator {
public:
    explicit Evaluator(const Problem& p) : p_(p), dofs_(build_dof_map(p.model)) {
        p_.validate();
        needs_modal_ = false;
        for (const Constraint& c : p_.constraints)
            if (c.kind == Constraint::Kind::MinFrequency) needs_modal_ = true;
    }

    const Problem& problem() const { return p_; }
    const DofMap& dofs() const { return dofs_; }
    bool needs_modal() const { return needs_modal_; }

    Evaluation evaluate(const Eigen::VectorXd& x, const std::vector<Eigen::VectorXd>& attrs,
                        EvalCounters& counters) const {
        Evaluation ev;
        ev.x = x;
        ev.attrs = attrs;
        ev.state = apply_design(p_.model, p_.space, x, attrs);
        ev.assembled = assemble(p_.model, ev.state, dofs_);
        ev.sol = solve(p_.model, dofs_, ev.assembled);
        ++counters.fe_solves;
        ev.objective = objective_value(ev);
        if (needs_modal_) {
            ev.modal = smallest_mode(ev.assembled, ev.sol.llt);
            ev.has_modal = true;
            ++counters.modal_solves;
        }
        ev.g.resize(static_cast<Eigen::Index>(p_.constraints.size()));
        for (std::size_t i = 0; i < p_.constraints.size(); ++i)
            ev.g(static_cast<Eigen::Index>(i)) = constraint_value(ev, p_.constraints[i]);
        return ev;
    }

    // Evaluate a fully discrete design given choice indices.
    Evaluation evaluate_choices(const Eigen::VectorXd& x, const std::vector<int>& choices,
                                EvalCounters& counters) const {
        return evaluate(x, choice_attrs(choices), counters);
    }

    std::vector<Eigen::VectorXd> choice_attrs(const std::vector<int>& choices) const {
        if (choices.size() != static_cast<std::size_t>(p_.space.n_categorical()))
            throw ConfigError("choice count does not match design space");
        std::vector<Eigen::VectorXd> attrs;
        attrs.reserve(choices.size());
        for (std::size_t m = 0; m < choices.size(); ++m) {
            const CategoricalVar& c = p_.space.categorical[m];
            if (choices[m] < 0 || choices[m] >= c.n_choices())
                throw ConfigError("choice index out of range for '" + c.name + "'");
            attrs.push_back(c.attr_values(choices[m]));
        }
        return attrs;
    }

    double objective_value(const Evaluation& ev) const {
        switch (p_.objective) {
            case ObjectiveKind::Mass: return ev.assembled.total_mass;
            case ObjectiveKind::Compliance: return compliance(ev.assembled, ev.sol);
            case ObjectiveKind::StrainEnergy: return strain_energy(ev.assembled, ev.sol);
            case ObjectiveKind::Zero: return 0.0;
        }
        return 0.0;
    }

    double constraint_value(const Evaluation& ev, const Constraint& c) const {
        switch (c.kind) {
            case Constraint::Kind::Stress: {
                const int ei = p_.model.element_index(c.element);
                const double s =
                    element_stress(ev.state, ev.assembled, ev.sol.u_full[c.load_case], ei);
                return s / c.limit - 1.0;
            }
            case Constraint::Kind::Displacement: {
                const double u = nodal_dof_value(ev, c);
                return std::abs(u) / c.limit - 1.0;
            }
            case Constraint::Kind::MinFrequency:
                return 1.0 - ev.modal.frequency / c.limit;
            case Constraint::Kind::Outward: {
                if (c.ref == 0.0) return 0.0;
                const double u = nodal_dof_value(ev, c);
                return -u * (c.ref > 0.0 ? 1.0 : -1.0) / std::abs(c.ref);
            }
        }
        return 0.0;
    }

    double nodal_dof_value(const Evaluation& ev, const Constraint& c) const {
        const int ni = p_.model.node_index(c.node);
        return ev.sol.u_full[c.load_case](6 * ni + c.axis);
    }

private:
    Problem p_;
    DofMap dofs_;
    bool needs_modal_ = false;
};

// max(0, g) squared, summed: the penalty aggregate used by the optimizers.
inline double penalty_aggregate(const Eigen::VectorXd& g) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        const double v = std::max(0.0, g(i));
        s += v * v;
    }
    return s;
}

inline double max_violation(const Eigen::VectorXd& g) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < g.size(); ++i) s = std::max(s, g(i));
    return s;
}

} // namespace frameopt

#endif
