#ifndef FRAMEOPT_OPTIMIZER_HPP
#define FRAMEOPT_OPTIMIZER_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "frameopt/adjoint.hpp"
#include "frameopt/rng.hpp"

// Gradient-based optimizers over the mixed design space. Categorical choices
// are relaxed with temperature-annealed softmax samples driven by Gumbel
// noise; each iteration evaluates the hard (straight-through) sample and
// chains the adjoint gradients through the relaxation back to the logits.
// Continuous variables are handled in a [0,1]-scaled space by projected
// gradient descent.

namespace frameopt {

// A design counts as feasible when no normalized constraint exceeds this.
constexpr double kFeasTol = 1e-6;

struct IterRow {
    int iteration = 0;
    double objective = 0.0;
    double penalized = 0.0;
    double max_violation = 0.0;
    double temperature = 0.0;
    std::string phase;  // "inner"/"outer" for the bilevel method, else empty
};

struct RunRecord {
    std::string method;
    std::uint64_t seed = 0;
    std::vector<IterRow> rows;

    Eigen::VectorXd final_x;  // absolute units
    std::vector<int> final_choices;
    std::vector<double> final_probs;  // softmax probability of each chosen class
    double final_objective = std::numeric_limits<double>::quiet_NaN();
    Eigen::VectorXd final_g;
    double final_penalized = std::numeric_limits<double>::quiet_NaN();
    double final_max_violation = std::numeric_limits<double>::quiet_NaN();
    bool feasible = false;

    EvalCounters counters;   // work done by the optimization loop
    long extra_solves = 0;   // final-design evaluation outside the loop
    bool aborted = false;
    std::string abort_reason;
};

namespace detail {

struct ScaledSpace {
    Eigen::VectorXd lo, span;

    static ScaledSpace of(const DesignSpace& s) {
        ScaledSpace sc;
        sc.lo = s.lower_bounds();
        sc.span = s.upper_bounds() - sc.lo;
        return sc;
    }
    Eigen::VectorXd to_abs(const Eigen::VectorXd& x01) const {
        return lo + span.cwiseProduct(x01);
    }
    Eigen::VectorXd to01(const Eigen::VectorXd& abs) const {
        return (abs - lo).cwiseQuotient(span);
    }
};

struct SampleGrad {
    std::vector<int> choices;
    double objective = 0.0;
    double penalized = 0.0;
    double max_violation = 0.0;
    Eigen::VectorXd gx01;                 // penalized gradient wrt scaled x
    std::vector<Eigen::VectorXd> gtheta;  // penalized gradient wrt logits
};

// Draw fresh Gumbel noise for every categorical variable, evaluate the hard
// sample, and assemble penalized gradients for both variable groups. With
// samples > 1 the extra draws refine only the sampling side: the hard design
// is the majority vote of the argmaxes and the logit gradient averages the
// per-sample relaxation Jacobians, still costing a single solve.
inline SampleGrad sample_and_grad(const Evaluator& eval, const ScaledSpace& sc,
                                  const Eigen::VectorXd& x01,
                                  const std::vector<Eigen::VectorXd>& theta, double tau, Rng& rng,
                                  EvalCounters& counters) {
    const Problem& p = eval.problem();
    const int n_cat = p.space.n_categorical();
    const OptimizerConfig& cfg = p.opt;
    const int n_samples = cfg.samples;

    std::vector<std::vector<Eigen::VectorXd>> soft(n_cat);
    std::vector<Eigen::VectorXd> attrs(n_cat);
    SampleGrad out;
    out.choices.resize(n_cat);
    for (int m = 0; m < n_cat; ++m) {
        const CategoricalVar& cv = p.space.categorical[m];
        std::vector<int> votes(cv.n_choices(), 0);
        soft[m].reserve(n_samples);
        for (int s = 0; s < n_samples; ++s) {
            const Eigen::VectorXd noises = sample_gumbel(cv.n_choices(), rng);
            soft[m].push_back(gsm_soft_sample(theta[m], noises, tau));
            ++votes[straight_through(soft[m].back()).index];
        }
        int pick = 0;
        for (int j = 1; j < cv.n_choices(); ++j)
            if (votes[j] > votes[pick]) pick = j;
        out.choices[m] = pick;
        attrs[m] = cv.attr_values(pick);
    }

    const Evaluation ev = eval.evaluate(sc.to_abs(x01), attrs, counters);
    const Gradients gr = compute_gradients(eval, ev, counters);

    out.objective = ev.objective;
    out.max_violation = max_violation(ev.g);
    out.penalized = ev.objective + cfg.penalty_factor * penalty_aggregate(ev.g);

    Eigen::VectorXd w(ev.g.size());  // d(penalty)/dg
    for (Eigen::Index i = 0; i < ev.g.size(); ++i)
        w(i) = 2.0 * cfg.penalty_factor * std::max(0.0, ev.g(i));

    const Eigen::VectorXd gx_abs = gr.dj_dx + gr.dg_dx.transpose() * w;
    out.gx01 = gx_abs.cwiseProduct(sc.span);

    out.gtheta.resize(n_cat);
    for (int m = 0; m < n_cat; ++m) {
        const CategoricalVar& cv = p.space.categorical[m];
        const Eigen::VectorXd ga = gr.dj_da[m] + gr.dg_da[m].transpose() * w;
        const Eigen::VectorXd gs = cv.choices.transpose() * ga;
        Eigen::VectorXd gt = Eigen::VectorXd::Zero(theta[m].size());
        for (const Eigen::VectorXd& s : soft[m]) {
            const Eigen::MatrixXd jac =
                soft_sample_jacobian(s, tau, cfg.jacobian_temperature_scaling);
            gt += jac.transpose() * gs;
        }
        out.gtheta[m] = gt / n_samples;
    }
    return out;
}

inline void clamp01(Eigen::VectorXd& x) {
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = std::min(1.0, std::max(0.0, x(i)));
}

// Evaluate the deterministic final design (logit argmax + current continuous
// values), fill the final_* fields, and close the convergence trace with a
// "final" row so the emitted CSV carries the reported result.
inline void finalize_record(const Evaluator& eval, const ScaledSpace& sc,
                            const Eigen::VectorXd& x01,
                            const std::vector<Eigen::VectorXd>& theta, RunRecord& rec) {
    const Problem& p = eval.problem();
    rec.final_x = sc.to_abs(x01);
    rec.final_choices.clear();
    rec.final_probs.clear();
    for (const Eigen::VectorXd& t : theta) {
        const int pick = argmax_lowest(t);
        rec.final_choices.push_back(pick);
        rec.final_probs.push_back(softmax(t)(pick));
    }
    EvalCounters fin;
    const Evaluation ev = eval.evaluate_choices(rec.final_x, rec.final_choices, fin);
    rec.extra_solves = fin.fe_solves + fin.modal_solves;
    rec.final_objective = ev.objective;
    rec.final_g = ev.g;
    rec.final_max_violation = max_violation(ev.g);
    rec.final_penalized = ev.objective + p.opt.penalty_factor * penalty_aggregate(ev.g);
    rec.feasible = rec.final_max_violation <= kFeasTol;
    const int it = rec.rows.empty() ? 0 : rec.rows.back().iteration + 1;
    const double tau =
        rec.rows.empty() ? p.opt.anneal.temperature(0) : rec.rows.back().temperature;
    rec.rows.push_back({it, rec.final_objective, rec.final_penalized, rec.final_max_violation,
                        tau, "final"});
}

} // namespace detail

// Single-loop method: every iteration draws fresh categorical samples,
// evaluates the hard design once, and simultaneously steps both the logits
// and the scaled continuous variables down the penalized gradient.
inline RunRecord gsmo_run(const Evaluator& eval, std::uint64_t seed) {
    const Problem& p = eval.problem();
    const OptimizerConfig& cfg = p.opt;
    RunRecord rec;
    rec.method = "gsmo";
    rec.seed = seed;
    Rng rng(seed);

    const detail::ScaledSpace sc = detail::ScaledSpace::of(p.space);
    Eigen::VectorXd x01 = sc.to01(p.space.initial_values());
    detail::clamp01(x01);
    std::vector<Eigen::VectorXd> theta;
    for (const CategoricalVar& cv : p.space.categorical)
        theta.push_back(Eigen::VectorXd::Zero(cv.n_choices()));

    try {
        double prev_pen = std::numeric_limits<double>::quiet_NaN();
        for (int k = 0; k < cfg.max_iterations; ++k) {
            const double tau = cfg.anneal.temperature(k);
            const detail::SampleGrad g =
                detail::sample_and_grad(eval, sc, x01, theta, tau, rng, rec.counters);
            rec.rows.push_back({k, g.objective, g.penalized, g.max_violation, tau, ""});
            if (cfg.convergence_tol > 0.0 && k > 0 &&
                std::abs(g.penalized - prev_pen) <=
                    cfg.convergence_tol * std::max(1.0, std::abs(g.penalized)))
                break;
            prev_pen = g.penalized;
            if (x01.size()) {
                x01 -= cfg.step_size * g.gx01;
                detail::clamp01(x01);
            }
            for (std::size_t m = 0; m < theta.size(); ++m)
                theta[m] -= cfg.step_size * g.gtheta[m];
        }
        detail::finalize_record(eval, sc, x01, theta, rec);
    } catch (const std::exception& e) {
        rec.aborted = true;
        rec.abort_reason = e.what();
    }
    return rec;
}

// Bilevel variant: a block of logit-only updates (inner loop), then a single
// continuous update per outer pass. The temperature anneals with the global
// evaluation count. Without categorical variables this reduces to projected
// gradient descent with one update per outer pass; without continuous
// variables it reproduces the single-loop method over outer*inner updates.
inline RunRecord bigsmo_run(const Evaluator& eval, std::uint64_t seed) {
    const Problem& p = eval.problem();
    const OptimizerConfig& cfg = p.opt;
    RunRecord rec;
    rec.method = "bigsmo";
    rec.seed = seed;
    Rng rng(seed);

    const detail::ScaledSpace sc = detail::ScaledSpace::of(p.space);
    Eigen::VectorXd x01 = sc.to01(p.space.initial_values());
    detail::clamp01(x01);
    std::vector<Eigen::VectorXd> theta;
    for (const CategoricalVar& cv : p.space.categorical)
        theta.push_back(Eigen::VectorXd::Zero(cv.n_choices()));

    const bool update_theta = !theta.empty();
    const bool update_x = x01.size() > 0;

    try {
        int evals = 0;
        for (int outer = 0; outer < cfg.bilevel_outer; ++outer) {
            if (update_theta) {
                for (int inner = 0; inner < cfg.bilevel_inner; ++inner) {
                    const double tau = cfg.anneal.temperature(evals);
                    const detail::SampleGrad g =
                        detail::sample_and_grad(eval, sc, x01, theta, tau, rng, rec.counters);
                    rec.rows.push_back(
                        {evals, g.objective, g.penalized, g.max_violation, tau, "inner"});
                    for (std::size_t m = 0; m < theta.size(); ++m)
                        theta[m] -= cfg.step_size * g.gtheta[m];
                    ++evals;
                }
            }
            if (update_x) {
                const double tau = cfg.anneal.temperature(evals);
                const detail::SampleGrad g =
                    detail::sample_and_grad(eval, sc, x01, theta, tau, rng, rec.counters);
                rec.rows.push_back({evals, g.objective, g.penalized, g.max_violation, tau, "outer"});
                x01 -= cfg.step_size * g.gx01;
                detail::clamp01(x01);
                ++evals;
            }
        }
        detail::finalize_record(eval, sc, x01, theta, rec);
    } catch (const std::exception& e) {
        rec.aborted = true;
        rec.abort_reason = e.what();
    }
    return rec;
}

} // namespace frameopt

#endif
