#ifndef FRAMEOPT_GA_HPP
#define FRAMEOPT_GA_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "frameopt/optimizer.hpp"

// Elitist genetic algorithm baseline over the same mixed design space and the
// same penalized objective as the gradient methods. Continuous genes live in
// [0,1]; categorical genes are choice indices.

namespace frameopt {

struct GaConfig {
    int population = 0;  // 0: 10x the number of design variables
    int generations = 0; // 0: the optimizer iteration budget
    double crossover_rate = 0.9;
    double gene_swap_prob = 0.5;
    double mutation_rate = 0.1;
    double mutation_sigma = 0.1;  // continuous genes, in scaled units
    int elite = 1;
    int tournament = 2;
};

namespace detail {

struct GaIndividual {
    Eigen::VectorXd x01;
    std::vector<int> choices;
    double objective = std::numeric_limits<double>::quiet_NaN();
    double penalized = std::numeric_limits<double>::infinity();
    double max_violation = std::numeric_limits<double>::infinity();
    bool valid = false;
};

} // namespace detail

inline RunRecord ga_run(const Evaluator& eval, std::uint64_t seed, GaConfig ga = {}) {
    const Problem& p = eval.problem();
    const OptimizerConfig& cfg = p.opt;
    const int n_x = p.space.n_continuous();
    const int n_cat = p.space.n_categorical();
    const int n_vars = n_x + n_cat;
    if (n_vars == 0) throw ConfigError("genetic algorithm needs at least one design variable");
    const int pop_size = ga.population > 0 ? ga.population : 10 * n_vars;
    const int generations = ga.generations > 0 ? ga.generations : cfg.max_iterations;

    RunRecord rec;
    rec.method = "ga";
    rec.seed = seed;
    Rng rng(seed);
    const detail::ScaledSpace sc = detail::ScaledSpace::of(p.space);

    auto random_individual = [&]() {
        detail::GaIndividual ind;
        ind.x01.resize(n_x);
        for (int i = 0; i < n_x; ++i) ind.x01(i) = rng.uniform01();
        ind.choices.resize(n_cat);
        for (int m = 0; m < n_cat; ++m)
            ind.choices[m] = rng.uniform_int(p.space.categorical[m].n_choices());
        return ind;
    };

    auto fitness = [&](detail::GaIndividual& ind) {
        try {
            const Evaluation ev = eval.evaluate_choices(sc.to_abs(ind.x01), ind.choices, rec.counters);
            ind.objective = ev.objective;
            ind.max_violation = max_violation(ev.g);
            ind.penalized = ev.objective + cfg.penalty_factor * penalty_aggregate(ev.g);
            ind.valid = true;
        } catch (const Error&) {
            // Unsolvable candidate: keep it maximally unfit but do not stop.
            ind.objective = std::numeric_limits<double>::quiet_NaN();
            ind.max_violation = std::numeric_limits<double>::infinity();
            ind.penalized = std::numeric_limits<double>::infinity();
            ind.valid = false;
        }
    };

    std::vector<detail::GaIndividual> pop(pop_size);
    for (detail::GaIndividual& ind : pop) ind = random_individual();

    auto better = [](const detail::GaIndividual& a, const detail::GaIndividual& b) {
        return a.penalized < b.penalized;
    };
    auto tournament = [&]() -> const detail::GaIndividual& {
        const detail::GaIndividual* best = &pop[rng.uniform_int(pop_size)];
        for (int t = 1; t < ga.tournament; ++t) {
            const detail::GaIndividual* cand = &pop[rng.uniform_int(pop_size)];
            if (better(*cand, *best)) best = cand;
        }
        return *best;
    };

    detail::GaIndividual best_ever;
    detail::GaIndividual best_feasible;  // reported design: lowest objective with g <= 0
    try {
        for (int gen = 0; gen < generations; ++gen) {
            for (detail::GaIndividual& ind : pop) {
                fitness(ind);
                if (ind.valid && ind.max_violation <= kFeasTol &&
                    !(best_feasible.valid && best_feasible.objective <= ind.objective))
                    best_feasible = ind;
            }
            int best_idx = 0;
            for (int i = 1; i < pop_size; ++i)
                if (better(pop[i], pop[best_idx])) best_idx = i;
            if (better(pop[best_idx], best_ever)) best_ever = pop[best_idx];
            rec.rows.push_back({gen, best_ever.objective, best_ever.penalized,
                                best_ever.max_violation, 0.0, ""});

            if (gen + 1 == generations) break;
            std::vector<detail::GaIndividual> next;
            next.reserve(pop_size);
            for (int e = 0; e < std::min(ga.elite, pop_size); ++e) next.push_back(pop[best_idx]);
            while (static_cast<int>(next.size()) < pop_size) {
                const detail::GaIndividual& pa = tournament();
                const detail::GaIndividual& pb = tournament();
                detail::GaIndividual child = pa;
                if (rng.uniform01() < ga.crossover_rate) {
                    for (int i = 0; i < n_x; ++i)
                        if (rng.uniform01() < ga.gene_swap_prob) child.x01(i) = pb.x01(i);
                    for (int m = 0; m < n_cat; ++m)
                        if (rng.uniform01() < ga.gene_swap_prob) child.choices[m] = pb.choices[m];
                }
                for (int i = 0; i < n_x; ++i)
                    if (rng.uniform01() < ga.mutation_rate) {
                        child.x01(i) =
                            std::min(1.0, std::max(0.0, child.x01(i) + ga.mutation_sigma * rng.normal()));
                    }
                for (int m = 0; m < n_cat; ++m)
                    if (rng.uniform01() < ga.mutation_rate)
                        child.choices[m] = rng.uniform_int(p.space.categorical[m].n_choices());
                child.valid = false;
                child.penalized = std::numeric_limits<double>::infinity();
                next.push_back(std::move(child));
            }
            pop = std::move(next);
        }

        if (!best_ever.valid) {
            rec.aborted = true;
            rec.abort_reason = "no candidate evaluated successfully";
            return rec;
        }
        // A feasible design is the usable answer whenever one was found, even if
        // a slightly violating individual scores a lower penalized fitness.
        const detail::GaIndividual& reported = best_feasible.valid ? best_feasible : best_ever;
        rec.final_x = sc.to_abs(reported.x01);
        rec.final_choices = reported.choices;
        EvalCounters fin;
        const Evaluation ev = eval.evaluate_choices(rec.final_x, rec.final_choices, fin);
        rec.extra_solves = fin.fe_solves + fin.modal_solves;
        rec.final_objective = ev.objective;
        rec.final_g = ev.g;
        rec.final_max_violation = max_violation(ev.g);
        rec.final_penalized = ev.objective + cfg.penalty_factor * penalty_aggregate(ev.g);
        rec.feasible = rec.final_max_violation <= kFeasTol;
        const int it = rec.rows.empty() ? 0 : rec.rows.back().iteration + 1;
        rec.rows.push_back({it, rec.final_objective, rec.final_penalized,
                            rec.final_max_violation, 0.0, "final"});
    } catch (const std::exception& e) {
        rec.aborted = true;
        rec.abort_reason = e.what();
    }
    return rec;
}

} // namespace frameopt

#endif
