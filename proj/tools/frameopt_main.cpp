// frameopt: gradient-based sizing/shape optimization of truss and frame
// structures with mixed categorical-continuous design variables.
//
//   frameopt run      --problem P --method M --repeats R --seed S --out DIR
//   frameopt validate --problem P
//   frameopt fdcheck  --problem P --seed S
//
// P is either a JSON problem file or a builtin specifier:
//   builtin:truss72 | builtin:lattice:X,Y,Z | builtin:bridge:P

#include <cinttypes>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "frameopt/builtins.hpp"
#include "frameopt/problem_io.hpp"
#include "frameopt/runner.hpp"

namespace {

frameopt::Problem resolve_problem(const std::string& spec) {
    if (frameopt::is_builtin_spec(spec)) return frameopt::make_builtin(spec);
    return frameopt::load_problem(spec);
}

struct RunOptions {
    std::string problem;
    std::string method = "gsmo";
    int repeats = 10;
    std::uint64_t seed = 1;
    std::string out_dir;

    int max_iters = 0;
    double step = 0.0, penalty = 0.0, temp0 = 0.0, decay = 0.0, tmin = 0.0;
    std::pair<int, int> bilevel{0, 0};
    int samples = 0;
};

int cmd_run(const RunOptions& opt, const CLI::App& cmd) {
    frameopt::Problem p = resolve_problem(opt.problem);
    if (cmd.count("--max-iters")) p.opt.max_iterations = opt.max_iters;
    if (cmd.count("--step")) p.opt.step_size = opt.step;
    if (cmd.count("--penalty")) p.opt.penalty_factor = opt.penalty;
    if (cmd.count("--temp0")) p.opt.anneal.initial_temp = opt.temp0;
    if (cmd.count("--decay")) p.opt.anneal.decay = opt.decay;
    if (cmd.count("--tmin")) p.opt.anneal.min_temp = opt.tmin;
    if (cmd.count("--bilevel")) {
        p.opt.bilevel_outer = opt.bilevel.first;
        p.opt.bilevel_inner = opt.bilevel.second;
    }
    if (cmd.count("--samples")) p.opt.samples = opt.samples;
    p.opt.validate();

    const frameopt::Method method = frameopt::parse_method(opt.method);
    const frameopt::BenchResult res =
        frameopt::run_benchmark(p, method, opt.repeats, opt.seed);
    frameopt::emit_outputs(p, res, opt.out_dir);

    const frameopt::RunSummary& s = res.summary;
    std::printf("problem   %s\n", s.problem.c_str());
    std::printf("method    %s\n", s.method.c_str());
    std::printf("runs      %d completed, %d aborted, %d feasible (seeds %" PRIu64 "..%" PRIu64
                ")\n",
                s.completed, s.aborted, s.feasible, s.base_seed,
                s.base_seed + static_cast<std::uint64_t>(s.repeats) - 1);
    if (s.completed > 0)
        std::printf("objective best %.6g  mean %.6g  std %.6g\n", s.best, s.mean, s.stddev);
    std::printf("solves    fe %ld  modal %ld  adjoint %ld  extra %ld\n", s.fe_solves,
                s.modal_solves, s.adjoint_solves, s.extra_solves);
    std::printf("wall      %.3f s mean per run\n", s.mean_wall_seconds);
    std::printf("output    %s\n", opt.out_dir.c_str());
    for (std::size_t k = 0; k < res.records.size(); ++k)
        if (res.records[k].aborted)
            std::fprintf(stderr, "run %zu aborted: %s\n", k, res.records[k].abort_reason.c_str());
    return s.aborted > 0 ? 1 : 0;
}

int cmd_validate(const std::string& spec) {
    const frameopt::Problem p = resolve_problem(spec);
    // Well-posedness beyond the schema: assemble and solve once at the
    // initial design so mechanisms and singular models are rejected here.
    const frameopt::Evaluator eval(p);
    frameopt::EvalCounters c;
    const std::vector<int> zeros(static_cast<std::size_t>(p.space.n_categorical()), 0);
    eval.evaluate_choices(p.space.initial_values(), zeros, c);
    std::printf("OK %s: %zu nodes, %zu elements, %zu load cases, %d continuous + %d categorical "
                "variables, %zu constraints\n",
                p.name.c_str(), p.model.nodes.size(), p.model.elements.size(),
                p.model.load_cases.size(), p.space.n_continuous(), p.space.n_categorical(),
                p.constraints.size());
    return 0;
}

int cmd_fdcheck(const std::string& spec, std::uint64_t seed, double tol) {
    const frameopt::Problem p = resolve_problem(spec);
    const frameopt::Evaluator eval(p);
    frameopt::Rng rng(seed);

    Eigen::VectorXd x(p.space.n_continuous());
    for (int i = 0; i < x.size(); ++i) {
        const frameopt::ContinuousVar& v = p.space.continuous[static_cast<std::size_t>(i)];
        x(i) = v.lower + (v.upper - v.lower) * rng.uniform01();
    }
    std::vector<Eigen::VectorXd> attrs;
    for (const frameopt::CategoricalVar& cv : p.space.categorical) {
        Eigen::VectorXd theta(cv.n_choices());
        for (int j = 0; j < theta.size(); ++j) theta(j) = rng.normal();
        const Eigen::VectorXd noise = frameopt::sample_gumbel(cv.n_choices(), rng);
        attrs.push_back(cv.blend(frameopt::gsm_soft_sample(theta, noise, 1.0)));
    }

    const frameopt::FdReport rep = frameopt::fd_check(eval, x, attrs);
    const frameopt::FdRow* worst = nullptr;
    for (const frameopt::FdRow& row : rep.rows)
        if (!worst || row.rel_err > worst->rel_err) worst = &row;
    std::printf("checked %zu (function, parameter) pairs\n", rep.rows.size());
    std::printf("max rel err %.3e (continuous %.3e, attributes %.3e)\n", rep.max_rel,
                rep.max_rel_x, rep.max_rel_attr);
    if (worst)
        std::printf("worst: d(%s)/d(%s): adjoint %.9e vs fd %.9e\n", worst->function.c_str(),
                    worst->param.c_str(), worst->analytic, worst->fd);
    const bool ok = rep.max_rel < tol;
    std::printf("%s (tolerance %.1e)\n", ok ? "PASS" : "FAIL", tol);
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gradient-based structural optimization over mixed categorical-continuous "
                 "design spaces"};
    app.require_subcommand(1);

    RunOptions ropt;
    CLI::App* run = app.add_subcommand("run", "Optimize with repeated seeded runs");
    run->add_option("--problem", ropt.problem, "Problem JSON file or builtin:<name>")->required();
    run->add_option("--method", ropt.method, "gsmo | bigsmo | ga")->required();
    run->add_option("--repeats", ropt.repeats, "Number of independent runs");
    run->add_option("--seed", ropt.seed, "Base seed; run k uses seed + k");
    run->add_option("--out", ropt.out_dir, "Output directory")->required();
    run->add_option("--max-iters", ropt.max_iters, "Iteration / generation budget");
    run->add_option("--step", ropt.step, "Gradient step size");
    run->add_option("--penalty", ropt.penalty, "Constraint penalty factor");
    run->add_option("--temp0", ropt.temp0, "Initial softmax temperature");
    run->add_option("--decay", ropt.decay, "Temperature decay per iteration");
    run->add_option("--tmin", ropt.tmin, "Temperature floor");
    run->add_option("--bilevel", ropt.bilevel, "OUTER,INNER loop counts")->delimiter(',');
    run->add_option("--samples", ropt.samples, "Gumbel samples per iteration");

    std::string vproblem;
    CLI::App* validate = app.add_subcommand("validate", "Schema + well-posedness check");
    validate->add_option("--problem", vproblem, "Problem JSON file or builtin:<name>")
        ->required();

    std::string fproblem;
    std::uint64_t fseed = 1;
    double ftol = 1e-5;
    CLI::App* fdcheck =
        app.add_subcommand("fdcheck", "Audit adjoint gradients against finite differences");
    fdcheck->add_option("--problem", fproblem, "Problem JSON file or builtin:<name>")->required();
    fdcheck->add_option("--seed", fseed, "Seed for the sampled audit point");
    fdcheck->add_option("--tol", ftol, "Maximum acceptable relative error");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(ropt, *run);
        if (validate->parsed()) return cmd_validate(vproblem);
        if (fdcheck->parsed()) return cmd_fdcheck(fproblem, fseed, ftol);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
