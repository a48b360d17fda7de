#ifndef FRAMEOPT_RUNNER_HPP
#define FRAMEOPT_RUNNER_HPP

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "frameopt/ga.hpp"
#include "frameopt/optimizer.hpp"
#include "frameopt/problem_io.hpp"

// Repeated seeded benchmark runs, their summary statistics, and the on-disk
// artifacts: summary.json (deterministic), timing.json (wall clock, kept out
// of the summary so identical runs produce identical summaries), one
// convergence CSV and one final-design JSON per run.

namespace frameopt {

enum class Method { Gsmo, Bigsmo, Ga };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::Gsmo: return "gsmo";
        case Method::Bigsmo: return "bigsmo";
        case Method::Ga: return "ga";
    }
    return "?";
}

inline Method parse_method(const std::string& s) {
    if (s == "gsmo") return Method::Gsmo;
    if (s == "bigsmo") return Method::Bigsmo;
    if (s == "ga") return Method::Ga;
    throw ConfigError("unknown method '" + s + "' (expected gsmo, bigsmo or ga)");
}

struct RunSummary {
    std::string problem;
    std::string method;
    int repeats = 0;
    std::uint64_t base_seed = 0;

    int completed = 0;  // runs that finished without aborting
    int aborted = 0;
    int feasible = 0;

    // Over completed runs; NaN when none completed.
    double best = std::numeric_limits<double>::quiet_NaN();
    double mean = std::numeric_limits<double>::quiet_NaN();
    double stddev = std::numeric_limits<double>::quiet_NaN();  // population form

    long fe_solves = 0;
    long modal_solves = 0;
    long adjoint_solves = 0;
    long extra_solves = 0;

    // Measured, not derived from the records; excluded from summary.json.
    double mean_wall_seconds = 0.0;
};

// Aggregate statistics are a pure function of the per-run records.
inline RunSummary summarize(const std::string& problem, Method method, std::uint64_t base_seed,
                            const std::vector<RunRecord>& records) {
    RunSummary s;
    s.problem = problem;
    s.method = method_name(method);
    s.repeats = static_cast<int>(records.size());
    s.base_seed = base_seed;

    double sum = 0.0, sumsq = 0.0;
    for (const RunRecord& r : records) {
        s.fe_solves += r.counters.fe_solves;
        s.modal_solves += r.counters.modal_solves;
        s.adjoint_solves += r.counters.adjoint_solves;
        s.extra_solves += r.extra_solves;
        if (r.aborted) {
            ++s.aborted;
            continue;
        }
        ++s.completed;
        if (r.feasible) ++s.feasible;
        const double v = r.final_objective;
        if (std::isnan(s.best) || v < s.best) s.best = v;
        sum += v;
        sumsq += v * v;
    }
    if (s.completed > 0) {
        s.mean = sum / s.completed;
        const double var = std::max(0.0, sumsq / s.completed - s.mean * s.mean);
        s.stddev = std::sqrt(var);
    }
    return s;
}

struct BenchResult {
    RunSummary summary;
    std::vector<RunRecord> records;
    std::vector<double> wall_seconds;  // per run
};

inline int worker_count(int repeats) {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FRAMEOPT_THREADS")) {
        try {
            n = std::stoi(env);
        } catch (const std::exception&) {
            throw ConfigError("FRAMEOPT_THREADS must be an integer");
        }
    }
    return std::max(1, std::min(n, repeats));
}

// R runs with seeds base_seed .. base_seed + R - 1, optionally spread over
// worker threads (each worker owns its Evaluator copy; runs are independent
// and seeded, so the thread count never changes the results).
inline BenchResult run_benchmark(const Problem& p, Method method, int repeats,
                                 std::uint64_t base_seed) {
    if (repeats < 1) throw ConfigError("repeats must be at least 1");
    BenchResult out;
    out.records.resize(static_cast<std::size_t>(repeats));
    out.wall_seconds.resize(static_cast<std::size_t>(repeats), 0.0);

    const int workers = worker_count(repeats);
    std::atomic<int> next{0};
    auto work = [&]() {
        const Evaluator eval(p);
        for (;;) {
            const int k = next.fetch_add(1);
            if (k >= repeats) break;
            const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(k);
            const auto t0 = std::chrono::steady_clock::now();
            RunRecord rec;
            switch (method) {
                case Method::Gsmo: rec = gsmo_run(eval, seed); break;
                case Method::Bigsmo: rec = bigsmo_run(eval, seed); break;
                case Method::Ga: rec = ga_run(eval, seed); break;
            }
            const auto t1 = std::chrono::steady_clock::now();
            out.wall_seconds[static_cast<std::size_t>(k)] =
                std::chrono::duration<double>(t1 - t0).count();
            out.records[static_cast<std::size_t>(k)] = std::move(rec);
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int i = 0; i < workers; ++i) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }

    out.summary = summarize(p.name, method, base_seed, out.records);
    double wall = 0.0;
    for (double w : out.wall_seconds) wall += w;
    out.summary.mean_wall_seconds = wall / repeats;
    return out;
}

inline nlohmann::ordered_json summary_to_json(const RunSummary& s,
                                              const std::vector<RunRecord>& records) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["problem"] = s.problem;
    j["method"] = s.method;
    j["repeats"] = s.repeats;
    j["base_seed"] = s.base_seed;
    j["completed"] = s.completed;
    j["aborted"] = s.aborted;
    j["feasible"] = s.feasible;
    if (s.completed > 0) {
        j["best"] = s.best;
        j["mean"] = s.mean;
        j["std"] = s.stddev;
    }
    j["fe_solves"] = s.fe_solves;
    j["modal_solves"] = s.modal_solves;
    j["adjoint_solves"] = s.adjoint_solves;
    j["extra_solves"] = s.extra_solves;
    nlohmann::ordered_json runs = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < records.size(); ++k) {
        const RunRecord& r = records[k];
        nlohmann::ordered_json jr;
        jr["run"] = k;
        jr["seed"] = r.seed;
        jr["iterations"] = r.rows.size();
        jr["aborted"] = r.aborted;
        if (r.aborted) {
            jr["abort_reason"] = r.abort_reason;
        } else {
            jr["objective"] = r.final_objective;
            jr["penalized"] = r.final_penalized;
            jr["max_violation"] = r.final_max_violation;
            jr["feasible"] = r.feasible;
        }
        jr["fe_solves"] = r.counters.fe_solves;
        jr["modal_solves"] = r.counters.modal_solves;
        jr["adjoint_solves"] = r.counters.adjoint_solves;
        jr["extra_solves"] = r.extra_solves;
        runs.push_back(std::move(jr));
    }
    j["runs"] = std::move(runs);
    return j;
}

namespace runner_detail {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace runner_detail

inline std::string trace_csv(const RunRecord& rec) {
    std::string out = "iteration,objective,penalized,max_violation,temperature\n";
    for (const IterRow& row : rec.rows) {
        out += std::to_string(row.iteration);
        out += ',';
        out += runner_detail::fmt(row.objective);
        out += ',';
        out += runner_detail::fmt(row.penalized);
        out += ',';
        out += runner_detail::fmt(row.max_violation);
        out += ',';
        out += runner_detail::fmt(row.temperature);
        out += '\n';
    }
    return out;
}

inline nlohmann::ordered_json design_to_json(const Problem& p, const RunRecord& rec) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["problem"] = p.name;
    j["method"] = rec.method;
    j["seed"] = rec.seed;
    j["aborted"] = rec.aborted;
    if (rec.aborted) {
        j["abort_reason"] = rec.abort_reason;
        return j;
    }
    j["objective"] = rec.final_objective;
    j["penalized"] = rec.final_penalized;
    j["max_violation"] = rec.final_max_violation;
    j["feasible"] = rec.feasible;
    nlohmann::ordered_json choices = nlohmann::ordered_json::array();
    for (std::size_t m = 0; m < rec.final_choices.size(); ++m) {
        const CategoricalVar& cv = p.space.categorical[m];
        nlohmann::ordered_json jc;
        jc["variable"] = cv.name;
        const int pick = rec.final_choices[m];
        jc["choice"] = pick;
        if (!cv.labels.empty()) jc["label"] = cv.labels[static_cast<std::size_t>(pick)];
        if (m < rec.final_probs.size()) jc["probability"] = rec.final_probs[m];
        choices.push_back(std::move(jc));
    }
    j["choices"] = std::move(choices);
    nlohmann::ordered_json xs = nlohmann::ordered_json::array();
    for (int i = 0; i < p.space.n_continuous(); ++i) {
        nlohmann::ordered_json jx;
        jx["variable"] = p.space.continuous[static_cast<std::size_t>(i)].name;
        jx["value"] = rec.final_x(i);
        xs.push_back(std::move(jx));
    }
    j["x"] = std::move(xs);
    return j;
}

// Structural check of a design document against its problem: every variable
// present once, in design-space order, choices within range, probabilities
// valid, continuous values within bounds.
inline void validate_design_json(const Problem& p, const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("design document: root must be an object");
    if (!j.contains("schema_version") || j["schema_version"].get<int>() != kSchemaVersion)
        throw ConfigError("design document: missing or unsupported schema_version");
    if (j.value("aborted", false)) return;  // nothing further to check
    for (const char* key : {"objective", "choices", "x"})
        if (!j.contains(key))
            throw ConfigError(std::string("design document: missing '") + key + "'");
    const auto& choices = j["choices"];
    if (!choices.is_array() || choices.size() != p.space.categorical.size())
        throw ConfigError("design document: wrong number of categorical choices");
    for (std::size_t m = 0; m < choices.size(); ++m) {
        const CategoricalVar& cv = p.space.categorical[m];
        const auto& jc = choices[m];
        if (jc.value("variable", std::string()) != cv.name)
            throw ConfigError("design document: choice " + std::to_string(m) +
                              " does not match variable '" + cv.name + "'");
        const int pick = jc.value("choice", -1);
        if (pick < 0 || pick >= cv.n_choices())
            throw ConfigError("design document: choice for '" + cv.name + "' out of range");
        if (jc.contains("probability")) {
            const double pr = jc["probability"].get<double>();
            if (!(pr >= 0.0 && pr <= 1.0))
                throw ConfigError("design document: probability for '" + cv.name +
                                  "' outside [0,1]");
        }
    }
    const auto& xs = j["x"];
    if (!xs.is_array() || xs.size() != p.space.continuous.size())
        throw ConfigError("design document: wrong number of continuous values");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const ContinuousVar& v = p.space.continuous[i];
        const auto& jx = xs[i];
        if (jx.value("variable", std::string()) != v.name)
            throw ConfigError("design document: entry " + std::to_string(i) +
                              " does not match variable '" + v.name + "'");
        const double val = jx.value("value", std::numeric_limits<double>::quiet_NaN());
        const double slack = 1e-9 * std::max(1.0, std::abs(v.upper) + std::abs(v.lower));
        if (!(val >= v.lower - slack && val <= v.upper + slack))
            throw ConfigError("design document: value for '" + v.name + "' outside bounds");
    }
}

namespace runner_detail {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

} // namespace runner_detail

// summary.json + timing.json + run_<k>.csv + design_<k>.json under out_dir.
inline void emit_outputs(const Problem& p, const BenchResult& res, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());
    const fs::path dir(out_dir);

    runner_detail::write_file(dir / "summary.json",
                              summary_to_json(res.summary, res.records).dump(2) + "\n");

    nlohmann::ordered_json timing;
    timing["mean_wall_seconds"] = res.summary.mean_wall_seconds;
    timing["wall_seconds"] = res.wall_seconds;
    runner_detail::write_file(dir / "timing.json", timing.dump(2) + "\n");

    for (std::size_t k = 0; k < res.records.size(); ++k) {
        runner_detail::write_file(dir / ("run_" + std::to_string(k) + ".csv"),
                                  trace_csv(res.records[k]));
        runner_detail::write_file(dir / ("design_" + std::to_string(k) + ".json"),
                                  design_to_json(p, res.records[k]).dump(2) + "\n");
    }
}

} // namespace frameopt

#endif
