// grrm: command-line front end for single solves and the tic-tac-toe and
// CSV experiments.

#include "grrm/classify.hpp"
#include "grrm/harness/config.hpp"
#include "grrm/harness/experiments.hpp"
#include "grrm/harness/io.hpp"
#include "grrm/solver.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace grrm;
using namespace grrm::harness;

namespace {

struct CommonFlags {
    std::string config;
    std::string lambda;
    std::string norm;
    std::int64_t seed = -1;
    std::int64_t reps = -1;
    std::int64_t threads = -1;
    std::string out = "results";
};

void add_common(CLI::App* app, CommonFlags& f, bool experiment) {
    app->add_option("--config", f.config, "JSON config file")->required()->check(CLI::ExistingFile);
    app->add_option("--lambda", f.lambda, "lambda value or comma-separated grid");
    app->add_option("--norm", f.norm, "max-abs, sum-abs or euclidean")
        ->check(CLI::IsMember({"max-abs", "sum-abs", "euclidean"}));
    app->add_option("--out", f.out, "output directory");
    if (experiment) {
        app->add_option("--seed", f.seed, "first seed; seeds run seed, seed+1, ...");
        app->add_option("--reps", f.reps, "number of repetitions")->check(CLI::PositiveNumber);
        app->add_option("--threads", f.threads, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    }
}

Overrides overrides(const CommonFlags& f) {
    Overrides o;
    if (!f.lambda.empty()) o.lambdas = parse_lambda_grid(f.lambda);
    if (!f.norm.empty()) o.norm = parse_norm(f.norm);
    if (f.seed >= 0) o.seed = static_cast<std::uint64_t>(f.seed);
    if (f.reps > 0) o.reps = static_cast<std::size_t>(f.reps);
    if (f.threads >= 0) o.threads = static_cast<std::size_t>(f.threads);
    return o;
}

void write_distribution(const Distribution& d, const fs::path& path) {
    Table t{{"element", "mass"}, {}};
    for (std::size_t i = 0; i < d.size(); ++i) t.rows.push_back({"\"" + d.space().element(i) + "\"", format_number(d[i])});
    std::ofstream out(path, std::ios::binary);
    out << t.columns[0] << ',' << t.columns[1] << '\n';
    for (const auto& r : t.rows) out << r[0] << ',' << r[1] << '\n';
}

int run_solve(const CommonFlags& f, const std::string& lp_path) {
    const auto j = load_json(f.config);
    const auto problem = problem_from_json(j, fs::path(f.config).parent_path(), overrides(f));
    if (!lp_path.empty()) {
        const auto a = assemble_program(problem);
        std::ofstream lp(lp_path, std::ios::binary);
        write_lp(a.program, a.variable_names, lp);
        std::cout << "wrote " << lp_path << '\n';
    }
    const auto sol = solve(problem);
    std::cout << "status: " << status_name(sol.status) << '\n';
    for (const auto& w : sol.warnings) std::cout << "warning: " << w << '\n';
    if (!sol.q_star) return 2;
    std::cout << "objective: " << format_number(sol.objective) << '\n'
              << "entropy: " << format_number(sol.entropy) << '\n'
              << "feasibility residual: " << format_number(sol.feasibility_residual) << '\n';
    for (std::size_t i = 0; i < sol.discrepancy_terms.size(); ++i)
        std::cout << "discrepancy[" << i << "] (" << problem.scheme.triples()[i].kind
                  << "): " << format_number(sol.discrepancy_terms[i]) << '\n';
    const fs::path out(f.out);
    fs::create_directories(out);
    write_distribution(*sol.q_star, out / "q_star.csv");
    for (std::size_t i = 0; i < sol.witnesses.size(); ++i)
        write_distribution(sol.witnesses[i], out / ("witness_" + std::to_string(i) + ".csv"));
    const auto rule = posterior_rule(*sol.q_star, problem.scheme.loss());
    Table decisions{{"feature", "label"}, {}};
    for (std::size_t x = 0; x < rule.features.size(); ++x)
        decisions.rows.push_back({"\"" + rule.features.element(x) + "\"", rule.labels.element(rule(x))});
    write_table(out / "decisions.csv", decisions, j);
    write_json(out / "summary.json", {{"status", status_name(sol.status)},
                                      {"objective", sol.objective},
                                      {"entropy", sol.entropy},
                                      {"discrepancies", sol.discrepancy_terms},
                                      {"feasibility_residual", sol.feasibility_residual},
                                      {"lambda", problem.lambda},
                                      {"norm", std::string(norm_name(problem.norm))},
                                      {"fingerprint", fingerprint_hex(j)},
                                      {"warnings", sol.warnings}});
    std::cout << "wrote " << out.string() << '\n';
    return sol.optimal() ? 0 : 2;
}

int run_diagnose(const CommonFlags& f, std::size_t index) {
    const auto j = load_json(f.config);
    const auto problem = problem_from_json(j, fs::path(f.config).parent_path(), overrides(f));
    if (index >= problem.scheme.size()) throw std::invalid_argument("diagnose-erm: triple index out of range");
    const auto d = erm_backprojection(problem.scheme.triples()[index]);
    std::cout << "min entry: " << format_number(d.min_entry) << " at " << d.q.space().element(d.argmin) << '\n';
    std::cout << "negative entries: " << d.negative_entries.size() << '\n';
    for (auto i : d.negative_entries) std::cout << "  " << d.q.space().element(i) << " " << format_number(d.q[i]) << '\n';
    const fs::path out(f.out);
    Table t{{"element", "value"}, {}};
    for (std::size_t i = 0; i < d.q.space().size(); ++i)
        t.rows.push_back({"\"" + d.q.space().element(i) + "\"", format_number(d.q[i])});
    write_table(out / "erm_backprojection.csv", t, j);
    return 0;
}

int run_inspect(const CommonFlags& f) {
    const auto j = load_json(f.config);
    const auto problem = problem_from_json(j, fs::path(f.config).parent_path(), overrides(f));
    const auto& s = problem.scheme;
    std::cout << "test space: " << s.features().size() << " features x " << s.labels().size() << " labels\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto& t = s.triples()[i];
        std::cout << "triple " << i << " [" << t.kind << "] weight " << format_number(t.weight) << ", samples "
                  << t.sample_count << "\n  bridge size " << t.bridge_space().size() << "\n  T  " << t.test_to_bridge.kernel().rows()
                  << " x " << t.test_to_bridge.kernel().cols() << "\n  T~ " << t.train_to_bridge.kernel().rows() << " x "
                  << t.train_to_bridge.kernel().cols() << '\n';
    }
    const auto a = assemble_program(problem);
    std::cout << "program: " << a.program.variables() << " variables, " << a.program.A.rows() << " equalities, "
              << a.program.G.rows() << " cone rows\n";
    return 0;
}

int run_experiment(const std::string& which, const CommonFlags& f) {
    const auto j = load_json(f.config);
    const auto o = overrides(f);
    const auto start = std::chrono::steady_clock::now();
    ExperimentResult r;
    if (which == "noise-sweep") r = noise_sweep_experiment(noise_sweep_from_json(j, o));
    else if (which == "learning-curve") r = learning_curve_experiment(learning_curve_from_json(j, o));
    else r = benchmark_experiment(benchmark_from_json(j, fs::path(f.config).parent_path(), o));
    write_result(r, f.out);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const auto& s : r.summary)
        std::cout << s.method << " " << format_number(s.param) << " mean " << format_number(s.mean) << " std "
                  << format_number(s.stddev) << " reps " << s.reps << '\n';
    if (!r.extra.empty()) std::cout << r.extra.dump(2) << '\n';
    std::cout << "wrote " << f.out << " in " << secs << " s\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generalized robust risk minimization over finite spaces"};
    app.require_subcommand(1);

    CommonFlags solve_f, diag_f, inspect_f, exp_f;
    std::string lp_path;
    std::size_t triple = 0;

    auto* solve_cmd = app.add_subcommand("solve", "solve one problem and write Q*");
    add_common(solve_cmd, solve_f, false);
    solve_cmd->add_option("--lp", lp_path, "also write the conic program in LP format");

    auto* diag_cmd = app.add_subcommand("diagnose-erm", "back-project the empirical distribution of one triple");
    add_common(diag_cmd, diag_f, false);
    diag_cmd->add_option("--triple", triple, "triple index");

    auto* inspect_cmd = app.add_subcommand("inspect", "print structural information");
    auto* inspect_scheme = inspect_cmd->add_subcommand("scheme", "bridge spaces and kernel shapes");
    inspect_cmd->require_subcommand(1);
    add_common(inspect_scheme, inspect_f, false);

    auto* exp_cmd = app.add_subcommand("experiment", "run an experiment");
    exp_cmd->require_subcommand(1);
    std::string which;
    for (const char* name : {"noise-sweep", "learning-curve", "benchmark"}) {
        auto* sub = exp_cmd->add_subcommand(name, std::string(name) + " experiment");
        add_common(sub, exp_f, true);
        sub->callback([&which, name] { which = name; });
    }

    CLI11_PARSE(app, argc, argv);
    try {
        if (*solve_cmd) return run_solve(solve_f, lp_path);
        if (*diag_cmd) return run_diagnose(diag_f, triple);
        if (*inspect_scheme) return run_inspect(inspect_f);
        if (*exp_cmd) return run_experiment(which, exp_f);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
