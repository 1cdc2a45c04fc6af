#include "grrm/harness/experiments.hpp"

#include "grrm/classify.hpp"
#include "grrm/scheme.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace grrm::harness {

namespace {

/// Training samples of one triple. `to_test` maps a training-space sample
/// to a test-space sample for validation, when such a map exists.
struct Group {
    std::vector<std::size_t> samples;
    std::function<std::optional<std::size_t>(std::size_t)> to_test;
};

using Builder = std::function<SupervisionScheme(const std::vector<std::vector<std::size_t>>&)>;

struct Fitted {
    PosteriorRule rule;
    double lambda = 0.0;
    bool optimal = true;
};

struct FitContext {
    const SolveOptions& options;
    std::optional<Eigen::MatrixXd> embedding;
};

GrrmSolution solve_scheme(const SupervisionScheme& scheme, double lambda, const FitContext& ctx) {
    GrrmProblem p = make_problem(scheme, lambda, ctx.options.norm);
    if (ctx.options.statistic != "indicator") {
        p.statistics.clear();
        for (const auto& t : scheme.triples())
            p.statistics.push_back(make_statistic(ctx.options.statistic, t.bridge_space(),
                                                  t.bridge_space() == scheme.test_space() ? ctx.embedding : std::nullopt));
    }
    auto sol = solve(p);
    if (!sol.q_star) throw std::runtime_error(std::string("experiment solve failed: ") + status_name(sol.status));
    return sol;
}

Fitted fit(const Builder& build, const std::vector<Group>& groups, const FitContext& ctx) {
    const auto& lambdas = ctx.options.lambdas;
    if (lambdas.empty()) throw std::invalid_argument("experiment: empty lambda grid");
    auto all = [&] {
        std::vector<std::vector<std::size_t>> s;
        for (const auto& g : groups) s.push_back(g.samples);
        return s;
    }();
    double lambda = lambdas.front();
    if (lambdas.size() > 1) {
        std::vector<std::vector<std::size_t>> kept;
        std::vector<std::size_t> validation;
        for (const auto& g : groups) {
            const auto hold = g.to_test ? static_cast<std::size_t>(std::floor(ctx.options.validation_fraction *
                                                                              static_cast<double>(g.samples.size())))
                                        : 0;
            const std::size_t keep = g.samples.size() - hold;
            kept.emplace_back(g.samples.begin(), g.samples.begin() + static_cast<std::ptrdiff_t>(keep));
            for (std::size_t j = keep; j < g.samples.size(); ++j)
                if (auto z = g.to_test(g.samples[j])) validation.push_back(*z);
        }
        if (!validation.empty()) {
            const auto scheme = build(kept);
            lambda = select_lambda(lambdas, [&](double l) {
                         const auto sol = solve_scheme(scheme, l, ctx);
                         return evaluate(posterior_rule(*sol.q_star, scheme.loss()), validation, scheme.loss()).accuracy;
                     }).lambda;
        }
    }
    const auto scheme = build(all);
    const auto sol = solve_scheme(scheme, lambda, ctx);
    return {posterior_rule(*sol.q_star, scheme.loss()), lambda, sol.optimal()};
}

double erm_accuracy(const FiniteSpace& z, std::span<const std::size_t> train, std::span<const std::size_t> test) {
    const auto loss = LossMatrix::zero_one(z.factor(1));
    return evaluate(posterior_rule(empirical_distribution(train, z), loss), test, loss).accuracy;
}

double accuracy(const Fitted& f, std::span<const std::size_t> test) {
    return evaluate(f.rule, test, LossMatrix::zero_one(f.rule.labels)).accuracy;
}

nlohmann::json options_json(const SolveOptions& o) {
    return {{"lambdas", o.lambdas},
            {"validation_fraction", o.validation_fraction},
            {"norm", std::string(norm_name(o.norm))},
            {"statistic", o.statistic},
            {"seeds", o.seeds}};
}

std::vector<Board> take(const std::vector<Board>& v, std::size_t from, std::size_t count) {
    return {v.begin() + static_cast<std::ptrdiff_t>(from), v.begin() + static_cast<std::ptrdiff_t>(from + count)};
}

std::function<std::optional<std::size_t>(std::size_t)> identity_map() {
    return [](std::size_t s) { return std::optional<std::size_t>(s); };
}

}  // namespace

LambdaChoice select_lambda(std::span<const double> grid, const std::function<double(double)>& validation_accuracy) {
    if (grid.empty()) throw std::invalid_argument("select_lambda: empty grid");
    for (double l : grid)
        if (!(l > 0.0)) throw std::invalid_argument("select_lambda: grid entries must be positive");
    LambdaChoice c;
    for (double l : grid) c.validation_accuracy.push_back(validation_accuracy(l));
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double a = c.validation_accuracy[i], b = c.validation_accuracy[best];
        if (a > b + 1e-12 || (std::abs(a - b) <= 1e-12 && grid[i] < grid[best])) best = i;
    }
    c.lambda = grid[best];
    return c;
}

Statistic make_statistic(const std::string& name, const FiniteSpace& bridge, const std::optional<Eigen::MatrixXd>& embedding) {
    if (name == "indicator") return indicator_statistic(bridge);
    if (name != "one-hot-affine") throw std::invalid_argument("unknown statistic: " + name);
    if (bridge.factor_count() == 2 && bridge.factor(1) == binary_labels()) return one_hot_statistic(bridge, embedding);
    // Label-free bridges (unlabeled data) keep the affine feature part.
    const Eigen::MatrixXd e = one_hot_embedding(bridge);
    Eigen::MatrixXd v(e.rows(), e.cols() + 1);
    v << Eigen::VectorXd::Ones(e.rows()), e;
    return Statistic(bridge, v);
}

std::vector<std::uint64_t> SolveOptions::default_seeds(std::size_t n) {
    std::vector<std::uint64_t> s(n);
    std::iota(s.begin(), s.end(), std::uint64_t{0});
    return s;
}

const SummaryRecord& ExperimentResult::find(const std::string& method, double param) const {
    for (const auto& s : summary)
        if (s.method == method && s.param == param) return s;
    throw std::out_of_range("no summary row for " + method);
}

std::vector<double> ExperimentResult::accuracies(const std::string& method, double param) const {
    std::vector<double> out;
    for (const auto& r : runs)
        if (r.method == method && r.param == param) out.push_back(r.accuracy);
    return out;
}

std::vector<SummaryRecord> summarize(const std::vector<RunRecord>& runs) {
    std::vector<SummaryRecord> out;
    std::vector<std::vector<double>> values;
    for (const auto& r : runs) {
        auto it = std::find_if(out.begin(), out.end(),
                               [&](const SummaryRecord& s) { return s.method == r.method && s.param == r.param; });
        if (it == out.end()) {
            out.push_back({r.method, r.param, 0.0, 0.0, 0});
            values.emplace_back();
            it = out.end() - 1;
        }
        values[static_cast<std::size_t>(it - out.begin())].push_back(r.accuracy);
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto& v = values[i];
        const double n = static_cast<double>(v.size());
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
        double ss = 0.0;
        for (double a : v) ss += (a - mean) * (a - mean);
        out[i].mean = mean;
        out[i].stddev = v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
        out[i].reps = v.size();
    }
    return out;
}

void write_result(const ExperimentResult& r, const std::filesystem::path& dir) {
    Table summary{{"method", "param", "mean_accuracy", "std", "reps"}, {}};
    for (const auto& s : r.summary)
        summary.rows.push_back({s.method, format_number(s.param), format_number(s.mean), format_number(s.stddev),
                                std::to_string(s.reps)});
    Table runs{{"method", "param", "seed", "accuracy", "lambda"}, {}};
    for (const auto& x : r.runs)
        runs.rows.push_back({x.method, format_number(x.param), std::to_string(x.seed), format_number(x.accuracy),
                             format_number(x.lambda)});
    write_table(dir / (r.name + ".csv"), summary, r.config);
    write_table(dir / (r.name + "_runs.csv"), runs, r.config);
    nlohmann::json s{{"experiment", r.name}, {"fingerprint", fingerprint_hex(r.config)}, {"config", r.config}};
    for (const auto& x : r.summary)
        s["summary"].push_back({{"method", x.method}, {"param", x.param}, {"mean_accuracy", x.mean}, {"std", x.stddev}, {"reps", x.reps}});
    if (!r.extra.empty()) s["extra"] = r.extra;
    write_json(dir / "summary.json", s);
}

// ---------------------------------------------------------------- noise sweep

nlohmann::json NoiseSweepConfig::to_json() const {
    return {{"experiment", "noise-sweep"}, {"grid", grid}, {"rho_minus_ratio", rho_minus_ratio},
            {"train_size", train_size}, {"window", window}, {"solve", options_json(solve)}};
}

ExperimentResult noise_sweep_experiment(const NoiseSweepConfig& config) {
    const auto& corpus = endgame_corpus();
    if (config.train_size == 0 || config.train_size >= corpus.size())
        throw std::invalid_argument("noise sweep: train size must leave a test set");
    for (double g : config.grid)
        if (!(g >= 0.0 && g <= 1.0) || config.rho_minus_ratio * g > 1.0)
            throw std::invalid_argument("noise sweep: grid values must be probabilities");
    const auto& window = config.window;
    const auto z = test_space(window_space(window), binary_labels());
    const std::size_t n_seeds = config.solve.seeds.size();
    const std::size_t tasks = n_seeds * config.grid.size();
    std::vector<std::array<RunRecord, 3>> out(tasks);
    std::vector<char> optimal(tasks, 1);
    const FitContext ctx{config.solve, std::nullopt};

    parallel_for(tasks, config.solve.threads, [&](std::size_t task) {
        const std::size_t si = task / config.grid.size(), gi = task % config.grid.size();
        const std::uint64_t seed = config.solve.seeds[si];
        const double rho_plus = config.grid[gi], eta = rho_plus, rho_minus = config.rho_minus_ratio * rho_plus;

        Rng split(seed, 0);
        const auto perm = permutation(corpus.size(), split);
        std::vector<Board> shuffled;
        for (auto i : perm) shuffled.push_back(corpus[i]);
        const auto train = take(shuffled, 0, config.train_size);
        const auto test = take(shuffled, config.train_size, corpus.size() - config.train_size);

        Rng noise(seed, 1 + gi);
        const auto noisy_train = inject_noise(train, rho_minus, rho_plus, 0.0, noise);
        const auto noisy_test = inject_noise(test, 0.0, 0.0, eta, noise);

        const auto clean_train_s = encode_samples(train, window);
        const auto clean_test_s = encode_samples(test, window);
        const auto noisy_train_s = encode_samples(noisy_train, window);
        const auto noisy_test_s = encode_samples(noisy_test, window);

        const std::vector<Transition> cells(window.size(), symbol_noise(cell_space(), eta));
        const Transition feature_kernel(z.factor(0), z.factor(0), parallel(cells).kernel());
        const Transition labels = label_noise(rho_minus, rho_plus);
        const Builder build = [&](const std::vector<std::vector<std::size_t>>& s) {
            return make_scheme(z, {combined(z, labels, feature_kernel, s[0])});
        };
        const auto fitted = fit(build, {{noisy_train_s, identity_map()}}, ctx);
        optimal[task] = fitted.optimal;

        out[task] = {RunRecord{"benchmark", rho_plus, seed, erm_accuracy(z, clean_train_s, clean_test_s), 0.0},
                     RunRecord{"naive", rho_plus, seed, erm_accuracy(z, noisy_train_s, noisy_test_s), 0.0},
                     RunRecord{"grrm", rho_plus, seed, accuracy(fitted, noisy_test_s), fitted.lambda}};
    });

    ExperimentResult r;
    r.name = "noise_sweep";
    r.config = config.to_json();
    // Rows ordered by grid point, method, then seed.
    for (std::size_t gi = 0; gi < config.grid.size(); ++gi)
        for (std::size_t m = 0; m < 3; ++m)
            for (std::size_t si = 0; si < n_seeds; ++si) r.runs.push_back(out[si * config.grid.size() + gi][m]);
    r.summary = summarize(r.runs);
    r.extra["non_optimal_solves"] = std::count(optimal.begin(), optimal.end(), 0);
    return r;
}

// ------------------------------------------------------------- learning curve

nlohmann::json LearningCurveConfig::to_json() const {
    return {{"experiment", "learning-curve"}, {"base", base}, {"steps", steps}, {"rho_minus", rho_minus},
            {"rho_plus", rho_plus}, {"test_window", test_window}, {"adaptation_window", adaptation_window},
            {"privileged_window", privileged_window}, {"solve", options_json(solve)}};
}

ExperimentResult learning_curve_experiment(const LearningCurveConfig& config) {
    static const char* kTypes[4] = {"standard", "noisy-labels", "domain-adaptation", "privileged"};
    const auto& corpus = endgame_corpus();
    const std::size_t max_added = config.steps.empty() ? 0 : *std::max_element(config.steps.begin(), config.steps.end());
    if (4 * config.base + max_added >= corpus.size()) throw std::invalid_argument("learning curve: no boards left for testing");
    for (std::size_t s : config.steps)
        if (s == 0) throw std::invalid_argument("learning curve: steps must be positive");

    const auto& tw = config.test_window;
    const auto& aw = config.adaptation_window;
    const auto& pw = config.privileged_window;
    const auto z = test_space(window_space(tw), binary_labels());

    // Domain adaptation bridge: cells shared by the test and adaptation windows.
    std::vector<std::size_t> test_kept, adapt_kept, priv_kept;
    for (std::size_t i = 0; i < tw.size(); ++i) {
        const auto it = std::find(aw.begin(), aw.end(), tw[i]);
        if (it != aw.end()) {
            test_kept.push_back(i);
            adapt_kept.push_back(static_cast<std::size_t>(it - aw.begin()));
        }
        const auto jt = std::find(pw.begin(), pw.end(), tw[i]);
        if (jt == pw.end()) throw std::invalid_argument("learning curve: privileged window must cover the test window");
        priv_kept.push_back(static_cast<std::size_t>(jt - pw.begin()));
    }
    if (test_kept.empty()) throw std::invalid_argument("learning curve: adaptation window shares no cell with the test window");
    const auto test_repr_raw = parallel(projection(window_space(tw), test_kept), identity(binary_labels()));
    const auto train_repr = parallel(projection(window_space(aw), adapt_kept), identity(binary_labels()));
    const Transition test_repr(z, train_repr.target(), test_repr_raw.kernel());
    const auto priv_features = window_space(pw);
    const Transition priv_kernel(priv_features, z.factor(0), projection(priv_features, priv_kept).kernel());

    // Task 0: shared base; then (type, step) pairs.
    struct Task {
        std::size_t seed_index;
        int type;
        std::size_t added;
    };
    std::vector<Task> tasks;
    for (std::size_t si = 0; si < config.solve.seeds.size(); ++si) {
        tasks.push_back({si, -1, 0});
        for (int t = 0; t < 4; ++t)
            for (auto s : config.steps) tasks.push_back({si, t, s});
    }
    std::vector<RunRecord> out(tasks.size());
    std::vector<char> optimal(tasks.size(), 1);
    const FitContext ctx{config.solve, std::nullopt};

    parallel_for(tasks.size(), config.solve.threads, [&](std::size_t k) {
        const auto& task = tasks[k];
        const std::uint64_t seed = config.solve.seeds[task.seed_index];
        Rng split(seed, 0);
        const auto perm = permutation(corpus.size(), split);
        std::vector<Board> shuffled;
        for (auto i : perm) shuffled.push_back(corpus[i]);
        const std::size_t nb = config.base;
        std::vector<std::vector<Board>> groups;
        for (std::size_t t = 0; t < 4; ++t) groups.push_back(take(shuffled, t * nb, nb));
        const auto pool = take(shuffled, 4 * nb, max_added);
        const auto test = take(shuffled, 4 * nb + max_added, corpus.size() - 4 * nb - max_added);

        if (task.type >= 0) {
            auto& g = groups[static_cast<std::size_t>(task.type)];
            g.insert(g.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(task.added));
        }
        // Noisy labels are drawn once per seed over base ∪ pool, so growing
        // the noisy group extends the same corrupted sequence.
        {
            std::vector<Board> all = take(shuffled, nb, nb);
            all.insert(all.end(), pool.begin(), pool.end());
            Rng noise(seed, 1);
            const auto noisy = inject_noise(all, config.rho_minus, config.rho_plus, 0.0, noise);
            groups[1].assign(noisy.begin(), noisy.begin() + static_cast<std::ptrdiff_t>(groups[1].size()));
        }

        const std::vector<Group> g{
            {encode_samples(groups[0], tw), identity_map()},
            {encode_samples(groups[1], tw), identity_map()},
            {encode_samples(groups[2], aw), nullptr},
            {encode_samples(groups[3], pw),
             [&](std::size_t s) {
                 const auto parts = priv_features.decompose(s / 2);
                 std::vector<std::size_t> kept;
                 for (auto i : priv_kept) kept.push_back(parts[i]);
                 return std::optional<std::size_t>(z.factor(0).compose(kept) * 2 + s % 2);
             }},
        };
        const Builder build = [&](const std::vector<std::vector<std::size_t>>& s) {
            std::vector<BridgeTriple> triples;
            triples.push_back(standard(z, s[0]));
            triples.push_back(noisy_labels(z, config.rho_minus, config.rho_plus, s[1]));
            triples.push_back(representation_adaptation(z, test_repr, train_repr, s[2]));
            triples.push_back(privileged(z, priv_kernel, s[3]));
            return default_weights(make_scheme(z, std::move(triples)));
        };
        const auto fitted = fit(build, g, ctx);
        optimal[k] = fitted.optimal;
        out[k] = {task.type >= 0 ? kTypes[task.type] : "", static_cast<double>(task.added), seed,
                  accuracy(fitted, encode_samples(test, tw)), fitted.lambda};
    });

    ExperimentResult r;
    r.name = "learning_curve";
    r.config = config.to_json();
    const std::size_t per_seed = 1 + 4 * config.steps.size();
    for (int t = 0; t < 4; ++t) {
        for (std::size_t si = 0; si < config.solve.seeds.size(); ++si) {
            RunRecord base = out[si * per_seed];
            base.method = kTypes[t];
            r.runs.push_back(base);
        }
        for (std::size_t s = 0; s < config.steps.size(); ++s)
            for (std::size_t si = 0; si < config.solve.seeds.size(); ++si)
                r.runs.push_back(out[si * per_seed + 1 + static_cast<std::size_t>(t) * config.steps.size() + s]);
    }
    r.summary = summarize(r.runs);
    r.extra["non_optimal_solves"] = std::count(optimal.begin(), optimal.end(), 0);
    return r;
}

// ------------------------------------------------------------------ benchmark

nlohmann::json BenchmarkConfig::to_json() const {
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& c : schema.features)
        cols.push_back({{"name", c.name},
                        {"kind", c.kind == ColumnSpec::Kind::Numeric ? "numeric" : "categorical"},
                        {"bins", c.bins}});
    return {{"experiment", "benchmark"},
            {"data", data_path},
            {"schema",
             {{"features", cols},
              {"label", schema.label},
              {"positive_label", schema.positive_label},
              {"header", schema.header},
              {"names", schema.names},
              {"max_product", schema.max_product}}},
            {"train_fraction", train_fraction},
            {"rho_minus", rho_minus},
            {"rho_plus", rho_plus},
            {"labeled_fraction", labeled_fraction},
            {"unlabeled_fraction", unlabeled_fraction},
            {"semi_supervised", semi_supervised},
            {"solve", options_json(solve)}};
}

PairedInterval paired_interval(std::span<const double> a, std::span<const double> b, double level) {
    if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("paired_interval: need two or more pairs");
    const double n = static_cast<double>(a.size());
    double mean = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) mean += a[i] - b[i];
    mean /= n;
    double ss = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) ss += (a[i] - b[i] - mean) * (a[i] - b[i] - mean);
    const double se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    const boost::math::students_t dist(n - 1.0);
    const double t = boost::math::quantile(boost::math::complement(dist, (1.0 - level) / 2.0));
    return {mean, mean - t * se, mean + t * se, a.size()};
}

ExperimentResult benchmark_experiment(const BenchmarkConfig& config) {
    for (double f : {config.train_fraction, config.labeled_fraction, config.unlabeled_fraction})
        if (!(f > 0.0 && f < 1.0)) throw std::invalid_argument("benchmark: fractions must lie in (0,1)");
    if (config.labeled_fraction + config.unlabeled_fraction >= 1.0)
        throw std::invalid_argument("benchmark: labeled and unlabeled fractions leave no test rows");
    const auto table = read_csv(config.data_path, config.schema.header, config.schema.names);
    const std::size_t n = table.rows.size();
    const std::size_t n_seeds = config.solve.seeds.size();
    std::vector<std::array<RunRecord, 4>> out(n_seeds);
    std::vector<char> optimal(n_seeds, 1);
    std::vector<std::vector<std::string>> warnings(n_seeds);

    parallel_for(n_seeds, config.solve.threads, [&](std::size_t si) {
        const std::uint64_t seed = config.solve.seeds[si];
        Rng split(seed, 0);
        const auto perm = permutation(n, split);
        const auto n_train = static_cast<std::size_t>(std::llround(config.train_fraction * static_cast<double>(n)));
        if (n_train == 0 || n_train >= n) throw std::invalid_argument("benchmark: train fraction leaves an empty split");
        const std::vector<std::size_t> train(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
        const std::vector<std::size_t> test(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
        const auto d = ingest_table(table, config.schema, train);
        warnings[si] = d.warnings;
        const FitContext ctx{config.solve, d.embedding};

        // Noisy labels on the training rows only.
        Rng noise(seed, 1);
        std::vector<std::size_t> noisy;
        for (auto row : train) {
            std::size_t y = d.label_index[row];
            if (noise.bernoulli(y == 1 ? config.rho_plus : config.rho_minus)) y = 1 - y;
            noisy.push_back(d.feature_index[row] * 2 + y);
        }
        const auto test_s = d.samples(test);
        const Builder build_noisy = [&](const std::vector<std::vector<std::size_t>>& s) {
            return make_scheme(d.space, {noisy_labels(d.space, config.rho_minus, config.rho_plus, s[0])});
        };
        const auto fitted = fit(build_noisy, {{noisy, identity_map()}}, ctx);
        out[si][0] = {"naive-erm", 0.0, seed, erm_accuracy(d.space, noisy, test_s), 0.0};
        out[si][1] = {"grrm-noisy-labels", 0.0, seed, accuracy(fitted, test_s), fitted.lambda};
        bool ok = fitted.optimal;

        if (config.semi_supervised) {
            const auto n_lab = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(config.labeled_fraction * static_cast<double>(n))));
            const auto n_unl = static_cast<std::size_t>(std::llround(config.unlabeled_fraction * static_cast<double>(n)));
            const std::vector<std::size_t> lab(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_lab));
            const std::vector<std::size_t> unl(perm.begin() + static_cast<std::ptrdiff_t>(n_lab),
                                               perm.begin() + static_cast<std::ptrdiff_t>(n_lab + n_unl));
            const std::vector<std::size_t> rest(perm.begin() + static_cast<std::ptrdiff_t>(n_lab + n_unl), perm.end());
            std::vector<std::size_t> fit_rows = lab;
            fit_rows.insert(fit_rows.end(), unl.begin(), unl.end());
            const auto ds = ingest_table(table, config.schema, fit_rows);
            const FitContext sctx{config.solve, ds.embedding};
            const auto rest_s = ds.samples(rest);
            const Builder build_semi = [&](const std::vector<std::vector<std::size_t>>& s) {
                return default_weights(make_scheme(ds.space, {standard(ds.space, s[0]), unlabeled(ds.space, s[1])}));
            };
            const auto semi = fit(build_semi, {{ds.samples(lab), identity_map()}, {ds.features_of(unl), nullptr}}, sctx);
            out[si][2] = {"supervised-erm", 0.0, seed, erm_accuracy(ds.space, ds.samples(lab), rest_s), 0.0};
            out[si][3] = {"grrm-semi-supervised", 0.0, seed, accuracy(semi, rest_s), semi.lambda};
            ok = ok && semi.optimal;
        }
        optimal[si] = ok;
    });

    ExperimentResult r;
    r.name = "benchmark";
    r.config = config.to_json();
    const std::size_t methods = config.semi_supervised ? 4 : 2;
    for (std::size_t m = 0; m < methods; ++m)
        for (std::size_t si = 0; si < n_seeds; ++si) r.runs.push_back(out[si][m]);
    r.summary = summarize(r.runs);
    r.extra["non_optimal_solves"] = std::count(optimal.begin(), optimal.end(), 0);
    std::vector<std::string> all_warnings;
    for (const auto& w : warnings)
        for (const auto& s : w)
            if (std::find(all_warnings.begin(), all_warnings.end(), s) == all_warnings.end()) all_warnings.push_back(s);
    r.extra["warnings"] = all_warnings;
    auto add_interval = [&](const char* key, const char* a, const char* b) {
        if (n_seeds < 2) return;
        const auto ia = r.accuracies(a, 0.0), ib = r.accuracies(b, 0.0);
        const auto ci = paired_interval(ia, ib);
        r.extra[key] = {{"minuend", a}, {"subtrahend", b}, {"mean_difference", ci.mean}, {"ci95_lower", ci.lower},
                        {"ci95_upper", ci.upper}, {"pairs", ci.n}};
    };
    add_interval("noisy_labels_gain", "grrm-noisy-labels", "naive-erm");
    if (config.semi_supervised) add_interval("semi_supervised_gain", "grrm-semi-supervised", "supervised-erm");
    return r;
}

}  // namespace grrm::harness
