#include "grrm/harness/config.hpp"

#include "grrm/harness/tictactoe.hpp"
#include "grrm/scheme.hpp"
#include "grrm/transition.hpp"

#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace grrm::harness {

using nlohmann::json;

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

std::ifstream open(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    return in;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

/// Kernel with a known source and target; rows and columns are matched by
/// element label.
Transition load_kernel(const std::filesystem::path& path, const FiniteSpace& source, const FiniteSpace& target) {
    auto in = open(path);
    return read_kernel_csv(in, source, target);
}

/// Kernel whose source space is read from the file.
Transition load_kernel_from(const std::filesystem::path& path, const FiniteSpace& target) {
    auto first = open(path);
    const auto inferred = read_kernel_csv(first);
    return load_kernel(path, inferred.source(), target);
}

FiniteSpace space_from_json(const json& j) {
    if (j.is_array()) return make_space(j.get<std::vector<std::string>>());
    if (j.contains("tictactoe_window")) return window_space(j.at("tictactoe_window").get<std::vector<std::size_t>>());
    if (j.contains("factors")) {
        std::vector<FiniteSpace> f;
        for (const auto& e : j.at("factors")) f.push_back(space_from_json(e));
        return product_space(f);
    }
    throw std::invalid_argument("space: expected a list, {\"factors\": …} or {\"tictactoe_window\": …}");
}

std::vector<std::size_t> samples_from_json(const json& j, const FiniteSpace& space) {
    std::vector<std::size_t> out;
    for (const auto& e : j) {
        if (e.is_string()) {
            out.push_back(space.index_of(e.get<std::string>()));
        } else {
            const auto v = e.get<std::size_t>();
            if (v >= space.size()) throw std::out_of_range("sample index outside the training space");
            out.push_back(v);
        }
    }
    return out;
}

Transition symbol_noise_product(const FiniteSpace& features, double eta) {
    if (!features.factorized()) return symbol_noise(features, eta);
    std::vector<Transition> parts;
    for (const auto& f : features.factors()) parts.push_back(symbol_noise(f, eta));
    return {features, features, parallel(parts).kernel()};
}

/// Test labels → training labels, from rates or a kernel file.
Transition label_kernel_from(const json& t, const FiniteSpace& labels, const std::filesystem::path& base) {
    if (!t.contains("label_kernel"))
        return label_noise(labels, t.at("rho_minus").get<double>(), t.at("rho_plus").get<double>());
    const auto path = resolve(base, t.at("label_kernel"));
    auto first = open(path);
    const auto inferred = read_kernel_csv(first);
    return load_kernel(path, labels, inferred.target());
}

BridgeTriple triple_from_json(const json& t, const FiniteSpace& z, const std::filesystem::path& base) {
    const std::string kind = t.at("kind");
    const auto& features = z.factor(0);
    const auto& labels = z.factor(1);
    const json& raw = t.contains("samples") ? t.at("samples") : json::array();
    auto in_space = [&](const FiniteSpace& space) { return samples_from_json(raw, space); };

    if (kind == "standard") return standard(z, in_space(z));
    if (kind == "noisy-labels") {
        const auto k = label_kernel_from(t, labels, base);
        return noisy_labels(z, k, in_space(test_space(features, k.target())));
    }
    if (kind == "unlabeled") return unlabeled(z, in_space(features));
    if (kind == "missing-feature") {
        const auto m = t.at("missing").get<std::size_t>();
        if (!features.factorized() || m >= features.factor_count())
            throw std::invalid_argument("missing-feature: test features must be factorized");
        std::vector<FiniteSpace> rest;
        for (std::size_t k = 0; k < features.factor_count(); ++k)
            if (k != m) rest.push_back(features.factor(k));
        const auto reduced = rest.size() == 1 ? rest[0] : product_space(rest);
        return missing_feature(z, m, in_space(test_space(reduced, labels)));
    }
    if (kind == "privileged") {
        if (t.contains("extended_features")) {
            const auto ext = space_from_json(t.at("extended_features"));
            const auto kept = t.at("kept").get<std::vector<std::size_t>>();
            return privileged(z, ext, kept, in_space(test_space(ext, labels)));
        }
        const auto k = load_kernel_from(resolve(base, t.at("feature_kernel")), features);
        return privileged(z, k, in_space(test_space(k.source(), labels)));
    }
    if (kind == "trs-corrupted") {
        const Transition c = t.contains("symbol_noise") ? symbol_noise_product(features, t.at("symbol_noise").get<double>())
                                                        : [&] {
                                                              auto first = open(resolve(base, t.at("corruption")));
                                                              const auto inferred = read_kernel_csv(first);
                                                              return load_kernel(resolve(base, t.at("corruption")), features,
                                                                                 inferred.target());
                                                          }();
        return trs_corrupted(z, c, in_space(test_space(c.target(), labels)));
    }
    if (kind == "representation") {
        auto first = open(resolve(base, t.at("test_repr")));
        const auto b = read_kernel_csv(first).target();
        const auto tr = load_kernel(resolve(base, t.at("test_repr")), z, b);
        const auto trn = load_kernel_from(resolve(base, t.at("train_repr")), b);
        return representation_adaptation(z, tr, trn, in_space(trn.source()));
    }
    if (kind == "combined") {
        const auto lk = label_kernel_from(t, labels, base);
        const Transition fk = t.contains("symbol_noise") ? symbol_noise_product(features, t.at("symbol_noise").get<double>())
                                                         : load_kernel_from(resolve(base, t.at("feature_kernel")), features);
        return combined(z, lk, fk, in_space(test_space(fk.source(), lk.target())));
    }
    if (kind == "precise-labels") {
        const auto k = load_kernel_from(resolve(base, t.at("refinement")), labels);
        return precise_labels(z, k, in_space(test_space(features, k.source())));
    }
    if (kind == "coarse-labels") {
        if (get_or(t, "superset", false)) {
            const auto ps = label_power_set(labels);
            return coarse_labels(z, ps, superset_label_map(labels, ps), in_space(test_space(features, ps)));
        }
        const auto coarse = make_space(t.at("coarse_labels").get<std::vector<std::string>>());
        std::vector<std::vector<std::size_t>> map;
        for (const auto& row : t.at("label_map")) {
            std::vector<std::size_t> targets;
            for (const auto& c : row) targets.push_back(coarse.index_of(c.get<std::string>()));
            map.push_back(targets);
        }
        return coarse_labels(z, coarse, map, in_space(test_space(features, coarse)));
    }
    throw std::invalid_argument("unknown scheme kind: " + kind);
}

/// Header "element,<names…>", then one row per bridge element. Labels of
/// product elements contain commas, so values are taken from the right.
Statistic statistic_from_csv(const std::filesystem::path& path, const FiniteSpace& bridge) {
    auto in = open(path);
    auto split = [](const std::string& line) {
        std::vector<std::string> parts;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) parts.push_back(f);
        return parts;
    };
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("statistic csv: empty file");
    const std::size_t dim = split(line).size() - 1;
    if (dim == 0) throw std::invalid_argument("statistic csv: no statistic columns");
    Eigen::MatrixXd v = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(bridge.size()), static_cast<Eigen::Index>(dim),
                                                  std::numeric_limits<double>::quiet_NaN());
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto parts = split(line);
        if (parts.size() <= dim) throw std::invalid_argument("statistic csv: short row");
        std::string label = parts[0];
        for (std::size_t i = 1; i + dim < parts.size(); ++i) label += "," + parts[i];
        const auto row = static_cast<Eigen::Index>(bridge.index_of(label));
        for (std::size_t k = 0; k < dim; ++k)
            v(row, static_cast<Eigen::Index>(k)) = std::stod(parts[parts.size() - dim + k]);
    }
    if (!v.allFinite()) throw std::invalid_argument("statistic csv: missing bridge elements");
    return Statistic(bridge, v);
}

}  // namespace

json load_json(const std::filesystem::path& path) {
    auto in = open(path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

std::vector<double> parse_lambda_grid(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("lambda: cannot parse '" + item + "'");
        }
        if (used != item.size()) throw std::invalid_argument("lambda: cannot parse '" + item + "'");
        if (!(v > 0.0)) throw std::invalid_argument("lambda: entries must be positive");
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("lambda: empty grid");
    return out;
}

SolveOptions solve_options_from_json(const json& j, const Overrides& o) {
    SolveOptions s;
    if (j.contains("lambdas")) s.lambdas = j.at("lambdas").get<std::vector<double>>();
    if (j.contains("lambda")) s.lambdas = {j.at("lambda").get<double>()};
    s.validation_fraction = get_or(j, "validation_fraction", s.validation_fraction);
    if (j.contains("norm")) s.norm = parse_norm(j.at("norm").get<std::string>());
    s.statistic = get_or(j, "statistic", s.statistic);
    s.threads = get_or(j, "threads", s.threads);
    if (j.contains("seeds")) s.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    const std::size_t reps = o.reps ? *o.reps : get_or<std::size_t>(j, "reps", 0);
    const std::uint64_t first = o.seed ? *o.seed : get_or<std::uint64_t>(j, "seed", 0);
    if (reps > 0 || o.seed) {
        const std::size_t n = reps > 0 ? reps : s.seeds.size();
        s.seeds.clear();
        for (std::size_t i = 0; i < n; ++i) s.seeds.push_back(first + i);
    }
    if (o.lambdas) s.lambdas = *o.lambdas;
    if (o.norm) s.norm = *o.norm;
    if (o.threads) s.threads = *o.threads;
    if (s.lambdas.empty()) throw std::invalid_argument("config: empty lambda grid");
    for (double l : s.lambdas)
        if (!(l > 0.0)) throw std::invalid_argument("config: lambda entries must be positive");
    if (s.seeds.empty()) throw std::invalid_argument("config: repetitions must be at least 1");
    if (!(s.validation_fraction > 0.0 && s.validation_fraction < 1.0))
        throw std::invalid_argument("config: validation_fraction must lie in (0,1)");
    return s;
}

NoiseSweepConfig noise_sweep_from_json(const json& j, const Overrides& o) {
    NoiseSweepConfig c;
    if (j.contains("grid")) c.grid = j.at("grid").get<std::vector<double>>();
    c.rho_minus_ratio = get_or(j, "rho_minus_ratio", c.rho_minus_ratio);
    c.train_size = get_or(j, "train_size", c.train_size);
    if (j.contains("window")) c.window = j.at("window").get<std::vector<std::size_t>>();
    c.solve = solve_options_from_json(j.value("solve", json::object()), o);
    return c;
}

LearningCurveConfig learning_curve_from_json(const json& j, const Overrides& o) {
    LearningCurveConfig c;
    c.base = get_or(j, "base", c.base);
    if (j.contains("steps")) c.steps = j.at("steps").get<std::vector<std::size_t>>();
    c.rho_minus = get_or(j, "rho_minus", c.rho_minus);
    c.rho_plus = get_or(j, "rho_plus", c.rho_plus);
    if (j.contains("test_window")) c.test_window = j.at("test_window").get<std::vector<std::size_t>>();
    if (j.contains("adaptation_window")) c.adaptation_window = j.at("adaptation_window").get<std::vector<std::size_t>>();
    if (j.contains("privileged_window")) c.privileged_window = j.at("privileged_window").get<std::vector<std::size_t>>();
    c.solve = solve_options_from_json(j.value("solve", json::object()), o);
    return c;
}

BenchmarkConfig benchmark_from_json(const json& j, const std::filesystem::path& base, const Overrides& o) {
    BenchmarkConfig c;
    c.data_path = resolve(base, j.at("data").get<std::string>()).string();
    const json& s = j.at("schema");
    for (const auto& col : s.at("features")) {
        ColumnSpec spec;
        if (col.is_string()) {
            spec.name = col.get<std::string>();
        } else {
            spec.name = col.at("name").get<std::string>();
            const std::string kind = get_or<std::string>(col, "kind", "categorical");
            if (kind == "numeric") spec.kind = ColumnSpec::Kind::Numeric;
            else if (kind != "categorical") throw std::invalid_argument("schema: unknown column kind " + kind);
            spec.bins = get_or(col, "bins", spec.bins);
        }
        c.schema.features.push_back(spec);
    }
    c.schema.label = s.at("label").get<std::string>();
    c.schema.positive_label = s.at("positive_label").get<std::string>();
    c.schema.header = get_or(s, "header", true);
    if (s.contains("names")) c.schema.names = s.at("names").get<std::vector<std::string>>();
    c.schema.max_product = get_or(s, "max_product", c.schema.max_product);
    c.train_fraction = get_or(j, "train_fraction", c.train_fraction);
    c.rho_minus = get_or(j, "rho_minus", c.rho_minus);
    c.rho_plus = get_or(j, "rho_plus", c.rho_plus);
    c.labeled_fraction = get_or(j, "labeled_fraction", c.labeled_fraction);
    c.unlabeled_fraction = get_or(j, "unlabeled_fraction", c.unlabeled_fraction);
    c.semi_supervised = get_or(j, "semi_supervised", c.semi_supervised);
    c.solve = solve_options_from_json(j.value("solve", json::object()), o);
    return c;
}

GrrmProblem problem_from_json(const json& j, const std::filesystem::path& base, const Overrides& o) {
    const auto features = space_from_json(j.at("features"));
    const auto labels = j.contains("labels") ? space_from_json(j.at("labels")) : binary_labels();
    const auto z = test_space(features, labels);
    std::vector<BridgeTriple> triples;
    for (const auto& t : j.at("triples")) triples.push_back(triple_from_json(t, z, base));
    if (triples.empty()) throw std::invalid_argument("problem: no triples");
    auto scheme = make_scheme(z, std::move(triples));
    const json w = j.value("weights", json("auto"));
    if (w.is_string()) {
        if (w.get<std::string>() != "auto") throw std::invalid_argument("weights: expected \"auto\" or a list");
        scheme = default_weights(scheme);
    } else {
        const auto weights = w.get<std::vector<double>>();
        scheme = scheme.with_weights(weights);
    }
    const auto lambdas = o.lambdas ? *o.lambdas : std::vector<double>{get_or(j, "lambda", 0.1)};
    if (lambdas.size() != 1) throw std::invalid_argument("solve: expects a single lambda");
    const NormKind norm = o.norm ? *o.norm : parse_norm(get_or<std::string>(j, "norm", "max-abs"));
    GrrmProblem p = make_problem(scheme, lambdas[0], norm);
    const std::string stat = get_or<std::string>(j, "statistic", "indicator");
    if (stat != "indicator") {
        p.statistics.clear();
        for (const auto& t : p.scheme.triples()) {
            if (stat == "one-hot-affine") p.statistics.push_back(make_statistic(stat, t.bridge_space()));
            else p.statistics.push_back(statistic_from_csv(resolve(base, stat), t.bridge_space()));
        }
    }
    if (j.contains("marginal_pin")) {
        const auto m = j.at("marginal_pin").get<std::vector<double>>();
        p.marginal_pin = Distribution(features, Eigen::Map<const Eigen::VectorXd>(m.data(), static_cast<Eigen::Index>(m.size())));
    }
    p.validate();
    return p;
}

}  // namespace grrm::harness
