#include "doctest.h"

#include "grrm/harness/config.hpp"
#include "grrm/harness/data.hpp"
#include "grrm/harness/experiments.hpp"
#include "grrm/harness/io.hpp"
#include "grrm/harness/rng.hpp"
#include "grrm/harness/tictactoe.hpp"
#include "grrm/scheme.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace grrm;
using namespace grrm::harness;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("grrm_unit_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool line_win(const Board& b, char p) {
    const int lines[8][3] = {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}, {0, 3, 6}, {1, 4, 7}, {2, 5, 8}, {0, 4, 8}, {2, 4, 6}};
    for (const auto& l : lines)
        if (b.cells[l[0]] == p && b.cells[l[1]] == p && b.cells[l[2]] == p) return true;
    return false;
}

// |p̂ − p| ≤ 3σ for a binomial proportion.
bool within_three_sigma(std::size_t hits, std::size_t n, double p) {
    const double nn = static_cast<double>(n);
    return std::abs(static_cast<double>(hits) / nn - p) <= 3.0 * std::sqrt(p * (1.0 - p) / nn);
}

}  // namespace

TEST_CASE("rng streams are reproducible and portable") {
    Rng a(7, 3), b(7, 3), c(7, 4);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next();
        CHECK(x == b.next());
        differs = differs || x != c.next();
    }
    CHECK(differs);
    Rng r(1, 0);
    for (int i = 0; i < 1000; ++i) {
        const double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(r.below(7) < 7);
    }
    CHECK_THROWS(r.below(0));
    auto p = permutation(50, r);
    std::sort(p.begin(), p.end());
    for (std::size_t i = 0; i < 50; ++i) CHECK(p[i] == i);
}

TEST_CASE("endgame corpus") {
    const auto& c = endgame_corpus();
    CHECK(c.size() == 958);
    std::size_t pos = 0;
    std::set<std::array<char, 9>> unique;
    for (const auto& b : c) {
        pos += b.x_wins;
        unique.insert(b.cells);
        const auto xs = std::count(b.cells.begin(), b.cells.end(), 'x');
        const auto os = std::count(b.cells.begin(), b.cells.end(), 'o');
        CHECK((xs == os || xs == os + 1));
        CHECK(b.x_wins == line_win(b, 'x'));
        CHECK((line_win(b, 'x') || line_win(b, 'o') || xs + os == 9));
    }
    CHECK(pos == 626);
    CHECK(unique.size() == 958);

    std::ifstream bundled(std::string(GRRM_SOURCE_DIR) + "/data/tic-tac-toe.data");
    REQUIRE(bundled);
    CHECK(read_uci(bundled) == c);

    std::stringstream round;
    write_uci(c, round);
    CHECK(read_uci(round) == c);
    std::stringstream bad("x,o,b,x,o,b,x,o,b,maybe\n");
    CHECK_THROWS(read_uci(bad));
}

TEST_CASE("tictactoe_generate") {
    CHECK(tictactoe_generate(3, 0).empty());
    const auto a = tictactoe_generate(3, 200), b = tictactoe_generate(3, 200), c = tictactoe_generate(4, 200);
    CHECK(a == b);
    CHECK(a != c);
    const auto& corpus = endgame_corpus();
    for (const auto& x : a) CHECK(std::find(corpus.begin(), corpus.end(), x) != corpus.end());
}

TEST_CASE("window encoding") {
    const auto w = upper_left_block();
    const auto space = window_space(w);
    CHECK(space.size() == 81);
    CHECK(space.factor_count() == 4);
    Board b;
    b.cells = {'o', 'b', 'x', 'x', 'o', 'b', 'b', 'b', 'b'};
    b.x_wins = true;
    // cells 0,1,3,4 = o,b,x,o → digits 1,2,0,1 in base 3
    CHECK(encode_window(b, w) == 1 * 27 + 2 * 9 + 0 * 3 + 1);
    CHECK(space.element(encode_window(b, w)) == "(o,b,x,o)");
    CHECK(encode_sample(b, w) == (1 * 27 + 2 * 9 + 1) * 2 + 1);
    CHECK(window_space(without_corners()).size() == 2187);
    const std::size_t bad[] = {9};
    CHECK_THROWS(window_space(bad));
}

TEST_CASE("inject_noise") {
    const auto& c = endgame_corpus();
    Rng r0(5, 0);
    CHECK(inject_noise(c, 0.0, 0.0, 0.0, r0) == std::vector<Board>(c.begin(), c.end()));

    Rng r1(5, 1);
    const auto flipped = inject_noise(c, 0.0, 1.0, 0.0, r1);
    for (std::size_t i = 0; i < c.size(); ++i) {
        CHECK(flipped[i].x_wins == false);
        CHECK(flipped[i].cells == c[i].cells);
    }

    // Label and cell flip frequencies over 10^5 draws.
    const std::size_t n = 100000;
    std::vector<Board> boards(n);
    for (std::size_t i = 0; i < n; ++i) {
        boards[i].cells = {'x', 'o', 'b', 'x', 'o', 'b', 'x', 'o', 'b'};
        boards[i].x_wins = i % 2 == 0;
    }
    Rng r2(11, 0);
    const double rm = 0.1, rp = 0.3, eta = 0.2;
    const auto noisy = inject_noise(boards, rm, rp, eta, r2);
    std::size_t pos_flips = 0, neg_flips = 0, cell_flips = 0, to_each[3][3] = {};
    for (std::size_t i = 0; i < n; ++i) {
        if (boards[i].x_wins && !noisy[i].x_wins) ++pos_flips;
        if (!boards[i].x_wins && noisy[i].x_wins) ++neg_flips;
        const char a = boards[i].cells[0], b = noisy[i].cells[0];
        if (a != b) ++cell_flips;
        for (std::size_t k = 0; k < 3; ++k) ++to_each[symbol_index(boards[i].cells[k])][symbol_index(noisy[i].cells[k])];
    }
    CHECK(within_three_sigma(pos_flips, n / 2, rp));
    CHECK(within_three_sigma(neg_flips, n / 2, rm));
    CHECK(within_three_sigma(cell_flips, n, eta));
    // The injector realizes the symbol_noise kernel cell by cell.
    const auto k = symbol_noise(cell_space(), eta).kernel();
    for (int s = 0; s < 3; ++s)
        for (int t = 0; t < 3; ++t) CHECK(within_three_sigma(to_each[s][t], n, k(s, t)));
    Rng r3(1, 1);
    CHECK_THROWS(inject_noise(boards, -0.1, 0.0, 0.0, r3));
}

TEST_CASE("ingest_csv") {
    const auto dir = temp_dir("ingest");
    SUBCASE("binary feature and label") {
        const auto p = write_file(dir / "a.csv", "f,y\n0,yes\n1,no\n0,no\n1,yes\n");
        const auto d = ingest_csv(p.string(), {{{"f"}}, "y", "yes"});
        CHECK(d.rows() == 4);
        CHECK(d.space.size() == 4);
        CHECK(d.samples(std::vector<std::size_t>{0, 1, 2, 3}) == std::vector<std::size_t>{1, 2, 0, 3});
        CHECK(d.warnings.empty());
    }
    SUBCASE("numeric column with quantile bins") {
        std::string text = "v,y\n";
        for (int i = 1; i <= 40; ++i) text += std::to_string(i) + "," + (i % 3 ? "a" : "b") + "\n";
        const auto p = write_file(dir / "n.csv", text);
        CsvSchema s{{{"v", ColumnSpec::Kind::Numeric, 8}}, "y", "b"};
        const auto d = ingest_csv(p.string(), s);
        REQUIRE(d.features.size() == 8);
        CHECK(d.features.factor(0).element(0) == "b1");
        CHECK(d.features.factor(0).element(7) == "b8");
        std::vector<std::size_t> counts(8, 0);
        for (auto f : d.feature_index) ++counts[f];
        for (auto c : counts) CHECK(c == 5);
        // Edges from the first ten rows only; later rows land in the top bin.
        std::vector<std::size_t> train(10);
        std::iota(train.begin(), train.end(), std::size_t{0});
        const auto t = ingest_csv(p.string(), s, train);
        CHECK(t.bin_edges[0].back() <= 10.0);
        CHECK(t.feature_index[39] == 7);
    }
    SUBCASE("missing label column") {
        const auto p = write_file(dir / "m.csv", "f,g\n0,1\n");
        CHECK_THROWS(ingest_csv(p.string(), {{{"f"}}, "y", "1"}));
        CHECK_THROWS(ingest_csv(p.string(), {{{"h"}}, "g", "1"}));
    }
    SUBCASE("unknown category at test time") {
        const auto p = write_file(dir / "u.csv", "c,y\nred,+\nred,-\nblue,+\ngreen,-\n");
        const std::size_t train[] = {0, 1, 2};
        const auto d = ingest_csv(p.string(), {{{"c"}}, "y", "+"}, train);
        CHECK(d.features.size() == 2);
        CHECK(d.features.element(d.feature_index[3]) == "(red)");
        CHECK(d.warnings.size() == 1);
    }
    SUBCASE("headerless file with names") {
        const auto p = write_file(dir / "h.csv", "x,o,positive\no,o,negative\n");
        CsvSchema s{{{"a"}, {"b"}}, "cls", "positive", false, {"a", "b", "cls"}};
        const auto d = ingest_csv(p.string(), s);
        CHECK(d.rows() == 2);
        CHECK(d.label_index == std::vector<std::size_t>{1, 0});
        CHECK(d.features.factor_count() == 2);
    }
    SUBCASE("large products fall back to observed tuples") {
        const auto p = write_file(dir / "l.csv", "a,b,y\n1,2,t\n3,4,f\n1,2,f\n");
        CsvSchema s{{{"a"}, {"b"}}, "y", "t"};
        s.max_product = 3;
        const auto d = ingest_csv(p.string(), s);
        CHECK(d.features.size() == 2);
        REQUIRE(d.embedding);
        CHECK(d.embedding->rows() == 2);
        CHECK(d.embedding->cols() == 4);
        CHECK(d.embedding->row(0).sum() == 2.0);
        CHECK(d.feature_index == std::vector<std::size_t>{0, 1, 0});
    }
    SUBCASE("quoted fields") {
        const auto p = write_file(dir / "q.csv", "c,y\n\"a,b\",1\n\"say \"\"hi\"\"\",0\n");
        const auto t = read_csv(p.string(), true);
        CHECK(t.rows[0][0] == "a,b");
        CHECK(t.rows[1][0] == "say \"hi\"");
    }
}

TEST_CASE("quantile edges") {
    CHECK(quantile_edges({1, 2, 3, 4, 5, 6, 7, 8, 9}, 4) == std::vector<double>{3, 5, 7});
    CHECK(quantile_edges({4, 1, 3, 2}, 2) == std::vector<double>{2.5});
    const std::vector<double> e{3, 5, 7};
    CHECK(bin_of(1, e) == 0);
    CHECK(bin_of(3, e) == 0);
    CHECK(bin_of(3.5, e) == 1);
    CHECK(bin_of(100, e) == 3);
}

TEST_CASE("select_lambda") {
    const std::vector<double> one{0.3};
    CHECK(select_lambda(one, [](double) { return 0.5; }).lambda == 0.3);
    const std::vector<double> grid{1.0, 0.01, 0.1};
    CHECK(select_lambda(grid, [](double) { return 0.7; }).lambda == 0.01);
    const auto c = select_lambda(grid, [](double l) { return l == 0.1 ? 0.9 : 0.2; });
    CHECK(c.lambda == 0.1);
    CHECK(c.validation_accuracy.size() == 3);
    CHECK(std::find(grid.begin(), grid.end(), select_lambda(grid, [](double l) { return -l; }).lambda) != grid.end());
    CHECK_THROWS(select_lambda(std::vector<double>{}, [](double) { return 0.0; }));
    CHECK_THROWS(select_lambda(std::vector<double>{0.0}, [](double) { return 0.0; }));
}

TEST_CASE("fingerprint and tables") {
    const auto a = nlohmann::json::parse(R"({"b": 1, "a": [1, 2]})");
    const auto b = nlohmann::json::parse(R"({"a": [1, 2], "b": 1})");
    const auto c = nlohmann::json::parse(R"({"a": [1, 2], "b": 2})");
    CHECK(fingerprint(a) == fingerprint(b));
    CHECK(fingerprint(a) != fingerprint(c));
    CHECK(fingerprint_hex(a).size() == 16);
    CHECK(format_number(0.1) == "0.1");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);

    const auto dir = temp_dir("table");
    write_table(dir / "t.csv", {{"x", "y"}, {{"1", "2"}}}, a);
    CHECK(slurp(dir / "t.csv") == "# fingerprint " + fingerprint_hex(a) + "\nx,y\n1,2\n");
    CHECK_THROWS(write_table(dir / "bad.csv", {{"x", "y"}, {{"1"}}}, a));
}

TEST_CASE("parallel_for") {
    std::vector<std::size_t> out(100, 0);
    parallel_for(100, 4, [&](std::size_t i) { out[i] = i * i; });
    for (std::size_t i = 0; i < 100; ++i) CHECK(out[i] == i * i);
    CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                        if (i == 7) throw std::runtime_error("boom");
                    }),
                    std::runtime_error);
    parallel_for(0, 2, [](std::size_t) { FAIL("no tasks expected"); });
}

TEST_CASE("summaries and paired intervals") {
    const std::vector<RunRecord> runs{{"a", 0, 0, 0.5, 0}, {"a", 0, 1, 0.7, 0}, {"b", 0, 0, 0.2, 0}};
    const auto s = summarize(runs);
    REQUIRE(s.size() == 2);
    CHECK(s[0].mean == doctest::Approx(0.6));
    CHECK(s[0].stddev == doctest::Approx(std::sqrt(0.02)));
    CHECK(s[1].stddev == 0.0);

    const std::vector<double> x{3, 4, 5}, y{2, 2, 2};
    const auto ci = paired_interval(x, y);
    // t(0.975, 2) = 4.302652729749464; sd of differences = 1
    const double half = 4.302652729749464 / std::sqrt(3.0);
    CHECK(ci.mean == doctest::Approx(2.0));
    CHECK(ci.lower == doctest::Approx(2.0 - half).epsilon(1e-12));
    CHECK(ci.upper == doctest::Approx(2.0 + half).epsilon(1e-12));
    CHECK_THROWS(paired_interval(std::vector<double>{1}, std::vector<double>{1}));
}

TEST_CASE("make_statistic") {
    const auto z = test_space(window_space(middle_column()), binary_labels());
    CHECK(make_statistic("indicator", z).dim() == z.size());
    CHECK(make_statistic("one-hot-affine", z).dim() == 2 * (1 + 9));
    CHECK(make_statistic("one-hot-affine", window_space(middle_column())).dim() == 1 + 9);
    CHECK_THROWS(make_statistic("quadratic", z));
}

TEST_CASE("noise sweep schema and the noiseless point") {
    NoiseSweepConfig c;
    c.grid = {0.0, 0.5};
    c.solve.seeds = {0, 1};
    const auto r = noise_sweep_experiment(c);
    CHECK(r.summary.size() == 6);
    for (const char* m : {"benchmark", "naive", "grrm"}) {
        CHECK(r.find(m, 0.5).reps == 2);
        CHECK(r.find(m, 0.0).mean == doctest::Approx(r.find("benchmark", 0.0).mean).epsilon(0.02));
    }
    for (const auto& run : r.runs) {
        CHECK(run.accuracy >= 0.0);
        CHECK(run.accuracy <= 1.0);
    }
    // The benchmark ignores noise, so it does not depend on the grid point.
    CHECK(r.accuracies("benchmark", 0.0) == r.accuracies("benchmark", 0.5));
}

TEST_CASE("experiments are byte-for-byte reproducible") {
    NoiseSweepConfig c;
    c.grid = {0.2};
    c.solve.seeds = {3, 4};
    const auto a = temp_dir("det_a"), b = temp_dir("det_b");
    write_result(noise_sweep_experiment(c), a);
    c.solve.threads = 2;
    write_result(noise_sweep_experiment(c), b);
    for (const char* f : {"noise_sweep.csv", "noise_sweep_runs.csv", "summary.json"}) {
        CHECK(slurp(a / f) == slurp(b / f));
        CHECK_FALSE(slurp(a / f).empty());
    }
    CHECK(slurp(a / "noise_sweep.csv").rfind("# fingerprint " + fingerprint_hex(c.to_json()), 0) == 0);
}

TEST_CASE("learning curve schema") {
    LearningCurveConfig c;
    c.base = 20;
    c.steps = {20};
    c.solve.seeds = {0, 1};
    const auto r = learning_curve_experiment(c);
    std::set<std::string> curves;
    for (const auto& s : r.summary) curves.insert(s.method);
    CHECK(curves.size() == 4);
    const auto left = r.accuracies("standard", 0.0);
    for (const char* m : {"noisy-labels", "domain-adaptation", "privileged"}) CHECK(r.accuracies(m, 0.0) == left);
    CHECK(r.find("privileged", 20.0).reps == 2);
    c.steps = {0};
    CHECK_THROWS(learning_curve_experiment(c));
}

TEST_CASE("benchmark on a small csv") {
    const auto dir = temp_dir("bench");
    std::string text = "a,b,y\n";
    Rng rng(9, 0);
    for (int i = 0; i < 200; ++i) {
        const int a = static_cast<int>(rng.below(3)), b = static_cast<int>(rng.below(2));
        const bool y = rng.bernoulli(a == 0 ? 0.9 : (a == 1 ? 0.4 : 0.2));
        text += std::to_string(a) + "," + std::to_string(b) + "," + (y ? "pos" : "neg") + "\n";
    }
    BenchmarkConfig c;
    c.data_path = write_file(dir / "d.csv", text).string();
    c.schema = {{{"a"}, {"b"}}, "y", "pos"};
    c.labeled_fraction = 0.1;
    c.solve.seeds = {0, 1, 2};
    const auto r = benchmark_experiment(c);
    for (const char* m : {"naive-erm", "grrm-noisy-labels", "supervised-erm", "grrm-semi-supervised"})
        CHECK(r.find(m, 0.0).reps == 3);
    CHECK(r.extra.contains("noisy_labels_gain"));
    CHECK(r.extra["noisy_labels_gain"]["ci95_lower"].get<double>() <= r.extra["noisy_labels_gain"]["ci95_upper"].get<double>());
    c.train_fraction = 1.0;
    CHECK_THROWS(benchmark_experiment(c));
}

TEST_CASE("config parsing") {
    CHECK(parse_lambda_grid("0.1") == std::vector<double>{0.1});
    CHECK(parse_lambda_grid("0.01,0.1,1") == std::vector<double>{0.01, 0.1, 1.0});
    CHECK_THROWS(parse_lambda_grid("0,1"));
    CHECK_THROWS(parse_lambda_grid("abc"));

    const auto s = solve_options_from_json(nlohmann::json::parse(R"({"reps": 3, "seed": 10, "norm": "sum-abs"})"));
    CHECK(s.seeds == std::vector<std::uint64_t>{10, 11, 12});
    CHECK(s.norm == NormKind::SumAbs);
    Overrides o;
    o.reps = 2;
    o.lambdas = std::vector<double>{0.5};
    const auto t = solve_options_from_json(nlohmann::json::object(), o);
    CHECK(t.seeds == std::vector<std::uint64_t>{0, 1});
    CHECK(t.lambdas == std::vector<double>{0.5});
    CHECK_THROWS(solve_options_from_json(nlohmann::json::parse(R"({"lambdas": [0.1, -1]})")));
    CHECK_THROWS(solve_options_from_json(nlohmann::json::parse(R"({"seeds": []})")));

    const auto dir = temp_dir("config");
    write_file(dir / "label.csv", "source,-1,+1\n-1,0.9,0.1\n+1,0.2,0.8\n");
    write_file(dir / "stat.csv", "element,t\n(a,-1),1\n(a,+1),2\n(b,-1),3\n(b,+1),4\n");
    const auto j = nlohmann::json::parse(R"J({
        "features": ["a", "b"],
        "lambda": 0.2,
        "triples": [
            {"kind": "standard", "samples": [0, 3, "(b,+1)"]},
            {"kind": "noisy-labels", "label_kernel": "label.csv", "samples": [1, 2]},
            {"kind": "noisy-labels", "rho_minus": 0.1, "rho_plus": 0.2, "samples": [0]},
            {"kind": "unlabeled", "samples": ["a", "b", 1]},
            {"kind": "coarse-labels", "superset": true, "samples": [0, 5]},
            {"kind": "trs-corrupted", "symbol_noise": 0.1, "samples": [0, 1]},
            {"kind": "combined", "rho_minus": 0.1, "rho_plus": 0.2, "symbol_noise": 0.1, "samples": [0, 1]}
        ]
    })J");
    const auto p = problem_from_json(j, dir);
    CHECK(p.scheme.size() == 7);
    CHECK(p.lambda == 0.2);
    CHECK(p.scheme.triples()[0].sample_count == 3);
    CHECK(p.scheme.triples()[1].train_to_bridge.kernel().rows() == 4);
    double w = 0.0;
    for (const auto& t : p.scheme.triples()) w += t.weight;
    CHECK(w == doctest::Approx(1.0));

    auto k = nlohmann::json::parse(R"({"features": ["a","b"], "statistic": "stat.csv", "weights": [1.0],
                                       "triples": [{"kind": "standard", "samples": [0, 3]}]})");
    const auto q = problem_from_json(k, dir);
    CHECK(q.statistics[0].values()(3, 0) == 4.0);
    k["triples"][0]["kind"] = "bogus";
    CHECK_THROWS(problem_from_json(k, dir));

    const auto f = nlohmann::json::parse(R"({"features": {"factors": [["p", "q"], ["u", "v"]]},
        "triples": [{"kind": "missing-feature", "missing": 1, "samples": [0, 3]},
                    {"kind": "privileged", "extended_features": {"factors": [["p", "q"], ["u", "v"], ["r", "s"]]},
                     "kept": [0, 1], "samples": [0, 15]}]})");
    const auto m = problem_from_json(f, dir);
    CHECK(m.scheme.triples()[0].bridge_space().size() == 4);
    CHECK(m.scheme.triples()[1].training_space().size() == 16);
}
