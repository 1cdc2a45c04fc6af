#include "doctest.h"

#include "../support/oracles.hpp"
#include "grrm/finite_space.hpp"
#include "grrm/transition.hpp"

#include <random>
#include <sstream>

using namespace grrm;

namespace {

Distribution random_distribution(std::mt19937_64& rng, const FiniteSpace& s) {
    std::exponential_distribution<double> e(1.0);
    Eigen::VectorXd v(static_cast<Eigen::Index>(s.size()));
    for (auto& x : v) x = e(rng);
    return {s, v / v.sum()};
}

FiniteSpace ab_labels() { return product_space(make_space({"a", "b"}), binary_labels()); }

}  // namespace

TEST_CASE("spaces") {
    const auto labels = make_space({"-1", "+1"});
    CHECK(labels.size() == 2);
    CHECK(make_space({"a", "b", "c"}).index_of("c") == 2);
    CHECK_THROWS_AS(make_space({"a", "a"}), std::invalid_argument);
    CHECK_THROWS_AS(make_space({}), std::invalid_argument);

    const auto z = product_space(make_space({"a", "b"}), make_space({"-", "+"}));
    REQUIRE(z.size() == 4);
    CHECK(z.element(0) == "(a,-)");
    CHECK(z.element(1) == "(a,+)");
    CHECK(z.element(2) == "(b,-)");
    CHECK(z.element(3) == "(b,+)");
    CHECK(z.decompose(2) == std::vector<std::size_t>{1, 0});
    const std::size_t parts[] = {1, 1};
    CHECK(z.compose(parts) == 3);
    CHECK(product_space(make_space({"s"}), labels).size() == 2);
    CHECK(product_space(make_space({"a", "b", "c"}), labels).size() == 6);
}

TEST_CASE("empirical, marginal, conditional") {
    const auto z = product_space(make_space({"a", "b"}), make_space({"-", "+"}));
    const std::vector<std::string> samples{"(a,+)", "(a,+)", "(b,-)", "(a,-)"};
    const auto pe = empirical_distribution(std::span<const std::string>(samples), z);
    CHECK(pe[1] == 0.5);
    CHECK(pe[0] == 0.25);
    CHECK(pe[2] == 0.25);
    CHECK(pe[3] == 0.0);
    const std::vector<std::string> one{"(a,+)"};
    CHECK(empirical_distribution(std::span<const std::string>(one), z)[1] == 1.0);
    CHECK_THROWS(empirical_distribution(std::span<const std::string>(), z));
    const std::vector<std::string> bad{"(c,+)"};
    CHECK_THROWS(empirical_distribution(std::span<const std::string>(bad), z));

    const auto mx = marginal(pe, 0);
    CHECK(mx[0] == 0.75);
    CHECK(mx[1] == 0.25);
    CHECK(marginal(Distribution::point(z, 1), 1)[1] == 1.0);
    CHECK_THROWS(marginal(Distribution::uniform(make_space({"u", "v"})), 0));

    // projected samples give the same marginal exactly
    const std::vector<std::size_t> flat{1, 1, 2, 0};
    std::vector<std::size_t> xs;
    for (auto f : flat) xs.push_back(f / 2);
    const auto direct = empirical_distribution(std::span<const std::size_t>(xs), z.factor(0));
    CHECK(direct.mass() == marginal(empirical_distribution(std::span<const std::size_t>(flat), z), 0).mass());

    const Distribution q(z, Eigen::Vector4d(0.1, 0.4, 0.5, 0.0));
    const auto c = conditional(q, 1, 0);
    CHECK(c.kernel()(0, 0) == doctest::Approx(0.2));
    CHECK(c.kernel()(0, 1) == doctest::Approx(0.8));
    CHECK(c.kernel()(1, 0) == doctest::Approx(1.0));
    CHECK((apply(c, marginal(q, 0)).mass() - marginal(q, 1).mass()).norm() < 1e-15);

    const Distribution q0(z, Eigen::Vector4d(0.3, 0.7, 0.0, 0.0));
    const auto cu = conditional(q0, 1, 0);
    CHECK(cu.kernel()(1, 0) == 0.5);
    CHECK_THROWS(conditional(q0, 1, 0, ZeroMassRow::Fail));

    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 20; ++rep) {
        const auto r = random_distribution(rng, z);
        const auto k = conditional(r, 1, 0);
        const auto m = marginal(r, 0);
        for (std::size_t x = 0; x < 2; ++x)
            for (std::size_t y = 0; y < 2; ++y)
                CHECK(std::abs(m[x] * k.kernel()(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) -
                               r[x * 2 + y]) < 1e-15);
    }
}

TEST_CASE("distribution tolerances") {
    const auto s = make_space({"u", "v"});
    CHECK_THROWS(Distribution(s, Eigen::Vector2d(0.5, 0.6)));
    CHECK_THROWS(Distribution(s, Eigen::Vector2d(1.1, -0.1)));
    CHECK_NOTHROW(Distribution(s, Eigen::Vector2d(0.5, 0.5 + 1e-13)));
    CHECK_NOTHROW(SignedMeasure(s, Eigen::Vector2d(1.5, -0.5)));
    CHECK_THROWS(SignedMeasure(s, Eigen::Vector2d(1.5, -0.4)));
}

TEST_CASE("expected loss") {
    const auto z = ab_labels();
    // conditionals (0.8,0.2)/(0.3,0.7), marginal (0.5,0.5)
    const Distribution q(z, Eigen::Vector4d(0.4, 0.1, 0.15, 0.35));
    const auto loss = LossMatrix::zero_one(binary_labels());
    const std::size_t argmax_rule[] = {0, 1};
    CHECK(expected_loss(q, argmax_rule, loss) == doctest::Approx(0.25));
    const std::size_t constant[] = {1, 1};
    CHECK(expected_loss(q, constant, loss) == doctest::Approx(1.0 - 0.45));
    const Distribution det(z, Eigen::Vector4d(0.5, 0.0, 0.0, 0.5));
    CHECK(expected_loss(det, argmax_rule, loss) == 0.0);
    const std::size_t short_rule[] = {0};
    CHECK_THROWS(expected_loss(q, short_rule, loss));
}

TEST_CASE("transition construction") {
    const auto s = make_space({"u", "v"});
    Eigen::Matrix2d k;
    k << 0.9, 0.1, 0.3, 0.7;
    CHECK_NOTHROW(from_matrix(s, s, k));
    k << 1.1, -0.1, 0.5, 0.5;
    CHECK_THROWS(from_matrix(s, s, k));
    k << 0.5, 0.4, 0.5, 0.5;
    CHECK_THROWS(from_matrix(s, s, k));
    k << 0.5, 0.5 + 5e-10, 0.5, 0.5;
    const auto t = from_matrix(s, s, k);
    CHECK(std::abs(t.kernel().row(0).sum() - 1.0) < 1e-15);

    const auto i3 = identity(make_space({"a", "b", "c"}));
    CHECK(i3.kernel() == Eigen::Matrix3d::Identity());
}

TEST_CASE("apply and constructors") {
    const auto n = label_noise(0.1, 0.3);
    CHECK(n.kernel()(0, 0) == doctest::Approx(0.9));
    CHECK(n.kernel()(0, 1) == doctest::Approx(0.1));
    CHECK(n.kernel()(1, 0) == doctest::Approx(0.3));
    CHECK(n.kernel()(1, 1) == doctest::Approx(0.7));
    const auto r = apply(n, Distribution::point(binary_labels(), 1));
    CHECK(r[0] == doctest::Approx(0.3));
    CHECK(r[1] == doctest::Approx(0.7));
    CHECK(label_noise(0.0, 0.0).is_identity());
    CHECK_THROWS(label_noise(0.5, 0.5));
    CHECK_THROWS(label_noise(-0.1, 0.2));
    CHECK(std::abs(n.kernel().determinant() - 0.6) < 1e-15);

    const auto s3 = make_space({"a", "b", "c"});
    CHECK(symbol_noise(s3, 0.0).is_identity());
    const auto sn = symbol_noise(make_space({"0", "1"}), 0.2);
    CHECK(sn.kernel()(0, 1) == doctest::Approx(0.2));
    CHECK(sn.kernel()(1, 1) == doctest::Approx(0.8));
    CHECK(symbol_noise(s3, 0.3).kernel()(0, 2) == doctest::Approx(0.15));
    CHECK_THROWS(symbol_noise(s3, 1.5));

    const auto uni = from_matrix(s3, make_space({"p", "q"}), Eigen::MatrixXd::Constant(3, 2, 0.5));
    std::mt19937_64 rng(1);
    const auto q = random_distribution(rng, s3);
    CHECK(apply(uni, q)[0] == doctest::Approx(0.5));
    CHECK((apply(identity(s3), q).mass() - q.mass()).norm() == 0.0);
    CHECK_THROWS(apply(n, q));

    const std::size_t f[] = {0, 1, 2};
    CHECK(deterministic(s3, s3, f).is_identity());
    const auto c = deterministic(s3, s3, [](std::size_t) { return std::size_t{1}; });
    CHECK(c.kernel().col(1).sum() == 3.0);
    const std::size_t oob[] = {0, 1, 3};
    CHECK_THROWS(deterministic(s3, s3, oob));

    const auto sv = set_valued(s3, s3, {{1}, {0, 1, 2}, {0, 2}});
    CHECK(sv.kernel()(0, 1) == 1.0);
    CHECK(sv.kernel()(1, 2) == doctest::Approx(1.0 / 3.0));
    CHECK(sv.kernel()(2, 2) == 0.5);
    CHECK_THROWS(set_valued(s3, s3, {{1}, {}, {0}}));

    const auto z = ab_labels();
    const std::size_t keep[] = {0};
    const auto proj = projection(z, keep);
    CHECK(proj.target() == z.factor(0));
    CHECK(proj.kernel()(3, 1) == 1.0);
}

TEST_CASE("composition algebra") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> sz(1, 4);
    for (int rep = 0; rep < 50; ++rep) {
        const int a = sz(rng), b = sz(rng), c = sz(rng), d = sz(rng);
        auto mk = [](int n, const char* p) {
            std::vector<std::string> e;
            for (int i = 0; i < n; ++i) e.push_back(std::string(p) + std::to_string(i));
            return make_space(e);
        };
        const auto sa = mk(a, "a"), sb = mk(b, "b"), sc = mk(c, "c"), sd = mk(d, "d");
        const auto t1 = from_matrix(sa, sb, oracle::random_kernel(rng, a, b));
        const auto t2 = from_matrix(sb, sc, oracle::random_kernel(rng, b, c));
        const auto t3 = from_matrix(sc, sd, oracle::random_kernel(rng, c, d));
        const auto q = random_distribution(rng, sa);
        CHECK((apply(serial(t1, t2), q).mass() - apply(t2, apply(t1, q)).mass()).lpNorm<Eigen::Infinity>() < 1e-15);
        CHECK((serial(t1, identity(sb)).kernel() - t1.kernel()).lpNorm<Eigen::Infinity>() < 1e-15);
        CHECK((serial(identity(sa), t1).kernel() - t1.kernel()).lpNorm<Eigen::Infinity>() < 1e-15);
        CHECK_THROWS(serial(t1, t3));

        const auto p = parallel(t1, t3);
        CHECK(p.source() == product_space(sa, sc));
        CHECK((p.kernel() - oracle::kron(t1.kernel(), t3.kernel())).lpNorm<Eigen::Infinity>() < 1e-15);
        // product of distributions maps to the product of images
        const auto q2 = random_distribution(rng, sc);
        const Eigen::VectorXd prod = oracle::kron(q.mass(), q2.mass());
        const Eigen::VectorXd lhs = apply(p, Distribution(p.source(), prod)).mass();
        const Eigen::VectorXd rhs = oracle::kron(apply(t1, q).mass(), apply(t3, q2).mass());
        CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() < 1e-15);
        // associativity up to reindexing: ((t1⊗t3)⊗t2) and t1⊗(t3⊗t2) share the flat kernel
        CHECK((parallel(parallel(t1, t3), t2).kernel() - parallel(t1, parallel(t3, t2)).kernel())
                  .lpNorm<Eigen::Infinity>() < 1e-15);
    }
    CHECK(parallel(identity(make_space({"u", "v"})), identity(make_space({"p", "q", "r"}))).is_identity());

    const auto cell = make_space({"x", "o", "b"});
    const std::vector<Transition> four(4, symbol_noise(cell, 0.2));
    const auto board = parallel(std::span<const Transition>(four));
    CHECK(board.source().size() == 81);
    CHECK(board.source().factor_count() == 4);
    Eigen::MatrixXd expect = symbol_noise(cell, 0.2).kernel();
    for (int i = 0; i < 3; ++i) expect = oracle::kron(expect, symbol_noise(cell, 0.2).kernel());
    CHECK((board.kernel() - expect).lpNorm<Eigen::Infinity>() < 1e-15);
}

TEST_CASE("kernel csv round trip") {
    std::mt19937_64 rng(4);
    const auto s = make_space({"a", "b,c", "d"});
    const auto t = make_space({"u", "v"});
    const auto k = from_matrix(s, t, oracle::random_kernel(rng, 3, 2));
    std::stringstream io;
    write_kernel_csv(k, io);
    const auto back = read_kernel_csv(io, s, t);
    CHECK(back.kernel() == k.kernel());
    std::stringstream io2;
    write_kernel_csv(k, io2);
    const auto inferred = read_kernel_csv(io2);
    CHECK(inferred.source().elements() == s.elements());
    CHECK(inferred.kernel() == k.kernel());
}
