#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "canid/scm.hpp"

using namespace canid;

namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double var_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("constant model produces constant rows") {
    CausalGraph g({{"X", true}, {"Y", true}}, {{"X", "Y"}});
    // constants still carry their private noise term; scale it away
    std::vector<NoiseSpec> noises{{"nx", DistKind::Gaussian, 0, 1}, {"ny", DistKind::Gaussian, 0, 1}};
    std::vector<ExprPtr> eqs{sum({constant(1.0), scaled(0.0, noise(0))}),
                             sum({scaled(2.0, var(NodeId{0})), scaled(0.0, noise(1))})};
    ScmModel model(std::move(g), eqs, noises);
    const Dataset ds = sample(model, 25, 3);
    for (size_t r = 0; r < ds.rows(); ++r) {
        REQUIRE(ds.at(r, 0) == 1.0);
        REQUIRE(ds.at(r, 1) == 2.0);
    }
}

TEST_CASE("variance of a sum of unit gaussians") {
    CausalGraph g({{"X", true}, {"Y", true}}, {{"X", "Y"}});
    std::vector<NoiseSpec> noises{{"nx", DistKind::Gaussian, 0, 1}, {"ny", DistKind::Gaussian, 0, 1}};
    std::vector<ExprPtr> eqs{noise(0), sum({var(NodeId{0}), noise(1)})};
    ScmModel model(std::move(g), eqs, noises);
    const Dataset ds = sample(model, 100000, 7);
    const double v = var_of(ds.column("Y"));
    REQUIRE(v == Catch::Approx(2.0).epsilon(0.05));
}

TEST_CASE("sampling is deterministic and thread-count independent") {
    CausalGraph g({{"X", true}, {"Y", true}}, {{"X", "Y"}});
    std::vector<NoiseSpec> noises{{"nx", DistKind::Gaussian, 0, 1}, {"ny", DistKind::Uniform, -1, 1}};
    std::vector<ExprPtr> eqs{noise(0), sum({unary(UnaryKind::Tanh, var(NodeId{0})), noise(1)})};
    ScmModel model(std::move(g), eqs, noises);
    const Dataset a = sample(model, 500, 42, 1);
    const Dataset b = sample(model, 500, 42, 4);
    for (size_t r = 0; r < a.rows(); ++r)
        for (size_t c = 0; c < a.cols(); ++c) REQUIRE(a.at(r, c) == b.at(r, c));
    const Dataset c = sample(model, 500, 43, 1);
    bool any_diff = false;
    for (size_t r = 0; r < c.rows(); ++r)
        if (c.at(r, 0) != a.at(r, 0)) any_diff = true;
    REQUIRE(any_diff);
}

TEST_CASE("non-finite evaluation reports the node") {
    CausalGraph g({{"X", true}, {"Y", true}}, {{"X", "Y"}});
    std::vector<NoiseSpec> noises{{"nx", DistKind::Gaussian, 0, 1}, {"ny", DistKind::Gaussian, 0, 1}};
    std::vector<ExprPtr> eqs{
        noise(0),
        sum({unary(UnaryKind::Exp, unary(UnaryKind::Square, scaled(100.0, var(NodeId{0})))), noise(1)})};
    ScmModel model(std::move(g), eqs, noises);
    REQUIRE_THROWS_WITH(sample(model, 200, 5), Catch::Matchers::ContainsSubstring("Y"));
}

TEST_CASE("model validation rejects structural mistakes") {
    std::vector<NoiseSpec> noises{{"nx", DistKind::Gaussian, 0, 1}, {"ny", DistKind::Gaussian, 0, 1}};

    SECTION("equation referencing a non-parent") {
        CausalGraph g2({{"X", true}, {"Y", true}}, {});
        std::vector<ExprPtr> eqs{noise(0), sum({var(NodeId{0}), noise(1)})};
        REQUIRE_THROWS_AS(ScmModel(std::move(g2), eqs, noises), std::invalid_argument);
    }
    SECTION("shared noise term") {
        CausalGraph g({{"X", true}, {"Y", true}}, {{"X", "Y"}});
        std::vector<ExprPtr> eqs{noise(0), sum({var(NodeId{0}), noise(0)})};
        REQUIRE_THROWS_AS(ScmModel(std::move(g), eqs, noises), std::invalid_argument);
    }
    SECTION("equation with two distinct noises") {
        CausalGraph g({{"X", true}, {"Y", true}}, {{"X", "Y"}});
        std::vector<ExprPtr> eqs{noise(0), sum({var(NodeId{0}), noise(0), noise(1)})};
        REQUIRE_THROWS_AS(ScmModel(std::move(g), eqs, noises), std::invalid_argument);
    }
    SECTION("invalid noise parameters") {
        CausalGraph g({{"X", true}}, {});
        std::vector<NoiseSpec> bad{{"nx", DistKind::Gaussian, 0, -1}};
        std::vector<ExprPtr> eqs{noise(0)};
        REQUIRE_THROWS_AS(ScmModel(std::move(g), eqs, bad), std::invalid_argument);
    }
    SECTION("n must be positive") {
        CausalGraph g({{"X", true}}, {});
        std::vector<NoiseSpec> one{{"nx", DistKind::Gaussian, 0, 1}};
        std::vector<ExprPtr> eqs{noise(0)};
        ScmModel model(std::move(g), eqs, one);
        REQUIRE_THROWS_AS(sample(model, 0, 1), std::invalid_argument);
    }
}

TEST_CASE("noise distributions match their closed-form moments") {
    CausalGraph g({{"A", true}, {"B", true}, {"C", true}}, {});
    std::vector<NoiseSpec> noises{{"na", DistKind::Gaussian, 0.5, 2.0},
                                  {"nb", DistKind::Uniform, -1.0, 3.0},
                                  {"nc", DistKind::Laplace, 1.0, 0.7}};
    std::vector<ExprPtr> eqs{noise(0), noise(1), noise(2)};
    ScmModel model(std::move(g), eqs, noises);
    const Dataset ds = sample(model, 200000, 11);
    for (size_t c = 0; c < 3; ++c) {
        const auto col = ds.column(c);
        REQUIRE(mean_of(col) == Catch::Approx(noises[c].mean()).margin(0.03));
        REQUIRE(var_of(col) == Catch::Approx(noises[c].variance()).epsilon(0.05));
    }
}

TEST_CASE("expression evaluation covers every node kind") {
    // X = nx; helper checks (tanh, exp, sq, cube, abs, products)
    std::vector<double> node_vals{0.5};
    std::vector<double> noise_vals{2.0};
    const auto e = sum({scaled(3.0, var(NodeId{0})), unary(UnaryKind::Abs, constant(-2.0)),
                        product({var(NodeId{0}), noise(0)}), unary(UnaryKind::Cube, constant(2.0))});
    // 1.5 + 2 + 1 + 8
    REQUIRE(eval(*e, node_vals, noise_vals) == Catch::Approx(12.5));
    REQUIRE(eval_unary(UnaryKind::Tanh, 0.0) == 0.0);
    REQUIRE(eval_unary(UnaryKind::Exp, 1.0) == Catch::Approx(std::exp(1.0)));
    REQUIRE(eval_unary(UnaryKind::Square, -3.0) == 9.0);
}

TEST_CASE("observed view drops hidden columns") {
    CausalGraph g({{"X", true}, {"U", false}}, {});
    std::vector<NoiseSpec> noises{{"nx", DistKind::Gaussian, 0, 1}, {"nu", DistKind::Gaussian, 0, 1}};
    std::vector<ExprPtr> eqs{noise(0), noise(1)};
    ScmModel model(std::move(g), eqs, noises);
    const Dataset full = sample(model, 60, 9);
    const Dataset obs = full.observed_view();
    REQUIRE(full.cols() == 2);
    REQUIRE(obs.cols() == 1);
    REQUIRE(obs.columns()[0].name == "X");
    for (size_t r = 0; r < obs.rows(); ++r) REQUIRE(obs.at(r, 0) == full.at(r, 0));
}
