#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "canid/indep_tests.hpp"
#include "canid/presets.hpp"
#include "support/oracles.hpp"

using namespace canid;

namespace {

Dataset two_columns(const std::vector<double>& a, const std::vector<double>& b) {
    Dataset ds({{"A", true}, {"B", true}}, a.size(), 0);
    for (size_t i = 0; i < a.size(); ++i) {
        ds.at(i, 0) = a[i];
        ds.at(i, 1) = b[i];
    }
    return ds;
}

Dataset three_columns(const std::vector<double>& a, const std::vector<double>& b,
                      const std::vector<double>& c) {
    Dataset ds({{"A", true}, {"B", true}, {"C", true}}, a.size(), 0);
    for (size_t i = 0; i < a.size(); ++i) {
        ds.at(i, 0) = a[i];
        ds.at(i, 1) = b[i];
        ds.at(i, 2) = c[i];
    }
    return ds;
}

}  // namespace

TEST_CASE("identical columns give the smallest attainable p-value") {
    Rng rng(21);
    std::vector<double> a(300);
    for (auto& v : a) v = rng.normal();
    const Verdict v = hsic_perm_test(a, a, 199, 0.05, 7);
    REQUIRE(v.p_value == Catch::Approx(1.0 / 200.0));
    REQUIRE_FALSE(v.independent);
    REQUIRE(v.n_permutations == 199);
}

TEST_CASE("exhaustive enumeration matches the independent oracle at n=7") {
    Rng rng(22);
    for (int trial = 0; trial < 3; ++trial) {
        std::vector<double> a(7), b(7);
        for (auto& v : a) v = rng.normal();
        for (auto& v : b) v = rng.normal();
        const Verdict v = hsic_perm_test(a, b, 5039, 0.05, 99);  // 7! - 1
        REQUIRE(v.exhaustive);
        const double oracle_p = canid_test::hsic_exhaustive_pvalue(a, b);
        REQUIRE(v.p_value == Catch::Approx(oracle_p).margin(1e-12));
    }
}

TEST_CASE("p-value is exactly invariant under joint relabeling of rows") {
    Rng rng(23);
    const size_t n = 120;
    std::vector<double> a(n), b(n);
    for (size_t i = 0; i < n; ++i) {
        a[i] = rng.normal();
        b[i] = 0.4 * a[i] + rng.normal();
    }
    const Verdict base = hsic_perm_test(a, b, 199, 0.05, 11);
    std::vector<size_t> perm(n);
    for (size_t i = 0; i < n; ++i) perm[i] = (i * 31 + 5) % n;
    std::vector<double> ap(n), bp(n);
    for (size_t i = 0; i < n; ++i) {
        ap[i] = a[perm[i]];
        bp[i] = b[perm[i]];
    }
    const Verdict rel = hsic_perm_test(ap, bp, 199, 0.05, 11);
    REQUIRE(rel.p_value == base.p_value);
    REQUIRE(rel.statistic == base.statistic);
}

TEST_CASE("determinism: identical inputs and seed reproduce the verdict") {
    Rng rng(24);
    std::vector<double> a(200), b(200);
    for (size_t i = 0; i < 200; ++i) {
        a[i] = rng.normal();
        b[i] = rng.normal();
    }
    const Verdict v1 = hsic_perm_test(a, b, 199, 0.05, 5);
    const Verdict v2 = hsic_perm_test(a, b, 199, 0.05, 5);
    REQUIRE(v1.p_value == v2.p_value);
    REQUIRE(v1.statistic == v2.statistic);
    REQUIRE((v1.independent == (v1.p_value > v1.level)));
}

TEST_CASE("degenerate columns are errors, not verdicts") {
    Rng rng(25);
    std::vector<double> a(100), flat(100, 2.0);
    for (auto& v : a) v = rng.normal();
    REQUIRE_THROWS_AS(hsic_perm_test(a, flat, 199, 0.05, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(hsic_perm_test(flat, a, 199, 0.05, 1), std::invalid_argument);
    std::vector<double> short_a(10), short_b(10);
    REQUIRE_THROWS_AS(hsic_perm_test(short_a, {1.0}, 199, 0.05, 1), std::invalid_argument);
    for (size_t i = 0; i < 10; ++i) {
        short_a[i] = rng.normal();
        short_b[i] = rng.normal();
    }
    REQUIRE_THROWS_AS(hsic_perm_test(short_a, short_b, 9, 0.05, 1), std::invalid_argument);
}

TEST_CASE("hsic calibration smoke under independence") {
    Rng rng(26);
    int rejections = 0;
    const int trials = 120;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> a(150), b(150);
        for (size_t i = 0; i < 150; ++i) {
            a[i] = rng.normal();
            b[i] = rng.normal();
        }
        const Verdict v = hsic_perm_test(a, b, 99, 0.05, 1000 + static_cast<uint64_t>(t));
        if (!v.independent) ++rejections;
    }
    const double rate = static_cast<double>(rejections) / trials;
    REQUIRE(rate >= 0.005);
    REQUIRE(rate <= 0.12);
}

TEST_CASE("homoskedastic linear data accepts variance independence") {
    int ok = 0;
    for (uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(300 + seed);
        const size_t n = 2000;
        std::vector<double> x(n), y(n);
        for (size_t i = 0; i < n; ++i) {
            x[i] = rng.normal();
            y[i] = 2.0 * x[i] + rng.normal();
        }
        TestConfig cfg;
        cfg.level = 0.01;
        cfg.seed = seed;
        const Verdict v = cv_independence_test(two_columns(x, y), "B", "A", {}, cfg);
        if (v.independent) ++ok;
    }
    REQUIRE(ok >= 9);
}

TEST_CASE("multiplicative noise is detected as variance dependence") {
    int rejected = 0;
    for (uint64_t seed = 0; seed < 5; ++seed) {
        Rng rng(400 + seed);
        const size_t n = 2000;
        std::vector<double> x(n), y(n);
        for (size_t i = 0; i < n; ++i) {
            x[i] = rng.uniform(1, 3);
            y[i] = x[i] * rng.normal();
        }
        TestConfig cfg;
        cfg.level = 0.01;
        cfg.seed = seed;
        const Verdict v = cv_independence_test(two_columns(x, y), "B", "A", {}, cfg);
        if (!v.independent) ++rejected;
    }
    REQUIRE(rejected == 5);
}

TEST_CASE("nonlinear additive pair: forward separable, reverse not") {
    // y = x^3 + x + uniform noise
    int fwd_ok = 0, rev_dep = 0;
    for (uint64_t seed = 0; seed < 5; ++seed) {
        Rng rng(500 + seed);
        const size_t n = 2000;
        std::vector<double> x(n), y(n);
        for (size_t i = 0; i < n; ++i) {
            x[i] = rng.normal();
            y[i] = x[i] * x[i] * x[i] + x[i] + rng.uniform(-1, 1);
        }
        TestConfig cfg;
        cfg.level = 0.01;
        cfg.seed = seed;
        const Dataset ds = two_columns(x, y);
        if (nrr_independence_test(ds, "B", "A", {}, cfg).independent) ++fwd_ok;
        if (!nrr_independence_test(ds, "A", "B", {}, cfg).independent) ++rev_dep;
    }
    REQUIRE(fwd_ok >= 4);
    REQUIRE(rev_dep >= 4);
}

TEST_CASE("linear gaussian pair: residual independence in both directions") {
    int ok = 0;
    for (uint64_t seed = 0; seed < 5; ++seed) {
        Rng rng(600 + seed);
        const size_t n = 2000;
        std::vector<double> x(n), y(n);
        for (size_t i = 0; i < n; ++i) {
            x[i] = rng.normal();
            y[i] = 0.8 * x[i] + rng.normal();
        }
        TestConfig cfg;
        cfg.level = 0.01;
        cfg.seed = seed;
        const Dataset ds = two_columns(x, y);
        const bool fwd = nrr_independence_test(ds, "B", "A", {}, cfg).independent;
        const bool rev = nrr_independence_test(ds, "A", "B", {}, cfg).independent;
        if (fwd && rev) ++ok;
    }
    REQUIRE(ok >= 4);
}

TEST_CASE("self-dependence is rejected") {
    Rng rng(27);
    const size_t n = 600;
    std::vector<double> y(n);
    for (auto& v : y) v = rng.normal();
    TestConfig cfg;
    cfg.level = 0.01;
    cfg.seed = 3;
    const Dataset ds = two_columns(y, y);
    const Verdict v = nrr_independence_test(ds, "B", "A", {}, cfg);
    REQUIRE_FALSE(v.independent);
}

TEST_CASE("conditioning set errors") {
    Rng rng(28);
    const size_t n = 400;
    std::vector<double> x(n), y(n), z(n);
    for (size_t i = 0; i < n; ++i) {
        x[i] = rng.normal();
        z[i] = rng.normal();
        y[i] = x[i] + z[i] + rng.normal();
    }
    const Dataset ds = three_columns(x, y, z);
    TestConfig cfg;
    REQUIRE_THROWS_AS(cv_independence_test(ds, "B", "A", {"A"}, cfg), std::invalid_argument);
    REQUIRE_THROWS_AS(cv_independence_test(ds, "B", "A", {"Q"}, cfg), std::invalid_argument);

    // stratum floor: tiny sample with a conditioning set
    std::vector<double> sx(60), sy(60), sz(60);
    for (size_t i = 0; i < 60; ++i) {
        sx[i] = rng.normal();
        sz[i] = rng.normal();
        sy[i] = sx[i] + sz[i] + rng.normal();
    }
    TestConfig tight;
    tight.min_stratum = 40;
    tight.stratum_size = 50;
    REQUIRE_THROWS_WITH(cv_independence_test(three_columns(sx, sy, sz), "B", "A", {"C"}, tight),
                        Catch::Matchers::ContainsSubstring("larger sample"));
}

TEST_CASE("conditional null keeps its level under stratified permutation") {
    // y = x + z + noise, homoskedastic; x and z correlated
    int rejections = 0;
    const int trials = 60;
    for (int t = 0; t < trials; ++t) {
        Rng rng(700 + static_cast<uint64_t>(t));
        const size_t n = 800;
        std::vector<double> x(n), y(n), z(n);
        for (size_t i = 0; i < n; ++i) {
            z[i] = rng.normal();
            x[i] = 0.7 * z[i] + rng.normal();
            y[i] = x[i] + z[i] + rng.normal();
        }
        TestConfig cfg;
        cfg.level = 0.05;
        cfg.seed = static_cast<uint64_t>(t);
        const Verdict v = cv_independence_test(three_columns(x, y, z), "B", "A", {"C"}, cfg);
        if (!v.independent) ++rejections;
    }
    const double rate = static_cast<double>(rejections) / trials;
    REQUIRE(rate <= 0.15);
}

TEST_CASE("verdict invariants") {
    Rng rng(29);
    std::vector<double> a(150), b(150);
    for (size_t i = 0; i < 150; ++i) {
        a[i] = rng.normal();
        b[i] = rng.normal();
    }
    const Verdict v = hsic_perm_test(a, b, 199, 0.05, 9);
    REQUIRE(v.p_value >= 1.0 / 200.0);
    REQUIRE(v.p_value <= 1.0);
    const double grid = v.p_value * 200.0;
    REQUIRE(std::abs(grid - std::round(grid)) < 1e-9);
    REQUIRE(v.independent == (v.p_value > v.level));
}
