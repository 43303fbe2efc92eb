#include "hlcircle/singular_locus.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <chrono>

using namespace hlcircle;

namespace {

const std::vector<std::int64_t> kPrimes{101, 211, 401};

Form ternary() { return parse_form("1 2 0 0\n1 0 2 0\n-2 0 0 2"); }

}  // namespace

TEST(HessianCodim, Examples) {
    EXPECT_EQ(hessian_codim(ternary()).codim, 3);
    EXPECT_EQ(hessian_codim(ternary()).method, RankMethod::HessianExact);
    EXPECT_EQ(hessian_codim(parse_form("1 1 1 0")).codim, 2);
    EXPECT_EQ(hessian_codim(Form(4)).codim, 0);
    EXPECT_EQ(hessian_codim(Form(4)).method, RankMethod::ZeroForm);
    EXPECT_THROW(hessian_codim(parse_form("1 1 1 1")), std::invalid_argument);
    EXPECT_THROW(hessian_codim(parse_form("1 2 0\n1 1 0")), std::invalid_argument);
}

TEST(HessianCodim, RankDeficientExamples) {
    // (x1 + x2)^2 has rank 1; x1^2 - x2^2 + x3 x4 has rank 4
    EXPECT_EQ(hessian_codim(parse_form("1 2 0\n2 1 1\n1 0 2")).codim, 1);
    EXPECT_EQ(hessian_codim(parse_form("1 2 0 0 0\n-1 0 2 0 0\n1 0 0 1 1")).codim, 4);
}

TEST(FpSingularCount, Examples) {
    EXPECT_EQ(fp_singular_count(parse_form("1 1 1 1"), 5), 13);
    EXPECT_EQ(fp_singular_count(ternary(), 5), 1);
    EXPECT_EQ(fp_singular_count(Form(3), 5), 125);
    EXPECT_THROW(fp_singular_count(ternary(), 6), std::invalid_argument);
}

TEST(FpSingularCount, AgreesWithBruteForceOnRandomForms) {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + trial % 3;
        const int d = 2 + trial % 3;
        const Form f = test_support::random_homogeneous(rng, n, d, 4 + trial % 5, 4);
        for (std::int64_t p : {2, 3, 5, 7}) {
            const auto brute = test_support::brute_common_zeros(f.gradient(), n, p);
            EXPECT_EQ(fp_singular_count(f, p), brute) << f.to_string() << " p=" << p;
            EXPECT_GE(brute, 1);
        }
    }
}

TEST(FpSingularCount, ShardCountDoesNotChangeResult) {
    std::mt19937_64 rng(5);
    const Form f = test_support::random_homogeneous(rng, 4, 3, 6, 3);
    const BigInt one = fp_singular_count(f, 31, 1);
    EXPECT_EQ(fp_singular_count(f, 31, 4), one);
}

TEST(FpSingularCount, BudgetIsEnforced) {
    std::mt19937_64 rng(9);
    const Form f = test_support::random_homogeneous(rng, 6, 3, 30, 5);
    EXPECT_THROW(fp_singular_count(f, 101, 1, 1000), BudgetExceeded);
}

TEST(EstimateCodim, Examples) {
    const auto cubic = estimate_codim(parse_form("1 1 1 1"), kPrimes);
    EXPECT_EQ(cubic.codim, 2);
    for (std::size_t i = 0; i < kPrimes.size(); ++i) EXPECT_EQ(cubic.counts[i], 3 * kPrimes[i] - 2);
    EXPECT_TRUE(cubic.confident);

    const auto quad = estimate_codim(ternary(), kPrimes);
    EXPECT_EQ(quad.codim, 3);
    EXPECT_LT(quad.residual, 1e-12);

    const auto zero = estimate_codim(Form(3), kPrimes);
    EXPECT_EQ(zero.codim, 0);
    EXPECT_EQ(zero.method, RankMethod::ZeroForm);
    EXPECT_THROW(estimate_codim(ternary(), {101, 211}), std::invalid_argument);
}

TEST(EstimateCodim, QuadraticsMatchHessianRank) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 2 + trial % 5;
        Form f = test_support::random_homogeneous(rng, n, 2, 1 + trial % 7, 6);
        EXPECT_EQ(estimate_codim(f, kPrimes).codim, hessian_codim(f).codim) << f.to_string();
    }
}

TEST(EstimateCodim, AmbientIndependence) {
    const Form f = parse_form("1 1 1 1");
    const Form g = f.embed(1);
    const auto ef = estimate_codim(f, kPrimes), eg = estimate_codim(g, kPrimes);
    EXPECT_EQ(ef.codim, eg.codim);
    for (std::size_t i = 0; i < kPrimes.size(); ++i) EXPECT_EQ(eg.counts[i], ef.counts[i] * kPrimes[i]);
}

TEST(EstimateCodim, InvariantUnderUnitRescaling) {
    std::mt19937_64 rng(77);
    const std::vector<std::int64_t> primes{23, 29, 31};
    for (int trial = 0; trial < 4; ++trial) {
        const Form f = test_support::random_homogeneous(rng, 3, 3, 5, 3);
        const Form g = f.rescale({BigInt(2), BigInt(-3), BigInt(5)});
        EXPECT_EQ(estimate_codim(f, primes).codim, estimate_codim(g, primes).codim);
    }
}

TEST(Thresholds, Values) {
    EXPECT_EQ(c0_threshold(2, Rational(1, 12)), 769);
    EXPECT_EQ(c0_threshold(2, Rational(1, 2)), 129);
    EXPECT_EQ(codim_threshold(2), BigInt(597196800));
    EXPECT_EQ(codim_threshold(3), BigInt("22394880000"));
    EXPECT_EQ(Rational(codim_threshold(3), codim_threshold(2)), Rational(75, 2));
    EXPECT_THROW(c0_threshold(2, Rational(0)), std::invalid_argument);
    EXPECT_THROW(c0_threshold(2, Rational(1)), std::invalid_argument);
    EXPECT_THROW(codim_threshold(1), std::invalid_argument);
}

TEST(Thresholds, LeastIntegerAndMonotone) {
    for (int d = 2; d <= 6; ++d) {
        for (auto theta : {Rational(1, 12), Rational(1, 7), Rational(2, 3), Rational(1, 1000)}) {
            const BigInt v = c0_threshold(d, theta);
            const Rational bound = Rational(BigInt(8) * d * (d - 1) * (BigInt(1) << d)) / theta;
            EXPECT_LE(Rational(v - 1), bound);
            EXPECT_LT(bound, Rational(v));
        }
        EXPECT_LT(c0_threshold(d, Rational(1, 12)), c0_threshold(d + 1, Rational(1, 12)));
        EXPECT_LT(codim_threshold(d), codim_threshold(d + 1));
    }
}

TEST(RestrictionBounds, Examples) {
    const auto codim = slope_estimator();
    const Form diag = test_support::diagonal({1, 2, -3, 5}, 3);
    for (int s = 0; s <= 4; ++s) {
        const auto r = check_restriction_bounds(diag, s, codim);
        EXPECT_EQ(r.codim_full - r.codim_restricted, s);
        EXPECT_FALSE(r.flagged());
    }
    const auto r = check_restriction_bounds(parse_form("1 1 1"), 1, codim);
    EXPECT_EQ(r.codim_full, 2);
    EXPECT_EQ(r.codim_restricted, 0);
    EXPECT_FALSE(r.flagged());

    std::mt19937_64 rng(55);
    const auto fp = fp_only_estimator({23, 29, 31});
    for (int trial = 0; trial < 3; ++trial) {
        const Form cubic = test_support::random_homogeneous(rng, 3, 3, 6, 4);
        EXPECT_FALSE(check_restriction_bounds(cubic, 1, fp).flagged()) << cubic.to_string();
    }
}

TEST(Subadditivity, Examples) {
    const auto codim = slope_estimator();
    const auto diag = check_subadditivity(test_support::diagonal({1, 1, -2, 3}, 3), {0, 1}, {2, 3}, codim);
    EXPECT_EQ(diag.codim_g, 0);
    EXPECT_EQ(diag.codim_f, diag.codim_fu + diag.codim_fv);
    EXPECT_TRUE(diag.holds);

    const auto bil = check_subadditivity(test_support::bilinear(3), {0, 1, 2}, {3, 4, 5}, codim);
    EXPECT_EQ(bil.codim_fu, 0);
    EXPECT_EQ(bil.codim_fv, 0);
    EXPECT_EQ(bil.codim_g, 6);
    EXPECT_TRUE(bil.holds);

    std::mt19937_64 rng(91);
    for (int trial = 0; trial < 20; ++trial) {
        const Form q = test_support::random_homogeneous(rng, 5, 2, 8, 5);
        const auto r = check_subadditivity(q, {0, 3}, {1, 2, 4}, codim);
        EXPECT_TRUE(r.holds) << q.to_string();
    }
    EXPECT_THROW(check_subadditivity(ternary(), {0}, {1}, codim), std::invalid_argument);
}

TEST(Dichotomy, DiagonalIsCaseII) {
    const auto codim = slope_estimator();
    const auto v = dichotomy_classify(test_support::diagonal({1, 2, 3, -4}, 3), 0, {}, codim);
    EXPECT_EQ(v.verdict, DichotomyCase::II);
    EXPECT_FALSE(v.witness);
    EXPECT_EQ(v.max_codim_g, 0);
    // canonical (u, v, w) labellings: (3^4 - 2*2^4 + 1) / 2
    EXPECT_EQ(v.partitions_scanned, 25u);
}

TEST(Dichotomy, BilinearIsCaseI) {
    const auto codim = slope_estimator();
    const auto v = dichotomy_classify(test_support::bilinear(2), 3, {}, codim);
    ASSERT_EQ(v.verdict, DichotomyCase::I);
    ASSERT_TRUE(v.witness);
    EXPECT_EQ(v.witness->codim_g, 4);
    EXPECT_TRUE(v.witness->w.empty());
    EXPECT_EQ(dichotomy_classify(test_support::bilinear(2), 4, {}, codim).verdict, DichotomyCase::II);
}

TEST(Dichotomy, RandomizedMatchesExhaustiveOnDenseCubic) {
    std::mt19937_64 rng(606);
    const Form f = test_support::random_homogeneous(rng, 6, 3, 40, 5);
    const auto codim = fp_only_estimator({11, 13, 17});
    const auto exhaustive = dichotomy_classify(f, 3, {}, codim);
    PartitionPolicy random{PartitionPolicy::Kind::Randomized, 400, 42};
    const auto sampled = dichotomy_classify(f, 3, random, codim);
    EXPECT_EQ(sampled.verdict, exhaustive.verdict);
    EXPECT_NE(sampled.family.find("seed=42"), std::string::npos);
}

TEST(RankConcentration, Examples) {
    const auto codim = slope_estimator();
    const Form diag9 = test_support::diagonal({1, 2, 3, 4, 5, 6, 7, 8, -9}, 2);
    const auto equal = rank_concentration(diag9, VariablePartition::contiguous({3, 3, 3}), 0, codim);
    EXPECT_FALSE(equal.violation);
    EXPECT_EQ(equal.block_codims, (std::vector<int>{3, 3, 3}));
    EXPECT_EQ(equal.bound, 3);

    const auto unequal = rank_concentration(diag9, VariablePartition::contiguous({1, 3, 5}), 0, codim);
    EXPECT_EQ(unequal.block, 2u);
    EXPECT_FALSE(unequal.violation);

    const auto bil = rank_concentration(test_support::bilinear(3), VariablePartition::contiguous({3, 3}), 6, codim);
    EXPECT_LE(bil.bound, 0);
    EXPECT_FALSE(bil.violation);

    // bilinear with c0 below its cross rank: no block carries rank
    const auto tight = rank_concentration(test_support::bilinear(3), VariablePartition::contiguous({3, 3}), 0, codim);
    EXPECT_TRUE(tight.violation);
}

TEST(Bihomogeneous, HalfRankAndSymmetry) {
    const std::vector<std::int64_t> primes{7, 11, 13};
    for (const char* text : {"1 1 1", "1 2 0\n-1 0 2", "1 1 1 0\n1 0 0 2", "1 2 0 0\n1 0 2 0\n-2 0 0 2"}) {
        const Form f = parse_form(text);
        const int full = slope_estimator()(f);
        const auto g1 = bihomogeneous_partial_codim(f, 0, primes);
        const auto g2 = bihomogeneous_partial_codim(f, 1, primes);
        EXPECT_GE(2 * g1.codim, full) << text;
        EXPECT_EQ(g1.codim, g2.codim) << text;
        EXPECT_EQ(g1.counts, g2.counts) << text;
    }
}
