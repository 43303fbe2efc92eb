#include "hlcircle/analytic.hpp"
#include "test_support.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

using namespace hlcircle;

namespace {

Form quad3() { return parse_form("1 2 0 0\n1 0 2 0\n-2 0 0 2\n"); }

double gk(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 10, 1e-12);
}

}  // namespace

TEST(Weight, Examples) {
    const auto w = bump_weight(0.1, 3);
    EXPECT_DOUBLE_EQ(w(0.0), 1.0);
    EXPECT_NEAR(w(0.05), std::exp(1.0 - 4.0 / 3.0), 1e-15);
    EXPECT_GT(w(0.05), 0.0);
    EXPECT_EQ(w(0.1), 0.0);
    EXPECT_EQ(w(0.101), 0.0);
    EXPECT_EQ(w(-0.2), 0.0);
    EXPECT_THROW(bump_weight(0.0, 2), PreconditionError);
    EXPECT_THROW(bump_weight(0.26, 2), PreconditionError);
}

TEST(Weight, ClassMembership) {
    for (double delta : {0.05, 0.1, 0.25}) {
        const auto w = bump_weight(delta, 4);
        for (int i = 0; i <= 10'000; ++i) {
            const double t = -1.5 * delta + 3.0 * delta * i / 10'000;
            ASSERT_GE(w(t), 0.0);
            if (std::abs(t) >= delta) { ASSERT_EQ(w(t), 0.0); }
            if (std::abs(t) <= delta / 2) { ASSERT_GT(w(t), 0.0); }
            for (int k = 0; k <= 4; ++k) ASSERT_LE(std::abs(w.derivative(k, t)), w.c());
        }
    }
}

TEST(Weight, DerivativeFormulasMatchFiniteDifferences) {
    const auto w = bump_weight(0.2, 4);
    const double h = 1e-5;
    for (double t : {-0.15, -0.07, 0.0, 0.03, 0.11, 0.18}) {
        for (int k = 1; k <= 4; ++k) {
            const double fd = (w.derivative(k - 1, t + h) - w.derivative(k - 1, t - h)) / (2 * h);
            EXPECT_NEAR(w.derivative(k, t), fd, 1e-5 * std::max(1.0, std::abs(fd))) << k << " " << t;
        }
    }
}

TEST(Weight, MassMatchesAdaptiveQuadrature) {
    const auto w = bump_weight(0.1, 0);
    EXPECT_NEAR(w.mass(), gk([&](double t) { return w(t); }, -0.1, 0.1), 1e-12);
}

TEST(RealSolution, Examples) {
    const auto s = real_nonsingular_solution(quad3());
    ASSERT_TRUE(s.found);
    EXPECT_LE(std::abs(quad3().evaluate_real(s.x0)), 1e-12);
    EXPECT_GT(s.gradient_norm, 1e-6);

    const auto none = real_nonsingular_solution(parse_form("1 2 0 0\n1 0 2 0\n1 0 0 2\n"), {0.05, 200, 1, 1e-12, 1e-6});
    EXPECT_FALSE(none.found);
    EXPECT_FALSE(none.report.empty());

    const Form f = parse_form("1 1 1 0 0\n-1 0 0 1 1\n");
    const auto s2 = real_nonsingular_solution(f);
    ASSERT_TRUE(s2.found);
    for (double x : s2.x0) {
        EXPECT_GT(x, 0.05);
        EXPECT_LT(x, 0.95);
    }
    EXPECT_LE(std::abs(f.evaluate_real(s2.x0)), 1e-12);
    double g2 = 0;
    for (const auto& g : f.gradient()) g2 += std::pow(g.evaluate_real(s2.x0), 2);
    EXPECT_GT(std::sqrt(g2), 1e-6);
}

TEST(RealSolution, RandomStartsOnNonDiagonalForm) {
    const Form f = parse_form("3 3 0 0\n-1 0 3 0\n-1 0 0 3\n1 1 1 1\n");  // 3x^3 - y^3 - z^3 + xyz
    const auto s = real_nonsingular_solution(f, {0.05, 2000, 11, 1e-12, 1e-6});
    ASSERT_TRUE(s.found);
    EXPECT_LE(std::abs(f.evaluate_real(s.x0)), 1e-12);
}

TEST(Oscillatory, TauZeroIsProductOfMasses) {
    const auto w = bump_weight(0.1, 2);
    const std::vector<double> x0{0.5, 0.5, 0.5};
    const auto r = oscillatory_I(quad3(), w, x0, 0.0, TwistSpec::none(3));
    EXPECT_NEAR(r.value.real(), std::pow(w.mass(), 3), 1e-10 * std::pow(w.mass(), 3));
    EXPECT_NEAR(r.value.imag(), 0.0, 1e-15);
}

TEST(Oscillatory, TwistAtTauZeroMatchesOneDimensionalOracle) {
    const auto w = bump_weight(0.2, 2);
    const std::vector<double> x0{0.3, 0.5, 0.6};
    const TwistSpec tw{{-1.0, -0.5, -0.2}, {0, 0, 0}};
    double oracle = 1;
    for (int j = 0; j < 3; ++j)
        oracle *= gk([&](double x) { return w(x - x0[static_cast<std::size_t>(j)]) * std::pow(x, tw.r[static_cast<std::size_t>(j)]); },
                     x0[static_cast<std::size_t>(j)] - 0.2, x0[static_cast<std::size_t>(j)] + 0.2);
    // separable path
    EXPECT_NEAR(oscillatory_I(quad3(), w, x0, 0.0, tw).value.real(), oracle, 1e-10 * oracle);
    // tensor path on a non-separable form
    const Form mixed = parse_form("1 1 1 0\n-1 0 0 2\n");
    EXPECT_NEAR(oscillatory_I(mixed, w, x0, 0.0, tw).value.real(), oracle, 1e-10 * oracle);
}

TEST(Oscillatory, ConjugateSymmetry) {
    const auto w = bump_weight(0.1, 2);
    const std::vector<double> x0{0.5, 0.5, 0.5};
    for (double tau : {0.7, 3.0, 25.0}) {
        const auto a = oscillatory_I(quad3(), w, x0, tau, TwistSpec::none(3)).value;
        const auto b = oscillatory_I(quad3(), w, x0, -tau, TwistSpec::none(3)).value;
        EXPECT_NEAR(std::abs(a - std::conj(b)), 0.0, 1e-14);
    }
}

TEST(Oscillatory, TensorPathMatchesMidpointOracle) {
    const auto w = bump_weight(0.1, 2);
    const std::vector<double> x0{0.45, 0.5, 0.55};
    ASSERT_TRUE(is_separable(quad3()));
    const Form nonsep = parse_form("1 2 0 0\n1 0 2 0\n-2 0 0 2\n1 1 1 0\n");
    ASSERT_FALSE(is_separable(nonsep));
    QuadratureOptions q;
    for (double tau : {1.0, 5.0}) {
        const auto I = oscillatory_I(nonsep, w, x0, tau, TwistSpec::none(3), q);
        // oracle: midpoint rule on a 240^3 grid, exponentially accurate for a bump that is flat at its edges
        const int m = 240;
        ComplexSum acc;
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                for (int c = 0; c < m; ++c) {
                    const double x1 = x0[0] - 0.1 + 0.2 * (a + 0.5) / m, x2 = x0[1] - 0.1 + 0.2 * (b + 0.5) / m,
                                 x3 = x0[2] - 0.1 + 0.2 * (c + 0.5) / m;
                    const double F = x1 * x1 + x2 * x2 - 2 * x3 * x3 + x1 * x2;
                    acc.add(w(x1 - x0[0]) * w(x2 - x0[1]) * w(x3 - x0[2]) * e_of(tau * F));
                }
        const Complex oracle = acc.value() * std::pow(0.2 / m, 3);
        EXPECT_LT(std::abs(I.value - oracle), 1e-10) << tau;
    }
}

TEST(Oscillatory, PanelDoublingConverges) {
    const auto w = bump_weight(0.25, 2);
    const std::vector<double> x0{0.5, 0.5, 0.5};
    for (double tau : {1.0, 10.0, 100.0}) {
        const auto r = oscillatory_I(quad3(), w, x0, tau, TwistSpec::none(3));
        EXPECT_LT(r.error_estimate, 1e-6 * std::max(std::abs(r.value), 1e-6));
    }
}

TEST(Oscillatory, IllSetWindowRejected) {
    const auto w = bump_weight(0.25, 2);
    EXPECT_THROW(oscillatory_I(quad3(), w, {0.1, 0.5, 0.5}, 1.0, TwistSpec::none(3)), PreconditionError);
    EXPECT_THROW(oscillatory_I(quad3(), w, {0.5, 0.5, 0.5}, 1.0, TwistSpec{{0.5, 0, 0}, {0, 0, 0}}), PreconditionError);
}

TEST(Decay, ReportOnCorpusForm) {
    const auto w = bump_weight(0.1, 3);
    const std::vector<double> x0{0.5, 0.5, 0.5};
    const auto rep = decay_uniformity_report(quad3(), w, x0, {0.0, 1.0, 10.0, 100.0}, axis_t_grid(3, {10, -10, 100, -100}));
    EXPECT_EQ(rep.rows.size(), 4u * 13u);
    EXPECT_LE(rep.zero_row_max, rep.mass_bound * (1 + 1e-12));
    EXPECT_TRUE(rep.ok());
    // t = (100, 0, 0) against t = 0 at tau = 10: the twist does not push |I| above the untwisted
    // magnitude (it is in fact about 100 times smaller on this window)
    double a = 0, b = 0;
    for (const auto& r : rep.rows) {
        if (r.tau != 10.0) continue;
        if (r.t == std::vector<double>{0, 0, 0}) a = r.abs_value;
        if (r.t == std::vector<double>{100, 0, 0}) b = r.abs_value;
    }
    ASSERT_GT(a, 0);
    EXPECT_LT(b, 10 * a);
}

TEST(SingularIntegral, AgreesWithEpsilonDensity) {
    const std::vector<std::pair<Form, double>> cases{
        {quad3(), 0.1},
        {quad3(), 0.25},
        {parse_form("1 2 0 0 0\n1 0 2 0 0\n-1 0 0 2 0\n-1 0 0 0 2\n"), 0.1},
        {parse_form("1 3 0 0\n1 0 3 0\n-2 0 0 3\n"), 0.1},
    };
    for (const auto& [f, delta] : cases) {
        const auto w = bump_weight(delta, 2);
        const auto sol = real_nonsingular_solution(f);
        ASSERT_TRUE(sol.found);
        const auto si = singular_integral(f, w, sol.x0);
        const auto ed = epsilon_density(f, w, sol.x0, 0.01, 1'000'000, 3);
        EXPECT_GT(si.value, 0);
        EXPECT_LT(std::abs(si.value - ed.value) / si.value, 0.05) << f.to_string();
        EXPECT_LT(si.imag_residual, 1e-3 * si.value);
        // halving eps is consistent within two standard errors of the difference
        EXPECT_LT(std::abs(ed.value_half - ed.value), 2 * std::hypot(ed.std_error, ed.std_error_half));
    }
}

TEST(SingularIntegral, NoZerosGivesZero) {
    const Form f = parse_form("1 2 0 0\n1 0 2 0\n1 0 0 2\n");
    const auto w = bump_weight(0.1, 2);
    const std::vector<double> x0{0.5, 0.5, 0.5};
    const auto si = singular_integral(f, w, x0);
    EXPECT_LT(std::abs(si.value), 1e-8);
    const auto ed = epsilon_density(f, w, x0, 0.01, 100'000, 1);
    EXPECT_EQ(ed.value, 0.0);
}

TEST(EpsilonDensity, DeterministicAcrossThreadCounts) {
    const auto w = bump_weight(0.1, 2);
    const std::vector<double> x0{0.5, 0.5, 0.5};
    const auto a = epsilon_density(quad3(), w, x0, 0.01, 200'000, 9, 1);
    const auto b = epsilon_density(quad3(), w, x0, 0.01, 200'000, 9, 4);
    EXPECT_EQ(a.value, b.value);
    EXPECT_THROW(epsilon_density(quad3(), w, x0, 0.01, 0, 9), PreconditionError);
}
