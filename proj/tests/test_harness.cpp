#include "hlcircle/harness.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace hlcircle;
using test_support::corpus;

namespace {

std::vector<std::int64_t> primes_up_to(std::int64_t X) {
    std::vector<std::int64_t> out;
    for (std::int64_t p = 2; p <= X; ++p)
        if (is_prime(p)) out.push_back(p);
    return out;
}

// (x, Lambda(x)) for prime powers up to X by trial division
std::vector<std::pair<std::int64_t, double>> prime_powers_up_to(std::int64_t X) {
    std::vector<std::pair<std::int64_t, double>> out;
    for (std::int64_t x = 2; x <= X; ++x) {
        const auto fac = factorize(x);
        if (fac.size() == 1) out.push_back({x, std::log(static_cast<double>(fac[0].p))});
    }
    return out;
}

struct Brute {
    std::int64_t points = 0;
    double mass = 0;
};

// triple loop with exact evaluation
Brute brute3(const Form& f, const std::vector<std::pair<std::int64_t, double>>& vals) {
    Brute b;
    for (const auto& [x, wx] : vals)
        for (const auto& [y, wy] : vals)
            for (const auto& [z, wz] : vals)
                if (f.evaluate(std::vector<BigInt>{x, y, z}) == 0) {
                    ++b.points;
                    b.mass += wx * wy * wz;
                }
    return b;
}

// all n-tuples with exact evaluation
Brute brute_n(const Form& f, const std::vector<std::pair<std::int64_t, double>>& vals) {
    const int n = f.n_vars();
    Brute b;
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    std::vector<BigInt> x(static_cast<std::size_t>(n));
    for (;;) {
        double w = 1;
        for (int j = 0; j < n; ++j) {
            x[j] = vals[idx[j]].first;
            w *= vals[idx[j]].second;
        }
        if (f.evaluate(x) == 0) {
            ++b.points;
            b.mass += w;
        }
        int j = 0;
        while (j < n && ++idx[j] == vals.size()) idx[j++] = 0;
        if (j == n) break;
    }
    return b;
}

std::vector<std::pair<std::int64_t, double>> log_primes(std::int64_t X) {
    std::vector<std::pair<std::int64_t, double>> out;
    for (auto p : primes_up_to(X)) out.push_back({p, std::log(static_cast<double>(p))});
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

TEST(MajorArcs, Examples) {
    const auto dis = major_arcs(10'000, 2, Rational(1, 12));
    EXPECT_EQ(dis.Q, 2);
    ASSERT_EQ(dis.arcs.size(), 3u);
    EXPECT_EQ(dis.arcs[0].center, Rational(0));
    EXPECT_EQ(dis.arcs[1].center, Rational(1, 2));
    EXPECT_EQ(dis.arcs[2].center, Rational(1));
    EXPECT_TRUE(dis.disjoint);
    const double r = std::pow(1e4, 1.0 / 12 - 2);
    // phi(1) 2r / 1 + phi(2) 2r / 2, the q = 1 arc split over both ends
    EXPECT_NEAR(dis.total_measure, 3 * r, 1e-15);
    EXPECT_DOUBLE_EQ(dis.arcs[0].measure(), r);
    EXPECT_DOUBLE_EQ(dis.arcs[2].measure(), r);
}

TEST(MajorArcs, OverlapReported) {
    EXPECT_THROW(major_arcs(10, 2, Rational(9, 10)), ArcOverlap);
    const auto dis = major_arcs(10, 2, Rational(9, 10), true);
    EXPECT_FALSE(dis.disjoint);
    EXPECT_FALSE(dis.violation.empty());
    EXPECT_THROW(major_arcs(1, 2, Rational(1, 12)), PreconditionError);
    EXPECT_THROW(major_arcs(100, 2, Rational(1)), PreconditionError);
    EXPECT_THROW(major_arcs(100'000, 2, Rational(9, 10)), BudgetExceeded);
}

TEST(MajorArcs, InvariantsAndPairwiseOracle) {
    for (std::int64_t N : {10, 30, 100, 1000, 100000})
        for (const Rational& th : {Rational(1, 12), Rational(1, 4), Rational(1, 2), Rational(2, 3), Rational(9, 10)}) {
            if (std::pow(static_cast<double>(N), th.convert_to<double>()) > 40) continue;
            const auto dis = major_arcs(N, 2, th, true);
            const double Nt = std::pow(static_cast<double>(N), th.convert_to<double>());
            EXPECT_LE(static_cast<double>(dis.Q), Nt * (1 + 1e-12));
            EXPECT_GT(static_cast<double>(dis.Q + 1), Nt * (1 - 1e-12));
            bool any = false;
            for (std::size_t i = 0; i < dis.arcs.size(); ++i) {
                const auto& x = dis.arcs[i];
                EXPECT_EQ(gcd64(x.a, x.q), 1);
                EXPECT_LE(x.a, x.q);
                // all pairs in long double, away from ties
                for (std::size_t j = i + 1; j < dis.arcs.size(); ++j) {
                    const auto& y = dis.arcs[j];
                    const long double gap = std::abs(y.center.convert_to<long double>() - x.center.convert_to<long double>());
                    const long double reach = static_cast<long double>(dis.radius) * (1.0L / x.q + 1.0L / y.q);
                    if (gap <= reach) any = true;
                }
            }
            EXPECT_EQ(dis.disjoint, !any) << "N=" << N << " theta0=" << th;
        }
}

TEST(ArcMass, CorpusForm) {
    const Form f = corpus("quad3");
    const WindowedBox box(50, {0.5, 0.5, 0.5}, bump_weight(0.25, 2));
    const SieveTables tab(100);
    const auto dis = major_arcs(50, 2, Rational(1, 3));
    ASSERT_EQ(dis.Q, 3);
    const auto rep = arc_mass_report(f, box, tab, dis, 200, 7);
    EXPECT_LT(rep.minor_mean, rep.s0);
    double q1 = 0, other = 0;
    for (const auto& r : rep.rows) {
        if (r.q == 1) q1 += r.mass;  // the halves at 0 and 1 form one arc
        else other = std::max(other, r.mass);
    }
    EXPECT_GT(q1, other);
    EXPECT_NEAR(rep.minor_measure, 1 - dis.total_measure, 1e-15);
    const auto rep2 = arc_mass_report(f, box, tab, dis, 400, 7);
    EXPECT_LT(std::abs(rep2.minor_mean - rep.minor_mean), 2 * rep.minor_std_error);
    EXPECT_EQ(rep2.samples, 400u);
}

// ---------------------------------------------------------------------------

TEST(TruthCount, Quad3Example) {
    const Form f = corpus("quad3");
    const SieveTables tab(200);
    const auto t = truth_count(f, 100, tab, WeightMode::Primes);
    const auto ps = log_primes(100);
    ASSERT_EQ(ps.size(), 25u);
    const auto b = brute3(f, ps);
    EXPECT_EQ(t.points, b.points);
    EXPECT_GE(t.points, 27);  // 25 diagonal triples plus (7,17,13) and (17,7,13)
    EXPECT_EQ(f.evaluate(std::vector<BigInt>{7, 17, 13}), 0);
    const auto ls = truth_count(f, 100, tab, WeightMode::LambdaStar);
    EXPECT_NEAR(ls.mass, b.mass, 1e-9 * b.mass);
    EXPECT_EQ(ls.points, b.points);
}

TEST(TruthCount, MethodsAgreeWithBruteForce) {
    const SieveTables tab(100);
    const std::vector<Form> forms = {corpus("quad3"), corpus("mixed3"), corpus("cubic3"), corpus("triple"), corpus("quad4"),
                                     parse_form("1 2 1 0\n1 0 2 1\n-2 1 0 2")};  // not separable, no linear variable
    std::vector<std::string> methods;
    for (const auto& f : forms)
        for (auto mode : {WeightMode::Primes, WeightMode::LambdaStar, WeightMode::Lambda}) {
            const auto t = truth_count(f, 60, tab, mode);
            std::vector<std::pair<std::int64_t, double>> vals;
            if (mode == WeightMode::Lambda) vals = prime_powers_up_to(60);
            else
                for (auto p : primes_up_to(60)) vals.push_back({p, mode == WeightMode::Primes ? 1.0 : std::log(static_cast<double>(p))});
            const auto b = brute_n(f, vals);
            EXPECT_EQ(t.points, b.points) << f.to_string() << " via " << t.method;
            EXPECT_NEAR(t.mass, b.mass, 1e-9 * std::max(1.0, b.mass)) << f.to_string();
            methods.push_back(t.method);
        }
    for (const char* m : {"split", "solve-last", "generic"}) EXPECT_NE(std::find(methods.begin(), methods.end(), m), methods.end()) << m;
}

TEST(TruthCount, PositiveDefiniteAndOrdering) {
    const SieveTables tab(400);
    EXPECT_EQ(truth_count(corpus("sum2"), 400, tab, WeightMode::Lambda).points, 0);
    for (const char* name : {"quad3", "diff2", "mixed3"}) {
        const Form f = corpus(name);
        EXPECT_GE(truth_count(f, 200, tab, WeightMode::Lambda).mass, truth_count(f, 200, tab, WeightMode::LambdaStar).mass) << name;
    }
}

TEST(TruthCount, ThreadInvariance) {
    const SieveTables tab(400);
    for (const char* name : {"quad3", "mixed3"}) {
        const auto a = truth_count(corpus(name), 300, tab, WeightMode::LambdaStar, {1});
        const auto b = truth_count(corpus(name), 300, tab, WeightMode::LambdaStar, {4});
        EXPECT_EQ(a.points, b.points);
        EXPECT_EQ(a.mass, b.mass);
    }
}

TEST(TruthCount, WindowedMatchesBruteForce) {
    const Form f = corpus("quad3");
    const SieveTables tab(200);
    const WindowedBox box(150, {0.5, 0.5, 0.5}, bump_weight(0.2, 2));
    std::vector<std::pair<std::int64_t, double>> vals;
    for (auto p : primes_up_to(200))
        if (p >= box.lo(0) && p <= box.hi(0)) vals.push_back({p, 1.0});
    EXPECT_EQ(truth_count(f, box, tab, WeightMode::Primes, false).points, brute3(f, vals).points);
    // varpi-weighted mass by hand
    double m = 0;
    for (const auto& [x, wx] : vals)
        for (const auto& [y, wy] : vals)
            for (const auto& [z, wz] : vals)
                if (f.evaluate(std::vector<BigInt>{x, y, z}) == 0)
                    m += box.varpi_j(0, x) * box.varpi_j(1, y) * box.varpi_j(2, z) * std::log(double(x)) * std::log(double(y)) * std::log(double(z));
    EXPECT_NEAR(truth_count(f, box, tab, WeightMode::LambdaStar, true).mass, m, 1e-9 * m);
}

TEST(TruthCount, BudgetGuard) {
    const SieveTables tab(1000);
    TruthOptions o;
    o.budget = 1000;
    EXPECT_THROW(truth_count(corpus("mixed3"), 1000, tab, WeightMode::Primes, o), BudgetExceeded);
}

// ---------------------------------------------------------------------------

TEST(PrimePowerGap, Examples) {
    const SieveTables tab(200);
    const auto g = prime_power_gap(corpus("diff2"), 100, tab);
    double want = 0;
    for (const auto& [x, l] : prime_powers_up_to(100))
        if (!is_prime(x)) want += l * l;
    EXPECT_GT(g.gap, 0);
    EXPECT_NEAR(g.gap, want, 1e-9 * want);
    EXPECT_NEAR(g.bound_scale, std::pow(std::log(100.0), 2) * std::pow(100.0, -0.5), 1e-12);
    EXPECT_EQ(prime_power_gap(corpus("sum2"), 100, tab).gap, 0.0);
}

// ---------------------------------------------------------------------------

TEST(WMain, ScalingIdentity) {
    const SmoothWeight w = bump_weight(0.2, 2);
    for (const char* name : {"quad3", "mixed3"}) {
        const Form f = corpus(name);
        const std::vector<double> x0(3, 0.5);
        const double N = 200;
        const WindowedBox box(N, x0, w);
        QuadratureOptions q;
        q.order = 12;
        q.min_panels = 4;
        q.panels_per_oscillation = 1.0;
        q.estimate_error = false;
        const auto z = w_main(f, box, 0.0).value;
        EXPECT_NEAR(z.real(), std::pow(N * w.mass(), 3), 1e-10 * std::pow(N * w.mass(), 3)) << name;
        EXPECT_NEAR(z.imag(), 0.0, 1e-9);
        const double tau = 10.0 / (N * N);
        const Complex direct = w_main(f, box, tau, q).value;
        const Complex scaled = std::pow(N, 3) * oscillatory_I(f, w, x0, N * N * tau, TwistSpec::none(3), q).value;
        EXPECT_LT(std::abs(direct - scaled), 1e-6 * std::abs(scaled)) << name;
        const Complex neg = w_main(f, box, -tau, q).value;
        EXPECT_LT(std::abs(neg - std::conj(direct)), 1e-9 * std::abs(direct)) << name;
    }
}

TEST(MajorArcApprox, PrimeNumberTheoremAtZero) {
    const Form f = corpus("diff2");
    const SieveTables tab(10'000);
    const WindowedBox box(1e4, {0.5, 0.5}, bump_weight(0.1, 2));
    const auto row = major_arc_approx_check(f, box, tab, 1, 0, 0.0, {4});
    EXPECT_LT(row.rel_error, 0.10);
    // the q = 2 main term carries A(2, 1) = e(F(1, 1) / 2) = 1
    EXPECT_NEAR(std::abs(complete_sum(f, 2, 1) - Complex(1, 0)), 0.0, 1e-12);
    const auto r2 = major_arc_approx_check(f, box, tab, 2, 1, 0.0, {4});
    EXPECT_NEAR(std::abs(r2.main - row.main), 0.0, 1e-9 * std::abs(row.main));
}

TEST(MajorArcApprox, RelativeErrorGrowsTowardsArcEdge) {
    // the absolute error shrinks with |S| here; the relative error is what grows
    const Form f = corpus("diff2");
    const SieveTables tab(10'000);
    const double N = 1e4;
    const WindowedBox box(N, {0.5, 0.5}, bump_weight(0.1, 2));
    const double edge = std::pow(N, 1.0 / 12 - 2);
    double prev = 0;
    for (double frac : {0.0, 0.5, 1.0}) {
        const auto r = major_arc_approx_check(f, box, tab, 1, 0, frac * edge, {4});
        EXPECT_GT(r.rel_error, prev) << frac;
        prev = r.rel_error;
    }
}

TEST(MajorArcApprox, SmallDenominatorsWithinBand) {
    const SieveTables tab(5'000);
    for (const char* name : {"diff2", "mixed3"}) {
        const Form f = corpus(name);
        const WindowedBox box(5000, std::vector<double>(static_cast<std::size_t>(f.n_vars()), 0.5), bump_weight(0.1, 2));
        for (std::int64_t q = 1; q <= 3; ++q) {
            const auto r = major_arc_approx_check(f, box, tab, q, q == 1 ? 0 : 1, 0.0, {4});
            if (std::abs(r.main) < 1e-9 * std::abs(r.S)) continue;  // A(q, a) = 0
            EXPECT_LT(r.rel_error, 0.15) << name << " q=" << q;
        }
    }
}

TEST(MajorArcApprox, LowerEdgeGuard) {
    const SieveTables tab(100);
    const WindowedBox box(20, {0.5, 0.5}, bump_weight(0.25, 2));  // support starts at 6
    EXPECT_THROW(major_arc_approx_check(corpus("diff2"), box, tab, 7, 1, 0.0), PreconditionError);
    EXPECT_THROW(major_arc_approx_check(corpus("diff2"), box, tab, 4, 2, 0.0), PreconditionError);
}

// ---------------------------------------------------------------------------

namespace {

CompareOptions quick(double delta, std::vector<std::int64_t> X) {
    CompareOptions o;
    o.delta = delta;
    o.X = std::move(X);
    o.Q = 60;
    o.hensel_max_p = 13;
    return o;
}

}  // namespace

TEST(Compare, CsvShapeAndDeterminism) {
    const Form f = corpus("quad3");
    auto o = quick(0.25, {200, 400});
    const auto rep = predict_and_compare(f, o);
    std::ostringstream a, b;
    write_compare_csv(rep, a);
    o.threads = 3;
    write_compare_csv(predict_and_compare(f, o), b);
    EXPECT_EQ(a.str(), b.str());
    std::istringstream in(a.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "X,truth_primes,truth_lstar,truth_lambda,sigma_infty,series_Q,c,ratio,gap");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 8);
        EXPECT_EQ(line.find('e'), std::string::npos) << line;
    }
    EXPECT_EQ(rows, 2);
    ASSERT_TRUE(rep.rows[0].ratio.has_value());
    EXPECT_GT(rep.c, 0);
    EXPECT_FALSE(rep.obstructed);
    for (const auto& r : rep.rows) {
        EXPECT_GE(r.truth_primes, 0);
        EXPECT_GE(r.gap, 0);
        EXPECT_NEAR(r.c, r.sigma_infty * r.series_Q, 1e-15);
    }
}

TEST(Compare, RatioIsScaleFree) {
    const Form f = corpus("quad3");
    auto o = quick(0.25, {200, 300});
    const auto a = predict_and_compare(f, o);
    o.weight_scale = 2.0;
    const auto b = predict_and_compare(f, o);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        EXPECT_NEAR(*a.rows[i].ratio, *b.rows[i].ratio, 1e-12 * *a.rows[i].ratio);
        EXPECT_NEAR(a.rows[i].truth_lstar, b.rows[i].truth_lstar, 1e-12 * a.rows[i].truth_lstar);
    }
    EXPECT_NEAR(a.sigma_infty, b.sigma_infty, 1e-12 * a.sigma_infty);
}

TEST(Compare, NoRealZero) {
    auto o = quick(0.25, {200});
    o.x0 = std::vector<double>{0.5, 0.5};
    const auto rep = predict_and_compare(corpus("sum2"), o);
    EXPECT_EQ(rep.sigma_infty, 0.0);
    EXPECT_EQ(rep.c, 0.0);
    EXPECT_EQ(rep.rows[0].truth_primes, 0);
    EXPECT_EQ(rep.rows[0].truth_lstar, 0.0);
    EXPECT_FALSE(rep.rows[0].ratio.has_value());
    o.x0.reset();
    EXPECT_THROW(predict_and_compare(corpus("sum2"), o), PreconditionError);
}

TEST(Compare, ThreeAdicObstruction) {
    const auto rep = predict_and_compare(corpus("quad3_obstructed"), quick(0.2, {200}));
    EXPECT_TRUE(rep.obstructed);
    bool saw3 = false;
    for (const auto& v : rep.local)
        if (v.p == 3) {
            saw3 = true;
            EXPECT_EQ(v.hensel.status, LocalStatus::Obstruction);
            ASSERT_TRUE(v.sigma.has_value());
            EXPECT_EQ(*v.sigma, Rational(0));
        }
    EXPECT_TRUE(saw3);
    EXPECT_GT(rep.sigma_infty, 0);
    EXPECT_EQ(rep.c, 0.0);
    EXPECT_FALSE(rep.rows[0].ratio.has_value());
}

TEST(FormatDecimal, Examples) {
    EXPECT_EQ(format_decimal(0.0), "0");
    EXPECT_EQ(format_decimal(1.5), "1.5");
    EXPECT_EQ(format_decimal(-2.0), "-2");
    EXPECT_EQ(format_decimal(1234567.0), "1234567");
    EXPECT_EQ(format_decimal(0.000123456789012), "0.000123456789");
    EXPECT_EQ(format_decimal(1e-20).find('e'), std::string::npos);
}
