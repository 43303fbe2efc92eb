#pragma once

// Arc dissections, brute-force truth counts, the major-arc approximation and
// the end-to-end prediction report.

#include "hlcircle/analytic.hpp"
#include "hlcircle/arith.hpp"
#include "hlcircle/common.hpp"
#include "hlcircle/expsums.hpp"
#include "hlcircle/forms.hpp"
#include "hlcircle/local.hpp"
#include "hlcircle/weight.hpp"

#include <charconv>
#include <functional>
#include <optional>
#include <ostream>
#include <random>

namespace hlcircle {

// ---------------------------------------------------------------------------
// Major arcs |alpha - a/q| <= N^(theta0 - d) / q, q <= N^theta0.

struct MajorArc {
    std::int64_t q = 1;
    std::int64_t a = 0;
    Rational center;
    double lo = 0;  // offsets from the center; the arcs at 0 and 1 are halves
    double hi = 0;
    double measure() const { return hi - lo; }
};

struct ArcDissection {
    std::int64_t N = 0;
    int d = 0;
    Rational theta0;
    std::int64_t Q = 0;
    double radius = 0;  // N^(theta0 - d)
    std::vector<MajorArc> arcs;
    double total_measure = 0;
    bool disjoint = true;
    std::string violation;

    bool contains(double alpha) const {
        for (const auto& arc : arcs) {
            const double off = alpha - arc.center.convert_to<double>();
            if (off >= arc.lo && off <= arc.hi) return true;
        }
        return false;
    }
};

class ArcOverlap : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

namespace detail {

inline BigInt bigpow(const BigInt& b, unsigned e) {
    BigInt r = 1;
    for (unsigned i = 0; i < e; ++i) r *= b;
    return r;
}

inline unsigned small_exponent(const BigInt& v, const char* what) {
    if (v < 0 || v > 64) throw PreconditionError(std::string("major_arcs: ") + what + " of theta0 must be at most 64");
    return v.convert_to<unsigned>();
}

}  // namespace detail

// With allow_overlap unset an overlapping pair throws ArcOverlap naming it.
inline ArcDissection major_arcs(std::int64_t N, int d, const Rational& theta0, bool allow_overlap = false) {
    if (N < 2) throw PreconditionError("major_arcs: N must be at least 2");
    if (d < 1) throw PreconditionError("major_arcs: degree must be positive");
    if (!(theta0 > 0 && theta0 < 1)) throw PreconditionError("major_arcs: theta0 must lie in (0, 1)");
    const unsigned num = detail::small_exponent(numerator(theta0), "numerator");
    const unsigned den = detail::small_exponent(denominator(theta0), "denominator");
    ArcDissection out;
    out.N = N;
    out.d = d;
    out.theta0 = theta0;
    // Q = max q with q^den <= N^num
    const BigInt Nnum = detail::bigpow(N, num);
    auto q = static_cast<std::int64_t>(std::floor(std::pow(static_cast<double>(N), theta0.convert_to<double>())));
    while (q > 1 && detail::bigpow(q, den) > Nnum) --q;
    while (detail::bigpow(q + 1, den) <= Nnum) ++q;
    out.Q = std::max<std::int64_t>(q, 1);
    if (out.Q > 5000) throw BudgetExceeded("major_arcs: more than 5000 denominators");
    out.radius = std::pow(static_cast<double>(N), theta0.convert_to<double>() - d);
    for (std::int64_t qq = 1; qq <= out.Q; ++qq)
        for (std::int64_t a = 0; a <= qq; ++a) {
            if (gcd64(a, qq) != 1) continue;
            MajorArc arc;
            arc.q = qq;
            arc.a = a;
            arc.center = Rational(a, qq);
            const double r = out.radius / static_cast<double>(qq);
            arc.lo = a == 0 ? 0.0 : -r;
            arc.hi = a == qq ? 0.0 : r;
            out.arcs.push_back(arc);
        }
    std::sort(out.arcs.begin(), out.arcs.end(), [](const MajorArc& x, const MajorArc& y) { return x.center < y.center; });
    // Closed arcs a/q and b/s meet iff |as - bq| <= r (q + s), i.e.
    // (|as - bq| N^d)^den <= (q + s)^den N^num. An overlap anywhere forces one
    // between neighbours in center order, so neighbours suffice.
    const BigInt Nd = detail::bigpow(N, static_cast<unsigned>(d));
    for (std::size_t i = 0; i + 1 < out.arcs.size(); ++i) {
        const auto& x = out.arcs[i];
        const auto& y = out.arcs[i + 1];
        BigInt gap = BigInt(y.a) * x.q - BigInt(x.a) * y.q;
        if (gap < 0) gap = -gap;
        if (detail::bigpow(gap * Nd, den) <= detail::bigpow(BigInt(x.q + y.q), den) * Nnum) {
            out.disjoint = false;
            out.violation = std::to_string(x.a) + "/" + std::to_string(x.q) + " and " + std::to_string(y.a) + "/" + std::to_string(y.q);
            break;
        }
    }
    CompensatedSum<double> m;
    for (const auto& arc : out.arcs) m.add(arc.measure());
    out.total_measure = m.value();
    if (!out.disjoint && !allow_overlap)
        throw ArcOverlap("major_arcs: arcs " + out.violation + " overlap; N is too small for theta0");
    return out;
}

// ---------------------------------------------------------------------------
// Integrals of |S| over major arcs and a Monte Carlo estimate on the minor arcs.

struct ArcMassRow {
    std::int64_t q = 1;
    std::int64_t a = 0;
    double mass = 0;  // int over the arc of |S(alpha)|
};

struct ArcMassReport {
    std::vector<ArcMassRow> rows;
    double major_mass = 0;
    double minor_measure = 0;
    double minor_mean = 0;  // mean |S| over uniform minor-arc samples
    double minor_std_error = 0;
    double minor_mass = 0;  // minor_measure * minor_mean
    double s0 = 0;          // |S(0)|
    double ratio = 0;       // minor_mass / major_mass
    std::size_t samples = 0;
};

inline ArcMassReport arc_mass_report(const Form& f, const WindowedBox& box, const SieveTables& tab, const ArcDissection& dis,
                                     std::size_t minor_samples, std::uint64_t seed, const SumOptions& opt = {}, int order = 10) {
    if (f.n_vars() != box.n_vars()) throw PreconditionError("arc_mass_report: form and box dimensions differ");
    const auto sup = arithmetic_supports(box, tab, WeightMode::Lambda);
    auto S = [&](const Alpha& al) { return std::abs(detail::weighted_phase_sum(f, sup, al, opt.threads, opt.budget)); };
    ArcMassReport rep;
    rep.s0 = S(Alpha::fraction(0, 1));
    // cycles of e(alpha F) per unit alpha
    std::vector<double> lo, hi;
    for (int j = 0; j < box.n_vars(); ++j) {
        lo.push_back(static_cast<double>(box.lo(j)));
        hi.push_back(static_cast<double>(box.hi(j)));
    }
    const double freq = RealPolynomial(f).abs_bound(lo, hi);
    const auto rule = detail::gauss_rule(order);
    CompensatedSum<double> major;
    for (const auto& arc : dis.arcs) {
        const int panels = 1 + static_cast<int>(std::ceil(2.0 * arc.measure() * freq));
        std::vector<double> xs, ws;
        detail::composite_nodes(rule, arc.lo, arc.hi, panels, xs, ws);
        const long double c = arc.center.convert_to<long double>();
        CompensatedSum<double> m;
        for (std::size_t k = 0; k < xs.size(); ++k) m.add(ws[k] * S(Alpha::value(c + xs[k])));
        rep.rows.push_back({arc.q, arc.a, m.value()});
        major.add(m.value());
    }
    rep.major_mass = major.value();
    rep.minor_measure = 1.0 - dis.total_measure;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double s1 = 0, s2 = 0;
    std::size_t taken = 0;
    while (taken < minor_samples) {
        const double al = uni(rng);
        if (dis.contains(al)) continue;
        const double v = S(Alpha::value(al));
        s1 += v;
        s2 += v * v;
        ++taken;
    }
    rep.samples = taken;
    if (taken > 0) {
        const double m = static_cast<double>(taken);
        rep.minor_mean = s1 / m;
        rep.minor_std_error = std::sqrt(std::max(0.0, s2 / m - rep.minor_mean * rep.minor_mean) / m);
    }
    rep.minor_mass = rep.minor_measure * rep.minor_mean;
    rep.ratio = rep.major_mass > 0 ? rep.minor_mass / rep.major_mass : 0.0;
    return rep;
}

// ---------------------------------------------------------------------------
// Truth counts on V(F).

struct TruthOptions {
    unsigned threads = 1;
    double budget = 1e9;        // tuples enumerated
    double table_budget = 5e7;  // stored half-sums for the split method
};

struct TruthCount {
    WeightMode mode = WeightMode::Primes;
    std::int64_t points = 0;  // tuples on V(F) with nonzero weight
    double mass = 0;          // sum of the product weights over those tuples
    std::string method;
};

namespace detail {

// e-th root of v when v is an exact e-th power.
inline std::optional<i128> exact_root(i128 v, int e) {
    if (e == 1) return v;
    bool neg = v < 0;
    if (neg && e % 2 == 0) return std::nullopt;
    const i128 a = neg ? -v : v;
    const auto guess = static_cast<i128>(std::llround(std::pow(static_cast<long double>(a), 1.0L / e)));
    for (i128 r = std::max<i128>(0, guess - 2); r <= guess + 2; ++r) {
        i128 p = 1;
        bool over = false;
        for (int k = 0; k < e && !over; ++k) {
            p *= r;
            over = p > a;
        }
        if (!over && p == a) return neg ? -r : r;
    }
    return std::nullopt;
}

inline Form select_terms(const Form& f, const std::function<bool(const Exponent&)>& keep) {
    Form out(f.n_vars());
    for (const auto& [e, c] : f.terms())
        if (keep(e)) out.add_term(e, c);
    return out;
}

// Tuple enumeration over the coordinates in `free`, others pinned at index 0,
// sharded by the first free coordinate. body(shard, idx).
template <typename Body>
void enumerate_tuples(int n, const std::vector<int>& free, const std::vector<std::size_t>& sizes, unsigned threads, Body&& body) {
    if (free.empty()) {
        std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
        body(std::size_t{0}, idx);
        return;
    }
    for (int j : free)
        if (sizes[static_cast<std::size_t>(j)] == 0) return;
    const auto lead = static_cast<std::size_t>(free[0]);
    parallel_shards(sizes[lead], threads, [&](std::size_t s) {
        std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
        idx[lead] = s;
        for (;;) {
            body(s, idx);
            std::size_t k = 1;
            while (k < free.size() && ++idx[static_cast<std::size_t>(free[k])] == sizes[static_cast<std::size_t>(free[k])])
                idx[static_cast<std::size_t>(free[k++])] = 0;
            if (k >= free.size()) break;
        }
    });
}

struct ShardTotal {
    std::int64_t points = 0;
    CompensatedSum<double> mass;
};

inline std::int64_t lookup(const std::vector<std::int64_t>& xs, i128 v) {
    if (v < static_cast<i128>(std::numeric_limits<std::int64_t>::min()) || v > static_cast<i128>(std::numeric_limits<std::int64_t>::max()))
        return -1;
    const auto it = std::lower_bound(xs.begin(), xs.end(), static_cast<std::int64_t>(v));
    return it != xs.end() && *it == static_cast<std::int64_t>(v) ? it - xs.begin() : -1;
}

// Variables linked through shared monomials; returns the component of each.
inline std::vector<int> variable_components(const Form& f) {
    const int n = f.n_vars();
    std::vector<int> comp(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) comp[static_cast<std::size_t>(i)] = i;
    auto find = [&](int x) {
        while (comp[static_cast<std::size_t>(x)] != x) x = comp[static_cast<std::size_t>(x)];
        return x;
    };
    for (const auto& [e, c] : f.terms()) {
        int first = -1;
        for (int i = 0; i < n; ++i) {
            if (e[static_cast<std::size_t>(i)] == 0) continue;
            if (first < 0) first = i;
            else comp[static_cast<std::size_t>(find(i))] = find(first);
        }
    }
    for (int i = 0; i < n; ++i) comp[static_cast<std::size_t>(i)] = find(i);
    return comp;
}

// Lambda mass minus Lambda* mass; the two sums are accumulated separately, so
// a difference at rounding level means no prime power contributed.
inline double mass_gap(double lambda_mass, double lambda_star_mass) {
    const double g = lambda_mass - lambda_star_mass;
    return g <= 1e-12 * std::abs(lambda_mass) ? 0.0 : g;
}

}  // namespace detail

// Sum over tuples on V(F) drawn from the supports of the product of weights.
// Strategy by cost: resolve one coordinate from the others (F linear in it,
// or it occurs only in a pure power a x^e), meet in the middle when F splits
// into two variable-disjoint parts, else enumerate everything.
inline TruthCount truth_count_supports(const Form& f, const std::vector<CoordinateSupport>& sup, const TruthOptions& opt = {}) {
    const int n = f.n_vars();
    if (static_cast<int>(sup.size()) != n) throw PreconditionError("truth_count: support dimension mismatch");
    TruthCount out;
    if (n == 0) throw PreconditionError("truth_count: form has no variables");
    std::vector<std::size_t> sizes;
    std::vector<std::vector<std::int64_t>> vals;
    for (const auto& s : sup) {
        sizes.push_back(s.x.size());
        vals.push_back(s.x);
    }
    auto product_except = [&](const std::vector<int>& skip) {
        double p = 1;
        for (int j = 0; j < n; ++j)
            if (std::find(skip.begin(), skip.end(), j) == skip.end()) p *= static_cast<double>(sizes[static_cast<std::size_t>(j)]);
        return p;
    };
    for (auto s : sizes)
        if (s == 0) {
            out.method = "empty";
            return out;
        }
    if (f.is_zero()) {
        out.method = "zero-form";
        double all = product_except({});
        if (all > 9e18) throw BudgetExceeded("truth_count: point count overflows");
        out.points = static_cast<std::int64_t>(all);
        double m = 1;
        for (const auto& s : sup) {
            CompensatedSum<double> t;
            for (double w : s.w) t.add(w);
            m *= t.value();
        }
        out.mass = m;
        return out;
    }

    // candidate: resolve coordinate j
    int solve_var = -1, solve_pow = 0;
    double solve_cost = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        const int dj = f.degree_in(j);
        if (dj == 0) continue;
        int pow = 0;
        if (dj == 1) pow = 1;
        else {
            int with_j = 0;
            bool pure = true;
            for (const auto& [e, c] : f.terms()) {
                if (e[static_cast<std::size_t>(j)] == 0) continue;
                ++with_j;
                for (int i = 0; i < n; ++i)
                    if (i != j && e[static_cast<std::size_t>(i)] != 0) pure = false;
            }
            if (with_j == 1 && pure) pow = dj;
        }
        if (pow == 0) continue;
        const double cost = product_except({j});
        if (cost < solve_cost) {
            solve_cost = cost;
            solve_var = j;
            solve_pow = pow;
        }
    }
    // candidate: split into two variable-disjoint halves
    std::vector<int> head, tail;
    double split_cost = std::numeric_limits<double>::infinity();
    {
        const auto comp = detail::variable_components(f);
        std::vector<int> roots;
        for (int i = 0; i < n; ++i)
            if (std::find(roots.begin(), roots.end(), comp[static_cast<std::size_t>(i)]) == roots.end()) roots.push_back(comp[static_cast<std::size_t>(i)]);
        if (roots.size() >= 2) {
            std::vector<std::pair<double, int>> weight;
            for (int r : roots) {
                double p = 1;
                for (int i = 0; i < n; ++i)
                    if (comp[static_cast<std::size_t>(i)] == r) p *= static_cast<double>(sizes[static_cast<std::size_t>(i)]);
                weight.push_back({p, r});
            }
            std::sort(weight.begin(), weight.end(), std::greater<>());
            double ph = 1, pt = 1;
            std::vector<int> hr, tr;
            for (const auto& [p, r] : weight) {
                if (ph <= pt) {
                    ph *= p;
                    hr.push_back(r);
                } else {
                    pt *= p;
                    tr.push_back(r);
                }
            }
            for (int i = 0; i < n; ++i)
                (std::find(hr.begin(), hr.end(), comp[static_cast<std::size_t>(i)]) != hr.end() ? head : tail).push_back(i);
            if (ph <= opt.table_budget) split_cost = ph + pt;
        }
    }
    const double generic_cost = product_except({});

    std::vector<detail::ShardTotal> acc;
    auto finish = [&](const char* method) {
        out.method = method;
        CompensatedSum<double> m;
        for (auto& a : acc) {
            out.points += a.points;
            m.add(a.mass.value());
        }
        out.mass = m.value();
        return out;
    };

    if (split_cost <= solve_cost && split_cost <= generic_cost) {
        if (split_cost > opt.budget) throw BudgetExceeded("truth_count: split enumeration exceeds budget");
        // G(head) + H(tail) = 0; the constant term rides with the head
        auto in_tail = [&](const Exponent& e) {
            for (int i : tail)
                if (e[static_cast<std::size_t>(i)] != 0) return true;
            return false;
        };
        const Form G = detail::select_terms(f, [&](const Exponent& e) { return !in_tail(e); });
        const Form H = detail::select_terms(f, [&](const Exponent& e) { return in_tail(e); });
        auto pinned = [&](const std::vector<int>& side) {
            auto v = vals;
            for (int i = 0; i < n; ++i)
                if (std::find(side.begin(), side.end(), i) == side.end()) v[static_cast<std::size_t>(i)] = {1};
            return v;
        };
        const detail::TupleEvaluator evG(G, pinned(head)), evH(H, pinned(tail));
        struct Entry {
            i128 value;
            double mass;
            std::int64_t count;
        };
        std::vector<std::vector<Entry>> parts(sizes[static_cast<std::size_t>(head[0])]);
        detail::enumerate_tuples(n, head, sizes, opt.threads, [&](std::size_t s, const std::vector<std::size_t>& idx) {
            double w = 1;
            for (int i : head) w *= sup[static_cast<std::size_t>(i)].w[idx[static_cast<std::size_t>(i)]];
            parts[s].push_back({evG(idx), w, 1});
        });
        std::vector<Entry> table;
        for (auto& p : parts) table.insert(table.end(), p.begin(), p.end());
        std::stable_sort(table.begin(), table.end(), [](const Entry& x, const Entry& y) { return x.value < y.value; });
        std::vector<Entry> merged;
        for (const auto& e : table) {
            if (!merged.empty() && merged.back().value == e.value) {
                merged.back().mass += e.mass;
                merged.back().count += e.count;
            } else merged.push_back(e);
        }
        acc.resize(sizes[static_cast<std::size_t>(tail[0])]);
        detail::enumerate_tuples(n, tail, sizes, opt.threads, [&](std::size_t s, const std::vector<std::size_t>& idx) {
            const i128 want = -evH(idx);
            const auto it = std::lower_bound(merged.begin(), merged.end(), want, [](const Entry& e, i128 v) { return e.value < v; });
            if (it == merged.end() || it->value != want) return;
            double w = 1;
            for (int i : tail) w *= sup[static_cast<std::size_t>(i)].w[idx[static_cast<std::size_t>(i)]];
            acc[s].points += it->count;
            acc[s].mass.add(it->mass * w);
        });
        return finish("split");
    }

    if (solve_var >= 0 && solve_cost <= generic_cost) {
        if (solve_cost > opt.budget) throw BudgetExceeded("truth_count: enumeration of the other coordinates exceeds budget");
        const int j = solve_var;
        const auto uj = static_cast<std::size_t>(j);
        // F = c1 x_j^e + c0 with c1, c0 free of x_j
        Form c1(n), c0(n);
        for (const auto& [e, c] : f.terms()) {
            if (e[uj] == 0) c0.add_term(e, c);
            else {
                Exponent r = e;
                r[uj] = 0;
                c1.add_term(r, c);
            }
        }
        auto v = vals;
        v[uj] = {1};
        const detail::TupleEvaluator ev1(c1, v), ev0(c0, v);
        std::vector<int> others;
        for (int i = 0; i < n; ++i)
            if (i != j) others.push_back(i);
        CompensatedSum<double> wsum_j;
        for (double w : sup[uj].w) wsum_j.add(w);
        acc.resize(others.empty() ? 1 : sizes[static_cast<std::size_t>(others[0])]);
        detail::enumerate_tuples(n, others, sizes, opt.threads, [&](std::size_t s, const std::vector<std::size_t>& idx) {
            const i128 a1 = ev1(idx), a0 = ev0(idx);
            double w = 1;
            for (int i : others) w *= sup[static_cast<std::size_t>(i)].w[idx[static_cast<std::size_t>(i)]];
            if (a1 == 0) {
                if (a0 == 0) {
                    acc[s].points += static_cast<std::int64_t>(sizes[uj]);
                    acc[s].mass.add(w * wsum_j.value());
                }
                return;
            }
            if (a0 % a1 != 0) return;
            const auto root = detail::exact_root(-a0 / a1, solve_pow);
            if (!root) return;
            const std::int64_t k = detail::lookup(sup[uj].x, *root);
            if (k < 0) return;
            acc[s].points += 1;
            acc[s].mass.add(w * sup[uj].w[static_cast<std::size_t>(k)]);
        });
        return finish("solve-last");
    }

    if (generic_cost > opt.budget) throw BudgetExceeded("truth_count: full enumeration exceeds budget");
    const detail::TupleEvaluator ev(f, vals);
    std::vector<int> all;
    for (int i = 0; i < n; ++i) all.push_back(i);
    acc.resize(sizes[0]);
    detail::enumerate_tuples(n, all, sizes, opt.threads, [&](std::size_t s, const std::vector<std::size_t>& idx) {
        if (ev(idx) != 0) return;
        double w = 1;
        for (int i = 0; i < n; ++i) w *= sup[static_cast<std::size_t>(i)].w[idx[static_cast<std::size_t>(i)]];
        acc[s].points += 1;
        acc[s].mass.add(w);
    });
    return finish("generic");
}

// Supports on [1, X] for every coordinate.
inline std::vector<CoordinateSupport> box_supports(int n, std::int64_t X, const SieveTables& tab, WeightMode mode) {
    if (X > tab.limit()) throw PreconditionError("sieve tables do not cover [1, X]");
    CoordinateSupport s;
    for (std::int64_t x = 2; x <= X; ++x) {
        double a = 0;
        switch (mode) {
            case WeightMode::Primes: a = tab.is_prime(x) ? 1.0 : 0.0; break;
            case WeightMode::LambdaStar: a = tab.lambda_star(x); break;
            case WeightMode::Lambda: a = tab.lambda(x); break;
        }
        if (a == 0.0) continue;
        s.x.push_back(x);
        s.w.push_back(a);
    }
    return std::vector<CoordinateSupport>(static_cast<std::size_t>(n), s);
}

// Over [1, X]^n.
inline TruthCount truth_count(const Form& f, std::int64_t X, const SieveTables& tab, WeightMode mode, const TruthOptions& opt = {}) {
    auto r = truth_count_supports(f, box_supports(f.n_vars(), X, tab, mode), opt);
    r.mode = mode;
    return r;
}

// Over the window support; with window_weights the mass carries varpi too.
inline TruthCount truth_count(const Form& f, const WindowedBox& box, const SieveTables& tab, WeightMode mode, bool window_weights,
                              const TruthOptions& opt = {}) {
    if (f.n_vars() != box.n_vars()) throw PreconditionError("truth_count: form and box dimensions differ");
    auto r = truth_count_supports(f, arithmetic_supports(box, tab, mode, window_weights), opt);
    r.mode = mode;
    return r;
}

// ---------------------------------------------------------------------------
// Prime powers against primes.

struct PrimePowerGap {
    std::int64_t X = 0;
    double lambda_mass = 0;
    double lambda_star_mass = 0;
    double gap = 0;
    double bound_scale = 0;  // (log X)^n X^(n - 1 - d + 1/2)
    double scaled = 0;       // gap / bound_scale
};

inline PrimePowerGap prime_power_gap(const Form& f, std::int64_t X, const SieveTables& tab, const TruthOptions& opt = {}) {
    const int n = f.n_vars(), d = f.degree();
    PrimePowerGap g;
    g.X = X;
    g.lambda_mass = truth_count(f, X, tab, WeightMode::Lambda, opt).mass;
    g.lambda_star_mass = truth_count(f, X, tab, WeightMode::LambdaStar, opt).mass;
    g.gap = detail::mass_gap(g.lambda_mass, g.lambda_star_mass);
    const double lx = std::log(static_cast<double>(X));
    g.bound_scale = std::pow(lx, n) * std::pow(static_cast<double>(X), n - 1 - d + 0.5);
    g.scaled = g.gap / g.bound_scale;
    return g;
}

// ---------------------------------------------------------------------------
// W(tau) = int varpi(x) e(tau F(x)) dx, integrated directly in x.

inline OscillatoryResult w_main(const Form& f, const WindowedBox& box, double tau, const QuadratureOptions& q = {}) {
    const int n = f.n_vars();
    if (n != box.n_vars()) throw PreconditionError("w_main: form and box dimensions differ");
    const double N = box.N(), delta = box.weight().delta();
    std::vector<double> lo, hi;
    for (int j = 0; j < n; ++j) {
        lo.push_back((box.x0()[static_cast<std::size_t>(j)] - delta) * N);
        hi.push_back((box.x0()[static_cast<std::size_t>(j)] + delta) * N);
    }
    const auto rule = detail::gauss_rule(q.order);
    const RealPolynomial F(f);
    auto nodes = [&](int j, double slope, std::vector<double>& xs, std::vector<double>& ws) {
        const auto i = static_cast<std::size_t>(j);
        const int panels = detail::panels_for(std::abs(tau) * slope * (hi[i] - lo[i]), q);
        detail::composite_nodes(rule, lo[i], hi[i], panels, xs, ws);
        for (std::size_t k = 0; k < xs.size(); ++k) ws[k] *= box.weight()(xs[k] / N - box.x0()[i]);
    };
    OscillatoryResult res;
    if (is_separable(f)) {
        const auto pieces = separable_pieces(f);
        Complex prod(1.0, 0.0);
        for (int j = 0; j < n; ++j) {
            std::vector<double> xs, ws;
            nodes(j, detail::poly_deriv_bound(pieces[static_cast<std::size_t>(j)], lo[static_cast<std::size_t>(j)], hi[static_cast<std::size_t>(j)]), xs, ws);
            ComplexSum s;
            for (std::size_t k = 0; k < xs.size(); ++k) s.add(ws[k] * e_of(tau * detail::poly_eval(pieces[static_cast<std::size_t>(j)], xs[k])));
            prod *= s.value();
            res.nodes += xs.size();
        }
        res.value = prod;
        return res;
    }
    std::vector<std::vector<double>> xs(static_cast<std::size_t>(n)), ws(static_cast<std::size_t>(n));
    std::size_t total = 1;
    const auto grad = f.gradient();
    for (int j = 0; j < n; ++j) {
        nodes(j, RealPolynomial(grad[static_cast<std::size_t>(j)]).abs_bound(lo, hi), xs[static_cast<std::size_t>(j)], ws[static_cast<std::size_t>(j)]);
        total *= xs[static_cast<std::size_t>(j)].size();
        if (total > q.node_budget) throw BudgetExceeded("w_main: tensor grid exceeds node budget");
    }
    std::vector<ComplexSum> partial(xs[0].size());
    parallel_shards(xs[0].size(), q.threads, [&](std::size_t a) {
        std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
        idx[0] = a;
        std::vector<double> x(static_cast<std::size_t>(n));
        for (;;) {
            double w = 1;
            for (int j = 0; j < n; ++j) {
                x[static_cast<std::size_t>(j)] = xs[static_cast<std::size_t>(j)][idx[static_cast<std::size_t>(j)]];
                w *= ws[static_cast<std::size_t>(j)][idx[static_cast<std::size_t>(j)]];
            }
            partial[a].add(w * e_of(tau * F(x)));
            int j = 1;
            while (j < n && ++idx[static_cast<std::size_t>(j)] == xs[static_cast<std::size_t>(j)].size()) idx[static_cast<std::size_t>(j++)] = 0;
            if (j >= n) break;
        }
    });
    ComplexSum s;
    for (const auto& p : partial) s.add(p);
    res.value = s.value();
    res.nodes = total;
    return res;
}

// ---------------------------------------------------------------------------
// S(a/q + tau) against phi(q)^-n A(q, a) W(tau).

struct ArcApproxRow {
    std::int64_t q = 1;
    std::int64_t a = 0;
    double tau = 0;
    Complex S;
    Complex main;
    double rel_error = 0;
};

inline ArcApproxRow major_arc_approx_check(const Form& f, const WindowedBox& box, const SieveTables& tab, std::int64_t q, std::int64_t a,
                                           double tau, const SumOptions& opt = {}) {
    if (q < 1) throw PreconditionError("major_arc_approx_check: q must be positive");
    if (gcd64(mod_floor(a, q), q) != 1) throw PreconditionError("major_arc_approx_check: gcd(a, q) must be 1");
    box.require_lower_edge_above(static_cast<double>(q), "q");
    ArcApproxRow row;
    row.q = q;
    row.a = a;
    row.tau = tau;
    const Alpha al = tau == 0.0 ? Alpha::fraction(a, q)
                                : Alpha::value(static_cast<long double>(a) / static_cast<long double>(q) + static_cast<long double>(tau));
    row.S = s_alpha(f, box, tab, al, opt);
    const double phin = std::pow(static_cast<double>(euler_phi(q)), f.n_vars());
    row.main = complete_sum(f, q, a) / phin * w_main(f, box, tau).value;
    row.rel_error = std::abs(row.S - row.main) / std::abs(row.main);
    return row;
}

// ---------------------------------------------------------------------------
// Prediction against brute force.

struct CompareOptions {
    double delta = 0.1;
    int m0 = 2;
    std::optional<std::vector<double>> x0;  // searched for when absent
    std::vector<std::int64_t> X{200, 400, 800};
    std::int64_t Q = 200;
    SingularIntegralOptions integral;
    double weight_scale = 1.0;  // multiplies omega before renormalization
    std::int64_t hensel_max_p = 50;
    double hensel_budget = 2e8;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

struct CompareRow {
    std::int64_t X = 0;
    std::int64_t truth_primes = 0;  // prime points in the window support
    double truth_lstar = 0;         // sum varpi Lambda* over V(F), unit-mass omega
    double truth_lambda = 0;        // same with Lambda
    double sigma_infty = 0;
    double series_Q = 0;
    double c = 0;
    std::optional<double> ratio;  // truth_lstar / (c X^(n-d)) when c > 0
    double gap = 0;               // truth_lambda - truth_lstar
};

struct LocalVerdict {
    std::int64_t p = 0;
    HenselResult hensel;
    std::optional<Rational> sigma;  // sigma_p(level) for obstructed primes
};

struct PredictionReport {
    std::vector<double> x0;
    double delta = 0;
    double sigma_infty = 0;
    SingularIntegralResult integral;
    double series_Q = 0;
    std::int64_t Q = 0;
    double c = 0;
    std::vector<LocalVerdict> local;
    bool obstructed = false;
    std::vector<CompareRow> rows;
    double unweighted_slope = std::numeric_limits<double>::quiet_NaN();  // log-log slope of truth_primes
    double ratio_median = std::numeric_limits<double>::quiet_NaN();
    double ratio_width = std::numeric_limits<double>::quiet_NaN();  // (max - min) / median
    double ratio_max_deviation = std::numeric_limits<double>::quiet_NaN();  // max |r / median - 1|
};

namespace detail {

inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double m = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = m * sxx - sx * sx;
    return den != 0 ? (m * sxy - sx * sy) / den : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace detail

inline PredictionReport predict_and_compare(const Form& f, const CompareOptions& opt) {
    const int n = f.n_vars(), d = f.degree();
    if (!f.is_homogeneous() || d < 2) throw PreconditionError("compare: form must be homogeneous of degree at least 2");
    if (opt.X.empty()) throw PreconditionError("compare: no X values");
    if (!(opt.weight_scale > 0)) throw PreconditionError("compare: weight scale must be positive");
    const SmoothWeight w(opt.delta, opt.m0);
    PredictionReport rep;
    rep.delta = opt.delta;
    rep.Q = opt.Q;
    if (opt.x0) {
        if (static_cast<int>(opt.x0->size()) != n) throw PreconditionError("compare: x0 length does not match the form");
        rep.x0 = *opt.x0;
    } else {
        RealSolveOptions ro;
        ro.margin = opt.delta + 1e-9;
        ro.seed = opt.seed;
        const auto sol = real_nonsingular_solution(f, ro);
        if (!sol.found) throw PreconditionError("compare: no real nonsingular zero found for the window center; pass x0 explicitly");
        rep.x0 = sol.x0;
    }

    // local conditions
    for (std::int64_t p = 2; p <= opt.hensel_max_p; ++p) {
        if (!is_prime(p)) continue;
        LocalVerdict v;
        v.p = p;
        v.hensel = hensel_unit_witness(f, p, opt.hensel_budget);
        if (v.hensel.status == LocalStatus::Obstruction) {
            v.sigma = sigma_p(f, p, v.hensel.level);
            rep.obstructed = true;
        }
        rep.local.push_back(std::move(v));
    }

    // omega renormalized to unit mass; omega_s = scale * omega has mass scale * m
    const double mass = opt.weight_scale * w.mass();
    const double norm_n = std::pow(mass, n);
    const double amp = std::pow(opt.weight_scale, n);
    rep.integral = singular_integral(f, w, rep.x0, opt.integral);
    const double raw = rep.integral.value * amp;
    const bool below_floor = std::abs(rep.integral.value) <= opt.integral.abs_floor * std::pow(w.mass(), n);
    rep.sigma_infty = below_floor ? 0.0 : raw / norm_n;
    rep.series_Q = rep.obstructed ? 0.0 : singular_series(f, opt.Q, true, opt.threads).value;
    rep.c = rep.sigma_infty * rep.series_Q;

    const std::int64_t Xmax = *std::max_element(opt.X.begin(), opt.X.end());
    const SieveTables tab(Xmax + 1);
    TruthOptions to;
    to.threads = opt.threads;
    std::vector<double> lx, ly, ratios;
    for (std::int64_t X : opt.X) {
        const WindowedBox box(static_cast<double>(X), rep.x0, w);
        CompareRow row;
        row.X = X;
        row.truth_primes = truth_count(f, box, tab, WeightMode::Primes, false, to).points;
        row.truth_lstar = amp * truth_count(f, box, tab, WeightMode::LambdaStar, true, to).mass / norm_n;
        row.truth_lambda = amp * truth_count(f, box, tab, WeightMode::Lambda, true, to).mass / norm_n;
        row.gap = detail::mass_gap(row.truth_lambda, row.truth_lstar);
        row.sigma_infty = rep.sigma_infty;
        row.series_Q = rep.series_Q;
        row.c = rep.c;
        if (rep.c > 0) {
            row.ratio = row.truth_lstar / (rep.c * std::pow(static_cast<double>(X), n - d));
            ratios.push_back(*row.ratio);
        }
        if (row.truth_primes > 0) {
            lx.push_back(std::log(static_cast<double>(X)));
            ly.push_back(std::log(static_cast<double>(row.truth_primes)));
        }
        rep.rows.push_back(row);
    }
    if (lx.size() >= 2) rep.unweighted_slope = detail::ls_slope(lx, ly);
    if (!ratios.empty()) {
        auto s = ratios;
        std::sort(s.begin(), s.end());
        const std::size_t m = s.size();
        rep.ratio_median = m % 2 ? s[m / 2] : 0.5 * (s[m / 2 - 1] + s[m / 2]);
        rep.ratio_width = (s.back() - s.front()) / rep.ratio_median;
        rep.ratio_max_deviation = 0;
        for (double r : s) rep.ratio_max_deviation = std::max(rep.ratio_max_deviation, std::abs(r / rep.ratio_median - 1.0));
    }
    return rep;
}

// Locale-free decimal text with about `sig` significant digits.
inline std::string format_decimal(double v, int sig = 10) {
    if (!std::isfinite(v)) throw PreconditionError("format_decimal: non-finite value");
    if (v == 0.0) return "0";
    const int mag = static_cast<int>(std::floor(std::log10(std::abs(v))));
    const int prec = std::clamp(sig - 1 - mag, 0, 17);
    char buf[128];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, prec);
    std::string s(buf, r.ptr);
    if (s.find('.') != std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    return s == "-0" ? "0" : s;
}

inline constexpr const char* kCompareHeader = "X,truth_primes,truth_lstar,truth_lambda,sigma_infty,series_Q,c,ratio,gap";

inline void write_compare_csv(const PredictionReport& rep, std::ostream& os) {
    os << kCompareHeader << '\n';
    for (const auto& r : rep.rows) {
        os << r.X << ',' << r.truth_primes << ',' << format_decimal(r.truth_lstar) << ',' << format_decimal(r.truth_lambda) << ','
           << format_decimal(r.sigma_infty) << ',' << format_decimal(r.series_Q) << ',' << format_decimal(r.c) << ','
           << (r.ratio ? format_decimal(*r.ratio) : std::string()) << ',' << format_decimal(r.gap) << '\n';
    }
}

}  // namespace hlcircle
