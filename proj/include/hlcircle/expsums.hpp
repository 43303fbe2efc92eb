#pragma once

// Weighted exponential sums over windowed boxes, their Vaughan decomposition,
// complete sums over unit residues and the orthogonality mean.

#include "hlcircle/arith.hpp"
#include "hlcircle/common.hpp"
#include "hlcircle/forms.hpp"
#include "hlcircle/weight.hpp"

#include <charconv>
#include <map>
#include <optional>

namespace hlcircle {

// ---------------------------------------------------------------------------
// Frequencies.

struct Alpha {
    bool rational = true;
    std::int64_t a = 0;  // reduced to [0, q)
    std::int64_t q = 1;
    long double real = 0;

    static Alpha fraction(std::int64_t a, std::int64_t q) {
        if (q <= 0) throw PreconditionError("Alpha: denominator must be positive");
        Alpha al;
        al.q = q;
        al.a = mod_floor(a, q);
        const std::int64_t g = gcd64(al.a, q);
        if (g > 1) {
            al.a /= g;
            al.q /= g;
        }
        al.real = static_cast<long double>(al.a) / static_cast<long double>(al.q);
        return al;
    }

    static Alpha value(long double x) {
        if (std::isnan(x) || std::isinf(x)) throw PreconditionError("Alpha: frequency must be finite");
        Alpha al;
        al.rational = false;
        al.real = x;
        return al;
    }

    // "p/q" or a decimal number
    static Alpha parse(const std::string& s) {
        const auto slash = s.find('/');
        if (slash != std::string::npos) {
            std::int64_t p = 0, q = 0;
            const auto r1 = std::from_chars(s.data(), s.data() + slash, p);
            const auto r2 = std::from_chars(s.data() + slash + 1, s.data() + s.size(), q);
            if (r1.ec != std::errc{} || r2.ec != std::errc{} || r1.ptr != s.data() + slash || r2.ptr != s.data() + s.size())
                throw PreconditionError("Alpha: cannot parse fraction '" + s + "'");
            return fraction(p, q);
        }
        std::size_t used = 0;
        long double x = 0;
        try {
            x = std::stold(s, &used);
        } catch (const std::exception&) {
            throw PreconditionError("Alpha: cannot parse '" + s + "'");
        }
        if (used != s.size()) throw PreconditionError("Alpha: cannot parse '" + s + "'");
        return value(x);
    }

    long double as_real() const { return real; }
};

// ---------------------------------------------------------------------------
// Windowed boxes: varpi(x) = prod_j omega(x_j / N - x0_j).

class WindowedBox {
public:
    WindowedBox(double N, std::vector<double> x0, SmoothWeight w) : N_(N), x0_(std::move(x0)), w_(std::move(w)) {
        if (!(N >= 2)) throw PreconditionError("WindowedBox: N must be at least 2");
        for (double c : x0_) {
            if (!(c - w_.delta() > 0.0 && c + w_.delta() < 1.0))
                throw PreconditionError("WindowedBox: window [x0 - delta, x0 + delta] must lie inside (0, 1)");
            const auto lo = static_cast<std::int64_t>(std::floor((c - w_.delta()) * N)) + 1;
            const auto hi = static_cast<std::int64_t>(std::ceil((c + w_.delta()) * N)) - 1;
            lo_.push_back(std::max<std::int64_t>(lo, 1));
            hi_.push_back(hi);
        }
    }

    int n_vars() const { return static_cast<int>(x0_.size()); }
    double N() const { return N_; }
    const std::vector<double>& x0() const { return x0_; }
    const SmoothWeight& weight() const { return w_; }
    std::int64_t lo(int j) const { return lo_[static_cast<std::size_t>(j)]; }
    std::int64_t hi(int j) const { return hi_[static_cast<std::size_t>(j)]; }
    std::int64_t lower_edge() const { return *std::min_element(lo_.begin(), lo_.end()); }
    std::int64_t upper_edge() const { return *std::max_element(hi_.begin(), hi_.end()); }

    double varpi_j(int j, std::int64_t x) const { return w_(static_cast<double>(x) / N_ - x0_[static_cast<std::size_t>(j)]); }

    // Throws naming the violated inequality when the support reaches down to `bound`.
    void require_lower_edge_above(double bound, const std::string& what) const {
        if (!(static_cast<double>(lower_edge()) > bound))
            throw PreconditionError("window lower edge " + std::to_string(lower_edge()) + " is not above " + what + " = " +
                                    std::to_string(bound));
    }

private:
    double N_;
    std::vector<double> x0_;
    SmoothWeight w_;
    std::vector<std::int64_t> lo_, hi_;
};

// One coordinate's support: integers with their weights.
struct CoordinateSupport {
    std::vector<std::int64_t> x;
    std::vector<double> w;
};

enum class WeightMode { Primes, LambdaStar, Lambda };

// varpi_j(x) times the arithmetic weight, over the window; zero weights dropped.
inline std::vector<CoordinateSupport> arithmetic_supports(const WindowedBox& box, const SieveTables& tab, WeightMode mode,
                                                          bool apply_window = true) {
    if (box.upper_edge() > tab.limit()) throw PreconditionError("sieve tables do not cover the window");
    std::vector<CoordinateSupport> out(static_cast<std::size_t>(box.n_vars()));
    for (int j = 0; j < box.n_vars(); ++j) {
        auto& s = out[static_cast<std::size_t>(j)];
        for (std::int64_t x = box.lo(j); x <= box.hi(j); ++x) {
            double a = 0;
            switch (mode) {
                case WeightMode::Primes: a = tab.is_prime(x) ? 1.0 : 0.0; break;
                case WeightMode::LambdaStar: a = tab.lambda_star(x); break;
                case WeightMode::Lambda: a = tab.lambda(x); break;
            }
            if (a == 0.0) continue;
            const double wt = apply_window ? box.varpi_j(j, x) * a : a;
            if (wt == 0.0) continue;
            s.x.push_back(x);
            s.w.push_back(wt);
        }
    }
    return out;
}

namespace detail {

// Exact integer evaluation of F on tuples drawn from per-coordinate value
// lists, with per-coordinate power tables.
class TupleEvaluator {
public:
    TupleEvaluator(const Form& f, const std::vector<std::vector<std::int64_t>>& values) : n_(f.n_vars()) {
        double bound = 0;
        std::vector<double> maxabs(static_cast<std::size_t>(n_), 0.0);
        for (int j = 0; j < n_; ++j)
            for (std::int64_t v : values[static_cast<std::size_t>(j)])
                maxabs[static_cast<std::size_t>(j)] = std::max(maxabs[static_cast<std::size_t>(j)], std::abs(static_cast<double>(v)));
        for (const auto& [e, c] : f.terms()) {
            double m = std::abs(c.convert_to<double>());
            for (int j = 0; j < n_; ++j) m *= std::pow(std::max(1.0, maxabs[static_cast<std::size_t>(j)]), e[static_cast<std::size_t>(j)]);
            bound += m;
            coeffs_.push_back(static_cast<i128>(c.convert_to<long long>()));
            exps_.push_back(e);
            if (abs(c) > BigInt(std::numeric_limits<long long>::max())) throw BudgetExceeded("coefficient exceeds 64 bits");
        }
        if (bound > 1e37) throw BudgetExceeded("form values exceed the 128-bit evaluation range");
        int maxdeg = 0;
        for (int j = 0; j < n_; ++j) maxdeg = std::max(maxdeg, f.degree_in(j));
        maxdeg_ = maxdeg;
        pw_.resize(static_cast<std::size_t>(n_));
        for (int j = 0; j < n_; ++j) {
            const auto& vals = values[static_cast<std::size_t>(j)];
            auto& t = pw_[static_cast<std::size_t>(j)];
            t.resize(vals.size() * static_cast<std::size_t>(maxdeg + 1));
            for (std::size_t k = 0; k < vals.size(); ++k) {
                i128 p = 1;
                for (int e = 0; e <= maxdeg; ++e) {
                    t[k * static_cast<std::size_t>(maxdeg + 1) + static_cast<std::size_t>(e)] = p;
                    p *= vals[k];
                }
            }
        }
    }

    i128 operator()(std::span<const std::size_t> idx) const {
        i128 acc = 0;
        for (std::size_t t = 0; t < coeffs_.size(); ++t) {
            i128 m = coeffs_[t];
            for (int j = 0; j < n_; ++j) {
                const int e = exps_[t][static_cast<std::size_t>(j)];
                if (e) m *= pw_[static_cast<std::size_t>(j)][idx[static_cast<std::size_t>(j)] * static_cast<std::size_t>(maxdeg_ + 1) + static_cast<std::size_t>(e)];
            }
            acc += m;
        }
        return acc;
    }

private:
    int n_;
    int maxdeg_ = 0;
    std::vector<i128> coeffs_;
    std::vector<Exponent> exps_;
    std::vector<std::vector<i128>> pw_;
};

inline std::int64_t mod_i128(i128 v, std::int64_t q) {
    i128 r = v % q;
    if (r < 0) r += q;
    return static_cast<std::int64_t>(r);
}

inline std::vector<Complex> root_table(std::int64_t q) {
    std::vector<Complex> t(static_cast<std::size_t>(q));
    for (std::int64_t k = 0; k < q; ++k)
        t[static_cast<std::size_t>(k)] = e_of(static_cast<long double>(k) / static_cast<long double>(q));
    return t;
}

// Phase e(alpha F) from the exact integer value of F.
class Phase {
public:
    explicit Phase(const Alpha& al) : al_(al) {
        if (al.rational) table_ = root_table(al.q);
    }
    Complex operator()(i128 F) const {
        if (al_.rational) {
            const std::int64_t r = mod_i128(F, al_.q);
            return table_[static_cast<std::size_t>(mulmod(al_.a, r, al_.q))];
        }
        // range reduction in extended precision: frac(alpha) * F, then frac again
        const long double fa = al_.real - std::floor(al_.real);
        const long double ph = fa * static_cast<long double>(F);
        return e_of(ph - std::floor(ph));
    }

private:
    Alpha al_;
    std::vector<Complex> table_;
};

inline void check_tuple_budget(const std::vector<CoordinateSupport>& sup, double budget) {
    double total = 1;
    for (const auto& s : sup) total *= static_cast<double>(s.x.size());
    if (total > budget) throw BudgetExceeded("tuple enumeration exceeds budget");
}

// sum over tuples of prod weights times e(alpha F), sharded by the first coordinate
inline Complex weighted_phase_sum(const Form& f, const std::vector<CoordinateSupport>& sup, const Alpha& al, unsigned threads,
                                  double budget = 1e9) {
    const int n = f.n_vars();
    if (static_cast<int>(sup.size()) != n) throw PreconditionError("support dimension mismatch");
    check_tuple_budget(sup, budget);
    for (const auto& s : sup)
        if (s.x.empty()) return {0.0, 0.0};
    std::vector<std::vector<std::int64_t>> vals;
    for (const auto& s : sup) vals.push_back(s.x);
    const TupleEvaluator ev(f, vals);
    const Phase phase(al);
    const std::size_t first = sup[0].x.size();
    std::vector<ComplexSum> partial(first);
    parallel_shards(first, threads, [&](std::size_t a) {
        std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
        idx[0] = a;
        for (;;) {
            double w = 1;
            for (int j = 0; j < n; ++j) w *= sup[static_cast<std::size_t>(j)].w[idx[static_cast<std::size_t>(j)]];
            partial[a].add(w * phase(ev(idx)));
            int j = 1;
            while (j < n && ++idx[static_cast<std::size_t>(j)] == sup[static_cast<std::size_t>(j)].x.size()) idx[static_cast<std::size_t>(j++)] = 0;
            if (j >= n) break;
        }
    });
    ComplexSum s;
    for (const auto& p : partial) s.add(p);
    return s.value();
}

}  // namespace detail

struct SumOptions {
    unsigned threads = 1;
    double budget = 1e9;
};

// S(alpha) = sum varpi(x) Lambda(x) e(alpha F(x))
inline Complex s_alpha(const Form& f, const WindowedBox& box, const SieveTables& tab, const Alpha& al, const SumOptions& opt = {}) {
    if (f.n_vars() != box.n_vars()) throw PreconditionError("s_alpha: form and box dimensions differ");
    return detail::weighted_phase_sum(f, arithmetic_supports(box, tab, WeightMode::Lambda), al, opt.threads, opt.budget);
}

// ---------------------------------------------------------------------------
// Vaughan decomposition into 3^n sums.

struct VaughanPiece {
    std::vector<int> labels;  // 1, 2 or 3 per coordinate
    Complex value;
};

struct VaughanDecomposition {
    Complex total;
    std::vector<VaughanPiece> pieces;
};

inline VaughanDecomposition s_vaughan_pieces(const Form& f, const WindowedBox& box, const SieveTables& tab, const Alpha& al,
                                             double U, double V, const SumOptions& opt = {}) {
    const int n = f.n_vars();
    if (n != box.n_vars()) throw PreconditionError("s_vaughan: form and box dimensions differ");
    if (n > 8) throw BudgetExceeded("s_vaughan: 3^n partitions beyond n = 8");
    box.require_lower_edge_above(U, "U");
    if (box.upper_edge() > tab.limit()) throw PreconditionError("s_vaughan: sieve tables do not cover the window");
    // component tables on the full integer window
    std::array<std::vector<CoordinateSupport>, 3> comp;
    for (auto& c : comp) c.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        for (std::int64_t x = box.lo(j); x <= box.hi(j); ++x) {
            const double w = box.varpi_j(j, x);
            if (w == 0.0) continue;
            const auto t = vaughan_terms(tab, x, U, V);
            const double parts[3] = {t.type_i, t.nu2_part, t.type_ii};
            for (int k = 0; k < 3; ++k) {
                if (parts[k] == 0.0) continue;
                comp[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)].x.push_back(x);
                comp[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)].w.push_back(w * parts[k]);
            }
        }
    }
    VaughanDecomposition out;
    ComplexSum total;
    std::vector<int> lab(static_cast<std::size_t>(n), 1);
    for (;;) {
        std::vector<CoordinateSupport> sup;
        for (int j = 0; j < n; ++j) sup.push_back(comp[static_cast<std::size_t>(lab[static_cast<std::size_t>(j)] - 1)][static_cast<std::size_t>(j)]);
        const Complex v = detail::weighted_phase_sum(f, sup, al, opt.threads, opt.budget);
        out.pieces.push_back({lab, v});
        total.add(v);
        int j = n - 1;
        while (j >= 0 && ++lab[static_cast<std::size_t>(j)] == 4) lab[static_cast<std::size_t>(j--)] = 1;
        if (j < 0) break;
    }
    out.total = total.value();
    return out;
}

inline Complex s_vaughan(const Form& f, const WindowedBox& box, const SieveTables& tab, const Alpha& al, double U, double V,
                         const SumOptions& opt = {}) {
    return s_vaughan_pieces(f, box, tab, al, U, V, opt).total;
}

// ---------------------------------------------------------------------------
// Complete sums over unit residues.

// counts[r] = #{h in (Z/q)^* ^n : F(h) = r mod q}
inline std::vector<std::int64_t> unit_residue_counts(const Form& f, std::int64_t q, double budget = 5e8) {
    if (q <= 0) throw PreconditionError("unit_residue_counts: q must be positive");
    const int n = f.n_vars();
    const auto qs = static_cast<std::size_t>(q);
    std::vector<std::int64_t> units;
    for (std::int64_t h = 0; h < q; ++h)
        if (gcd64(h, q) == 1 || q == 1) units.push_back(h);
    // separable forms: convolve the per-coordinate residue distributions
    bool separable = true;
    for (const auto& [e, c] : f.terms())
        if (std::count_if(e.begin(), e.end(), [](int k) { return k > 0; }) > 1) separable = false;
    if (separable) {
        std::vector<std::int64_t> dist(qs, 0);
        dist[static_cast<std::size_t>(mod_floor(f.homogeneous_part(0).evaluate(std::vector<std::int64_t>(static_cast<std::size_t>(n), 0)), q))] = 1;
        for (int j = 0; j < n; ++j) {
            std::vector<std::int64_t> one(qs, 0);
            std::vector<std::int64_t> x(static_cast<std::size_t>(n), 0);
            Form piece(n);
            for (const auto& [e, c] : f.terms())
                if (e[static_cast<std::size_t>(j)] > 0) piece.add_term(e, c);
            for (std::int64_t h : units) {
                x[static_cast<std::size_t>(j)] = h;
                ++one[static_cast<std::size_t>(piece.evaluate_mod(x, q))];
            }
            std::vector<std::int64_t> next(qs, 0);
            for (std::size_t a = 0; a < qs; ++a) {
                if (!dist[a]) continue;
                for (std::size_t b = 0; b < qs; ++b)
                    if (one[b]) next[(a + b) % qs] += dist[a] * one[b];
            }
            dist = std::move(next);
        }
        return dist;
    }
    if (std::pow(static_cast<double>(units.size()), n) > budget) throw BudgetExceeded("unit_residue_counts: q^n enumeration exceeds budget");
    std::vector<std::vector<std::int64_t>> vals(static_cast<std::size_t>(n), units);
    const detail::TupleEvaluator ev(f, vals);
    std::vector<std::int64_t> counts(qs, 0);
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    if (units.empty()) return counts;
    for (;;) {
        ++counts[static_cast<std::size_t>(detail::mod_i128(ev(idx), q))];
        int j = 0;
        while (j < n && ++idx[static_cast<std::size_t>(j)] == units.size()) idx[static_cast<std::size_t>(j++)] = 0;
        if (j == n) break;
    }
    return counts;
}

// Characters for complete sums: a null entry means no twist on that coordinate.
struct CompleteSumSpec {
    std::int64_t q = 1;
    std::int64_t a = 0;
    std::vector<const DirichletCharacter*> chars;
};

// A(q, a; chi) = sum_{h in U_q^n} prod chi_j(h_j) e(a F(h) / q)
inline Complex complete_sum(const Form& f, const CompleteSumSpec& spec, double budget = 5e8) {
    const std::int64_t q = spec.q;
    if (q <= 0) throw PreconditionError("complete_sum: q must be positive");
    if (gcd64(mod_floor(spec.a, q), q) != 1 && q != 1) throw PreconditionError("complete_sum: gcd(a, q) must be 1");
    const std::int64_t a = mod_floor(spec.a, q);
    const int n = f.n_vars();
    bool twisted = false;
    for (const auto* c : spec.chars) {
        if (c && c->q != q) throw PreconditionError("complete_sum: character modulus differs from q");
        twisted = twisted || (c != nullptr);
    }
    const auto roots = detail::root_table(q);
    if (!twisted) {
        const auto counts = unit_residue_counts(f, q, budget);
        ComplexSum s;
        for (std::int64_t r = 0; r < q; ++r)
            if (counts[static_cast<std::size_t>(r)]) s.add(static_cast<double>(counts[static_cast<std::size_t>(r)]) * roots[static_cast<std::size_t>(mulmod(a, r, q))]);
        return s.value();
    }
    if (static_cast<int>(spec.chars.size()) != n) throw PreconditionError("complete_sum: one character slot per variable");
    std::int64_t ord = 1;
    for (const auto* c : spec.chars)
        if (c) ord = c->order;
    std::vector<std::int64_t> units;
    for (std::int64_t h = 0; h < q; ++h)
        if (gcd64(h, q) == 1) units.push_back(h);
    if (std::pow(static_cast<double>(units.size()), n) > budget) throw BudgetExceeded("complete_sum: enumeration exceeds budget");
    // exact counts over (F mod q, character index mod ord)
    std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> counts;
    std::vector<std::vector<std::int64_t>> vals(static_cast<std::size_t>(n), units);
    const detail::TupleEvaluator ev(f, vals);
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    for (;;) {
        std::int64_t k = 0;
        for (int j = 0; j < n; ++j)
            if (const auto* c = spec.chars[static_cast<std::size_t>(j)]) k += c->index[static_cast<std::size_t>(units[idx[static_cast<std::size_t>(j)]])];
        ++counts[{detail::mod_i128(ev(idx), q), k % ord}];
        int j = 0;
        while (j < n && ++idx[static_cast<std::size_t>(j)] == units.size()) idx[static_cast<std::size_t>(j++)] = 0;
        if (j == n) break;
    }
    ComplexSum s;
    for (const auto& [key, cnt] : counts)
        s.add(static_cast<double>(cnt) * roots[static_cast<std::size_t>(mulmod(a, key.first, q))] *
              e_of(static_cast<long double>(key.second) / static_cast<long double>(ord)));
    return s.value();
}

inline Complex complete_sum(const Form& f, std::int64_t q, std::int64_t a) { return complete_sum(f, CompleteSumSpec{q, a, {}}); }

struct CompleteSumRow {
    std::int64_t q = 0;
    double abs_value = 0;
    double fit = 0;  // log|A| / log q; -inf when A = 0
    bool flagged = false;
};

struct CompleteSumBoundReport {
    double threshold = 0;  // n - codim / (2 (2d-1) 4^d) + 0.1
    std::vector<CompleteSumRow> rows;
    bool ok() const {
        return std::none_of(rows.begin(), rows.end(), [](const CompleteSumRow& r) { return r.flagged; });
    }
};

inline CompleteSumBoundReport complete_sum_bound_report(const Form& f, const std::vector<std::int64_t>& qs, int codim) {
    const int n = f.n_vars(), d = f.degree();
    if (d < 1) throw PreconditionError("complete_sum_bound_report: form must have positive degree");
    CompleteSumBoundReport rep;
    rep.threshold = n - static_cast<double>(codim) / (2.0 * (2 * d - 1) * std::pow(4.0, d)) + 0.1;
    for (std::int64_t q : qs) {
        CompleteSumRow row;
        row.q = q;
        row.abs_value = std::abs(complete_sum(f, q, 1));
        row.fit = q > 1 ? (row.abs_value > 0 ? std::log(row.abs_value) / std::log(static_cast<double>(q)) : -std::numeric_limits<double>::infinity()) : 0.0;
        row.flagged = q > 1 && row.fit > rep.threshold;
        rep.rows.push_back(row);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Orthogonality: the constant Fourier coefficient of S from M = 2B + 1 samples.

struct ExactMeanResult {
    double value = 0;
    std::int64_t B = 0;
    std::int64_t M = 0;
};

inline ExactMeanResult exact_mean(const Form& f, const WindowedBox& box, const SieveTables& tab, const SumOptions& opt = {}) {
    const auto sup = arithmetic_supports(box, tab, WeightMode::Lambda);
    // B = max |F| over the support tuples, from term-wise bounds
    BigInt B = 0;
    for (const auto& [e, c] : f.terms()) {
        BigInt m = abs(c);
        for (int j = 0; j < f.n_vars(); ++j) {
            const std::int64_t xmax = sup[static_cast<std::size_t>(j)].x.empty() ? 0 : sup[static_cast<std::size_t>(j)].x.back();
            for (int k = 0; k < e[static_cast<std::size_t>(j)]; ++k) m *= xmax;
        }
        B += m;
    }
    if (B > BigInt(1'000'000'000)) throw BudgetExceeded("exact_mean: value bound too large");
    ExactMeanResult r;
    r.B = B.convert_to<std::int64_t>();
    r.M = 2 * r.B + 1;
    double tuples = 1;
    for (const auto& s : sup) tuples *= static_cast<double>(s.x.size());
    if (tuples * static_cast<double>(r.M) > opt.budget) throw BudgetExceeded("exact_mean: M times box size exceeds budget");
    std::vector<Complex> vals(static_cast<std::size_t>(r.M));
    parallel_shards(static_cast<std::size_t>(r.M), opt.threads, [&](std::size_t j) {
        vals[j] = detail::weighted_phase_sum(f, sup, Alpha::fraction(static_cast<std::int64_t>(j), r.M), 1, opt.budget);
    });
    ComplexSum s;
    for (const auto& v : vals) s.add(v);
    r.value = s.value().real() / static_cast<double>(r.M);
    return r;
}

// ---------------------------------------------------------------------------
// Two applications of Cauchy-Schwarz over a split of the variables into u, v:
//   |S|^4 <= (sum_u |a_u|^2)^2 (sum_v |b_v|^2)^2 sum_{u,u',v,v'} e(alpha (F(u,v) - F(u,v') - F(u',v) + F(u',v')))

struct CauchySchwarzCheck {
    double lhs = 0;
    double mass_u = 0;
    double mass_v = 0;
    double box_sum = 0;
    double rhs = 0;
    bool holds() const { return lhs <= rhs * (1 + 1e-12) + 1e-300; }
};

inline CauchySchwarzCheck cauchy_schwarz_check(const Form& f, const WindowedBox& box, const SieveTables& tab, const Alpha& al,
                                               const IndexSet& u, double budget = 2e8) {
    const int n = f.n_vars();
    const IndexSet v = f.complement(u);
    if (u.empty() || v.empty()) throw PreconditionError("cauchy_schwarz_check: both blocks must be nonempty");
    const auto sup = arithmetic_supports(box, tab, WeightMode::Lambda);
    // enumerate block tuples
    auto tuples = [&](const IndexSet& blk) {
        std::vector<std::pair<std::vector<std::int64_t>, double>> out;
        std::vector<std::size_t> idx(blk.size(), 0);
        for (const int j : blk)
            if (sup[static_cast<std::size_t>(j)].x.empty()) return out;
        for (;;) {
            std::vector<std::int64_t> x;
            double w = 1;
            for (std::size_t i = 0; i < blk.size(); ++i) {
                x.push_back(sup[static_cast<std::size_t>(blk[i])].x[idx[i]]);
                w *= sup[static_cast<std::size_t>(blk[i])].w[idx[i]];
            }
            out.emplace_back(std::move(x), w);
            std::size_t i = 0;
            while (i < blk.size() && ++idx[i] == sup[static_cast<std::size_t>(blk[i])].x.size()) idx[i++] = 0;
            if (i == blk.size()) break;
        }
        return out;
    };
    const auto U = tuples(u), Vt = tuples(v);
    const double nu = static_cast<double>(U.size()), nv = static_cast<double>(Vt.size());
    if (nu * nu * nv * nv > budget) throw BudgetExceeded("cauchy_schwarz_check: quadruple sum exceeds budget");
    CauchySchwarzCheck c;
    for (const auto& [x, w] : U) c.mass_u += w * w;
    for (const auto& [x, w] : Vt) c.mass_v += w * w;
    // F on every (u, v) pair
    std::vector<i128> Fuv(U.size() * Vt.size());
    std::vector<BigInt> point(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < U.size(); ++i)
        for (std::size_t k = 0; k < Vt.size(); ++k) {
            for (std::size_t t = 0; t < u.size(); ++t) point[static_cast<std::size_t>(u[t])] = U[i].first[t];
            for (std::size_t t = 0; t < v.size(); ++t) point[static_cast<std::size_t>(v[t])] = Vt[k].first[t];
            Fuv[i * Vt.size() + k] = static_cast<i128>(f.evaluate(point).convert_to<long long>());
        }
    const detail::Phase phase(al);
    ComplexSum S, box_sum;
    for (std::size_t i = 0; i < U.size(); ++i)
        for (std::size_t k = 0; k < Vt.size(); ++k) S.add(U[i].second * Vt[k].second * phase(Fuv[i * Vt.size() + k]));
    for (std::size_t i = 0; i < U.size(); ++i)
        for (std::size_t i2 = 0; i2 < U.size(); ++i2)
            for (std::size_t k = 0; k < Vt.size(); ++k)
                for (std::size_t k2 = 0; k2 < Vt.size(); ++k2)
                    box_sum.add(phase(Fuv[i * Vt.size() + k] - Fuv[i * Vt.size() + k2] - Fuv[i2 * Vt.size() + k] + Fuv[i2 * Vt.size() + k2]));
    c.lhs = std::pow(std::abs(S.value()), 4);
    c.box_sum = box_sum.value().real();
    c.rhs = c.mass_u * c.mass_u * c.mass_v * c.mass_v * c.box_sum;
    return c;
}

}  // namespace hlcircle
