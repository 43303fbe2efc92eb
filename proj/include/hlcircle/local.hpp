#pragma once

// p-adic densities over unit residues, the singular series and Hensel
// witnesses.

#include "hlcircle/common.hpp"
#include "hlcircle/expsums.hpp"
#include "hlcircle/forms.hpp"

namespace hlcircle {

// #{h in ((Z/p^k)^*)^n : F(h) = 0 mod p^k}, found level by level: a solution
// mod p^k reduces to one mod p^(k-1), so only lifts of those are tried.
inline std::int64_t unit_solutions_lifting(const Form& f, std::int64_t p, int k, double budget = 1e9) {
    if (!is_prime(p)) throw PreconditionError("unit_solutions: p must be prime");
    if (k < 1) throw PreconditionError("unit_solutions: k must be at least 1");
    const int n = f.n_vars();
    const double pn = std::pow(static_cast<double>(p), n);
    if (pn > budget) throw BudgetExceeded("unit_solutions: p^n exceeds budget");
    std::vector<std::vector<std::int64_t>> level;
    std::vector<std::int64_t> h(static_cast<std::size_t>(n), 1);
    // level 1: units are 1..p-1
    for (;;) {
        if (f.evaluate_mod(h, p) == 0) level.push_back(h);
        int j = 0;
        while (j < n && ++h[static_cast<std::size_t>(j)] == p) h[static_cast<std::size_t>(j++)] = 1;
        if (j == n) break;
    }
    std::int64_t pk = p;
    for (int lev = 2; lev <= k; ++lev) {
        if (static_cast<double>(level.size()) * pn > budget) throw BudgetExceeded("unit_solutions: lifting exceeds budget");
        if (static_cast<double>(level.size()) * pn / static_cast<double>(p) > 5e7) throw BudgetExceeded("unit_solutions: lifted solution list too large");
        const std::int64_t next = pk * p;
        std::vector<std::vector<std::int64_t>> lifted;
        std::vector<std::int64_t> t(static_cast<std::size_t>(n), 0), x(static_cast<std::size_t>(n));
        for (const auto& base : level) {
            std::fill(t.begin(), t.end(), 0);
            for (;;) {
                for (int j = 0; j < n; ++j) x[static_cast<std::size_t>(j)] = base[static_cast<std::size_t>(j)] + pk * t[static_cast<std::size_t>(j)];
                if (f.evaluate_mod(x, next) == 0) lifted.push_back(x);
                int j = 0;
                while (j < n && ++t[static_cast<std::size_t>(j)] == p) t[static_cast<std::size_t>(j++)] = 0;
                if (j == n) break;
            }
        }
        level = std::move(lifted);
        pk = next;
    }
    return static_cast<std::int64_t>(level.size());
}

// Separable forms go through the residue convolution, everything else
// through lifting.
inline std::int64_t unit_solutions(const Form& f, std::int64_t p, int k, double budget = 1e9) {
    if (!is_prime(p)) throw PreconditionError("unit_solutions: p must be prime");
    if (k < 1) throw PreconditionError("unit_solutions: k must be at least 1");
    bool separable = true;
    for (const auto& [e, c] : f.terms())
        if (std::count_if(e.begin(), e.end(), [](int v) { return v > 0; }) > 1) separable = false;
    if (separable) {
        const std::int64_t pk = ipow(p, static_cast<unsigned>(k));
        if (static_cast<double>(pk) * static_cast<double>(pk) * f.n_vars() > budget) throw BudgetExceeded("unit_solutions: p^k too large");
        return unit_residue_counts(f, pk)[0];
    }
    return unit_solutions_lifting(f, p, k, budget);
}

// sigma_p(k) = M*(p^k) p^k / phi(p^k)^n
inline Rational sigma_p(const Form& f, std::int64_t p, int k) {
    const std::int64_t pk = ipow(p, static_cast<unsigned>(k));
    const BigInt phi = pk / p * (p - 1);
    BigInt den = 1;
    for (int j = 0; j < f.n_vars(); ++j) den *= phi;
    return Rational(BigInt(unit_solutions(f, p, k)) * pk, den);
}

// c_q(r) = sum_{d | gcd(q, r)} mu(q/d) d
inline std::int64_t ramanujan_sum(std::int64_t q, std::int64_t r) {
    const std::int64_t g = gcd64(mod_floor(r, q), q) == 0 ? q : gcd64(mod_floor(r, q), q);
    auto mobius = [](std::int64_t m) {
        int s = 1;
        for (const auto& pp : factorize(m)) {
            if (pp.k > 1) return 0;
            s = -s;
        }
        return s;
    };
    std::int64_t acc = 0;
    for (std::int64_t d = 1; d * d <= g; ++d) {
        if (g % d) continue;
        acc += mobius(q / d) * d;
        if (d * d != g) acc += mobius(q / (g / d)) * (g / d);
    }
    return acc;
}

// B(q) = phi(q)^-n sum_{a in U_q} A(q, a), exact through Ramanujan sums of
// the residue distribution of F over unit tuples.
inline Rational series_term(const Form& f, std::int64_t q, double budget = 5e8) {
    if (q <= 0) throw PreconditionError("series_term: q must be positive");
    const auto counts = unit_residue_counts(f, q, budget);
    BigInt num = 0;
    for (std::int64_t r = 0; r < q; ++r)
        if (counts[static_cast<std::size_t>(r)]) num += BigInt(counts[static_cast<std::size_t>(r)]) * ramanujan_sum(q, r);
    BigInt den = 1;
    for (int j = 0; j < f.n_vars(); ++j) den *= euler_phi(q);
    return Rational(num, den);
}

// The same term from explicit complete sums in floating point.
inline double series_term_from_sums(const Form& f, std::int64_t q) {
    CompensatedSum<double> s;
    for (std::int64_t a = 0; a < q; ++a)
        if (gcd64(a, q) == 1 || q == 1) s.add(complete_sum(f, q, a).real());
    return s.value() / std::pow(static_cast<double>(euler_phi(q)), f.n_vars());
}

struct SeriesRow {
    std::int64_t q = 0;
    Rational term;
    double term_value = 0;
    double partial = 0;  // sum_{q' <= q} B(q')
};

struct SingularSeries {
    std::int64_t Q = 0;
    double value = 0;
    std::vector<SeriesRow> rows;
    double tail_slope = 0;  // least-squares slope of log|B(q)| against log q over nonzero terms, q >= 2
    int tail_points = 0;
};

// Partial sums up to Q. With `multiplicative` set, B(q) is assembled from its
// prime-power factors.
inline SingularSeries singular_series(const Form& f, std::int64_t Q, bool multiplicative = true, unsigned threads = 1) {
    if (Q < 1) throw PreconditionError("singular_series: Q must be at least 1");
    std::vector<Rational> terms(static_cast<std::size_t>(Q) + 1);
    std::vector<std::int64_t> todo;
    for (std::int64_t q = 1; q <= Q; ++q) {
        const auto fac = factorize(q);
        if (!multiplicative || fac.size() <= 1) todo.push_back(q);
    }
    parallel_shards(todo.size(), threads, [&](std::size_t i) { terms[static_cast<std::size_t>(todo[i])] = series_term(f, todo[i]); });
    if (multiplicative)
        for (std::int64_t q = 2; q <= Q; ++q) {
            const auto fac = factorize(q);
            if (fac.size() <= 1) continue;
            Rational t = 1;
            for (const auto& pp : fac) t *= terms[static_cast<std::size_t>(ipow(pp.p, static_cast<unsigned>(pp.k)))];
            terms[static_cast<std::size_t>(q)] = t;
        }
    SingularSeries out;
    out.Q = Q;
    CompensatedSum<double> acc;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::int64_t q = 1; q <= Q; ++q) {
        SeriesRow r;
        r.q = q;
        r.term = terms[static_cast<std::size_t>(q)];
        r.term_value = r.term.convert_to<double>();
        acc.add(r.term_value);
        r.partial = acc.value();
        if (q >= 2 && r.term_value != 0) {
            const double x = std::log(static_cast<double>(q)), y = std::log(std::abs(r.term_value));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++out.tail_points;
        }
        out.rows.push_back(std::move(r));
    }
    out.value = acc.value();
    if (out.tail_points >= 2) {
        const double m = out.tail_points;
        const double den = m * sxx - sx * sx;
        out.tail_slope = den != 0 ? (m * sxy - sx * sy) / den : 0.0;
    }
    return out;
}

// prod_{p <= P} sigma_p(k_p), with k_p the given exponent for every p.
inline Rational euler_product(const Form& f, std::int64_t P, int k) {
    Rational acc = 1;
    for (std::int64_t p = 2; p <= P; ++p)
        if (is_prime(p)) acc *= sigma_p(f, p, k);
    return acc;
}

// ---------------------------------------------------------------------------
// Hensel witnesses.

enum class LocalStatus { Witness, Obstruction, Inconclusive };

inline std::string to_string(LocalStatus s) {
    switch (s) {
        case LocalStatus::Witness: return "witness";
        case LocalStatus::Obstruction: return "obstruction";
        case LocalStatus::Inconclusive: return "inconclusive";
    }
    return "?";
}

struct HenselResult {
    LocalStatus status = LocalStatus::Inconclusive;
    std::int64_t p = 0;
    int level = 0;      // modulus p^level where the decision was made
    int valuation = 0;  // m = min_i v_p(dF/dx_i (h)) for the witness
    std::vector<std::int64_t> h;
    std::string note;
};

namespace detail {

inline int valuation_capped(std::int64_t v, std::int64_t p, int cap) {
    if (v == 0) return cap;
    int m = 0;
    while (m < cap && v % p == 0) {
        v /= p;
        ++m;
    }
    return m;
}

}  // namespace detail

// Searches unit h mod p^k with F(h) = 0 mod p^(2m+1), where m = min v_p of the
// partials at h; such h lifts to a p-adic unit solution. Level 1 is tried for
// every p, levels 2 and 3 only for p <= 7.
inline HenselResult hensel_unit_witness(const Form& f, std::int64_t p, double budget = 1e9) {
    if (!is_prime(p)) throw PreconditionError("hensel_unit_witness: p must be prime");
    const int n = f.n_vars();
    HenselResult res;
    res.p = p;
    const auto grad = f.gradient();
    const int max_level = p <= 7 ? 3 : 1;
    for (int k = 1; k <= max_level; ++k) {
        const std::int64_t pk = ipow(p, static_cast<unsigned>(k));
        if (std::pow(static_cast<double>(pk), n) > budget) {
            res.status = LocalStatus::Inconclusive;
            res.level = k;
            res.note = "search mod p^k exceeds budget";
            return res;
        }
        std::int64_t zeros = 0;
        std::vector<std::int64_t> h(static_cast<std::size_t>(n), 1);
        for (;;) {
            bool unit = true;
            for (auto v : h) unit = unit && v % p != 0;
            if (unit && f.evaluate_mod(h, pk) == 0) {
                ++zeros;
                int m = k;
                for (const auto& g : grad) m = std::min(m, detail::valuation_capped(g.evaluate_mod(h, pk), p, k));
                if (2 * m + 1 <= k) {
                    res.status = LocalStatus::Witness;
                    res.level = k;
                    res.valuation = m;
                    res.h = h;
                    res.note = m == 0 ? "nonsingular mod p" : "lifts by the refined Hensel criterion";
                    return res;
                }
            }
            int j = 0;
            while (j < n && ++h[static_cast<std::size_t>(j)] == pk) h[static_cast<std::size_t>(j++)] = 1;
            if (j == n) break;
        }
        if (zeros == 0) {
            res.status = LocalStatus::Obstruction;
            res.level = k;
            res.note = "no unit solutions mod p^" + std::to_string(k);
            return res;
        }
    }
    res.status = LocalStatus::Inconclusive;
    res.level = max_level;
    res.note = "unit zeros exist but none certified liftable up to p^" + std::to_string(max_level);
    return res;
}

}  // namespace hlcircle
