#pragma once

// Birch rank tools: exact Hessian rank for quadratics, F_p point counts of
// the singular locus V*_F = {grad F = 0}, slope-based dimension estimates,
// the structural dichotomy scan and rank concentration.

#include "hlcircle/forms.hpp"

#include <atomic>
#include <bit>
#include <functional>
#include <cstdint>
#include <map>
#include <random>
#include <string>

namespace hlcircle {

// ---------------------------------------------------------------------------
// Polynomials over F_p and a common-zero counter.

namespace detail {

class ModPoly {
public:
    ModPoly() = default;
    ModPoly(const Form& f, std::int64_t p) : p_(p) {
        for (const auto& [e, c] : f.terms()) add(e, mod_floor(c, p));
    }
    ModPoly(std::int64_t p) : p_(p) {}

    void add(const Exponent& e, std::int64_t c) {
        c = mod_floor(c, p_);
        if (c == 0) return;
        auto [it, inserted] = t_.try_emplace(e, c);
        if (!inserted) {
            it->second = (it->second + c) % p_;
            if (it->second == 0) t_.erase(it);
        }
    }

    bool is_zero() const { return t_.empty(); }
    bool is_nonzero_constant() const {
        return t_.size() == 1 && Form::total_degree(t_.begin()->first) == 0;
    }
    const std::map<Exponent, std::int64_t>& terms() const { return t_; }
    std::int64_t prime() const { return p_; }

    std::uint64_t used_mask() const {
        std::uint64_t m = 0;
        for (const auto& [e, c] : t_)
            for (std::size_t i = 0; i < e.size(); ++i)
                if (e[i]) m |= (1ull << i);
        return m;
    }

    ModPoly substitute_value(int var, std::int64_t v) const {
        ModPoly out(p_);
        for (const auto& [e, c] : t_) {
            Exponent ne = e;
            const int k = ne[var];
            ne[var] = 0;
            out.add(ne, mulmod(c, powmod(v, static_cast<unsigned>(k), p_), p_));
        }
        return out;
    }

    ModPoly operator*(const ModPoly& o) const {
        ModPoly out(p_);
        for (const auto& [e1, c1] : t_)
            for (const auto& [e2, c2] : o.t_) {
                Exponent e(e1.size());
                for (std::size_t i = 0; i < e.size(); ++i) e[i] = e1[i] + e2[i];
                out.add(e, mulmod(c1, c2, p_));
            }
        return out;
    }

    // Replaces x_var by the polynomial `l` (which must not involve x_var).
    ModPoly substitute_poly(int var, const ModPoly& l, std::size_t n) const {
        std::vector<ModPoly> powers{unit(n)};
        ModPoly out(p_);
        for (const auto& [e, c] : t_) {
            const int k = e[var];
            while (static_cast<int>(powers.size()) <= k) powers.push_back(powers.back() * l);
            Exponent rest = e;
            rest[var] = 0;
            ModPoly mono(p_);
            mono.add(rest, c);
            const ModPoly prod = mono * powers[k];
            for (const auto& [pe, pc] : prod.t_) out.add(pe, pc);
        }
        return out;
    }

    ModPoly unit(std::size_t n) const {
        ModPoly one(p_);
        one.add(Exponent(n, 0), 1);
        return one;
    }

    // If this equals c*x_var + R with c a nonzero constant and R free of
    // x_var, returns -R/c.
    std::optional<ModPoly> solve_linear(int var, std::size_t n) const {
        std::int64_t c = 0;
        ModPoly rest(p_);
        for (const auto& [e, coef] : t_) {
            if (e[var] == 0) {
                rest.add(e, coef);
            } else if (e[var] == 1 && Form::total_degree(e) == 1) {
                c = coef;
            } else {
                return std::nullopt;
            }
        }
        if (c == 0) return std::nullopt;
        const std::int64_t neg_inv = mod_floor(-powmod(c, static_cast<std::uint64_t>(p_ - 2), p_), p_);
        ModPoly out(p_);
        for (const auto& [e, coef] : rest.t_) out.add(e, mulmod(coef, neg_inv, p_));
        (void)n;
        return out;
    }

    // Dense univariate coefficients in x_var (requires no other variable).
    std::vector<std::int64_t> univariate(int var) const {
        std::vector<std::int64_t> out;
        for (const auto& [e, c] : t_) {
            const std::size_t k = static_cast<std::size_t>(e[var]);
            if (out.size() <= k) out.resize(k + 1, 0);
            out[k] = (out[k] + c) % p_;
        }
        return out;
    }

private:
    std::int64_t p_ = 2;
    std::map<Exponent, std::int64_t> t_;
};

using UPoly = std::vector<std::int64_t>;  // low degree first

inline void trim(UPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline UPoly upoly_mod(UPoly a, const UPoly& b, std::int64_t p) {
    trim(a);
    const std::int64_t inv = powmod(b.back(), static_cast<std::uint64_t>(p - 2), p);
    while (a.size() >= b.size()) {
        const std::int64_t f = mulmod(a.back(), inv, p);
        const std::size_t shift = a.size() - b.size();
        for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] = mod_floor(a[shift + i] - mulmod(f, b[i], p), p);
        trim(a);
    }
    return a;
}

inline UPoly upoly_gcd(UPoly a, UPoly b, std::int64_t p) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        UPoly r = upoly_mod(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

inline UPoly upoly_mulmod(const UPoly& a, const UPoly& b, const UPoly& m, std::int64_t p) {
    if (a.empty() || b.empty()) return {};
    UPoly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + mulmod(a[i], b[j], p)) % p;
    return upoly_mod(std::move(r), m, p);
}

// Number of distinct roots in F_p of a nonzero polynomial g.
inline std::int64_t count_distinct_roots(UPoly g, std::int64_t p) {
    trim(g);
    if (g.size() <= 1) return 0;
    // x^p mod g
    UPoly result{1};
    UPoly base = upoly_mod(UPoly{0, 1}, g, p);
    for (std::int64_t e = p; e > 0; e >>= 1) {
        if (e & 1) result = upoly_mulmod(result, base, g, p);
        base = upoly_mulmod(base, base, g, p);
    }
    // x^p - x
    if (result.size() < 2) result.resize(2, 0);
    result[1] = mod_floor(result[1] - 1, p);
    const UPoly h = upoly_gcd(g, result, p);
    return static_cast<std::int64_t>(h.size()) - 1;
}

class CommonZeroCounter {
public:
    CommonZeroCounter(std::size_t n, std::int64_t p, std::uint64_t node_budget)
        : n_(n), p_(p), budget_(node_budget) {}

    BigInt count(std::vector<ModPoly> polys, std::uint64_t live, unsigned threads) {
        return solve(std::move(polys), live, threads);
    }

    std::uint64_t nodes() const { return nodes_.load(); }

private:
    BigInt pow_p(int k) const { return boost::multiprecision::pow(BigInt(p_), static_cast<unsigned>(k)); }

    BigInt solve(std::vector<ModPoly> polys, std::uint64_t live, unsigned threads) {
        if (++nodes_ > budget_)
            throw BudgetExceeded("fp_singular_count: node budget exceeded (p=" + std::to_string(p_) + ")");
        for (;;) {
            std::vector<ModPoly> kept;
            kept.reserve(polys.size());
            for (auto& q : polys) {
                if (q.is_zero()) continue;
                if (q.is_nonzero_constant()) return 0;
                kept.push_back(std::move(q));
            }
            polys = std::move(kept);
            std::uint64_t used = 0;
            for (const auto& q : polys) used |= q.used_mask();
            if (polys.empty()) return pow_p(std::popcount(live));

            // Eliminate a variable that occurs linearly with constant coefficient.
            bool eliminated = false;
            for (std::size_t i = 0; i < polys.size() && !eliminated; ++i) {
                const std::uint64_t m = polys[i].used_mask();
                for (int v = 0; v < static_cast<int>(n_) && !eliminated; ++v) {
                    if (!(m >> v & 1)) continue;
                    auto sol = polys[i].solve_linear(v, n_);
                    if (!sol) continue;
                    std::vector<ModPoly> next;
                    next.reserve(polys.size() - 1);
                    for (std::size_t j = 0; j < polys.size(); ++j)
                        if (j != i) next.push_back(polys[j].substitute_poly(v, *sol, n_));
                    polys = std::move(next);
                    live &= ~(1ull << v);
                    eliminated = true;
                }
            }
            if (eliminated) continue;

            if (std::popcount(used) == 1) {
                const int v = std::countr_zero(used);
                UPoly g;
                for (const auto& q : polys) g = upoly_gcd(g, q.univariate(v), p_);
                return BigInt(count_distinct_roots(g, p_)) * pow_p(std::popcount(live) - 1);
            }

            // Branch on the most frequently used variable.
            int best = -1, best_count = -1;
            for (int v = 0; v < static_cast<int>(n_); ++v) {
                if (!(used >> v & 1)) continue;
                int c = 0;
                for (const auto& q : polys) c += static_cast<int>(q.used_mask() >> v & 1);
                if (c > best_count) {
                    best = v;
                    best_count = c;
                }
            }
            const std::uint64_t child_live = live & ~(1ull << best);
            std::vector<BigInt> parts(static_cast<std::size_t>(p_), BigInt(0));
            std::atomic<bool> failed{false};
            auto branch = [&](std::size_t val) {
                if (failed) return;
                try {
                    std::vector<ModPoly> sub;
                    sub.reserve(polys.size());
                    for (const auto& q : polys) sub.push_back(q.substitute_value(best, static_cast<std::int64_t>(val)));
                    parts[val] = solve(std::move(sub), child_live, 1);
                } catch (const BudgetExceeded&) {
                    failed = true;
                }
            };
            parallel_shards(static_cast<std::size_t>(p_), threads, branch);
            if (failed) throw BudgetExceeded("fp_singular_count: node budget exceeded (p=" + std::to_string(p_) + ")");
            BigInt total = 0;
            for (const auto& v : parts) total += v;
            return total;
        }
    }

    std::size_t n_;
    std::int64_t p_;
    std::uint64_t budget_;
    std::atomic<std::uint64_t> nodes_{0};
};

}  // namespace detail

inline constexpr std::uint64_t kDefaultNodeBudget = 20'000'000;

// #{x in F_p^n : every form in `polys` vanishes at x}. All forms share the
// ambient variable count n.
inline BigInt fp_common_zero_count(const std::vector<Form>& polys, int n, std::int64_t p, unsigned threads = 1,
                                   std::uint64_t node_budget = kDefaultNodeBudget) {
    if (!is_prime(p)) throw std::invalid_argument("fp_common_zero_count: modulus is not prime");
    if (n > 63) throw std::invalid_argument("fp_common_zero_count: too many variables");
    std::vector<detail::ModPoly> mp;
    for (const auto& f : polys) {
        if (f.n_vars() != n) throw std::invalid_argument("fp_common_zero_count: variable count mismatch");
        mp.emplace_back(f, p);
    }
    const std::uint64_t live = n == 0 ? 0 : (n == 64 ? ~0ull : ((1ull << n) - 1));
    detail::CommonZeroCounter counter(static_cast<std::size_t>(n), p, node_budget);
    return counter.count(std::move(mp), live, threads);
}

// Exact number of F_p points of the singular locus {grad F = 0}.
inline BigInt fp_singular_count(const Form& f, std::int64_t p, unsigned threads = 1,
                                std::uint64_t node_budget = kDefaultNodeBudget) {
    return fp_common_zero_count(f.gradient(), f.n_vars(), p, threads, node_budget);
}

// ---------------------------------------------------------------------------
// Rank estimates.

enum class RankMethod { HessianExact, FpSlope, ZeroForm };

inline std::string to_string(RankMethod m) {
    switch (m) {
        case RankMethod::HessianExact: return "hessian-exact";
        case RankMethod::FpSlope: return "fp-slope";
        case RankMethod::ZeroForm: return "zero-form";
    }
    return "?";
}

struct RankEstimate {
    int codim = 0;
    RankMethod method = RankMethod::FpSlope;
    std::vector<std::int64_t> primes_used;
    std::vector<BigInt> counts;
    double slope = 0;
    double residual = 0;
    bool confident = true;
};

namespace detail {

// Least-squares slope of log(count) against log(p), with intercept.
inline void fit_slope(RankEstimate& r) {
    const std::size_t k = r.primes_used.size();
    std::vector<double> lx(k), ly(k);
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < k; ++i) {
        lx[i] = std::log(static_cast<double>(r.primes_used[i]));
        ly[i] = std::log(std::max(1.0, static_cast<double>(r.counts[i])));
        mx += lx[i] / static_cast<double>(k);
        my += ly[i] / static_cast<double>(k);
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < k; ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    r.slope = sxy / sxx;
    r.residual = std::abs(r.slope - std::round(r.slope));
    r.confident = r.residual < 0.25 &&
                  std::none_of(r.counts.begin(), r.counts.end(), [](const BigInt& c) { return c == 0; });
}

}  // namespace detail

// Rank of a rational matrix by fraction-exact elimination.
inline int rational_rank(std::vector<std::vector<Rational>> a) {
    const std::size_t rows = a.size();
    const std::size_t cols = rows ? a[0].size() : 0;
    int rank = 0;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && a[piv][c] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(a[piv], a[r]);
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0) continue;
            const Rational f = a[i][c] / a[r][c];
            for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
        }
        ++r;
        ++rank;
    }
    return rank;
}

// Symmetric matrix M with F = x^T M x / 2 for a quadratic form.
inline std::vector<std::vector<Rational>> hessian_matrix(const Form& f) {
    const int n = f.n_vars();
    std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n, Rational(0)));
    for (const auto& [e, c] : f.terms()) {
        std::vector<int> idx;
        for (int i = 0; i < n; ++i)
            for (int r = 0; r < e[i]; ++r) idx.push_back(i);
        if (idx[0] == idx[1]) {
            m[idx[0]][idx[0]] += Rational(2 * c);
        } else {
            m[idx[0]][idx[1]] += Rational(c);
            m[idx[1]][idx[0]] += Rational(c);
        }
    }
    return m;
}

inline RankEstimate hessian_codim(const Form& f) {
    RankEstimate r;
    if (f.is_zero()) {
        r.method = RankMethod::ZeroForm;
        return r;
    }
    if (f.degree() != 2 || !f.is_homogeneous())
        throw std::invalid_argument("hessian_codim: form is not a homogeneous quadratic");
    r.method = RankMethod::HessianExact;
    r.codim = rational_rank(hessian_matrix(f));
    return r;
}

// Primes for slope fits: fixed large primes for quadratics (elimination is
// linear-time there), otherwise the largest primes whose branching work
// p^(n-2) stays near 10^6.
inline std::vector<std::int64_t> default_rank_primes(const Form& f) {
    if (f.degree() <= 2) return {101, 211, 401};
    const int n = std::max(2, f.n_vars());
    const double cap = n <= 3 ? 401.0 : std::pow(2.0e6, 1.0 / (n - 2));
    std::vector<std::int64_t> ps;
    for (std::int64_t p = static_cast<std::int64_t>(cap); p >= 5 && ps.size() < 3; --p)
        if (is_prime(p)) ps.push_back(p);
    std::reverse(ps.begin(), ps.end());
    return ps;
}

// Slope-based codimension estimate: #V*(F_p) ~ p^dim across several primes.
inline RankEstimate estimate_codim(const Form& f, std::vector<std::int64_t> primes = {}, unsigned threads = 1,
                                   std::uint64_t node_budget = kDefaultNodeBudget) {
    RankEstimate r;
    const int n = f.n_vars();
    if (f.is_zero()) {
        r.method = RankMethod::ZeroForm;
        r.codim = 0;
        return r;
    }
    if (primes.empty()) primes = default_rank_primes(f);
    if (primes.size() < 3) throw std::invalid_argument("estimate_codim: need at least three primes");
    r.method = RankMethod::FpSlope;
    r.primes_used = primes;
    for (auto p : primes) r.counts.push_back(fp_singular_count(f, p, threads, node_budget));
    detail::fit_slope(r);
    const double dim = std::round(r.slope);
    r.codim = std::clamp(n - static_cast<int>(dim), 0, n);
    return r;
}

// ---------------------------------------------------------------------------
// Thresholds.

inline BigInt c0_threshold(int d, const Rational& theta0) {
    if (theta0 <= 0 || theta0 >= 1) throw std::invalid_argument("c0_threshold: theta0 must lie in (0,1)");
    if (d < 1) throw std::invalid_argument("c0_threshold: degree must be positive");
    const Rational bound = Rational(BigInt(8) * d * (d - 1) * (BigInt(1) << d)) / theta0;
    // least integer strictly greater than bound
    BigInt fl = numerator(bound) / denominator(bound);
    if (Rational(fl) > bound) fl -= 1;
    return fl + 1;
}

inline BigInt codim_threshold(int d) {
    if (d < 2) throw std::invalid_argument("codim_threshold: degree must be at least 2");
    const BigInt dd = d;
    return BigInt(256) * 81 * 25 * dd * dd * dd * (2 * dd - 1) * (2 * dd - 1) * (BigInt(1) << (2 * d));
}

// ---------------------------------------------------------------------------
// Structural lemmas checked with estimated codimensions.

using CodimFn = std::function<int(const Form&)>;

inline CodimFn slope_estimator(std::vector<std::int64_t> primes = {}, unsigned threads = 1) {
    return [primes, threads](const Form& f) {
        if (f.is_zero()) return 0;
        if (f.degree() == 2 && f.is_homogeneous()) return hessian_codim(f).codim;
        return estimate_codim(f, primes, threads).codim;
    };
}

inline CodimFn fp_only_estimator(std::vector<std::int64_t> primes = {}, unsigned threads = 1) {
    return [primes, threads](const Form& f) { return estimate_codim(f, primes, threads).codim; };
}

struct RestrictionReport {
    int s = 0;
    int codim_full = 0;
    int codim_restricted = 0;
    bool lower_ok = false;  // codim F - 2s <= codim F|
    bool upper_ok = false;  // codim F| <= codim F
    bool flagged() const { return !(lower_ok && upper_ok); }
};

inline RestrictionReport check_restriction_bounds(const Form& f, int s, const CodimFn& codim) {
    if (s < 0 || s > f.n_vars()) throw std::invalid_argument("check_restriction_bounds: bad s");
    IndexSet zeroed(s);
    std::iota(zeroed.begin(), zeroed.end(), 0);
    RestrictionReport r;
    r.s = s;
    r.codim_full = codim(f);
    r.codim_restricted = codim(f.restrict_zero(zeroed));
    r.lower_ok = r.codim_full - 2 * s <= r.codim_restricted;
    r.upper_ok = r.codim_restricted <= r.codim_full;
    return r;
}

struct SubadditivityReport {
    int codim_f = 0, codim_fu = 0, codim_g = 0, codim_fv = 0;
    bool holds = false;
};

inline SubadditivityReport check_subadditivity(const Form& f, const IndexSet& u, const IndexSet& v, const CodimFn& codim) {
    VariablePartition{{u, v}}.validate(f.n_vars());
    SubadditivityReport r;
    r.codim_f = codim(f);
    r.codim_fu = codim(f.restrict_to(u));
    r.codim_fv = codim(f.restrict_to(v));
    r.codim_g = codim(cross_part(f, u, v));
    r.holds = r.codim_f <= r.codim_fu + r.codim_g + r.codim_fv;
    return r;
}

enum class DichotomyCase { I, II };

struct PartitionPolicy {
    enum class Kind { Exhaustive, Randomized } kind = Kind::Exhaustive;
    std::size_t samples = 200;
    std::uint64_t seed = 1;
};

struct DichotomyWitness {
    IndexSet u, v, w;
    int codim_g = 0;
};

struct DichotomyVerdict {
    DichotomyCase verdict = DichotomyCase::II;
    std::optional<DichotomyWitness> witness;
    BigInt c0 = 0;
    std::size_t partitions_scanned = 0;
    int max_codim_g = 0;
    std::string family;
};

namespace detail {

// Label per variable: 0 = u, 1 = v, 2 = w. Canonical when the first
// variable not in w is in u (swapping u and v gives the same cross part up
// to renaming) and both u and v are nonempty.
inline bool canonical_labels(const std::vector<int>& lab) {
    int first = -1;
    bool has_u = false, has_v = false;
    for (int l : lab) {
        if (l != 2 && first < 0) first = l;
        has_u |= l == 0;
        has_v |= l == 1;
    }
    return has_u && has_v && first == 0;
}

inline DichotomyWitness witness_from(const std::vector<int>& lab) {
    DichotomyWitness w;
    for (int i = 0; i < static_cast<int>(lab.size()); ++i) (lab[i] == 0 ? w.u : lab[i] == 1 ? w.v : w.w).push_back(i);
    return w;
}

}  // namespace detail

inline DichotomyVerdict dichotomy_classify(const Form& f, const BigInt& c0, const PartitionPolicy& policy,
                                           const CodimFn& codim) {
    const int n = f.n_vars();
    DichotomyVerdict out;
    out.c0 = c0;
    std::map<std::string, int> cache;
    auto visit = [&](const std::vector<int>& lab) {
        DichotomyWitness w = detail::witness_from(lab);
        const Form g = cross_part(f, w.u, w.v);
        ++out.partitions_scanned;
        int c = 0;
        if (!g.is_zero()) {
            const std::string key = g.to_file_text();
            auto it = cache.find(key);
            c = it != cache.end() ? it->second : (cache[key] = codim(g));
        }
        out.max_codim_g = std::max(out.max_codim_g, c);
        if (BigInt(c) > c0) {
            w.codim_g = c;
            out.verdict = DichotomyCase::I;
            out.witness = std::move(w);
            return true;
        }
        return false;
    };
    if (policy.kind == PartitionPolicy::Kind::Exhaustive) {
        if (n > 12) throw std::invalid_argument("dichotomy_classify: exhaustive policy limited to n <= 12");
        out.family = "exhaustive";
        std::vector<int> lab(n, 0);
        std::int64_t total = ipow(3, static_cast<unsigned>(n));
        for (std::int64_t code = 0; code < total; ++code) {
            std::int64_t c = code;
            for (int i = 0; i < n; ++i) {
                lab[i] = static_cast<int>(c % 3);
                c /= 3;
            }
            if (!detail::canonical_labels(lab)) continue;
            if (visit(lab)) return out;
        }
    } else {
        out.family = "randomized(seed=" + std::to_string(policy.seed) + ",samples=" + std::to_string(policy.samples) + ")";
        std::mt19937_64 rng(policy.seed);
        std::uniform_int_distribution<int> pick(0, 2);
        std::vector<int> lab(n);
        for (std::size_t s = 0; s < policy.samples; ++s) {
            for (auto& l : lab) l = pick(rng);
            // canonicalize by swapping u and v
            int first = -1;
            for (int l : lab)
                if (l != 2) {
                    first = l;
                    break;
                }
            if (first == 1)
                for (auto& l : lab)
                    if (l != 2) l = 1 - l;
            if (!detail::canonical_labels(lab)) continue;
            if (visit(lab)) return out;
        }
    }
    out.verdict = DichotomyCase::II;
    return out;
}

struct RankConcentration {
    std::size_t block = 0;
    std::vector<int> block_codims;
    int codim_f = 0;
    Rational bound = 0;
    bool violation = false;
};

inline RankConcentration rank_concentration(const Form& f, const VariablePartition& part, const BigInt& c0,
                                            const CodimFn& codim) {
    part.validate(f.n_vars());
    if (part.blocks.empty()) throw std::invalid_argument("rank_concentration: empty partition");
    RankConcentration r;
    r.codim_f = codim(f);
    const auto k = static_cast<std::int64_t>(part.blocks.size());
    r.bound = Rational(BigInt(r.codim_f) - BigInt(k - 1) * c0) / Rational(k);
    int best = -1;
    for (std::size_t i = 0; i < part.blocks.size(); ++i) {
        const int c = codim(f.restrict_to(part.blocks[i]));
        r.block_codims.push_back(c);
        if (c > best) {
            best = c;
            r.block = i;
        }
    }
    r.violation = Rational(best) < r.bound;
    return r;
}

// Codimension (ambient 2m) of the locus where the u-gradient (side = 0) or
// v-gradient (side = 1) of G(u; v) = F(u_1 v_1, ..., u_m v_m) vanishes.
inline RankEstimate bihomogeneous_partial_codim(const Form& f, int side, std::vector<std::int64_t> primes,
                                                unsigned threads = 1) {
    const Form g = substitute_diagonal(f);
    const int m = f.n_vars();
    std::vector<Form> comps;
    for (int i = 0; i < m; ++i) comps.push_back(g.derivative(side == 0 ? i : m + i));
    RankEstimate r;
    r.method = RankMethod::FpSlope;
    r.primes_used = primes;
    for (auto p : primes) r.counts.push_back(fp_common_zero_count(comps, 2 * m, p, threads));
    detail::fit_slope(r);
    r.codim = 2 * m - static_cast<int>(std::round(r.slope));
    return r;
}

}  // namespace hlcircle
