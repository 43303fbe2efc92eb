#pragma once

// Sieved arithmetic functions, the Vaughan identity components and
// Dirichlet character groups.

#include "hlcircle/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

namespace hlcircle {

inline constexpr std::int64_t kSieveLimitMax = 100'000'000;

// Tables for 0 <= x <= limit. Lambda is kept as its underlying prime so that
// sums can be regrouped by prime when needed.
class SieveTables {
public:
    explicit SieveTables(std::int64_t limit) : limit_(limit) {
        if (limit < 1) throw std::invalid_argument("build_tables: limit must be at least 1");
        if (limit > kSieveLimitMax) throw BudgetExceeded("build_tables: limit exceeds 10^8");
        const auto n = static_cast<std::size_t>(limit) + 1;
        spf_.assign(n, 0);
        base_.assign(n, 0);
        mu_.assign(n, 0);
        sigma0_.assign(n, 0);
        std::vector<std::uint8_t> expo(n, 0);
        std::vector<std::int32_t> rest(n, 0);  // x with its smallest prime removed
        if (n > 1) {
            mu_[1] = 1;
            sigma0_[1] = 1;
            rest[1] = 1;
        }
        for (std::size_t x = 2; x < n; ++x) {
            if (spf_[x] == 0) {
                spf_[x] = static_cast<std::int32_t>(x);
                primes_.push_back(static_cast<std::int64_t>(x));
            }
            for (std::int64_t p : primes_) {
                if (p > spf_[x] || static_cast<std::size_t>(p) * x >= n) break;
                spf_[static_cast<std::size_t>(p) * x] = static_cast<std::int32_t>(p);
            }
            const std::size_t p = static_cast<std::size_t>(spf_[x]);
            const std::size_t y = x / p;
            if (y > 1 && static_cast<std::size_t>(spf_[y]) == p) {
                expo[x] = static_cast<std::uint8_t>(expo[y] + 1);
                rest[x] = rest[y];
                mu_[x] = 0;
            } else {
                expo[x] = 1;
                rest[x] = static_cast<std::int32_t>(y);
                mu_[x] = static_cast<std::int8_t>(-mu_[y]);
            }
            sigma0_[x] = sigma0_[static_cast<std::size_t>(rest[x])] * (expo[x] + 1);
            if (rest[x] == 1) base_[x] = static_cast<std::int32_t>(p);
        }
    }

    std::int64_t limit() const { return limit_; }
    const std::vector<std::int64_t>& primes() const { return primes_; }

    bool is_prime(std::int64_t x) const { return x >= 2 && spf_[idx(x)] == x; }
    bool is_prime_power(std::int64_t x) const { return x >= 2 && base_[idx(x)] != 0; }
    std::int64_t lambda_base(std::int64_t x) const { return x >= 2 ? base_[idx(x)] : 0; }
    double lambda(std::int64_t x) const {
        const std::int64_t b = lambda_base(x);
        return b ? std::log(static_cast<double>(b)) : 0.0;
    }
    double lambda_star(std::int64_t x) const { return is_prime(x) ? std::log(static_cast<double>(x)) : 0.0; }
    int mu(std::int64_t x) const { return x >= 1 ? mu_[idx(x)] : 0; }
    std::int64_t sigma0(std::int64_t x) const { return x >= 1 ? sigma0_[idx(x)] : 0; }
    std::int64_t smallest_prime_factor(std::int64_t x) const { return spf_[idx(x)]; }

    std::int64_t prime_pi(std::int64_t x) const {
        return std::upper_bound(primes_.begin(), primes_.end(), x) - primes_.begin();
    }

    // Sorted divisors of x.
    std::vector<std::int64_t> divisors(std::int64_t x) const {
        std::vector<std::int64_t> divs{1};
        while (x > 1) {
            const std::int64_t p = spf_[idx(x)];
            int e = 0;
            while (x % p == 0) {
                x /= p;
                ++e;
            }
            const std::size_t base_count = divs.size();
            std::int64_t pk = 1;
            for (int k = 1; k <= e; ++k) {
                pk *= p;
                for (std::size_t i = 0; i < base_count; ++i) divs.push_back(divs[i] * pk);
            }
        }
        std::sort(divs.begin(), divs.end());
        return divs;
    }

private:
    std::size_t idx(std::int64_t x) const {
        if (x < 0 || x > limit_) throw std::out_of_range("SieveTables: argument outside the sieved range");
        return static_cast<std::size_t>(x);
    }

    std::int64_t limit_;
    std::vector<std::int32_t> spf_;
    std::vector<std::int32_t> base_;
    std::vector<std::int8_t> mu_;
    std::vector<std::int32_t> sigma0_;
    std::vector<std::int64_t> primes_;
};

inline SieveTables build_tables(std::int64_t limit) { return SieveTables(limit); }

// nu_2(s) = - sum_{cd = s, c <= V, d <= U} mu(c) Lambda(d)
inline double nu2(const SieveTables& t, std::int64_t s, double U, double V) {
    if (s < 1) throw std::invalid_argument("nu2: s must be positive");
    double acc = 0;
    for (std::int64_t d : t.divisors(s)) {
        const std::int64_t c = s / d;
        if (d <= U && c <= V) acc -= t.mu(c) * t.lambda(d);
    }
    return acc;
}

// nu_3(t) = - sum_{c | t, c <= V} mu(c)
inline std::int64_t nu3(const SieveTables& tab, std::int64_t t, double V) {
    if (t < 1) throw std::invalid_argument("nu3: t must be positive");
    std::int64_t acc = 0;
    for (std::int64_t c : tab.divisors(t)) {
        if (c > V) break;
        acc -= tab.mu(c);
    }
    return acc;
}

// The four pieces of the right-hand side of Vaughan's identity at x.
struct VaughanTerms {
    double small = 0;     // Lambda(x) 1_{[1,U]}(x)
    double type_i = 0;    // sum_{st=x, s<=V} mu(s) log t
    double nu2_part = 0;  // sum_{st=x, s<=UV} nu_2(s)
    double type_ii = 0;   // sum_{st=x, s>U, t>V} Lambda(s) nu_3(t)
    double total() const { return small + type_i + nu2_part + type_ii; }
};

inline VaughanTerms vaughan_terms(const SieveTables& tab, std::int64_t x, double U, double V) {
    if (x < 1) throw std::invalid_argument("vaughan_terms: x must be positive");
    VaughanTerms r;
    if (x <= U) r.small = tab.lambda(x);
    for (std::int64_t s : tab.divisors(x)) {
        const std::int64_t t = x / s;
        if (s <= V) r.type_i += tab.mu(s) * std::log(static_cast<double>(t));
        if (s <= U * V) r.nu2_part += nu2(tab, s, U, V);
        if (s > U && t > V && tab.lambda_base(s) != 0) r.type_ii += tab.lambda(s) * static_cast<double>(nu3(tab, t, V));
    }
    return r;
}

inline double vaughan_residual(const SieveTables& tab, std::int64_t x, double U, double V) {
    return tab.lambda(x) - vaughan_terms(tab, x, U, V).total();
}

// Bulk residuals on [1, limit] built by sieving over products st, independent
// of the per-x divisor route above.
inline std::vector<double> vaughan_residuals_bulk(const SieveTables& tab, std::int64_t limit, double U, double V) {
    if (limit > tab.limit()) throw std::invalid_argument("vaughan_residuals_bulk: limit beyond tables");
    const auto n = static_cast<std::size_t>(limit) + 1;
    std::vector<double> nu2_tab(n, 0.0);
    std::vector<std::int64_t> nu3_tab(n, 0);
    for (std::int64_t c = 1; c <= limit && c <= V; ++c) {
        if (tab.mu(c) == 0) continue;
        for (std::int64_t d = 1; d <= U && c * d <= limit; ++d)
            if (tab.lambda_base(d)) nu2_tab[static_cast<std::size_t>(c * d)] -= tab.mu(c) * tab.lambda(d);
        for (std::int64_t t = c; t <= limit; t += c) nu3_tab[static_cast<std::size_t>(t)] -= tab.mu(c);
    }
    std::vector<double> rhs(n, 0.0);
    for (std::int64_t x = 1; x <= limit && x <= U; ++x) rhs[static_cast<std::size_t>(x)] += tab.lambda(x);
    for (std::int64_t s = 1; s <= limit && s <= V; ++s) {
        if (tab.mu(s) == 0) continue;
        for (std::int64_t t = 1; s * t <= limit; ++t)
            rhs[static_cast<std::size_t>(s * t)] += tab.mu(s) * std::log(static_cast<double>(t));
    }
    for (std::int64_t s = 1; s <= limit && s <= U * V; ++s) {
        const double v = nu2_tab[static_cast<std::size_t>(s)];
        if (v == 0) continue;
        for (std::int64_t t = 1; s * t <= limit; ++t) rhs[static_cast<std::size_t>(s * t)] += v;
    }
    for (std::int64_t s = static_cast<std::int64_t>(std::floor(U)) + 1; s <= limit; ++s) {
        if (!tab.lambda_base(s)) continue;
        const double ls = tab.lambda(s);
        for (std::int64_t t = static_cast<std::int64_t>(std::floor(V)) + 1; s * t <= limit; ++t)
            rhs[static_cast<std::size_t>(s * t)] += ls * static_cast<double>(nu3_tab[static_cast<std::size_t>(t)]);
    }
    std::vector<double> res(n, 0.0);
    for (std::int64_t x = 1; x <= limit; ++x) res[static_cast<std::size_t>(x)] = tab.lambda(x) - rhs[static_cast<std::size_t>(x)];
    return res;
}

// ---------------------------------------------------------------------------
// Dirichlet characters.

// A character mod q with values e(index(x) / order) on units and 0 elsewhere;
// `order` is the exponent of (Z/qZ)^*, shared by every character mod q.
struct DirichletCharacter {
    std::int64_t q = 1;
    std::int64_t order = 1;
    std::vector<std::int64_t> index;  // -1 for non-units
    std::vector<std::int64_t> label;  // component indices, for display
    bool is_principal = true;

    bool is_unit(std::int64_t x) const { return index[static_cast<std::size_t>(mod_floor(x, q))] >= 0; }

    Complex value(std::int64_t x) const {
        const std::int64_t k = index[static_cast<std::size_t>(mod_floor(x, q))];
        if (k < 0) return {0.0, 0.0};
        return e_of(static_cast<double>(k) / static_cast<double>(order));
    }

    bool is_real() const {
        return std::all_of(index.begin(), index.end(), [&](std::int64_t k) { return k < 0 || 2 * k % order == 0; });
    }
};

namespace detail {

// Cyclic factor of (Z/p^k)^* (or one of the two factors for 2^k).
struct CyclicComponent {
    std::int64_t modulus;         // p^k
    std::int64_t order;           // size of the cyclic factor
    std::vector<std::int64_t> dlog;  // residue mod p^k -> exponent, -1 if not in coset/unit
};

inline std::int64_t primitive_root_mod_p(std::int64_t p) {
    if (p == 2) return 1;
    const auto fac = factorize(p - 1);
    for (std::int64_t g = 2; g < p; ++g) {
        bool ok = true;
        for (const auto& f : fac)
            if (powmod(g, static_cast<std::uint64_t>((p - 1) / f.p), p) == 1) {
                ok = false;
                break;
            }
        if (ok) return g;
    }
    throw std::logic_error("primitive root not found");
}

// For an odd prime power: one cyclic component. For 2^k: the sign
// component (order 2, trivial when k = 1) and the <5> component.
inline std::vector<CyclicComponent> components_for(std::int64_t p, int k) {
    const std::int64_t pk = ipow(p, static_cast<unsigned>(k));
    std::vector<CyclicComponent> out;
    if (p != 2) {
        std::int64_t g = primitive_root_mod_p(p);
        if (k > 1 && powmod(g, static_cast<std::uint64_t>(p - 1), p * p) == 1) g += p;
        const std::int64_t phi = pk / p * (p - 1);
        CyclicComponent c{pk, phi, std::vector<std::int64_t>(static_cast<std::size_t>(pk), -1)};
        std::int64_t x = 1;
        for (std::int64_t a = 0; a < phi; ++a) {
            c.dlog[static_cast<std::size_t>(x)] = a;
            x = mulmod(x, g, pk);
        }
        out.push_back(std::move(c));
        return out;
    }
    if (k == 1) {
        CyclicComponent c{2, 1, {-1, 0}};
        out.push_back(std::move(c));
        return out;
    }
    // x = (-1)^a 5^b mod 2^k
    const std::int64_t order5 = k >= 3 ? pk / 4 : 1;
    CyclicComponent sign{pk, 2, std::vector<std::int64_t>(static_cast<std::size_t>(pk), -1)};
    CyclicComponent five{pk, order5, std::vector<std::int64_t>(static_cast<std::size_t>(pk), -1)};
    std::int64_t x = 1;
    for (std::int64_t b = 0; b < order5; ++b) {
        sign.dlog[static_cast<std::size_t>(x)] = 0;
        five.dlog[static_cast<std::size_t>(x)] = b;
        const std::int64_t neg = pk - x;
        sign.dlog[static_cast<std::size_t>(neg)] = 1;
        five.dlog[static_cast<std::size_t>(neg)] = b;
        x = mulmod(x, 5, pk);
    }
    out.push_back(std::move(sign));
    if (k >= 3) out.push_back(std::move(five));
    return out;
}

}  // namespace detail

// All phi(q) characters mod q, built from the prime-power components via CRT.
// The first character returned is the principal one.
inline std::vector<DirichletCharacter> characters_mod(std::int64_t q) {
    if (q <= 0) throw std::invalid_argument("characters_mod: modulus must be positive");
    if (q > 10'000) throw BudgetExceeded("characters_mod: modulus above 10^4");
    std::vector<detail::CyclicComponent> comps;
    for (const auto& pp : factorize(q))
        for (auto& c : detail::components_for(pp.p, pp.k)) comps.push_back(std::move(c));
    std::int64_t order = 1;
    for (const auto& c : comps) order = std::lcm(order, c.order);

    // exponent vector of each residue
    const auto qs = static_cast<std::size_t>(q);
    std::vector<std::vector<std::int64_t>> logs(qs);
    std::vector<bool> unit(qs, false);
    for (std::int64_t x = 0; x < q; ++x) {
        if (gcd64(x, q) != 1 && q != 1) continue;
        unit[static_cast<std::size_t>(x)] = true;
        for (const auto& c : comps) logs[static_cast<std::size_t>(x)].push_back(c.dlog[static_cast<std::size_t>(x % c.modulus)]);
    }

    std::vector<DirichletCharacter> out;
    std::vector<std::int64_t> j(comps.size(), 0);
    for (;;) {
        DirichletCharacter chi;
        chi.q = q;
        chi.order = order;
        chi.label = j;
        chi.is_principal = std::all_of(j.begin(), j.end(), [](std::int64_t v) { return v == 0; });
        chi.index.assign(qs, -1);
        for (std::size_t x = 0; x < qs; ++x) {
            if (!unit[x]) continue;
            std::int64_t k = 0;
            for (std::size_t i = 0; i < comps.size(); ++i)
                k += j[i] * logs[x][i] * (order / comps[i].order);
            chi.index[x] = k % order;
        }
        out.push_back(std::move(chi));
        std::size_t i = 0;
        while (i < comps.size() && ++j[i] == comps[i].order) j[i++] = 0;
        if (i == comps.size()) break;
    }
    return out;
}

}  // namespace hlcircle
