#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace hlcircle {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Complex = std::complex<double>;
using i128 = __int128;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Thrown when an enumeration would exceed its configured work budget.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Thrown when an operation's documented precondition does not hold.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// e(x) = exp(2 pi i x)
inline Complex e_of(double x) {
    x -= std::floor(x);
    return {std::cos(kTwoPi * x), std::sin(kTwoPi * x)};
}

inline Complex e_of(long double x) {
    x -= std::floor(x);
    const long double ang = 2.0L * std::numbers::pi_v<long double> * x;
    return {static_cast<double>(std::cos(ang)), static_cast<double>(std::sin(ang))};
}

// Neumaier-compensated accumulator.
template <typename T>
class CompensatedSum {
public:
    void add(T v) {
        const T t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    T value() const { return sum_ + comp_; }

private:
    T sum_{};
    T comp_{};
};

class ComplexSum {
public:
    void add(Complex z) {
        re_.add(z.real());
        im_.add(z.imag());
    }
    void add(const ComplexSum& o) {
        re_.add(o.value().real());
        im_.add(o.value().imag());
    }
    Complex value() const { return {re_.value(), im_.value()}; }

private:
    CompensatedSum<double> re_;
    CompensatedSum<double> im_;
};

inline std::int64_t mod_floor(std::int64_t a, std::int64_t m) {
    const std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

inline std::int64_t mod_floor(const BigInt& a, std::int64_t m) {
    BigInt r = a % m;
    if (r < 0) r += m;
    return static_cast<std::int64_t>(r);
}

inline std::int64_t gcd64(std::int64_t a, std::int64_t b) {
    a = a < 0 ? -a : a;
    b = b < 0 ? -b : b;
    while (b != 0) {
        const std::int64_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

inline std::int64_t mulmod(std::int64_t a, std::int64_t b, std::int64_t m) {
    return static_cast<std::int64_t>(static_cast<i128>(a) * b % m);
}

inline std::int64_t powmod(std::int64_t b, std::uint64_t e, std::int64_t m) {
    std::int64_t r = 1 % m;
    b = mod_floor(b, m);
    while (e) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

inline std::int64_t ipow(std::int64_t b, unsigned e) {
    std::int64_t r = 1;
    while (e--) r *= b;
    return r;
}

inline std::int64_t euler_phi(std::int64_t q) {
    std::int64_t r = q;
    for (std::int64_t p = 2; p * p <= q; ++p) {
        if (q % p == 0) {
            while (q % p == 0) q /= p;
            r -= r / p;
        }
    }
    if (q > 1) r -= r / q;
    return r;
}

struct PrimePower {
    std::int64_t p;
    int k;
};

inline std::vector<PrimePower> factorize(std::int64_t q) {
    std::vector<PrimePower> out;
    for (std::int64_t p = 2; p * p <= q; ++p) {
        if (q % p == 0) {
            int k = 0;
            while (q % p == 0) {
                q /= p;
                ++k;
            }
            out.push_back({p, k});
        }
    }
    if (q > 1) out.push_back({q, 1});
    return out;
}

inline bool is_prime(std::int64_t n) {
    if (n < 2) return false;
    for (std::int64_t p = 2; p * p <= n; ++p)
        if (n % p == 0) return false;
    return true;
}

inline unsigned default_threads() {
    const unsigned h = std::thread::hardware_concurrency();
    return h == 0 ? 1u : h;
}

// Runs body(shard) for shard in [0, shards) on up to `threads` workers.
// Each shard writes only its own output slot, so the caller merges in
// shard order and results do not depend on the thread count.
template <typename Body>
void parallel_shards(std::size_t shards, unsigned threads, Body&& body) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(shards, 1))));
    if (threads <= 1) {
        for (std::size_t s = 0; s < shards; ++s) body(s);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t s = t; s < shards; s += threads) body(s);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace hlcircle
