#pragma once

// Smooth compactly supported bump weights.

#include "hlcircle/common.hpp"

#include <cmath>
#include <vector>

namespace hlcircle {

// omega(t) = exp(1 - 1/(1 - (t/delta)^2)) on |t| < delta, zero outside.
class SmoothWeight {
public:
    SmoothWeight() = default;

    SmoothWeight(double delta, int m0) : delta_(delta), m0_(m0) {
        if (!(delta > 0.0 && delta <= 0.25)) throw PreconditionError("bump_weight: delta must lie in (0, 1/4]");
        if (m0 < 0) throw PreconditionError("bump_weight: derivative order must be nonnegative");
        // The k-th u-derivative of exp(g(u)), g = 1 - 1/(1-u^2), is
        // exp(g) P_k(u) / (1-u^2)^(2k) with
        // P_{k+1} = P_k' (1-u^2)^2 + 4k u (1-u^2) P_k - 2u P_k.
        polys_.push_back({1.0});
        for (int k = 0; k < m0; ++k) {
            const auto& p = polys_.back();
            std::vector<double> next(p.size() + 3, 0.0);
            for (std::size_t i = 1; i < p.size(); ++i) {
                const double d = static_cast<double>(i) * p[i];  // coefficient of u^(i-1) in P'
                next[i - 1] += d;
                next[i + 1] -= 2 * d;
                next[i + 3] += d;
            }
            for (std::size_t i = 0; i < p.size(); ++i) {
                next[i + 1] += (4.0 * k - 2.0) * p[i];
                next[i + 3] -= 4.0 * k * p[i];
            }
            while (next.size() > 1 && next.back() == 0.0) next.pop_back();
            polys_.push_back(std::move(next));
        }
        sup_.assign(static_cast<std::size_t>(m0) + 1, 0.0);
        const int grid = 10'000;
        for (int i = 0; i <= grid; ++i) {
            const double t = delta * (-1.0 + 2.0 * i / grid);
            for (int k = 0; k <= m0; ++k) sup_[static_cast<std::size_t>(k)] = std::max(sup_[static_cast<std::size_t>(k)], std::abs(derivative(k, t)));
        }
        // the grid misses the true peak by at most one grid step times the next derivative; pad by 1%
        c_ = 0;
        for (double s : sup_) c_ = std::max(c_, 1.01 * s);
        // midpoint rule is spectrally accurate for a flat-edged bump
        const int m = 4000;
        double s = 0;
        for (int i = 0; i < m; ++i) s += (*this)(delta * (-1.0 + (2.0 * i + 1.0) / m));
        mass_ = s * 2.0 * delta / m;
    }

    double delta() const { return delta_; }
    int m0() const { return m0_; }
    // sup bound of |omega^(k)| over k <= M0
    double c() const { return c_; }
    const std::vector<double>& derivative_sups() const { return sup_; }
    std::string family() const { return "standard-mollifier"; }

    double operator()(double t) const {
        const double u = t / delta_;
        if (std::abs(u) >= 1.0) return 0.0;
        return std::exp(1.0 - 1.0 / (1.0 - u * u));
    }

    // k-th derivative in t, from the closed-form recursion.
    double derivative(int k, double t) const {
        if (k < 0 || k > m0_) throw PreconditionError("SmoothWeight::derivative: order outside [0, M0]");
        const double u = t / delta_;
        if (std::abs(u) >= 1.0) return 0.0;
        const double w = 1.0 - u * u;
        const auto& p = polys_[static_cast<std::size_t>(k)];
        double poly = 0;
        for (std::size_t i = p.size(); i-- > 0;) poly = poly * u + p[i];
        const double base = std::exp(1.0 - 1.0 / w);
        if (base == 0.0) return 0.0;
        return base * poly / std::pow(w, 2 * k) / std::pow(delta_, k);
    }

    // integral of omega over the real line
    double mass() const { return mass_; }

private:
    double delta_ = 0.1;
    int m0_ = 0;
    double c_ = 1.0;
    std::vector<std::vector<double>> polys_;
    std::vector<double> sup_;
    double mass_ = 0.0;
};

inline SmoothWeight bump_weight(double delta, int m0) { return SmoothWeight(delta, m0); }

}  // namespace hlcircle
