#pragma once

// Real nonsingular zeros, oscillatory integrals over smooth windows, the
// singular integral and a Monte Carlo estimate of the same real density.

#include "hlcircle/common.hpp"
#include "hlcircle/forms.hpp"
#include "hlcircle/weight.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <optional>
#include <random>
#include <sstream>

namespace hlcircle {

// Floating-point copy of a Form for fast real evaluation.
class RealPolynomial {
public:
    RealPolynomial() = default;
    explicit RealPolynomial(const Form& f) : n_(f.n_vars()) {
        for (const auto& [e, c] : f.terms()) {
            exps_.push_back(e);
            coeffs_.push_back(c.convert_to<double>());
        }
    }

    int n_vars() const { return n_; }

    double operator()(std::span<const double> x) const {
        double acc = 0;
        for (std::size_t t = 0; t < coeffs_.size(); ++t) {
            double m = coeffs_[t];
            for (int i = 0; i < n_; ++i)
                for (int k = 0; k < exps_[t][static_cast<std::size_t>(i)]; ++k) m *= x[static_cast<std::size_t>(i)];
            acc += m;
        }
        return acc;
    }

    // bound for |value| over the box prod [lo_i, hi_i] from term-wise maxima
    double abs_bound(std::span<const double> lo, std::span<const double> hi) const {
        double acc = 0;
        for (std::size_t t = 0; t < coeffs_.size(); ++t) {
            double m = std::abs(coeffs_[t]);
            for (int i = 0; i < n_; ++i) {
                const double a = std::max(std::abs(lo[static_cast<std::size_t>(i)]), std::abs(hi[static_cast<std::size_t>(i)]));
                m *= std::pow(a, exps_[t][static_cast<std::size_t>(i)]);
            }
            acc += m;
        }
        return acc;
    }

private:
    int n_ = 0;
    std::vector<Exponent> exps_;
    std::vector<double> coeffs_;
};

// F = sum_j f_j(x_j) with no mixed monomials.
inline bool is_separable(const Form& f) {
    for (const auto& [e, c] : f.terms())
        if (std::count_if(e.begin(), e.end(), [](int k) { return k > 0; }) > 1) return false;
    return true;
}

// The univariate pieces f_j of a separable form; the constant term goes to f_0.
inline std::vector<std::vector<double>> separable_pieces(const Form& f) {
    std::vector<std::vector<double>> out(static_cast<std::size_t>(f.n_vars()), std::vector<double>(1, 0.0));
    for (const auto& [e, c] : f.terms()) {
        int var = 0, deg = 0;
        for (int i = 0; i < f.n_vars(); ++i)
            if (e[static_cast<std::size_t>(i)] > 0) {
                var = i;
                deg = e[static_cast<std::size_t>(i)];
            }
        auto& p = out[static_cast<std::size_t>(var)];
        if (p.size() <= static_cast<std::size_t>(deg)) p.resize(static_cast<std::size_t>(deg) + 1, 0.0);
        p[static_cast<std::size_t>(deg)] += c.convert_to<double>();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Real nonsingular zeros.

struct RealSolution {
    bool found = false;
    std::vector<double> x0;
    double residual = 0;
    double gradient_norm = 0;
    int attempts = 0;
    std::string report;
};

struct RealSolveOptions {
    double margin = 0.05;
    int max_starts = 2000;
    std::uint64_t seed = 1;
    double value_tol = 1e-12;
    double gradient_tol = 1e-6;
};

inline RealSolution real_nonsingular_solution(const Form& f, const RealSolveOptions& opt = {}) {
    const int n = f.n_vars();
    RealSolution out;
    if (n == 0 || f.is_zero()) {
        out.report = "no variables or zero form";
        return out;
    }
    const RealPolynomial F(f);
    std::vector<RealPolynomial> grad;
    for (const auto& g : f.gradient()) grad.emplace_back(g);

    auto accept = [&](const std::vector<double>& x) {
        for (double xi : x)
            if (!(xi > opt.margin && xi < 1.0 - opt.margin)) return false;
        double g2 = 0;
        for (const auto& g : grad) g2 += g(x) * g(x);
        out.residual = std::abs(F(x));
        out.gradient_norm = std::sqrt(g2);
        return out.residual <= opt.value_tol && out.gradient_norm > opt.gradient_tol;
    };

    // symmetric zero first: a homogeneous F with F(1,...,1) = 0 vanishes on the diagonal
    if (f.is_homogeneous() && f.coefficient_sum() == 0) {
        std::vector<double> x(static_cast<std::size_t>(n), 0.5);
        out.attempts = 1;
        if (accept(x)) {
            out.found = true;
            out.x0 = x;
            out.report = "diagonal point";
            return out;
        }
    }

    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> uni(opt.margin, 1.0 - opt.margin);
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int s = 0; s < opt.max_starts; ++s) {
        ++out.attempts;
        for (auto& xi : x) xi = uni(rng);
        // Newton steps along the gradient line: x <- x - F(x) grad / |grad|^2
        for (int it = 0; it < 60; ++it) {
            const double v = F(x);
            std::vector<double> g(static_cast<std::size_t>(n));
            double g2 = 0;
            for (int i = 0; i < n; ++i) {
                g[static_cast<std::size_t>(i)] = grad[static_cast<std::size_t>(i)](x);
                g2 += g[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(i)];
            }
            if (g2 < 1e-24) break;
            for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] -= v * g[static_cast<std::size_t>(i)] / g2;
            if (std::abs(F(x)) <= opt.value_tol * 0.1) break;
        }
        if (accept(x)) {
            out.found = true;
            out.x0 = x;
            out.report = "newton from random start";
            return out;
        }
    }
    out.report = "no nonsingular zero found in the interior after " + std::to_string(opt.max_starts) + " starts";
    return out;
}

// Curvature check for the window: delta |Hess F(x0)| / |grad F(x0)|.
struct WindowCheck {
    double ratio = 0;
    bool marginal = false;
};

inline WindowCheck window_smallness(const Form& f, std::span<const double> x0, double delta) {
    const auto grad = f.gradient();
    double g2 = 0, h2 = 0;
    for (const auto& g : grad) {
        const double gv = RealPolynomial(g)(x0);
        g2 += gv * gv;
        for (const auto& h : g.gradient()) {
            const double hv = RealPolynomial(h)(x0);
            h2 += hv * hv;
        }
    }
    WindowCheck c;
    c.ratio = g2 > 0 ? delta * std::sqrt(h2) / std::sqrt(g2) : std::numeric_limits<double>::infinity();
    c.marginal = c.ratio > 1.0;
    return c;
}

// ---------------------------------------------------------------------------
// Oscillatory integrals
//   I(tau; r, t) = int prod omega(x_l - x0_l) prod x_j^(r_j + i t_j) e(tau F(x)) dx

struct TwistSpec {
    std::vector<double> r;
    std::vector<double> t;

    static TwistSpec none(int n) { return {std::vector<double>(static_cast<std::size_t>(n), 0.0), std::vector<double>(static_cast<std::size_t>(n), 0.0)}; }

    void validate(int n) const {
        if (static_cast<int>(r.size()) != n || static_cast<int>(t.size()) != n)
            throw PreconditionError("TwistSpec: length does not match the number of variables");
        for (double rj : r)
            if (rj < -1.0 || rj > 0.0) throw PreconditionError("TwistSpec: r_j must lie in [-1, 0]");
    }
};

struct QuadratureOptions {
    int order = 20;
    int min_panels = 8;
    double panels_per_oscillation = 2.0;
    bool estimate_error = true;
    std::size_t node_budget = 40'000'000;
    unsigned threads = 1;
};

struct OscillatoryResult {
    Complex value;
    double error_estimate = 0;
    std::size_t nodes = 0;
};

namespace detail {

struct GaussRule {
    std::vector<double> x, w;  // on [-1, 1]
};

inline GaussRule gauss_rule(int order) {
    if (order < 1 || order > 200) throw PreconditionError("gauss_rule: order outside [1, 200]");
    GaussRule g;
    const auto zeros = boost::math::legendre_p_zeros<double>(order);  // nonnegative zeros
    for (double z : zeros) {
        const double dp = boost::math::legendre_p_prime(order, z);
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        g.x.push_back(z);
        g.w.push_back(w);
        if (z != 0.0) {
            g.x.push_back(-z);
            g.w.push_back(w);
        }
    }
    return g;
}

// Composite nodes on [a, b] with `panels` equal panels.
inline void composite_nodes(const GaussRule& g, double a, double b, int panels, std::vector<double>& xs, std::vector<double>& ws) {
    xs.clear();
    ws.clear();
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        for (std::size_t i = 0; i < g.x.size(); ++i) {
            xs.push_back(mid + 0.5 * h * g.x[i]);
            ws.push_back(0.5 * h * g.w[i]);
        }
    }
}

inline void check_window(std::span<const double> x0, double delta) {
    for (double c : x0)
        if (!(c - delta > 0.0 && c + delta < 1.0)) throw PreconditionError("oscillatory_I: window support leaves (0,1)^n");
}

inline double poly_eval(const std::vector<double>& p, double x) {
    double v = 0;
    for (std::size_t i = p.size(); i-- > 0;) v = v * x + p[i];
    return v;
}

inline double poly_deriv_bound(const std::vector<double>& p, double a, double b) {
    double m = 0;
    for (std::size_t i = 1; i < p.size(); ++i) m += static_cast<double>(i) * std::abs(p[i]) * std::pow(std::max(std::abs(a), std::abs(b)), static_cast<double>(i) - 1);
    return m;
}

inline int panels_for(double oscillations, const QuadratureOptions& q) {
    return q.min_panels + static_cast<int>(std::ceil(q.panels_per_oscillation * oscillations));
}

}  // namespace detail

class OscillatoryIntegrator {
public:
    OscillatoryIntegrator(const Form& f, const SmoothWeight& w, std::vector<double> x0, QuadratureOptions q = {})
        : f_(f), w_(w), x0_(std::move(x0)), q_(q), poly_(f), rule_(detail::gauss_rule(q.order)) {
        if (static_cast<int>(x0_.size()) != f.n_vars()) throw PreconditionError("oscillatory_I: x0 length mismatch");
        detail::check_window(x0_, w.delta());
        separable_ = is_separable(f);
        if (separable_) pieces_ = separable_pieces(f);
        for (const auto& g : f.gradient()) grad_.emplace_back(g);
        for (double c : x0_) {
            lo_.push_back(c - w.delta());
            hi_.push_back(c + w.delta());
        }
    }

    bool separable() const { return separable_; }

    // upper bound for |F| on the window
    double value_bound() const { return poly_.abs_bound(lo_, hi_); }

    OscillatoryResult operator()(double tau, const TwistSpec& tw) const {
        tw.validate(f_.n_vars());
        OscillatoryResult r = eval(tau, tw, 1.0);
        if (q_.estimate_error) {
            // compare against half the panels
            const OscillatoryResult coarse = eval(tau, tw, 0.5);
            r.error_estimate = std::abs(coarse.value - r.value);
            r.nodes += coarse.nodes;
        }
        return r;
    }

    OscillatoryResult operator()(double tau) const { return (*this)(tau, TwistSpec::none(f_.n_vars())); }

private:
    int panels(int j, double tau, const TwistSpec& tw, double scale) const {
        const auto i = static_cast<std::size_t>(j);
        const double slope = separable_ ? detail::poly_deriv_bound(pieces_[i], lo_[i], hi_[i]) : grad_[i].abs_bound(lo_, hi_);
        const double osc = std::abs(tau) * slope * (hi_[i] - lo_[i]) + std::abs(tw.t[i]) * std::log(hi_[i] / lo_[i]) / kTwoPi;
        return std::max(1, static_cast<int>(std::lround(scale * detail::panels_for(osc, q_))));
    }

    // weight times twist at each node of coordinate j
    void factor_nodes(int j, int np, const TwistSpec& tw, std::vector<double>& xs, std::vector<Complex>& ws) const {
        const auto i = static_cast<std::size_t>(j);
        std::vector<double> raw;
        detail::composite_nodes(rule_, lo_[i], hi_[i], np, xs, raw);
        ws.resize(xs.size());
        for (std::size_t k = 0; k < xs.size(); ++k) {
            const double lx = std::log(xs[k]);
            const Complex tw_val = std::exp(Complex(tw.r[i] * lx, tw.t[i] * lx));
            ws[k] = raw[k] * w_(xs[k] - x0_[i]) * tw_val;
        }
    }

    OscillatoryResult eval(double tau, const TwistSpec& tw, double scale) const {
        const int n = f_.n_vars();
        OscillatoryResult res;
        if (separable_) {
            Complex prod(1.0, 0.0);
            for (int j = 0; j < n; ++j) {
                std::vector<double> xs;
                std::vector<Complex> ws;
                factor_nodes(j, panels(j, tau, tw, scale), tw, xs, ws);
                ComplexSum s;
                for (std::size_t k = 0; k < xs.size(); ++k)
                    s.add(ws[k] * e_of(tau * detail::poly_eval(pieces_[static_cast<std::size_t>(j)], xs[k])));
                prod *= s.value();
                res.nodes += xs.size();
            }
            res.value = prod;
            return res;
        }
        std::vector<std::vector<double>> xs(static_cast<std::size_t>(n));
        std::vector<std::vector<Complex>> ws(static_cast<std::size_t>(n));
        std::size_t total = 1;
        for (int j = 0; j < n; ++j) {
            factor_nodes(j, panels(j, tau, tw, scale), tw, xs[static_cast<std::size_t>(j)], ws[static_cast<std::size_t>(j)]);
            total *= xs[static_cast<std::size_t>(j)].size();
            if (total > q_.node_budget) throw BudgetExceeded("oscillatory_I: tensor grid exceeds node budget");
        }
        const std::size_t first = xs[0].size();
        std::vector<ComplexSum> partial(first);
        parallel_shards(first, q_.threads, [&](std::size_t a) {
            std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
            idx[0] = a;
            std::vector<double> x(static_cast<std::size_t>(n));
            for (;;) {
                Complex wt(1.0, 0.0);
                for (int j = 0; j < n; ++j) {
                    x[static_cast<std::size_t>(j)] = xs[static_cast<std::size_t>(j)][idx[static_cast<std::size_t>(j)]];
                    wt *= ws[static_cast<std::size_t>(j)][idx[static_cast<std::size_t>(j)]];
                }
                partial[a].add(wt * e_of(tau * poly_(x)));
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

    Form f_;
    SmoothWeight w_;
    std::vector<double> x0_;
    QuadratureOptions q_;
    RealPolynomial poly_;
    detail::GaussRule rule_;
    bool separable_ = false;
    std::vector<std::vector<double>> pieces_;
    std::vector<RealPolynomial> grad_;
    std::vector<double> lo_, hi_;
};

inline OscillatoryResult oscillatory_I(const Form& f, const SmoothWeight& w, const std::vector<double>& x0, double tau,
                                       const TwistSpec& tw, const QuadratureOptions& q = {}) {
    return OscillatoryIntegrator(f, w, x0, q)(tau, tw);
}

// ---------------------------------------------------------------------------
// Decay report: |I(tau; t)| max(1, |tau|) against the (tau = 1, t = 0) baseline.

struct DecayRow {
    double tau = 0;
    std::vector<double> t;
    double abs_value = 0;
    double scaled = 0;  // |I| max(1, |tau|)
    double ratio = 0;   // scaled / baseline
    bool flagged = false;
};

struct DecayReport {
    double baseline = 0;
    double threshold = 3.0;
    double max_ratio = 0;
    double zero_row_max = 0;  // max |I| over tau = 0 rows
    double mass_bound = 0;    // (int omega)^n
    std::vector<DecayRow> rows;
    bool ok() const { return max_ratio <= threshold && zero_row_max <= mass_bound * (1 + 1e-9); }
};

// t = 0 plus the vectors with a single nonzero coordinate taken from `values`.
inline std::vector<std::vector<double>> axis_t_grid(int n, const std::vector<double>& values) {
    std::vector<std::vector<double>> out{std::vector<double>(static_cast<std::size_t>(n), 0.0)};
    for (int j = 0; j < n; ++j)
        for (double v : values) {
            if (v == 0.0) continue;
            std::vector<double> t(static_cast<std::size_t>(n), 0.0);
            t[static_cast<std::size_t>(j)] = v;
            out.push_back(std::move(t));
        }
    return out;
}

inline DecayReport decay_uniformity_report(const Form& f, const SmoothWeight& w, const std::vector<double>& x0,
                                           const std::vector<double>& taus, const std::vector<std::vector<double>>& ts,
                                           double threshold = 3.0, const QuadratureOptions& q = {}) {
    const int n = f.n_vars();
    OscillatoryIntegrator I(f, w, x0, q);
    DecayReport rep;
    rep.threshold = threshold;
    rep.mass_bound = std::pow(w.mass(), n);
    rep.baseline = std::abs(I(1.0).value);
    for (double tau : taus)
        for (const auto& t : ts) {
            DecayRow row;
            row.tau = tau;
            row.t = t;
            TwistSpec tw{std::vector<double>(static_cast<std::size_t>(n), 0.0), t};
            row.abs_value = std::abs(I(tau, tw).value);
            row.scaled = row.abs_value * std::max(1.0, std::abs(tau));
            row.ratio = rep.baseline > 0 ? row.scaled / rep.baseline : std::numeric_limits<double>::infinity();
            if (tau == 0.0) rep.zero_row_max = std::max(rep.zero_row_max, row.abs_value);
            else rep.max_ratio = std::max(rep.max_ratio, row.ratio);
            row.flagged = tau != 0.0 && row.ratio > threshold;
            rep.rows.push_back(std::move(row));
        }
    return rep;
}

// ---------------------------------------------------------------------------
// Singular integral c_1 = int_R I(tau) d tau.

struct SingularIntegralOptions {
    double T0 = 4.0;
    double T_max = 16384.0;
    double rel_tol = 1e-3;
    double abs_floor = 1e-8;
    QuadratureOptions quad{20, 8, 2.0, false, 40'000'000, 1};
    int tau_order = 20;
};

struct SingularIntegralResult {
    double value = 0;
    double imag_residual = 0;
    double tail_bound = 0;  // last doubling increment
    double T = 0;
    std::size_t evaluations = 0;
};

inline SingularIntegralResult singular_integral(const Form& f, const SmoothWeight& w, const std::vector<double>& x0,
                                                const SingularIntegralOptions& opt = {}) {
    OscillatoryIntegrator I(f, w, x0, opt.quad);
    const double freq = I.value_bound() + 1e-9;  // cycles per unit tau
    const auto rule = detail::gauss_rule(opt.tau_order);
    SingularIntegralResult res;

    // returns int_a^b [I(tau) + I(-tau)] d tau, real part is 2 Re, imaginary part should vanish
    auto piece = [&](double a, double b) {
        const int panels = 2 + static_cast<int>(std::ceil(2.0 * (b - a) * freq + (b - a)));
        std::vector<double> xs, ws;
        detail::composite_nodes(rule, a, b, panels, xs, ws);
        std::vector<Complex> vals(xs.size());
        parallel_shards(xs.size(), opt.quad.threads, [&](std::size_t k) {
            vals[k] = I(xs[k]).value + I(-xs[k]).value;
        });
        ComplexSum s;
        for (std::size_t k = 0; k < xs.size(); ++k) s.add(ws[k] * vals[k]);
        res.evaluations += 2 * xs.size();
        return s.value();
    };

    // split the first stretch so the peak near tau = 0 is resolved
    Complex total = piece(0.0, std::min(1.0, opt.T0)) + (opt.T0 > 1.0 ? piece(1.0, opt.T0) : Complex{});
    double T = opt.T0;
    const double scale = std::pow(w.mass(), f.n_vars());
    for (;;) {
        const Complex inc = piece(T, 2 * T);
        total += inc;
        T *= 2;
        res.tail_bound = std::abs(inc.real());
        if (res.tail_bound < opt.rel_tol * std::abs(total.real()) + opt.abs_floor * scale) break;
        if (T >= opt.T_max) throw std::runtime_error("singular_integral: integrand does not decay; the window may contain a singular point");
    }
    res.value = total.real();
    res.imag_residual = std::abs(total.imag());
    res.T = T;
    return res;
}

// ---------------------------------------------------------------------------
// Monte Carlo: (2 eps)^-1 int prod omega(x - x0) 1{|F(x)| < eps} dx.

struct EpsilonDensityResult {
    double value = 0;  // at eps
    double std_error = 0;
    double value_half = 0;  // at eps / 2, same samples
    double std_error_half = 0;
    double richardson = 0;  // (4 E(eps/2) - E(eps)) / 3
    std::size_t samples = 0;
};

inline EpsilonDensityResult epsilon_density(const Form& f, const SmoothWeight& w, const std::vector<double>& x0, double eps,
                                            std::size_t samples, std::uint64_t seed, unsigned threads = 1,
                                            std::size_t batches = 64) {
    const int n = f.n_vars();
    if (!(eps > 0)) throw PreconditionError("epsilon_density: eps must be positive");
    if (static_cast<int>(x0.size()) != n) throw PreconditionError("epsilon_density: x0 length mismatch");
    if (samples == 0 || batches == 0) throw PreconditionError("epsilon_density: zero-measure window (no samples)");
    detail::check_window(x0, w.delta());
    const RealPolynomial F(f);
    const double vol = std::pow(2.0 * w.delta(), n);
    struct Acc {
        double s1 = 0, s2 = 0, h1 = 0, h2 = 0;
    };
    std::vector<Acc> acc(batches);
    const std::size_t per = samples / batches, extra = samples % batches;
    parallel_shards(batches, threads, [&](std::size_t b) {
        std::seed_seq seq{seed, static_cast<std::uint64_t>(b)};
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> uni(-w.delta(), w.delta());
        std::vector<double> x(static_cast<std::size_t>(n));
        const std::size_t m = per + (b < extra ? 1 : 0);
        for (std::size_t s = 0; s < m; ++s) {
            double wt = 1;
            for (int j = 0; j < n; ++j) {
                const double u = uni(rng);
                x[static_cast<std::size_t>(j)] = x0[static_cast<std::size_t>(j)] + u;
                wt *= w(u);
            }
            const double v = std::abs(F(x));
            const double a = v < eps ? wt * vol / (2 * eps) : 0.0;
            const double h = v < eps / 2 ? wt * vol / eps : 0.0;
            acc[b].s1 += a;
            acc[b].s2 += a * a;
            acc[b].h1 += h;
            acc[b].h2 += h * h;
        }
    });
    Acc tot;
    for (const auto& a : acc) {
        tot.s1 += a.s1;
        tot.s2 += a.s2;
        tot.h1 += a.h1;
        tot.h2 += a.h2;
    }
    const double N = static_cast<double>(samples);
    EpsilonDensityResult r;
    r.samples = samples;
    r.value = tot.s1 / N;
    r.std_error = std::sqrt(std::max(0.0, tot.s2 / N - r.value * r.value) / N);
    r.value_half = tot.h1 / N;
    r.std_error_half = std::sqrt(std::max(0.0, tot.h2 / N - r.value_half * r.value_half) / N);
    r.richardson = (4 * r.value_half - r.value) / 3;
    return r;
}

}  // namespace hlcircle
