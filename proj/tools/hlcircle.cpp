// Command-line front end.

#include "hlcircle/harness.hpp"
#include "hlcircle/singular_locus.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace hlcircle;

namespace {

struct Global {
    std::string form_path;
    std::string out_path;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

Form load_form(const Global& g) {
    if (g.form_path.empty()) throw PreconditionError("--form FILE is required");
    std::ifstream in(g.form_path);
    if (!in) throw PreconditionError("cannot open form file " + g.form_path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_form(ss.str());
}

unsigned threads_of(const Global& g) { return g.threads == 0 ? default_threads() : g.threads; }

// Writes to --out when given, else stdout.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw PreconditionError("cannot write " + path);
        }
    }
    std::ostream& os() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

std::string fmt(double v, int sig = 10) { return format_decimal(v, sig); }

std::string fmt(const Complex& z) { return fmt(z.real()) + (z.imag() < 0 ? " - " : " + ") + fmt(std::abs(z.imag())) + "i"; }

std::vector<double> center_for(const Form& f, const std::vector<double>& x0, double delta, std::uint64_t seed) {
    if (!x0.empty()) {
        if (static_cast<int>(x0.size()) != f.n_vars()) throw PreconditionError("--x0 needs one value per variable");
        return x0;
    }
    RealSolveOptions ro;
    ro.margin = delta + 1e-9;
    ro.seed = seed;
    const auto sol = real_nonsingular_solution(f, ro);
    if (!sol.found) throw PreconditionError("no real nonsingular zero found for the window center; pass --x0");
    return sol.x0;
}

Rational parse_rational(const std::string& s) {
    const auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(BigInt(s));
        return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
    } catch (const std::exception&) {
        throw PreconditionError("cannot parse rational '" + s + "'");
    }
}

WeightMode parse_mode(const std::string& s) {
    if (s == "primes") return WeightMode::Primes;
    if (s == "lambda_star") return WeightMode::LambdaStar;
    if (s == "lambda") return WeightMode::Lambda;
    throw PreconditionError("mode must be primes, lambda_star or lambda");
}

std::string join(const std::vector<std::int64_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Circle-method laboratory for prime points on hypersurfaces"};
    app.require_subcommand(1);
    Global g;
    app.add_option("--form", g.form_path, "form file: one term 'c e1 ... en' per line");
    app.add_option("--out", g.out_path, "output file (default stdout)");
    app.add_option("--seed", g.seed, "random seed");
    app.add_option("--threads", g.threads, "worker threads (0 = hardware)");

    // analyze-form
    auto* analyze = app.add_subcommand("analyze-form", "basic invariants, rank and a real zero");

    // rank
    std::vector<std::int64_t> rank_primes;
    auto* rank = app.add_subcommand("rank", "codimension of the singular locus");
    rank->add_option("--primes", rank_primes, "primes for the point-count slope")->delimiter(',');

    // dichotomy
    std::string theta_text = "1/12";
    std::int64_t c0_opt = -1;
    std::size_t dich_samples = 0;
    auto* dich = app.add_subcommand("dichotomy", "structural dichotomy over variable partitions");
    dich->add_option("--theta0", theta_text, "theta0 for the default C0 threshold");
    dich->add_option("--c0", c0_opt, "explicit C0 (overrides --theta0)");
    dich->add_option("--samples", dich_samples, "randomized scan with this many partitions (0 = exhaustive)");

    // sieve
    std::int64_t sieve_limit = 100;
    bool sieve_table = false;
    auto* sieve = app.add_subcommand("sieve", "von Mangoldt, Moebius and divisor tables");
    sieve->add_option("--limit", sieve_limit, "table limit");
    sieve->add_flag("--table", sieve_table, "write x,lambda,lambda_star,mu,sigma0 rows");

    // vaughan-verify
    std::int64_t vv_limit = 100'000;
    double vv_U = 5, vv_V = 5;
    auto* vv = app.add_subcommand("vaughan-verify", "maximum residual of the Vaughan identity on [2, limit]");
    vv->add_option("--limit", vv_limit);
    vv->add_option("--U", vv_U);
    vv->add_option("--V", vv_V);

    // shared window options
    double delta = 0.1;
    int m0 = 2;
    std::vector<double> x0;
    auto window_opts = [&](CLI::App* sc) {
        sc->add_option("--delta", delta, "bump half-width, in (0, 1/4]");
        sc->add_option("--m0", m0, "derivative order tracked for the bump");
        sc->add_option("--x0", x0, "window center (default: searched real zero)")->delimiter(',');
    };

    // expsum
    double es_N = 100;
    std::string es_alpha = "0";
    std::vector<double> es_uv;
    auto* expsum = app.add_subcommand("expsum", "weighted exponential sum S(alpha)");
    expsum->add_option("--N", es_N);
    expsum->add_option("--alpha", es_alpha, "p/q or a decimal");
    expsum->add_option("--vaughan", es_uv, "U,V: also sum the Vaughan pieces")->delimiter(',')->expected(2);
    window_opts(expsum);

    // arcs
    std::int64_t arcs_N = 10'000;
    int arcs_d = 0;
    std::size_t arcs_samples = 0;
    auto* arcs = app.add_subcommand("arcs", "major arc dissection, optionally with |S| masses");
    arcs->add_option("--N", arcs_N);
    arcs->add_option("--degree", arcs_d, "degree (default: from --form)");
    arcs->add_option("--theta0", theta_text);
    arcs->add_option("--mass-samples", arcs_samples, "minor-arc Monte Carlo samples; enables the mass report");
    window_opts(arcs);

    // sigma-series
    std::int64_t ss_Q = 200;
    std::int64_t ss_euler = 0;
    int ss_k = 3;
    auto* sseries = app.add_subcommand("sigma-series", "partial sums of the singular series");
    sseries->add_option("--Q", ss_Q);
    sseries->add_option("--euler", ss_euler, "also print prod_{p <= P} sigma_p(k)");
    sseries->add_option("--k", ss_k, "exponent for --euler");

    // sigma-infty
    std::size_t si_samples = 0;
    double si_eps = 0.01;
    auto* sinfty = app.add_subcommand("sigma-infty", "singular integral over the window");
    sinfty->add_option("--samples", si_samples, "also run the Monte Carlo density with this many samples");
    sinfty->add_option("--eps", si_eps);
    window_opts(sinfty);

    // count
    std::int64_t cnt_X = 100;
    std::string cnt_mode = "primes";
    bool cnt_window = false;
    auto* count = app.add_subcommand("count", "brute-force count of points on V(F)");
    count->add_option("--X", cnt_X);
    count->add_option("--mode", cnt_mode, "primes, lambda_star or lambda");
    count->add_flag("--window", cnt_window, "restrict to the window support and weight by it");
    window_opts(count);

    // compare
    std::vector<std::int64_t> cmp_X{200, 400, 800};
    std::int64_t cmp_Q = 200;
    double cmp_scale = 1.0;
    std::int64_t cmp_hensel = 50;
    auto* compare = app.add_subcommand("compare", "predicted main term against brute force (CSV)");
    compare->add_option("--X", cmp_X)->delimiter(',');
    compare->add_option("--Q", cmp_Q, "singular series cutoff");
    compare->add_option("--weight-scale", cmp_scale, "multiply omega before renormalization");
    compare->add_option("--hensel-max-p", cmp_hensel, "local checks for primes up to this bound");
    window_opts(compare);

    CLI11_PARSE(app, argc, argv);

    try {
        Output out(g.out_path);
        std::ostream& os = out.os();
        os.imbue(std::locale::classic());
        const unsigned th = threads_of(g);

        if (*analyze) {
            const Form f = load_form(g);
            os << "form: " << f.to_string() << '\n'
               << "variables: " << f.n_vars() << '\n'
               << "degree: " << f.degree() << '\n'
               << "homogeneous: " << (f.is_homogeneous() ? "yes" : "no") << '\n'
               << "terms: " << f.terms().size() << '\n'
               << "separable: " << (is_separable(f) ? "yes" : "no") << '\n';
            if (f.is_homogeneous() && f.degree() >= 2) {
                const auto r = f.degree() == 2 ? hessian_codim(f) : estimate_codim(f, {}, th);
                os << "codim V*: " << r.codim << " (" << to_string(r.method) << ")\n";
            }
            RealSolveOptions ro;
            ro.seed = g.seed;
            const auto sol = real_nonsingular_solution(f, ro);
            os << "real nonsingular zero: ";
            if (sol.found) {
                for (std::size_t i = 0; i < sol.x0.size(); ++i) os << (i ? "," : "") << fmt(sol.x0[i]);
                os << '\n';
            } else os << "none found\n";
        } else if (*rank) {
            const Form f = load_form(g);
            const auto r = estimate_codim(f, rank_primes, th);
            os << "codim: " << r.codim << "\nmethod: " << to_string(r.method) << "\nprimes: " << join(r.primes_used) << "\ncounts:";
            for (const auto& c : r.counts) os << ' ' << c;
            os << "\nslope: " << fmt(r.slope) << "\nresidual: " << fmt(r.residual) << "\nconfident: " << (r.confident ? "yes" : "no") << '\n';
            if (f.degree() == 2 && f.is_homogeneous()) os << "hessian codim: " << hessian_codim(f).codim << '\n';
        } else if (*dich) {
            const Form f = load_form(g);
            const BigInt c0 = c0_opt >= 0 ? BigInt(c0_opt) : c0_threshold(f.degree(), parse_rational(theta_text));
            PartitionPolicy pol;
            if (dich_samples > 0) pol = {PartitionPolicy::Kind::Randomized, dich_samples, g.seed};
            const auto v = dichotomy_classify(f, c0, pol, slope_estimator({}, th));
            os << "case: " << (v.verdict == DichotomyCase::I ? "I" : "II") << "\nc0: " << v.c0 << "\nfamily: " << v.family
               << "\npartitions scanned: " << v.partitions_scanned << "\nmax codim of cross parts: " << v.max_codim_g << '\n';
            if (v.witness) {
                auto show = [&](const char* name, const IndexSet& s) {
                    os << name << ':';
                    for (int i : s) os << " x" << i + 1;
                    os << '\n';
                };
                show("u", v.witness->u);
                show("v", v.witness->v);
                show("w", v.witness->w);
            }
        } else if (*sieve) {
            const SieveTables tab(sieve_limit);
            if (sieve_table) {
                os << "x,lambda,lambda_star,mu,sigma0\n";
                for (std::int64_t x = 1; x <= sieve_limit; ++x)
                    os << x << ',' << fmt(tab.lambda(x)) << ',' << fmt(tab.lambda_star(x)) << ',' << tab.mu(x) << ',' << tab.sigma0(x) << '\n';
            } else {
                CompensatedSum<double> psi;
                for (std::int64_t x = 2; x <= sieve_limit; ++x) psi.add(tab.lambda(x));
                os << "limit: " << sieve_limit << "\npi: " << tab.prime_pi(sieve_limit) << "\npsi: " << fmt(psi.value()) << '\n';
            }
        } else if (*vv) {
            const auto t0 = std::chrono::steady_clock::now();
            const SieveTables tab(vv_limit);
            const auto res = vaughan_residuals_bulk(tab, vv_limit, vv_U, vv_V);
            double worst = 0;
            std::int64_t at = 0;
            for (std::size_t x = 2; x < res.size(); ++x)
                if (std::abs(res[x]) > worst) {
                    worst = std::abs(res[x]);
                    at = static_cast<std::int64_t>(x);
                }
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            os << "limit: " << vv_limit << "\nU: " << fmt(vv_U) << "\nV: " << fmt(vv_V) << "\nmax residual: " << worst
               << (at ? " at x = " + std::to_string(at) : std::string()) << "\nseconds: " << fmt(secs, 3) << '\n';
        } else if (*expsum) {
            const Form f = load_form(g);
            const auto c = center_for(f, x0, delta, g.seed);
            const WindowedBox box(es_N, c, bump_weight(delta, m0));
            const SieveTables tab(box.upper_edge() + 1);
            const Alpha al = Alpha::parse(es_alpha);
            const Complex S = s_alpha(f, box, tab, al, {th});
            os << "S(alpha): " << fmt(S) << "\n|S(alpha)|: " << fmt(std::abs(S)) << '\n';
            if (es_uv.size() == 2) {
                const auto dec = s_vaughan_pieces(f, box, tab, al, es_uv[0], es_uv[1], {th});
                os << "vaughan total: " << fmt(dec.total) << "\npieces: " << dec.pieces.size()
                   << "\nrelative deviation: " << std::abs(dec.total - S) / std::abs(S) << '\n';
            }
        } else if (*arcs) {
            int d = arcs_d;
            std::optional<Form> f;
            if (!g.form_path.empty()) {
                f = load_form(g);
                if (d == 0) d = f->degree();
            }
            if (d == 0) throw PreconditionError("arcs: give --degree or --form");
            const auto dis = major_arcs(arcs_N, d, parse_rational(theta_text), true);
            os << "q,a,center,offset_lo,offset_hi\n";
            for (const auto& a : dis.arcs)
                os << a.q << ',' << a.a << ',' << fmt(a.center.convert_to<double>(), 17) << ',' << fmt(a.lo, 12) << ',' << fmt(a.hi, 12) << '\n';
            std::cerr << "Q: " << dis.Q << "\narcs: " << dis.arcs.size() << "\ntotal measure: " << fmt(dis.total_measure, 12)
                      << "\ndisjoint: " << (dis.disjoint ? "yes" : "no, " + dis.violation + " overlap") << '\n';
            if (arcs_samples > 0) {
                if (!f) throw PreconditionError("arcs: --mass-samples needs --form");
                if (!dis.disjoint) throw ArcOverlap("arcs: overlapping arcs " + dis.violation);
                const auto c = center_for(*f, x0, delta, g.seed);
                const WindowedBox box(static_cast<double>(arcs_N), c, bump_weight(delta, m0));
                const SieveTables tab(box.upper_edge() + 1);
                const auto rep = arc_mass_report(*f, box, tab, dis, arcs_samples, g.seed, {th});
                std::cerr << "|S(0)|: " << fmt(rep.s0) << "\nmajor mass: " << fmt(rep.major_mass) << "\nminor mean |S|: " << fmt(rep.minor_mean)
                          << " +- " << fmt(rep.minor_std_error, 3) << "\nminor mass: " << fmt(rep.minor_mass)
                          << "\nminor / major: " << fmt(rep.ratio) << '\n';
            }
        } else if (*sseries) {
            const Form f = load_form(g);
            const auto s = singular_series(f, ss_Q, true, th);
            os << "q,term,partial\n";
            for (const auto& r : s.rows) os << r.q << ',' << fmt(r.term_value) << ',' << fmt(r.partial) << '\n';
            std::cerr << "series(Q = " << ss_Q << "): " << fmt(s.value) << "\ntail slope: " << fmt(s.tail_slope, 4) << '\n';
            if (ss_euler > 0) std::cerr << "euler product (P = " << ss_euler << ", k = " << ss_k << "): " << fmt(euler_product(f, ss_euler, ss_k).convert_to<double>()) << '\n';
        } else if (*sinfty) {
            const Form f = load_form(g);
            const auto c = center_for(f, x0, delta, g.seed);
            const auto w = bump_weight(delta, m0);
            SingularIntegralOptions so;
            so.quad.threads = th;
            const auto si = singular_integral(f, w, c, so);
            os << "singular integral: " << fmt(si.value) << "\nunit-mass weight: " << fmt(si.value / std::pow(w.mass(), f.n_vars()))
               << "\ntau cutoff: " << fmt(si.T) << "\nlast increment: " << si.tail_bound << "\nimaginary residual: " << si.imag_residual << '\n';
            if (si_samples > 0) {
                const auto ed = epsilon_density(f, w, c, si_eps, si_samples, g.seed, th);
                os << "epsilon density: " << fmt(ed.value) << " +- " << fmt(ed.std_error, 3) << "\nrichardson: " << fmt(ed.richardson) << '\n';
            }
        } else if (*count) {
            const Form f = load_form(g);
            const WeightMode mode = parse_mode(cnt_mode);
            TruthOptions to;
            to.threads = th;
            TruthCount r;
            if (cnt_window) {
                const auto c = center_for(f, x0, delta, g.seed);
                const WindowedBox box(static_cast<double>(cnt_X), c, bump_weight(delta, m0));
                const SieveTables tab(box.upper_edge() + 1);
                r = truth_count(f, box, tab, mode, true, to);
            } else {
                const SieveTables tab(cnt_X + 1);
                r = truth_count(f, cnt_X, tab, mode, to);
            }
            os << "points: " << r.points << "\nmass: " << fmt(r.mass) << "\nmethod: " << r.method << '\n';
        } else if (*compare) {
            const Form f = load_form(g);
            CompareOptions o;
            o.delta = delta;
            o.m0 = m0;
            if (!x0.empty()) o.x0 = x0;
            o.X = cmp_X;
            o.Q = cmp_Q;
            o.weight_scale = cmp_scale;
            o.hensel_max_p = cmp_hensel;
            o.seed = g.seed;
            o.threads = th;
            o.integral.quad.threads = th;
            const auto rep = predict_and_compare(f, o);
            write_compare_csv(rep, os);
            std::cerr << "x0:";
            for (double v : rep.x0) std::cerr << ' ' << fmt(v);
            std::cerr << "\nsigma_infty: " << fmt(rep.sigma_infty) << "\nseries(Q = " << rep.Q << "): " << fmt(rep.series_Q) << "\nc: " << fmt(rep.c) << '\n';
            for (const auto& v : rep.local)
                if (v.hensel.status != LocalStatus::Witness)
                    std::cerr << "p = " << v.p << ": " << to_string(v.hensel.status) << " (" << v.hensel.note << ")"
                              << (v.sigma ? ", sigma_p = " + v.sigma->str() : std::string()) << '\n';
            if (rep.obstructed) std::cerr << "local conditions fail: the prediction is 0\n";
            if (!std::isnan(rep.unweighted_slope)) std::cerr << "unweighted log-log slope: " << fmt(rep.unweighted_slope, 4) << '\n';
            if (!std::isnan(rep.ratio_median))
                std::cerr << "ratio median: " << fmt(rep.ratio_median, 6) << "\nratio band width: " << fmt(rep.ratio_width, 4) << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
