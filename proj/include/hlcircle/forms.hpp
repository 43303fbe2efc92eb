#pragma once

// Exact multivariate integer polynomials and the algebra the circle-method
// machinery needs on them: evaluation, gradients, restrictions, cross parts,
// diagonal substitution and symmetric multilinear coefficient tables.

#include "hlcircle/common.hpp"

#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string_view>
#include <utility>

namespace hlcircle {

using Exponent = std::vector<int>;
using IndexSet = std::vector<int>;  // zero-based variable indices

class Form {
public:
    Form() = default;
    explicit Form(int n_vars) : n_vars_(n_vars) {
        if (n_vars < 0) throw std::invalid_argument("Form: negative variable count");
    }

    static Form monomial(int n_vars, Exponent e, BigInt c = 1) {
        Form f(n_vars);
        f.add_term(std::move(e), std::move(c));
        return f;
    }

    static Form variable(int n_vars, int i) {
        Exponent e(n_vars, 0);
        e.at(i) = 1;
        return monomial(n_vars, std::move(e));
    }

    static Form constant(int n_vars, BigInt c) { return monomial(n_vars, Exponent(n_vars, 0), std::move(c)); }

    // Sum a term into the form; cancelled terms are erased.
    void add_term(Exponent e, const BigInt& c) {
        if (static_cast<int>(e.size()) != n_vars_)
            throw std::invalid_argument("Form: exponent length does not match variable count");
        for (int v : e)
            if (v < 0) throw std::invalid_argument("Form: negative exponent");
        if (c == 0) return;
        auto [it, inserted] = terms_.try_emplace(std::move(e), c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    int n_vars() const { return n_vars_; }
    const std::map<Exponent, BigInt>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    static int total_degree(const Exponent& e) { return std::accumulate(e.begin(), e.end(), 0); }

    int degree() const {
        int d = 0;
        for (const auto& [e, c] : terms_) d = std::max(d, total_degree(e));
        return d;
    }

    bool is_homogeneous() const {
        if (terms_.empty()) return true;
        const int d = total_degree(terms_.begin()->first);
        return std::all_of(terms_.begin(), terms_.end(), [d](const auto& t) { return total_degree(t.first) == d; });
    }

    int degree_in(int var) const {
        int d = 0;
        for (const auto& [e, c] : terms_) d = std::max(d, e[var]);
        return d;
    }

    bool uses_variable(int var) const { return degree_in(var) > 0; }

    BigInt coefficient_sum() const {
        BigInt s = 0;
        for (const auto& [e, c] : terms_) s += c;
        return s;
    }

    BigInt max_abs_coefficient() const {
        BigInt m = 0;
        for (const auto& [e, c] : terms_) m = std::max(m, BigInt(abs(c)));
        return m;
    }

    template <typename Int>
    BigInt evaluate(std::span<const Int> x) const {
        check_length(x.size());
        BigInt total = 0;
        for (const auto& [e, c] : terms_) {
            BigInt t = c;
            for (int i = 0; i < n_vars_; ++i)
                if (e[i] != 0) t *= boost::multiprecision::pow(BigInt(x[i]), static_cast<unsigned>(e[i]));
            total += t;
        }
        return total;
    }

    BigInt evaluate(const std::vector<std::int64_t>& x) const { return evaluate(std::span<const std::int64_t>(x)); }
    BigInt evaluate(const std::vector<BigInt>& x) const { return evaluate(std::span<const BigInt>(x)); }

    std::int64_t evaluate_mod(std::span<const std::int64_t> x, std::int64_t m) const {
        check_length(x.size());
        std::int64_t total = 0;
        for (const auto& [e, c] : terms_) {
            std::int64_t t = mod_floor(c, m);
            for (int i = 0; i < n_vars_ && t != 0; ++i)
                if (e[i] != 0) t = mulmod(t, powmod(x[i], static_cast<unsigned>(e[i]), m), m);
            total = (total + t) % m;
        }
        return total;
    }

    double evaluate_real(std::span<const double> x) const {
        check_length(x.size());
        double total = 0;
        for (const auto& [e, c] : terms_) {
            double t = static_cast<double>(c);
            for (int i = 0; i < n_vars_; ++i)
                if (e[i] != 0) t *= std::pow(x[i], e[i]);
            total += t;
        }
        return total;
    }

    Form derivative(int var) const {
        if (var < 0 || var >= n_vars_) throw std::out_of_range("Form::derivative: variable index out of range");
        Form out(n_vars_);
        for (const auto& [e, c] : terms_) {
            if (e[var] == 0) continue;
            Exponent de = e;
            de[var] -= 1;
            out.add_term(std::move(de), c * e[var]);
        }
        return out;
    }

    std::vector<Form> gradient() const {
        std::vector<Form> g;
        g.reserve(n_vars_);
        for (int i = 0; i < n_vars_; ++i) g.push_back(derivative(i));
        return g;
    }

    Form homogeneous_part(int j) const {
        if (j < 0) throw std::invalid_argument("homogeneous_part: negative degree");
        Form out(n_vars_);
        for (const auto& [e, c] : terms_)
            if (total_degree(e) == j) out.add_term(e, c);
        return out;
    }

    // Sets the listed variables to zero; the ambient variable count is kept.
    Form restrict_zero(const IndexSet& zeroed) const {
        std::vector<bool> z(n_vars_, false);
        for (int i : zeroed) {
            if (i < 0 || i >= n_vars_) throw std::out_of_range("restrict_zero: index out of range");
            z[i] = true;
        }
        Form out(n_vars_);
        for (const auto& [e, c] : terms_) {
            bool keep = true;
            for (int i = 0; i < n_vars_ && keep; ++i) keep = !(z[i] && e[i] != 0);
            if (keep) out.add_term(e, c);
        }
        return out;
    }

    // Keeps only monomials supported on `kept`.
    Form restrict_to(const IndexSet& kept) const {
        return restrict_zero(complement(kept));
    }

    IndexSet complement(const IndexSet& s) const {
        std::vector<bool> in(n_vars_, false);
        for (int i : s) {
            if (i < 0 || i >= n_vars_) throw std::out_of_range("index out of range");
            in[i] = true;
        }
        IndexSet out;
        for (int i = 0; i < n_vars_; ++i)
            if (!in[i]) out.push_back(i);
        return out;
    }

    // Appends `extra` unused variables.
    Form embed(int extra) const {
        Form out(n_vars_ + extra);
        for (const auto& [e, c] : terms_) {
            Exponent ne = e;
            ne.resize(n_vars_ + extra, 0);
            out.add_term(std::move(ne), c);
        }
        return out;
    }

    // x_i -> scale[i] * x_i
    Form rescale(const std::vector<BigInt>& scale) const {
        check_length(scale.size());
        Form out(n_vars_);
        for (const auto& [e, c] : terms_) {
            BigInt t = c;
            for (int i = 0; i < n_vars_; ++i)
                if (e[i] != 0) t *= boost::multiprecision::pow(scale[i], static_cast<unsigned>(e[i]));
            out.add_term(e, t);
        }
        return out;
    }

    // Substitutes a univariate polynomial in `var`: returns coefficients
    // c_k(other vars evaluated at x) of var^k. x[var] is ignored.
    std::vector<BigInt> coefficients_in(int var, std::span<const std::int64_t> x) const {
        check_length(x.size());
        std::vector<BigInt> out(degree_in(var) + 1, BigInt(0));
        for (const auto& [e, c] : terms_) {
            BigInt t = c;
            for (int i = 0; i < n_vars_; ++i)
                if (i != var && e[i] != 0) t *= boost::multiprecision::pow(BigInt(x[i]), static_cast<unsigned>(e[i]));
            out[e[var]] += t;
        }
        return out;
    }

    Form operator+(const Form& o) const {
        check_same(o);
        Form out = *this;
        for (const auto& [e, c] : o.terms_) out.add_term(e, c);
        return out;
    }

    Form operator-(const Form& o) const {
        check_same(o);
        Form out = *this;
        for (const auto& [e, c] : o.terms_) out.add_term(e, -c);
        return out;
    }

    Form operator*(const Form& o) const {
        check_same(o);
        Form out(n_vars_);
        for (const auto& [e1, c1] : terms_)
            for (const auto& [e2, c2] : o.terms_) {
                Exponent e(n_vars_);
                for (int i = 0; i < n_vars_; ++i) e[i] = e1[i] + e2[i];
                out.add_term(std::move(e), c1 * c2);
            }
        return out;
    }

    Form scaled(const BigInt& k) const {
        Form out(n_vars_);
        for (const auto& [e, c] : terms_) out.add_term(e, c * k);
        return out;
    }

    bool operator==(const Form& o) const { return n_vars_ == o.n_vars_ && terms_ == o.terms_; }

    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            const auto& [e, c] = *it;
            BigInt a = abs(c);
            if (first)
                os << (c < 0 ? "-" : "");
            else
                os << (c < 0 ? " - " : " + ");
            first = false;
            const bool constant_term = total_degree(e) == 0;
            if (a != 1 || constant_term) os << a;
            bool need_star = a != 1;
            for (int i = 0; i < n_vars_; ++i) {
                if (e[i] == 0) continue;
                if (need_star) os << "*";
                os << "x" << (i + 1);
                if (e[i] > 1) os << "^" << e[i];
                need_star = true;
            }
        }
        return os.str();
    }

    // Serializes in the form-file format.
    std::string to_file_text() const {
        std::ostringstream os;
        for (const auto& [e, c] : terms_) {
            os << c;
            for (int v : e) os << ' ' << v;
            os << '\n';
        }
        return os.str();
    }

private:
    void check_length(std::size_t len) const {
        if (static_cast<int>(len) != n_vars_) throw std::invalid_argument("Form: argument length does not match variable count");
    }
    void check_same(const Form& o) const {
        if (o.n_vars_ != n_vars_) throw std::invalid_argument("Form: variable counts differ");
    }

    int n_vars_ = 0;
    std::map<Exponent, BigInt> terms_;
};

// Form-file parsing. Each data line is `c e1 ... en`; `#` starts a comment.
inline Form parse_form(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::vector<std::pair<BigInt, Exponent>> rows;
    std::optional<std::size_t> width;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        std::vector<std::string> tokens;
        for (std::string tok; ls >> tok;) tokens.push_back(tok);
        if (tokens.empty()) continue;
        auto parse_int = [&](const std::string& tok) {
            std::size_t start = (tok[0] == '-' || tok[0] == '+') ? 1 : 0;
            if (start == tok.size() ||
                !std::all_of(tok.begin() + static_cast<long>(start), tok.end(), [](char ch) { return ch >= '0' && ch <= '9'; }))
                throw std::invalid_argument("parse_form: non-integer token '" + tok + "' on line " + std::to_string(line_no));
            return BigInt(tok[0] == '+' ? tok.substr(1) : tok);
        };
        BigInt c = parse_int(tokens[0]);
        Exponent e;
        for (std::size_t i = 1; i < tokens.size(); ++i) {
            BigInt v = parse_int(tokens[i]);
            if (v < 0 || v > 1000) throw std::invalid_argument("parse_form: exponent out of range on line " + std::to_string(line_no));
            e.push_back(static_cast<int>(v));
        }
        if (e.empty()) throw std::invalid_argument("parse_form: line " + std::to_string(line_no) + " has no exponents");
        if (width && *width != e.size())
            throw std::invalid_argument("parse_form: ragged exponent lengths on line " + std::to_string(line_no));
        width = e.size();
        rows.emplace_back(std::move(c), std::move(e));
    }
    if (!width) throw std::invalid_argument("parse_form: empty form file");
    Form f(static_cast<int>(*width));
    for (auto& [c, e] : rows) f.add_term(std::move(e), c);
    return f;
}

// Portion of F mixing the variables of u and v, after setting everything
// outside u and v to zero.
inline Form cross_part(const Form& f, const IndexSet& u, const IndexSet& v) {
    std::vector<int> side(f.n_vars(), 0);
    for (int i : u) {
        if (i < 0 || i >= f.n_vars()) throw std::out_of_range("cross_part: index out of range");
        side[i] = 1;
    }
    for (int i : v) {
        if (i < 0 || i >= f.n_vars()) throw std::out_of_range("cross_part: index out of range");
        if (side[i] == 1) throw std::invalid_argument("cross_part: u and v overlap");
        side[i] = 2;
    }
    Form out(f.n_vars());
    for (const auto& [e, c] : f.terms()) {
        bool has_u = false, has_v = false, outside = false;
        for (int i = 0; i < f.n_vars(); ++i) {
            if (e[i] == 0) continue;
            has_u |= side[i] == 1;
            has_v |= side[i] == 2;
            outside |= side[i] == 0;
        }
        if (has_u && has_v && !outside) out.add_term(e, c);
    }
    return out;
}

// G(u; v) = F(u_1 v_1, ..., u_m v_m), with u occupying variables [0, m)
// and v occupying [m, 2m).
inline Form substitute_diagonal(const Form& f) {
    const int m = f.n_vars();
    Form out(2 * m);
    for (const auto& [e, c] : f.terms()) {
        Exponent ne(2 * m, 0);
        for (int i = 0; i < m; ++i) ne[i] = ne[m + i] = e[i];
        out.add_term(std::move(ne), c);
    }
    return out;
}

// Sign-and-scale check of bihomogeneity: G(su; tv) = s^a t^b G(u; v).
inline bool is_bihomogeneous(const Form& g, int m, int deg_u, int deg_v) {
    for (const auto& [e, c] : g.terms()) {
        int du = 0, dv = 0;
        for (int i = 0; i < m; ++i) du += e[i];
        for (int i = m; i < g.n_vars(); ++i) dv += e[i];
        if (du != deg_u || dv != deg_v) return false;
    }
    return true;
}

struct VariablePartition {
    std::vector<IndexSet> blocks;

    // Throws unless the blocks are disjoint and cover [0, n).
    void validate(int n) const {
        std::vector<int> seen(n, 0);
        for (const auto& b : blocks)
            for (int i : b) {
                if (i < 0 || i >= n) throw std::invalid_argument("VariablePartition: index out of range");
                if (seen[i]++) throw std::invalid_argument("VariablePartition: blocks overlap");
            }
        if (std::find(seen.begin(), seen.end(), 0) != seen.end())
            throw std::invalid_argument("VariablePartition: blocks do not cover all variables");
    }

    static VariablePartition contiguous(const std::vector<int>& sizes) {
        VariablePartition p;
        int next = 0;
        for (int s : sizes) {
            IndexSet b(s);
            std::iota(b.begin(), b.end(), next);
            next += s;
            p.blocks.push_back(std::move(b));
        }
        return p;
    }
};

// Coefficients of g(x; y) = F(x_1 y_1, ..., x_m y_m) written as
// sum_{j,k} G_{j,k} x_{j_1}..x_{j_d} y_{k_1}..y_{k_d}, symmetric in j and in k.
// Entries hold (d!)^2 G_{j,k}, keyed by sorted tuples; since each monomial of g
// pairs x^e with y^e, only keys with equal tuples are ever present.
struct MultilinearTable {
    int m = 0;
    int d = 0;
    std::map<std::pair<IndexSet, IndexSet>, BigInt> entries;

    BigInt scaled_coefficient(IndexSet j, IndexSet k) const {
        std::sort(j.begin(), j.end());
        std::sort(k.begin(), k.end());
        auto it = entries.find({j, k});
        return it == entries.end() ? BigInt(0) : it->second;
    }

    // Rebuilds g(x; y) as a form in 2m variables (x first).
    Form reconstruct() const {
        Form g(2 * m);
        const BigInt dfact2 = factorial(d) * factorial(d);
        for (const auto& [key, val] : entries) {
            const auto& [j, k] = key;
            // number of ordered arrangements of each sorted tuple
            BigInt arrangements = arrangements_of(j) * arrangements_of(k);
            BigInt coeff = val * arrangements;
            if (coeff % dfact2 != 0) throw std::logic_error("MultilinearTable: non-integral reconstruction");
            Exponent e(2 * m, 0);
            for (int i : j) e[i] += 1;
            for (int i : k) e[m + i] += 1;
            g.add_term(std::move(e), coeff / dfact2);
        }
        return g;
    }

    static BigInt factorial(int n) {
        BigInt r = 1;
        for (int i = 2; i <= n; ++i) r *= i;
        return r;
    }

    static BigInt arrangements_of(const IndexSet& sorted) {
        BigInt r = factorial(static_cast<int>(sorted.size()));
        for (std::size_t i = 0; i < sorted.size();) {
            std::size_t j = i;
            while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
            r /= factorial(static_cast<int>(j - i));
            i = j;
        }
        return r;
    }
};

inline MultilinearTable symmetric_multilinear(const Form& f) {
    if (!f.is_homogeneous()) throw std::invalid_argument("symmetric_multilinear: form is not homogeneous");
    MultilinearTable t;
    t.m = f.n_vars();
    t.d = f.degree();
    const BigInt dfact2 = MultilinearTable::factorial(t.d) * MultilinearTable::factorial(t.d);
    for (const auto& [e, c] : f.terms()) {
        IndexSet tuple;
        for (int i = 0; i < t.m; ++i)
            for (int r = 0; r < e[i]; ++r) tuple.push_back(i);
        // Spread c evenly across the arrangements of each side.
        const BigInt arr = MultilinearTable::arrangements_of(tuple);
        BigInt scaled = c * dfact2;
        if (scaled % (arr * arr) != 0) throw std::logic_error("symmetric_multilinear: non-integral entry");
        t.entries[{tuple, tuple}] = scaled / (arr * arr);
    }
    return t;
}

// Gamma(x_1..x_d; y_1..y_d) = (d!)^2 sum_{j,k} G_{j,k} x_{1,j_1}..x_{d,j_d} y_{1,k_1}..y_{d,k_d}.
inline BigInt gamma_eval(const MultilinearTable& t, const std::vector<std::vector<BigInt>>& xs,
                         const std::vector<std::vector<BigInt>>& ys) {
    if (static_cast<int>(xs.size()) != t.d || static_cast<int>(ys.size()) != t.d)
        throw std::invalid_argument("gamma_eval: expected d vectors on each side");
    for (const auto& v : xs)
        if (static_cast<int>(v.size()) != t.m) throw std::invalid_argument("gamma_eval: vector length mismatch");
    for (const auto& v : ys)
        if (static_cast<int>(v.size()) != t.m) throw std::invalid_argument("gamma_eval: vector length mismatch");

    // Sum over all ordered arrangements of a sorted tuple of slot values.
    auto slot_sum = [&](IndexSet tuple, const std::vector<std::vector<BigInt>>& vecs) {
        BigInt s = 0;
        do {
            BigInt p = 1;
            for (int slot = 0; slot < t.d && p != 0; ++slot) p *= vecs[slot][tuple[slot]];
            s += p;
        } while (std::next_permutation(tuple.begin(), tuple.end()));
        return s;
    };
    BigInt total = 0;
    for (const auto& [key, val] : t.entries) total += val * slot_sum(key.first, xs) * slot_sum(key.second, ys);
    return total;
}

}  // namespace hlcircle
