#include "matchkit/field.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <tuple>

namespace matchkit {

namespace {

long long mod_inverse(long long a, long long p) {
    long long t = 0, nt = 1, r = p, nr = ((a % p) + p) % p;
    while (nr != 0) {
        long long q = r / nr;
        t = std::exchange(nt, t - q * nt);
        r = std::exchange(nr, r - q * nr);
    }
    if (r != 1) throw std::domain_error("mod_inverse: not invertible");
    return t < 0 ? t + p : t;
}

}  // namespace

BaseField::BaseField(long long p) : p_(p) {
    if (p_ == 0) return;
    if (p_ < 2) throw std::invalid_argument("BaseField: characteristic must be 0 or prime");
    for (long long d = 2; d * d <= p_; ++d)
        if (p_ % d == 0)
            throw std::invalid_argument("BaseField: " + std::to_string(p_) + " is not prime");
}

long long BaseField::order() const {
    if (p_ == 0) throw std::domain_error("BaseField: rationals are infinite");
    return p_;
}

Rat BaseField::reduce(const Rat& a) const {
    if (p_ == 0) return a;
    if (a.den() % p_ == 0) throw std::domain_error("BaseField: denominator divisible by p");
    long long num = ((a.num() % p_) + p_) % p_;
    if (a.den() == 1) return Rat(num);
    return Rat((long long)((__int128)num * mod_inverse(a.den(), p_) % p_));
}

Rat BaseField::add(const Rat& a, const Rat& b) const {
    if (p_ == 0) return a + b;
    return Rat(((a.num() + b.num()) % p_ + p_) % p_);
}

Rat BaseField::sub(const Rat& a, const Rat& b) const {
    if (p_ == 0) return a - b;
    return Rat(((a.num() - b.num()) % p_ + p_) % p_);
}

Rat BaseField::mul(const Rat& a, const Rat& b) const {
    if (p_ == 0) return a * b;
    return Rat((long long)((__int128)a.num() * b.num() % p_));
}

Rat BaseField::neg(const Rat& a) const {
    if (p_ == 0) return -a;
    return Rat(((-a.num()) % p_ + p_) % p_);
}

Rat BaseField::inv(const Rat& a) const {
    if (a.is_zero()) throw std::domain_error("BaseField: inverse of zero");
    if (p_ == 0) return Rat(1) / a;
    return Rat(mod_inverse(a.num(), p_));
}

std::vector<Rat> BaseField::elements() const {
    if (p_ == 0) throw std::domain_error("BaseField: cannot enumerate the rationals");
    std::vector<Rat> out;
    out.reserve((std::size_t)p_);
    for (long long i = 0; i < p_; ++i) out.emplace_back(i);
    return out;
}

Rat BaseField::parse_scalar(const std::string& s) const { return reduce(Rat::parse(s)); }

// --- polynomials ----------------------------------------------------------

int poly_deg(const Poly& p) { return (int)p.size() - 1; }

Poly poly_trim(Poly p) {
    while (!p.empty() && p.back().is_zero()) p.pop_back();
    return p;
}

Poly poly_add(const BaseField& k, const Poly& a, const Poly& b) {
    Poly r(std::max(a.size(), b.size()), Rat(0));
    for (std::size_t i = 0; i < r.size(); ++i) {
        Rat x = i < a.size() ? a[i] : Rat(0);
        Rat y = i < b.size() ? b[i] : Rat(0);
        r[i] = k.add(x, y);
    }
    return poly_trim(std::move(r));
}

Poly poly_sub(const BaseField& k, const Poly& a, const Poly& b) {
    Poly nb(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) nb[i] = k.neg(b[i]);
    return poly_add(k, a, nb);
}

Poly poly_scale(const BaseField& k, const Poly& a, const Rat& c) {
    Poly r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = k.mul(a[i], c);
    return poly_trim(std::move(r));
}

Poly poly_mul(const BaseField& k, const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, Rat(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_zero()) continue;
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] = k.add(r[i + j], k.mul(a[i], b[j]));
    }
    return poly_trim(std::move(r));
}

std::pair<Poly, Poly> poly_divmod(const BaseField& k, const Poly& a, const Poly& b) {
    Poly bt = poly_trim(b);
    if (bt.empty()) throw std::domain_error("poly_divmod: division by zero polynomial");
    Poly rem = poly_trim(a);
    if (rem.size() < bt.size()) return {{}, rem};
    Poly quot(rem.size() - bt.size() + 1, Rat(0));
    Rat lead_inv = k.inv(bt.back());
    while (rem.size() >= bt.size()) {
        std::size_t shift = rem.size() - bt.size();
        Rat f = k.mul(rem.back(), lead_inv);
        quot[shift] = f;
        for (std::size_t i = 0; i < bt.size(); ++i)
            rem[shift + i] = k.sub(rem[shift + i], k.mul(f, bt[i]));
        rem = poly_trim(std::move(rem));
        if (rem.empty()) break;
    }
    return {poly_trim(std::move(quot)), rem};
}

Poly poly_make_monic(const BaseField& k, const Poly& a) {
    Poly t = poly_trim(a);
    if (t.empty()) throw std::domain_error("poly_make_monic: zero polynomial");
    return poly_scale(k, t, k.inv(t.back()));
}

std::tuple<Poly, Poly, Poly> poly_ext_gcd(const BaseField& k, const Poly& a, const Poly& b) {
    Poly r0 = poly_trim(a), r1 = poly_trim(b);
    Poly s0 = {Rat(1)}, s1 = {}, t0 = {}, t1 = {Rat(1)};
    while (!r1.empty()) {
        auto [q, r2] = poly_divmod(k, r0, r1);
        r0 = std::exchange(r1, r2);
        Poly s2 = poly_sub(k, s0, poly_mul(k, q, s1));
        s0 = std::exchange(s1, s2);
        Poly t2 = poly_sub(k, t0, poly_mul(k, q, t1));
        t0 = std::exchange(t1, t2);
    }
    if (r0.empty()) return {r0, s0, t0};
    Rat c = k.inv(r0.back());
    return {poly_scale(k, r0, c), poly_scale(k, s0, c), poly_scale(k, t0, c)};
}

bool poly_irreducible(const BaseField& k, const Poly& m) {
    if (!k.is_finite())
        throw std::domain_error("poly_irreducible: finite base fields only");
    Poly mt = poly_trim(m);
    int d = poly_deg(mt);
    if (d < 1) return false;
    if (d == 1) return true;
    if (d > 8) throw std::invalid_argument("poly_irreducible: degree beyond desk scale (8)");
    const long long p = k.order();
    for (int f = 1; f <= d / 2; ++f) {
        // all monic candidates of degree f, odometer over the low coefficients
        std::vector<long long> c((std::size_t)f, 0);
        while (true) {
            Poly cand((std::size_t)f + 1, Rat(0));
            for (int i = 0; i < f; ++i) cand[(std::size_t)i] = Rat(c[(std::size_t)i]);
            cand[(std::size_t)f] = Rat(1);
            if (poly_divmod(k, mt, cand).second.empty()) return false;
            int i = 0;
            while (i < f && ++c[(std::size_t)i] == p) c[(std::size_t)i++] = 0;
            if (i == f) break;
        }
    }
    return true;
}

Poly parse_poly(const BaseField& k, const std::string& text, const std::string& var) {
    std::string s;
    for (char c : text)
        if (!std::isspace((unsigned char)c)) s += c;
    if (s.empty()) throw std::invalid_argument("polynomial: empty string");

    struct Term {
        int sign;
        std::string body;
    };
    std::vector<Term> terms;
    std::size_t i = 0;
    int sign = 1;
    if (s[0] == '+' || s[0] == '-') {
        sign = s[0] == '-' ? -1 : 1;
        i = 1;
    }
    std::string cur;
    for (; i < s.size(); ++i) {
        if (s[i] == '+' || s[i] == '-') {
            if (cur.empty()) throw std::invalid_argument("polynomial: dangling sign in '" + text + "'");
            terms.push_back({sign, cur});
            cur.clear();
            sign = s[i] == '-' ? -1 : 1;
        } else {
            cur += s[i];
        }
    }
    if (cur.empty()) throw std::invalid_argument("polynomial: dangling sign in '" + text + "'");
    terms.push_back({sign, cur});

    Poly out;
    auto bump = [&](std::size_t e, const Rat& c) {
        if (out.size() <= e) out.resize(e + 1, Rat(0));
        out[e] = k.add(out[e], k.reduce(c));
    };
    for (const auto& t : terms) {
        const std::string& b = t.body;
        std::size_t vpos = b.find(var);
        if (vpos == std::string::npos) {
            bump(0, Rat(t.sign) * Rat::parse(b));
            continue;
        }
        std::string coef = b.substr(0, vpos);
        if (!coef.empty() && coef.back() == '*') coef.pop_back();
        Rat c = coef.empty() ? Rat(1) : Rat::parse(coef);
        std::string rest = b.substr(vpos + var.size());
        long long e = 1;
        if (!rest.empty()) {
            if (rest[0] != '^')
                throw std::invalid_argument("polynomial: unexpected '" + rest + "' in '" + text + "'");
            e = std::stoll(rest.substr(1));
            if (e < 0) throw std::invalid_argument("polynomial: negative exponent");
        }
        bump((std::size_t)e, Rat(t.sign) * c);
    }
    return poly_trim(std::move(out));
}

std::string format_poly(const BaseField& k, const Poly& p, const std::string& var) {
    Poly t = poly_trim(p);
    if (t.empty()) return "0";
    std::string out;
    for (int e = poly_deg(t); e >= 0; --e) {
        const Rat& c = t[(std::size_t)e];
        if (c.is_zero()) continue;
        std::string term;
        if (e == 0) {
            term = c.str();
        } else {
            std::string head;
            if (c == Rat(-1)) head = "-";
            else if (!c.is_one()) head = c.str();
            term = head + var + (e > 1 ? "^" + std::to_string(e) : "");
        }
        if (out.empty()) out = term;
        else if (!term.empty() && term[0] == '-') out += term;
        else out += "+" + term;
    }
    (void)k;
    return out;
}

// --- tower ----------------------------------------------------------------

FieldTower::FieldTower(BaseField base, TowerKind kind, Poly modulus, std::string var)
    : base_(base), kind_(kind), modulus_(std::move(modulus)), var_(std::move(var)) {
    if (kind_ == TowerKind::finite) {
        const int d = poly_deg(modulus_);
        reduction_rows_.reserve((std::size_t)d - 1);
        Poly power((std::size_t)d + 1, Rat(0));
        power[(std::size_t)d] = Rat(1);  // x^d
        for (int i = 0; i <= d - 2; ++i) {
            Poly r = poly_divmod(base_, power, modulus_).second;
            Vec row((std::size_t)d, Rat(0));
            for (std::size_t j = 0; j < r.size(); ++j) row[j] = r[j];
            reduction_rows_.push_back(std::move(row));
            power.insert(power.begin(), Rat(0));  // multiply by x
        }
    }
}

FieldTower FieldTower::finite(long long p, Poly modulus) {
    BaseField k(p);
    if (!k.is_finite()) throw std::invalid_argument("FieldTower: finite towers need a prime base");
    Poly m = poly_make_monic(k, poly_trim(std::move(modulus)));
    for (auto& c : m) c = k.reduce(c);
    const int d = poly_deg(m);
    if (d < 2) throw std::invalid_argument("FieldTower: modulus degree must be >= 2");
    if (!poly_irreducible(k, m))
        throw std::invalid_argument("FieldTower: modulus " + format_poly(k, m, "x") +
                                    " is reducible over f" + std::to_string(p));
    return FieldTower(k, TowerKind::finite, std::move(m), "x");
}

FieldTower FieldTower::trivial(long long p) {
    return FieldTower(BaseField(p), TowerKind::trivial, {}, "x");
}

FieldTower FieldTower::transcendental(long long p, std::string var) {
    if (var.empty() || !std::isalpha((unsigned char)var[0]))
        throw std::invalid_argument("FieldTower: bad variable name");
    return FieldTower(BaseField(p), TowerKind::transcendental, {}, std::move(var));
}

FieldTower FieldTower::parse(const std::string& descriptor) {
    std::string s;
    for (char c : descriptor)
        if (!std::isspace((unsigned char)c)) s += (char)std::tolower((unsigned char)c);
    if (s.empty()) throw std::invalid_argument("tower descriptor: empty");

    auto parse_var_suffix = [](const std::string& str, std::size_t from) -> std::string {
        // "(t)" -> "t"
        if (from >= str.size()) return "";
        if (str[from] != '(' || str.back() != ')' || str.size() - from < 3)
            throw std::invalid_argument("tower descriptor: bad variable suffix '" + str + "'");
        return str.substr(from + 1, str.size() - from - 2);
    };

    if (s == "q") return trivial(0);
    if (s.rfind("q(", 0) == 0) return transcendental(0, parse_var_suffix(s, 1));
    if (s.rfind("fp(", 0) == 0) {
        std::size_t close = s.find(')');
        if (close == std::string::npos) throw std::invalid_argument("tower descriptor: missing ')'");
        long long p = std::stoll(s.substr(3, close - 3));
        if (close + 1 == s.size()) return trivial(p);
        return transcendental(p, parse_var_suffix(s, close + 1));
    }
    if (s.rfind("gf(", 0) == 0) {
        std::size_t caret = s.find('^');
        std::size_t close = s.find(')');
        if (caret == std::string::npos || close == std::string::npos || caret > close)
            throw std::invalid_argument("tower descriptor: expected gf(p^d)");
        long long p = std::stoll(s.substr(3, caret - 3));
        int d = (int)std::stoll(s.substr(caret + 1, close - caret - 1));
        BaseField k(p);
        Poly m;
        if (close + 1 < s.size()) {
            if (s[close + 1] != ':')
                throw std::invalid_argument("tower descriptor: expected ':' before modulus");
            m = parse_poly(k, s.substr(close + 2), "x");
        } else {
            // canonical default: first monic irreducible of degree d in
            // coefficient-lexicographic order
            if (d < 2 || d > 8) throw std::invalid_argument("tower descriptor: degree out of range");
            std::vector<long long> c((std::size_t)d, 0);
            while (true) {
                Poly cand((std::size_t)d + 1, Rat(0));
                for (int i = 0; i < d; ++i) cand[(std::size_t)i] = Rat(c[(std::size_t)i]);
                cand[(std::size_t)d] = Rat(1);
                if (poly_irreducible(k, cand)) {
                    m = cand;
                    break;
                }
                int i = d - 1;
                while (i >= 0 && ++c[(std::size_t)i] == p) c[(std::size_t)i--] = 0;
                if (i < 0) throw std::logic_error("no irreducible polynomial found");
            }
        }
        if (poly_deg(m) != d)
            throw std::invalid_argument("tower descriptor: modulus degree " +
                                        std::to_string(poly_deg(m)) + " != " + std::to_string(d));
        return finite(p, std::move(m));
    }
    throw std::invalid_argument("tower descriptor: cannot parse '" + descriptor + "'");
}

int FieldTower::degree() const {
    switch (kind_) {
        case TowerKind::trivial: return 1;
        case TowerKind::finite: return poly_deg(modulus_);
        case TowerKind::transcendental:
            throw std::domain_error("FieldTower: transcendental towers have no finite degree");
    }
    return 0;
}

std::string FieldTower::descriptor() const {
    switch (kind_) {
        case TowerKind::trivial:
            return base_.is_finite() ? "fp(" + std::to_string(base_.order()) + ")" : "q";
        case TowerKind::finite:
            return "gf(" + std::to_string(base_.order()) + "^" + std::to_string(degree()) +
                   "):" + format_poly(base_, modulus_, "x");
        case TowerKind::transcendental:
            return (base_.is_finite() ? "fp(" + std::to_string(base_.order()) + ")" : "q") +
                   ("(" + var_ + ")");
    }
    return "?";
}

long long FieldTower::field_order() const {
    if (kind_ == TowerKind::transcendental || !base_.is_finite())
        throw std::domain_error("FieldTower: infinite field");
    long long n = 1;
    for (int i = 0; i < degree(); ++i) n *= base_.order();
    return n;
}

Vec FieldTower::one() const {
    if (kind_ == TowerKind::finite) {
        Vec v((std::size_t)degree(), Rat(0));
        v[0] = Rat(1);
        return v;
    }
    return {Rat(1)};
}

Vec FieldTower::zero() const {
    if (kind_ == TowerKind::finite) return Vec((std::size_t)degree(), Rat(0));
    if (kind_ == TowerKind::trivial) return {Rat(0)};
    return {};
}

bool FieldTower::is_zero(const Vec& v) const {
    for (const auto& c : v)
        if (!c.is_zero()) return false;
    return true;
}

Vec FieldTower::mul(const Vec& u, const Vec& v) const {
    Poly prod = poly_mul(base_, poly_trim(u), poly_trim(v));
    if (kind_ == TowerKind::finite) {
        const int d = degree();
        Vec out((std::size_t)d, Rat(0));
        for (std::size_t i = 0; i < prod.size(); ++i) {
            if (prod[i].is_zero()) continue;
            if ((int)i < d) {
                out[i] = base_.add(out[i], prod[i]);
            } else {
                const Vec& row = reduction_rows_[i - (std::size_t)d];
                for (int j = 0; j < d; ++j)
                    out[(std::size_t)j] = base_.add(out[(std::size_t)j], base_.mul(prod[i], row[(std::size_t)j]));
            }
        }
        return out;
    }
    if (kind_ == TowerKind::trivial) return {prod.empty() ? Rat(0) : prod[0]};
    return prod;
}

std::optional<Vec> FieldTower::div_exact(const Vec& u, const Vec& v) const {
    if (is_zero(v)) throw std::domain_error("FieldTower: division by zero");
    if (kind_ == TowerKind::finite) {
        auto [g, s, t] = poly_ext_gcd(base_, poly_trim(v), modulus_);
        (void)t;
        if (poly_deg(g) != 0) throw std::logic_error("FieldTower: modulus not coprime to element");
        return mul(u, s);  // s = v^{-1} mod modulus (g is monic constant 1)
    }
    if (kind_ == TowerKind::trivial) {
        return Vec{base_.div(poly_trim(u).empty() ? Rat(0) : u[0], v[0])};
    }
    auto [q, r] = poly_divmod(base_, poly_trim(u), poly_trim(v));
    if (!r.empty()) return std::nullopt;
    return q;
}

Vec FieldTower::parse_element(const std::string& text) const {
    Poly p = parse_poly(base_, text, kind_ == TowerKind::transcendental ? var_ : "x");
    if (kind_ == TowerKind::transcendental) return p;
    const int d = kind_ == TowerKind::finite ? degree() : 1;
    if (kind_ == TowerKind::finite && poly_deg(p) >= d) p = poly_divmod(base_, p, modulus_).second;
    if (kind_ == TowerKind::trivial && poly_deg(p) > 0)
        throw std::invalid_argument("element '" + text + "' is not in the base field");
    Vec v((std::size_t)d, Rat(0));
    for (std::size_t i = 0; i < p.size(); ++i) v[i] = p[i];
    return v;
}

std::string FieldTower::format_element(const Vec& v) const {
    return format_poly(base_, v, kind_ == TowerKind::transcendental ? var_ : "x");
}

bool operator==(const FieldTower& a, const FieldTower& b) {
    return a.base_ == b.base_ && a.kind_ == b.kind_ && a.modulus_ == b.modulus_ && a.var_ == b.var_;
}

// --- matrices -------------------------------------------------------------

std::vector<int> rref(const BaseField& k, Mat& m) {
    std::vector<int> pivots;
    if (m.empty()) return pivots;
    const std::size_t cols = m[0].size();
    for (const auto& row : m)
        if (row.size() != cols) throw std::invalid_argument("rref: ragged matrix");
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
        std::size_t sel = m.size();
        for (std::size_t i = r; i < m.size(); ++i)
            if (!m[i][c].is_zero()) {
                sel = i;
                break;
            }
        if (sel == m.size()) continue;
        std::swap(m[r], m[sel]);
        Rat piv_inv = k.inv(m[r][c]);
        for (auto& x : m[r]) x = k.mul(x, piv_inv);
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (i == r || m[i][c].is_zero()) continue;
            Rat f = m[i][c];
            for (std::size_t j = c; j < cols; ++j)
                m[i][j] = k.sub(m[i][j], k.mul(f, m[r][j]));
        }
        pivots.push_back((int)c);
        ++r;
    }
    m.resize(r);
    return pivots;
}

int rank(const BaseField& k, Mat m) { return (int)rref(k, m).size(); }

Mat kernel(const BaseField& k, const Mat& m, int cols) {
    Mat red = m;
    for (auto& row : red) row.resize((std::size_t)cols, Rat(0));
    std::vector<int> pivots = rref(k, red);
    std::vector<bool> is_pivot((std::size_t)cols, false);
    for (int p : pivots) is_pivot[(std::size_t)p] = true;
    Mat basis;
    for (int f = 0; f < cols; ++f) {
        if (is_pivot[(std::size_t)f]) continue;
        Vec x((std::size_t)cols, Rat(0));
        x[(std::size_t)f] = Rat(1);
        for (std::size_t i = 0; i < pivots.size(); ++i)
            x[(std::size_t)pivots[i]] = k.neg(red[i][(std::size_t)f]);
        basis.push_back(std::move(x));
    }
    rref(k, basis);
    return basis;
}

Mat left_kernel(const BaseField& k, const Mat& m, int cols) {
    // transpose, then right kernel
    const std::size_t rows = m.size();
    Mat t((std::size_t)cols, Vec(rows, Rat(0)));
    for (std::size_t i = 0; i < rows; ++i) {
        if (m[i].size() != (std::size_t)cols) throw std::invalid_argument("left_kernel: ragged matrix");
        for (std::size_t j = 0; j < (std::size_t)cols; ++j) t[j][i] = m[i][j];
    }
    return kernel(k, t, (int)rows);
}

bool invertible(const BaseField& k, const Mat& m) {
    if (m.empty()) return true;
    if (m.size() != m[0].size()) return false;
    return rank(k, m) == (int)m.size();
}

Mat mat_mul(const BaseField& k, const Mat& a, const Mat& b) {
    if (a.empty() || b.empty()) return {};
    const std::size_t n = a.size(), mid = b.size(), c = b[0].size();
    Mat r(n, Vec(c, Rat(0)));
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i].size() != mid) throw std::invalid_argument("mat_mul: shape mismatch");
        for (std::size_t t = 0; t < mid; ++t) {
            if (a[i][t].is_zero()) continue;
            for (std::size_t j = 0; j < c; ++j)
                r[i][j] = k.add(r[i][j], k.mul(a[i][t], b[t][j]));
        }
    }
    return r;
}

Mat mat_inverse(const BaseField& k, const Mat& m) {
    const std::size_t n = m.size();
    Mat aug(n, Vec(2 * n, Rat(0)));
    for (std::size_t i = 0; i < n; ++i) {
        if (m[i].size() != n) throw std::invalid_argument("mat_inverse: not square");
        for (std::size_t j = 0; j < n; ++j) aug[i][j] = m[i][j];
        aug[i][n + i] = Rat(1);
    }
    auto pivots = rref(k, aug);
    if (pivots.size() != n || (n && pivots.back() != (int)n - 1))
        throw std::domain_error("mat_inverse: singular matrix");
    Mat inv(n, Vec(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv[i][j] = aug[i][n + j];
    return inv;
}

Vec mat_apply(const BaseField& k, const Mat& m, const Vec& x) {
    if (m.empty()) return {};
    if (x.size() != m.size()) throw std::invalid_argument("mat_apply: shape mismatch");
    Vec r(m[0].size(), Rat(0));
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (x[i].is_zero()) continue;
        for (std::size_t j = 0; j < r.size(); ++j)
            r[j] = k.add(r[j], k.mul(x[i], m[i][j]));
    }
    return r;
}

// --- subspaces ------------------------------------------------------------

namespace {

Vec pad_to(const Vec& v, int dim, const char* what) {
    Vec t = v;
    while (!t.empty() && t.back().is_zero()) t.pop_back();
    if ((int)t.size() > dim)
        throw std::invalid_argument(std::string(what) + ": vector leaves the ambient (dim " +
                                    std::to_string(dim) + ")");
    t.resize((std::size_t)dim, Rat(0));
    return t;
}

// reduce v against the RREF rows of s; returns the residue
Vec residue(const BaseField& k, const Subspace& s, Vec v) {
    for (const auto& row : s.rows) {
        std::size_t p = 0;
        while (p < row.size() && row[p].is_zero()) ++p;
        if (p == row.size()) continue;
        if (v[p].is_zero()) continue;
        Rat f = v[p];
        for (std::size_t j = p; j < v.size(); ++j) v[j] = k.sub(v[j], k.mul(f, row[j]));
    }
    return v;
}

void check_same_ambient(const Subspace& u, const Subspace& v, const char* what) {
    if (u.ambient_dim != v.ambient_dim)
        throw std::invalid_argument(std::string(what) + ": ambient mismatch (" +
                                    std::to_string(u.ambient_dim) + " vs " +
                                    std::to_string(v.ambient_dim) + ")");
}

}  // namespace

Subspace span(const BaseField& k, int ambient_dim, Mat vectors) {
    Subspace s;
    s.ambient_dim = ambient_dim;
    for (auto& v : vectors) v = pad_to(v, ambient_dim, "span");
    rref(k, vectors);
    s.rows = std::move(vectors);
    return s;
}

Subspace embed(const Subspace& s, int ambient_dim) {
    if (ambient_dim < s.ambient_dim) throw std::invalid_argument("embed: ambient shrink");
    Subspace out;
    out.ambient_dim = ambient_dim;
    out.rows = s.rows;
    for (auto& r : out.rows) r.resize((std::size_t)ambient_dim, Rat(0));
    return out;
}

Subspace sum_subspaces(const BaseField& k, const Subspace& u, const Subspace& v) {
    check_same_ambient(u, v, "sum");
    Mat all = u.rows;
    all.insert(all.end(), v.rows.begin(), v.rows.end());
    return span(k, u.ambient_dim, std::move(all));
}

Subspace intersect_subspaces(const BaseField& k, const Subspace& u, const Subspace& v) {
    check_same_ambient(u, v, "intersect");
    const std::size_t c = (std::size_t)u.ambient_dim;
    // Zassenhaus: rows [u|u] and [v|0]; left-zero rows carry the intersection
    Mat z;
    for (const auto& r : u.rows) {
        Vec row(2 * c, Rat(0));
        for (std::size_t j = 0; j < c; ++j) row[j] = row[c + j] = r[j];
        z.push_back(std::move(row));
    }
    for (const auto& r : v.rows) {
        Vec row(2 * c, Rat(0));
        for (std::size_t j = 0; j < c; ++j) row[j] = r[j];
        z.push_back(std::move(row));
    }
    rref(k, z);
    Mat inter;
    for (const auto& row : z) {
        bool left_zero = true;
        for (std::size_t j = 0; j < c && left_zero; ++j) left_zero = row[j].is_zero();
        if (!left_zero) continue;
        inter.emplace_back(row.begin() + (long)c, row.end());
    }
    return span(k, u.ambient_dim, std::move(inter));
}

bool contains(const BaseField& k, const Subspace& s, const Vec& v) {
    Vec r = residue(k, s, pad_to(v, s.ambient_dim, "contains"));
    for (const auto& x : r)
        if (!x.is_zero()) return false;
    return true;
}

bool subspace_le(const BaseField& k, const Subspace& u, const Subspace& v) {
    check_same_ambient(u, v, "subspace_le");
    for (const auto& r : u.rows)
        if (!contains(k, v, r)) return false;
    return true;
}

Vec coords_in(const BaseField& k, const Subspace& s, const Vec& v) {
    Vec w = pad_to(v, s.ambient_dim, "coords_in");
    Vec coords;
    coords.reserve(s.rows.size());
    for (const auto& row : s.rows) {
        std::size_t p = 0;
        while (p < row.size() && row[p].is_zero()) ++p;
        coords.push_back(p < w.size() ? w[p] : Rat(0));
    }
    // verify: v must equal the combination exactly
    Vec check = w;
    for (std::size_t i = 0; i < s.rows.size(); ++i)
        for (std::size_t j = 0; j < check.size(); ++j)
            check[j] = k.sub(check[j], k.mul(coords[i], s.rows[i][j]));
    for (const auto& x : check)
        if (!x.is_zero()) throw std::domain_error("coords_in: vector outside subspace");
    return coords;
}

Subspace product_subspaces(const FieldTower& t, const Subspace& a, const Subspace& b) {
    int out_dim;
    if (t.kind() == TowerKind::transcendental)
        out_dim = a.ambient_dim + b.ambient_dim - 1;
    else
        out_dim = t.degree();
    Mat prods;
    prods.reserve(a.rows.size() * b.rows.size());
    for (const auto& u : a.rows)
        for (const auto& v : b.rows) prods.push_back(t.mul(u, v));
    return span(t.base(), std::max(out_dim, 1), std::move(prods));
}

Subspace preimage_in(const FieldTower& t, const Subspace& b, const Vec& x, const Subspace& a) {
    if (t.is_zero(x)) throw std::invalid_argument("preimage_in: zero multiplier");
    int work_dim;
    if (t.kind() == TowerKind::transcendental) {
        Poly xt = poly_trim(x);
        work_dim = std::max(a.ambient_dim, poly_deg(xt) + b.ambient_dim);
        work_dim = std::max(work_dim, 1);
    } else {
        work_dim = t.degree();
        if (a.ambient_dim != work_dim || b.ambient_dim != work_dim)
            throw std::invalid_argument("preimage_in: ambient mismatch");
    }
    Subspace aw = embed(a, work_dim);
    Mat residues;
    residues.reserve(b.rows.size());
    for (const auto& v : b.rows)
        residues.push_back(residue(t.base(), aw, pad_to(t.mul(x, v), work_dim, "preimage_in")));
    Mat lam = left_kernel(t.base(), residues, work_dim);
    Mat gens;
    gens.reserve(lam.size());
    for (const auto& l : lam) gens.push_back(mat_apply(t.base(), b.rows, l));
    return span(t.base(), b.ambient_dim, std::move(gens));
}

Subspace annihilator(const BaseField& k, const Subspace& v, const Subspace& b) {
    const int dim = std::max(v.ambient_dim, b.ambient_dim);
    Subspace meet = intersect_subspaces(k, embed(v, dim), embed(b, dim));
    Subspace be = embed(b, dim);
    Mat in_b_coords;
    in_b_coords.reserve(meet.rows.size());
    for (const auto& w : meet.rows) in_b_coords.push_back(coords_in(k, be, w));
    Subspace dual;
    dual.ambient_dim = b.dim();
    dual.rows = kernel(k, in_b_coords, b.dim());
    return dual;
}

// --- enumeration ----------------------------------------------------------

Mat subspace_vectors(const BaseField& k, const Subspace& s) {
    const long long p = k.order();
    const int n = s.dim();
    Mat out;
    std::vector<long long> c((std::size_t)n, 0);
    while (true) {
        Vec v((std::size_t)s.ambient_dim, Rat(0));
        for (int i = 0; i < n; ++i) {
            if (c[(std::size_t)i] == 0) continue;
            Rat f((long long)c[(std::size_t)i]);
            for (std::size_t j = 0; j < v.size(); ++j)
                v[j] = k.add(v[j], k.mul(f, s.rows[(std::size_t)i][j]));
        }
        out.push_back(std::move(v));
        int i = n - 1;
        while (i >= 0 && ++c[(std::size_t)i] == p) c[(std::size_t)i--] = 0;
        if (i < 0) break;
    }
    return out;
}

Mat projective_vectors(const BaseField& k, const Subspace& s) {
    const long long p = k.order();
    const int n = s.dim();
    Mat out;
    std::vector<long long> c((std::size_t)n, 0);
    while (true) {
        long long first = 0;
        for (int i = 0; i < n; ++i)
            if (c[(std::size_t)i] != 0) {
                first = c[(std::size_t)i];
                break;
            }
        if (first == 1) {
            Vec v((std::size_t)s.ambient_dim, Rat(0));
            for (int i = 0; i < n; ++i) {
                if (c[(std::size_t)i] == 0) continue;
                Rat f((long long)c[(std::size_t)i]);
                for (std::size_t j = 0; j < v.size(); ++j)
                    v[j] = k.add(v[j], k.mul(f, s.rows[(std::size_t)i][j]));
            }
            out.push_back(std::move(v));
        }
        int i = n - 1;
        while (i >= 0 && ++c[(std::size_t)i] == p) c[(std::size_t)i--] = 0;
        if (i < 0) break;
    }
    return out;
}

std::vector<Subspace> enumerate_subspaces(const BaseField& k, int ambient_dim, int n) {
    if (n < 0 || n > ambient_dim) return {};
    std::vector<Subspace> out;
    if (n == 0) {
        out.push_back(Subspace{ambient_dim, {}});
        return out;
    }
    const long long p = k.order();
    // pivot-column combinations in lexicographic order
    std::vector<int> piv((std::size_t)n);
    for (int i = 0; i < n; ++i) piv[(std::size_t)i] = i;
    while (true) {
        std::vector<bool> is_piv((std::size_t)ambient_dim, false);
        for (int c : piv) is_piv[(std::size_t)c] = true;
        // free positions: (row i, col c) with c > piv[i], c not a pivot
        std::vector<std::pair<int, int>> free_pos;
        for (int i = 0; i < n; ++i)
            for (int c = piv[(std::size_t)i] + 1; c < ambient_dim; ++c)
                if (!is_piv[(std::size_t)c]) free_pos.emplace_back(i, c);
        std::vector<long long> val(free_pos.size(), 0);
        while (true) {
            Subspace s;
            s.ambient_dim = ambient_dim;
            s.rows.assign((std::size_t)n, Vec((std::size_t)ambient_dim, Rat(0)));
            for (int i = 0; i < n; ++i) s.rows[(std::size_t)i][(std::size_t)piv[(std::size_t)i]] = Rat(1);
            for (std::size_t f = 0; f < free_pos.size(); ++f)
                s.rows[(std::size_t)free_pos[f].first][(std::size_t)free_pos[f].second] = Rat(val[f]);
            out.push_back(std::move(s));
            std::size_t i = free_pos.size();
            while (i > 0 && ++val[i - 1] == p) val[--i] = 0;
            if (i == 0) break;
        }
        int i = n - 1;
        while (i >= 0 && piv[(std::size_t)i] == ambient_dim - n + i) --i;
        if (i < 0) break;
        ++piv[(std::size_t)i];
        for (int j = i + 1; j < n; ++j) piv[(std::size_t)j] = piv[(std::size_t)j - 1] + 1;
    }
    return out;
}

std::vector<Mat> enumerate_invertible(const BaseField& k, int n) {
    const long long p = k.order();
    std::vector<Mat> out;
    std::vector<long long> e((std::size_t)(n * n), 0);
    while (true) {
        Mat m((std::size_t)n, Vec((std::size_t)n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m[(std::size_t)i][(std::size_t)j] = Rat(e[(std::size_t)(i * n + j)]);
        if (invertible(k, m)) out.push_back(std::move(m));
        std::size_t i = e.size();
        while (i > 0 && ++e[i - 1] == p) e[--i] = 0;
        if (i == 0) break;
    }
    return out;
}

bool vec_less(const Vec& a, const Vec& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

bool mat_less(const Mat& a, const Mat& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), vec_less);
}

}  // namespace matchkit
