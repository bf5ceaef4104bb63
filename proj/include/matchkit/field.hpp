#pragma once

#include <optional>
#include <string>
#include <vector>

#include "matchkit/rational.hpp"

namespace matchkit {

using Vec = std::vector<Rat>;
using Mat = std::vector<Vec>;

/**
 * Base field K: the rationals (p == 0) or a prime field F_p. Prime-field
 * values are integer Rats in [0, p); every operation routes through this
 * class so reductions never get skipped.
 */
class BaseField {
public:
    explicit BaseField(long long p);

    long long characteristic() const { return p_; }
    bool is_finite() const { return p_ != 0; }
    long long order() const;  // finite only

    Rat reduce(const Rat& a) const;
    Rat add(const Rat& a, const Rat& b) const;
    Rat sub(const Rat& a, const Rat& b) const;
    Rat mul(const Rat& a, const Rat& b) const;
    Rat neg(const Rat& a) const;
    Rat inv(const Rat& a) const;
    Rat div(const Rat& a, const Rat& b) const { return mul(a, inv(b)); }

    std::vector<Rat> elements() const;  // finite only, 0..p-1
    Rat parse_scalar(const std::string& s) const;

    friend bool operator==(const BaseField& a, const BaseField& b) { return a.p_ == b.p_; }

private:
    long long p_;
};

// --- dense polynomials over K (coefficient vectors, no trailing zeros) ----

using Poly = std::vector<Rat>;

int poly_deg(const Poly& p);  // -1 for zero
Poly poly_trim(Poly p);
Poly poly_add(const BaseField& k, const Poly& a, const Poly& b);
Poly poly_sub(const BaseField& k, const Poly& a, const Poly& b);
Poly poly_scale(const BaseField& k, const Poly& a, const Rat& c);
Poly poly_mul(const BaseField& k, const Poly& a, const Poly& b);
// quotient/remainder by a nonzero divisor
std::pair<Poly, Poly> poly_divmod(const BaseField& k, const Poly& a, const Poly& b);
Poly poly_make_monic(const BaseField& k, const Poly& a);
// extended gcd: returns (g, s, t) with s*a + t*b = g, g monic
std::tuple<Poly, Poly, Poly> poly_ext_gcd(const BaseField& k, const Poly& a, const Poly& b);
// trial factorization; finite base, degree <= 8
bool poly_irreducible(const BaseField& k, const Poly& m);

Poly parse_poly(const BaseField& k, const std::string& text, const std::string& var);
std::string format_poly(const BaseField& k, const Poly& p, const std::string& var);

// --- field towers ---------------------------------------------------------

enum class TowerKind { trivial, finite, transcendental };

/**
 * Extension L/K with explicit coordinates over K: the power basis
 * 1, x, ..., x^(d-1) for finite towers, the monomials 1, t, ..., t^m (per
 * computation degree bound) for transcendental ones, or K itself. Reduction
 * rows for x^d..x^(2d-2) are precomputed once; immutable afterwards.
 */
class FieldTower {
public:
    // gf(p^d):<modulus>, fp(p), q, fp(p)(t), q(t)
    static FieldTower parse(const std::string& descriptor);
    static FieldTower finite(long long p, Poly modulus);
    static FieldTower trivial(long long p);
    static FieldTower transcendental(long long p, std::string var);

    const BaseField& base() const { return base_; }
    TowerKind kind() const { return kind_; }
    int degree() const;  // ambient dimension for trivial/finite; throws otherwise
    const Poly& modulus() const { return modulus_; }
    const std::string& var() const { return var_; }
    std::string descriptor() const;

    // number of L-elements representable... finite towers only
    long long field_order() const;

    Vec one() const;
    Vec zero() const;
    bool is_zero(const Vec& v) const;
    // multiplication of coordinate vectors; finite towers reduce back to
    // degree d, transcendental products grow their ambient
    Vec mul(const Vec& u, const Vec& v) const;
    // exact division u/v: field inverse for finite towers, polynomial exact
    // division for transcendental ones (nullopt if the quotient leaves the
    // polynomial ambient)
    std::optional<Vec> div_exact(const Vec& u, const Vec& v) const;

    Vec parse_element(const std::string& text) const;
    std::string format_element(const Vec& v) const;

    friend bool operator==(const FieldTower& a, const FieldTower& b);

private:
    FieldTower(BaseField base, TowerKind kind, Poly modulus, std::string var);

    BaseField base_;
    TowerKind kind_;
    Poly modulus_;
    std::string var_;
    Mat reduction_rows_;  // x^(d+i) mod modulus, i = 0..d-2
};

// --- exact matrix helpers -------------------------------------------------

// in-place reduced row echelon form; returns pivot columns. Zero rows are
// removed; the result is the canonical basis of the row space.
std::vector<int> rref(const BaseField& k, Mat& m);
int rank(const BaseField& k, Mat m);
// right kernel {x : M x = 0}, canonical RREF basis
Mat kernel(const BaseField& k, const Mat& m, int cols);
// left kernel {x : x M = 0}
Mat left_kernel(const BaseField& k, const Mat& m, int cols);
bool invertible(const BaseField& k, const Mat& m);
Mat mat_mul(const BaseField& k, const Mat& a, const Mat& b);
Mat mat_inverse(const BaseField& k, const Mat& m);
Vec mat_apply(const BaseField& k, const Mat& m, const Vec& x);  // row vector x * M

// --- subspaces ------------------------------------------------------------

/**
 * Equi-ambient K-subspace in canonical reduced-row-echelon coordinates.
 * Two subspaces of the same ambient are equal iff their rows are identical.
 */
struct Subspace {
    int ambient_dim = 0;
    Mat rows;  // canonical RREF, one row per dimension

    int dim() const { return (int)rows.size(); }
    bool is_zero() const { return rows.empty(); }

    friend bool operator==(const Subspace& a, const Subspace& b) {
        return a.ambient_dim == b.ambient_dim && a.rows == b.rows;
    }
};

Subspace span(const BaseField& k, int ambient_dim, Mat vectors);
Subspace embed(const Subspace& s, int ambient_dim);  // zero-pad columns
Subspace sum_subspaces(const BaseField& k, const Subspace& u, const Subspace& v);
Subspace intersect_subspaces(const BaseField& k, const Subspace& u, const Subspace& v);
bool contains(const BaseField& k, const Subspace& s, const Vec& v);
bool subspace_le(const BaseField& k, const Subspace& u, const Subspace& v);
// coordinates of v in the canonical basis of s; throws when v is outside s
Vec coords_in(const BaseField& k, const Subspace& s, const Vec& v);

// span of pairwise products of basis vectors; ambient promoted for
// transcendental towers, fixed (reduced) for finite ones
Subspace product_subspaces(const FieldTower& t, const Subspace& a, const Subspace& b);
// {v in B : x*v in A} = x^(-1)A ∩ B, without inverting x; throws on x = 0
Subspace preimage_in(const FieldTower& t, const Subspace& b, const Vec& x, const Subspace& a);
// functionals on B vanishing on V∩B, in dual coordinates of B's basis
Subspace annihilator(const BaseField& k, const Subspace& v, const Subspace& b);

// --- finite enumeration (tests, scanners, universal quantifiers) ----------

// all vectors of s (p^dim of them), coefficient-lexicographic order
Mat subspace_vectors(const BaseField& k, const Subspace& s);
// one representative per scaling class: coefficient tuples whose first
// nonzero coefficient is 1
Mat projective_vectors(const BaseField& k, const Subspace& s);
// all n-dimensional subspaces of K^dim, canonical order
std::vector<Subspace> enumerate_subspaces(const BaseField& k, int ambient_dim, int n);
// all invertible n x n matrices over K, lexicographic on flattened entries
std::vector<Mat> enumerate_invertible(const BaseField& k, int n);

// lexicographic comparison helpers for deterministic ordering
bool vec_less(const Vec& a, const Vec& b);
bool mat_less(const Mat& a, const Mat& b);

}  // namespace matchkit
