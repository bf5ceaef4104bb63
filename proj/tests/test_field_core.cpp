#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "matchkit/field.hpp"
#include "matchkit/rng.hpp"

using namespace matchkit;

namespace {

Vec elt(const FieldTower& t, const std::string& s) { return t.parse_element(s); }

Subspace sp(const FieldTower& t, std::initializer_list<const char*> gens, int ambient = -1) {
    Mat m;
    for (const char* g : gens) m.push_back(t.parse_element(g));
    int dim;
    if (ambient > 0) dim = ambient;
    else if (t.kind() == TowerKind::transcendental) {
        dim = 1;
        for (const auto& v : m) dim = std::max(dim, (int)v.size());
    } else {
        dim = t.degree();
    }
    return span(t.base(), dim, std::move(m));
}

Subspace random_subspace(const BaseField& k, DetRng& rng, int ambient, int dim_hint) {
    Mat gens;
    for (int i = 0; i < dim_hint; ++i) {
        Vec v((std::size_t)ambient);
        for (auto& c : v) c = k.reduce(Rat(rng.range(0, k.is_finite() ? k.order() - 1 : 9)));
        gens.push_back(std::move(v));
    }
    return span(k, ambient, std::move(gens));
}

}  // namespace

TEST_CASE("Rat arithmetic and overflow guard") {
    CHECK(Rat(2, 4) == Rat(1, 2));
    CHECK(Rat(1, 2) + Rat(1, 3) == Rat(5, 6));
    CHECK((Rat(3, 2) * Rat(2, 3)).is_one());
    CHECK(Rat(-2, -4) == Rat(1, 2));
    CHECK(Rat(2, -4) == Rat(-1, 2));
    CHECK(Rat::parse("-7/3") == Rat(-7, 3));
    CHECK_THROWS_AS(Rat(1, 0), std::domain_error);
    CHECK_THROWS_AS(Rat(INT64_MAX) * Rat(INT64_MAX), std::overflow_error);
    CHECK(Rat(INT64_MAX) * Rat(0) == Rat(0));
}

TEST_CASE("prime fields reduce, invert, and reject non-primes") {
    BaseField f5(5);
    CHECK(f5.add(Rat(3), Rat(4)) == Rat(2));
    CHECK(f5.mul(Rat(3), Rat(4)) == Rat(2));
    CHECK(f5.inv(Rat(3)) == Rat(2));
    CHECK(f5.reduce(Rat(-1)) == Rat(4));
    CHECK(f5.reduce(Rat(3, 2)) == Rat(4));  // 3 * inv(2) = 3*3 = 9 = 4
    CHECK_THROWS_AS(f5.inv(Rat(0)), std::domain_error);
    CHECK_THROWS_AS(BaseField(4), std::invalid_argument);
    CHECK_THROWS_AS(BaseField(1), std::invalid_argument);

    BaseField q(0);
    CHECK(q.inv(Rat(2, 3)) == Rat(3, 2));
    CHECK_FALSE(q.is_finite());
    CHECK_THROWS_AS(q.elements(), std::domain_error);
}

TEST_CASE("polynomial arithmetic round trips") {
    BaseField f2(2);
    Poly a = parse_poly(f2, "x^3+x+1", "x");
    Poly b = parse_poly(f2, "x+1", "x");
    auto [q, r] = poly_divmod(f2, poly_mul(f2, a, b), b);
    CHECK(q == a);
    CHECK(r.empty());

    auto [g, s, t] = poly_ext_gcd(f2, a, b);
    CHECK(poly_add(f2, poly_mul(f2, s, a), poly_mul(f2, t, b)) == g);

    BaseField q0(0);
    Poly c = parse_poly(q0, "3/2t^2-t+1", "t");
    CHECK(format_poly(q0, c, "t") == "3/2t^2-t+1");
    CHECK(parse_poly(q0, format_poly(q0, c, "t"), "t") == c);
    CHECK(parse_poly(q0, "0", "t").empty());
}

TEST_CASE("irreducibility by trial factorization") {
    BaseField f2(2), f3(3);
    CHECK(poly_irreducible(f2, parse_poly(f2, "x^2+x+1", "x")));
    CHECK_FALSE(poly_irreducible(f2, parse_poly(f2, "x^2+1", "x")));
    CHECK(poly_irreducible(f2, parse_poly(f2, "x^4+x+1", "x")));
    CHECK_FALSE(poly_irreducible(f2, parse_poly(f2, "x^4+x^2+1", "x")));
    CHECK(poly_irreducible(f3, parse_poly(f3, "x^2+1", "x")));
    CHECK(poly_irreducible(f2, parse_poly(f2, "x^5+x^2+1", "x")));
    CHECK_THROWS_AS(poly_irreducible(f2, parse_poly(f2, "x^9+x+1", "x")), std::invalid_argument);
}

TEST_CASE("tower descriptors parse and regenerate") {
    auto gf16 = FieldTower::parse("gf(2^4):x^4+x+1");
    CHECK(gf16.descriptor() == "gf(2^4):x^4+x+1");
    CHECK(gf16.degree() == 4);
    CHECK(gf16.field_order() == 16);

    auto gf4 = FieldTower::parse("gf(2^2)");  // canonical default modulus
    CHECK(gf4.descriptor() == "gf(2^2):x^2+x+1");

    CHECK(FieldTower::parse("fp(2)(t)").descriptor() == "fp(2)(t)");
    CHECK(FieldTower::parse("q(t)").descriptor() == "q(t)");
    CHECK(FieldTower::parse("q").descriptor() == "q");
    CHECK(FieldTower::parse("fp(7)").descriptor() == "fp(7)");
    CHECK(FieldTower::parse("GF(3^2) : x^2 + 1").descriptor() == "gf(3^2):x^2+1");

    CHECK_THROWS_AS(FieldTower::parse("gf(2^4):x^2+1"), std::invalid_argument);
    CHECK_THROWS_AS(FieldTower::parse("gf(2^4):x^4+x^2+1"), std::invalid_argument);  // reducible
    CHECK_THROWS_AS(FieldTower::parse("gf(4^2):x^2+x+1"), std::invalid_argument);
    CHECK_THROWS_AS(FieldTower::parse("nonsense"), std::invalid_argument);
}

TEST_CASE("GF(4) multiplication table follows the modulus") {
    auto gf4 = FieldTower::parse("gf(2^2):x^2+x+1");
    Vec x = elt(gf4, "x");
    CHECK(gf4.mul(x, x) == elt(gf4, "x+1"));  // x^2 = x+1
    CHECK(gf4.mul(x, elt(gf4, "x+1")) == gf4.one());
    auto inv = gf4.div_exact(gf4.one(), x);
    REQUIRE(inv.has_value());
    CHECK(*inv == elt(gf4, "x+1"));
    CHECK_THROWS_AS(gf4.div_exact(x, gf4.zero()), std::domain_error);
}

TEST_CASE("transcendental elements multiply as polynomials") {
    auto f3t = FieldTower::parse("fp(3)(t)");
    CHECK(f3t.mul(elt(f3t, "t+1"), elt(f3t, "t+2")) == elt(f3t, "t^2+2"));
    auto q = f3t.div_exact(elt(f3t, "t^2+2"), elt(f3t, "t+1"));
    REQUIRE(q.has_value());
    CHECK(*q == elt(f3t, "t+2"));
    CHECK_FALSE(f3t.div_exact(elt(f3t, "t^2+1"), elt(f3t, "t")).has_value());
}

TEST_CASE("span computes canonical echelon bases") {
    auto gf4 = FieldTower::parse("gf(2^2):x^2+x+1");
    CHECK(sp(gf4, {"1"}).dim() == 1);
    CHECK(sp(gf4, {"1", "x", "1+x"}).dim() == 2);  // dependency collapses

    auto f3t = FieldTower::parse("fp(3)(t)");
    Subspace s = sp(f3t, {"t", "t^2"}, 3);
    CHECK(s.dim() == 2);
    CHECK(s.ambient_dim == 3);

    // same span, different generators -> identical rows
    auto gf16 = FieldTower::parse("gf(2^4):x^4+x+1");
    Subspace u = sp(gf16, {"x", "x^2"});
    Subspace v = sp(gf16, {"x+x^2", "x^2"});
    CHECK(u == v);

    CHECK_THROWS_AS(span(f3t.base(), 2, Mat{elt(f3t, "t^2")}), std::invalid_argument);
}

TEST_CASE("sum and intersection satisfy the dimension formula") {
    auto gf16 = FieldTower::parse("gf(2^4):x^4+x+1");
    Subspace u = sp(gf16, {"1", "x"});
    CHECK(intersect_subspaces(gf16.base(), u, u) == u);
    CHECK(sum_subspaces(gf16.base(), u, u) == u);

    BaseField f2(2);
    Subspace l1 = span(f2, 2, {{Rat(1), Rat(0)}});
    Subspace l2 = span(f2, 2, {{Rat(0), Rat(1)}});
    CHECK(intersect_subspaces(f2, l1, l2).is_zero());
    CHECK(sum_subspaces(f2, l1, l2).dim() == 2);

    for (long long p : {2ll, 3ll, 0ll}) {
        BaseField k(p);
        DetRng rng(91 + (unsigned)p);
        int ambient = p == 0 ? 4 : 5;
        for (int it = 0; it < 1000; ++it) {
            Subspace a = random_subspace(k, rng, ambient, (int)rng.range(0, 3));
            Subspace b = random_subspace(k, rng, ambient, (int)rng.range(0, 3));
            Subspace s = sum_subspaces(k, a, b);
            Subspace i = intersect_subspaces(k, a, b);
            CHECK(s.dim() + i.dim() == a.dim() + b.dim());
            CHECK(subspace_le(k, i, a));
            CHECK(subspace_le(k, i, b));
            CHECK(subspace_le(k, a, s));
        }
    }
}

TEST_CASE("intersection agrees with exhaustive membership in F_2^5") {
    BaseField f2(2);
    DetRng rng(1234);
    for (int it = 0; it < 200; ++it) {
        Subspace a = random_subspace(f2, rng, 5, (int)rng.range(1, 3));
        Subspace b = random_subspace(f2, rng, 5, (int)rng.range(1, 3));
        Subspace i = intersect_subspaces(f2, a, b);
        Mat both;
        for (const auto& v : subspace_vectors(f2, a))
            if (contains(f2, b, v)) both.push_back(v);
        CHECK(span(f2, 5, both) == i);
    }
}

TEST_CASE("products of subspaces") {
    auto gf4 = FieldTower::parse("gf(2^2):x^2+x+1");
    // unit element embeds B
    Subspace b = sp(gf4, {"x"});
    CHECK(product_subspaces(gf4, sp(gf4, {"1"}), b) == b);
    // <x>*<x> = <x+1>
    CHECK(product_subspaces(gf4, sp(gf4, {"x"}), sp(gf4, {"x"})) == sp(gf4, {"x+1"}));

    auto f3t = FieldTower::parse("fp(3)(t)");
    Subspace a = sp(f3t, {"1", "t"});
    Subspace t1 = sp(f3t, {"t"});
    Subspace prod = product_subspaces(f3t, a, t1);
    CHECK(prod.ambient_dim == a.ambient_dim + t1.ambient_dim - 1);
    CHECK(prod == sp(f3t, {"t", "t^2"}, prod.ambient_dim));
}

TEST_CASE("product is independent of the chosen bases") {
    auto gf16 = FieldTower::parse("gf(2^4):x^4+x+1");
    DetRng rng(55);
    Subspace a = sp(gf16, {"1+x", "x^2"});
    Subspace b = sp(gf16, {"x^3", "x+x^2"});
    Subspace ref = product_subspaces(gf16, a, b);
    auto change_basis = [&](const Subspace& s) {
        Mat m;
        auto vs = subspace_vectors(gf16.base(), s);
        while ((int)m.size() < s.dim()) {
            Vec v = vs[(std::size_t)rng.range(1, (long long)vs.size() - 1)];
            Mat probe = m;
            probe.push_back(v);
            if (rank(gf16.base(), probe) > (int)m.size()) m.push_back(v);
        }
        Subspace out;
        out.ambient_dim = s.ambient_dim;
        out.rows = m;  // deliberately NOT echelonized
        return out;
    };
    for (int it = 0; it < 20; ++it) {
        Subspace a2 = change_basis(a);
        Subspace b2 = change_basis(b);
        CHECK(product_subspaces(gf16, a2, b2) == ref);
    }
}

TEST_CASE("preimage_in on hand-checked GF(4) cases") {
    auto gf4 = FieldTower::parse("gf(2^2):x^2+x+1");
    Subspace a = sp(gf4, {"x"});
    // multiplier 1 gives A ∩ B
    Subspace b = sp(gf4, {"1", "x"});
    CHECK(preimage_in(gf4, b, gf4.one(), a) == intersect_subspaces(gf4.base(), a, b));
    // {v in <x> : xv in <x>} = {0} since x*x = x+1
    CHECK(preimage_in(gf4, a, elt(gf4, "x"), a).is_zero());
    // {v in <1> : xv in <1>} = {0}
    Subspace k1 = sp(gf4, {"1"});
    CHECK(preimage_in(gf4, k1, elt(gf4, "x"), k1).is_zero());
    CHECK_THROWS_AS(preimage_in(gf4, a, gf4.zero(), a), std::invalid_argument);
}

TEST_CASE("preimage_in equals exhaustive element filtering on GF(2^4)") {
    auto gf16 = FieldTower::parse("gf(2^4):x^4+x+1");
    const BaseField& k = gf16.base();
    std::vector<Subspace> small;
    for (int d = 0; d <= 2; ++d)
        for (const auto& s : enumerate_subspaces(k, 4, d)) small.push_back(s);
    // all nonzero multipliers
    Mat xs = subspace_vectors(k, span(k, 4, {{Rat(1), Rat(0), Rat(0), Rat(0)},
                                             {Rat(0), Rat(1), Rat(0), Rat(0)},
                                             {Rat(0), Rat(0), Rat(1), Rat(0)},
                                             {Rat(0), Rat(0), Rat(0), Rat(1)}}));
    for (const auto& a : small) {
        for (const auto& b : small) {
            for (const auto& x : xs) {
                if (gf16.is_zero(x)) continue;
                Subspace got = preimage_in(gf16, b, x, a);
                Mat filtered;
                for (const auto& v : subspace_vectors(k, b))
                    if (contains(k, a, gf16.mul(x, v))) filtered.push_back(v);
                CHECK(span(k, 4, filtered) == got);
            }
        }
    }
}

TEST_CASE("preimage_in promotes transcendental ambients") {
    auto f2t = FieldTower::parse("fp(2)(t)");
    Subspace a = sp(f2t, {"1", "t"}, 4);      // polys of deg <= 3 ambient
    Subspace b = sp(f2t, {"1", "t^2"}, 4);
    // {v in B : t*v in A}: t*1 = t in A; t*t^2 = t^3 not in A
    Subspace pre = preimage_in(f2t, b, elt(f2t, "t"), a);
    CHECK(pre == sp(f2t, {"1"}, 4));
}

TEST_CASE("annihilator dimensions follow rank-nullity") {
    BaseField f2(2);
    Subspace b = span(f2, 4, {{Rat(1), Rat(0), Rat(0), Rat(0)}, {Rat(0), Rat(1), Rat(0), Rat(0)}});
    Subspace zero{4, {}};
    CHECK(annihilator(f2, zero, b).dim() == 2);  // full dual
    Subspace all = span(f2, 4, {{Rat(1), Rat(0), Rat(0), Rat(0)},
                                {Rat(0), Rat(1), Rat(0), Rat(0)},
                                {Rat(0), Rat(0), Rat(1), Rat(0)}});
    CHECK(annihilator(f2, all, b).dim() == 0);  // V ⊇ B
    Subspace line = span(f2, 4, {{Rat(1), Rat(0), Rat(0), Rat(0)}});
    Subspace ann = annihilator(f2, line, b);
    CHECK(ann.dim() == 1);
    CHECK(ann.ambient_dim == 2);

    DetRng rng(77);
    for (int it = 0; it < 300; ++it) {
        Subspace v = random_subspace(f2, rng, 4, (int)rng.range(0, 3));
        Subspace bb = random_subspace(f2, rng, 4, (int)rng.range(1, 3));
        Subspace meet = intersect_subspaces(f2, v, bb);
        CHECK(annihilator(f2, v, bb).dim() == bb.dim() - meet.dim());
    }
}

TEST_CASE("subspace enumeration counts match Gaussian binomials") {
    BaseField f2(2), f3(3);
    CHECK(enumerate_subspaces(f2, 4, 0).size() == 1);
    CHECK(enumerate_subspaces(f2, 4, 1).size() == 15);
    CHECK(enumerate_subspaces(f2, 4, 2).size() == 35);
    CHECK(enumerate_subspaces(f2, 4, 3).size() == 15);
    CHECK(enumerate_subspaces(f2, 4, 4).size() == 1);
    CHECK(enumerate_subspaces(f2, 5, 2).size() == 155);
    CHECK(enumerate_subspaces(f3, 2, 1).size() == 4);
    // each enumerated subspace is canonical and distinct
    auto all = enumerate_subspaces(f2, 4, 2);
    std::set<Mat> uniq;
    for (auto& s : all) {
        Mat copy = s.rows;
        auto piv = rref(f2, copy);
        CHECK(copy == s.rows);
        CHECK((int)piv.size() == 2);
        uniq.insert(s.rows);
    }
    CHECK(uniq.size() == all.size());
}

TEST_CASE("invertible-matrix enumeration matches |GL_n|") {
    BaseField f2(2), f3(3);
    CHECK(enumerate_invertible(f2, 1).size() == 1);
    CHECK(enumerate_invertible(f2, 2).size() == 6);
    CHECK(enumerate_invertible(f2, 3).size() == 168);
    CHECK(enumerate_invertible(f3, 1).size() == 2);
    CHECK(enumerate_invertible(f3, 2).size() == 48);
}

TEST_CASE("vector enumeration and projective representatives") {
    BaseField f3(3);
    Subspace s = span(f3, 3, {{Rat(1), Rat(0), Rat(0)}, {Rat(0), Rat(1), Rat(0)}});
    CHECK(subspace_vectors(f3, s).size() == 9);
    auto proj = projective_vectors(f3, s);
    CHECK(proj.size() == 4);  // (9-1)/(3-1)
    for (const auto& v : proj) {
        std::size_t first = 0;
        while (first < v.size() && v[first].is_zero()) ++first;
        REQUIRE(first < v.size());
        CHECK(v[first].is_one());
    }
}

TEST_CASE("coords_in and mat helpers") {
    BaseField f5(5);
    Subspace s = span(f5, 3, {{Rat(1), Rat(2), Rat(0)}, {Rat(0), Rat(0), Rat(1)}});
    Vec v = {Rat(2), Rat(4), Rat(3)};
    Vec c = coords_in(f5, s, v);
    CHECK(c == Vec{Rat(2), Rat(3)});
    CHECK_THROWS_AS(coords_in(f5, s, Vec{Rat(0), Rat(1), Rat(0)}), std::domain_error);

    Mat m = {{Rat(1), Rat(1)}, {Rat(0), Rat(1)}};
    Mat mi = mat_inverse(f5, m);
    Mat id = mat_mul(f5, m, mi);
    CHECK(id == Mat{{Rat(1), Rat(0)}, {Rat(0), Rat(1)}});
    CHECK(invertible(f5, m));
    CHECK_FALSE(invertible(f5, Mat{{Rat(1), Rat(2)}, {Rat(2), Rat(4)}}));
}
