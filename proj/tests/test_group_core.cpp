#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "matchkit/group.hpp"
#include "matchkit/rng.hpp"

using namespace matchkit;

TEST_CASE("addition with modular reduction") {
    AbelianGroup z5({5}, 0);
    CHECK(z5.add({3}, {4}) == GroupElement{2});

    AbelianGroup z({}, 1);
    CHECK(z.add({7}, {-7}) == GroupElement{0});

    AbelianGroup z2z4({2, 4}, 0);
    CHECK(z2z4.add({1, 3}, {1, 2}) == GroupElement{0, 1});
}

TEST_CASE("addition rejects arity mismatch") {
    AbelianGroup z5({5}, 0);
    CHECK_THROWS_AS(z5.add({1, 2}, {0}), std::invalid_argument);
    CHECK_THROWS_AS(z5.normalize({1, 2}), std::invalid_argument);
}

TEST_CASE("add is associative and commutative on random triples") {
    for (const char* desc : {"z5", "z2xz4", "free2", "z3xfree1"}) {
        AbelianGroup g = AbelianGroup::parse(desc);
        DetRng rng(7);
        for (int it = 0; it < 1000; ++it) {
            GroupElement x(g.arity()), y(g.arity()), z(g.arity());
            for (std::size_t i = 0; i < g.arity(); ++i) {
                x[i] = rng.range(-20, 20);
                y[i] = rng.range(-20, 20);
                z[i] = rng.range(-20, 20);
            }
            x = g.normalize(x);
            y = g.normalize(y);
            z = g.normalize(z);
            CHECK(g.add(x, y) == g.add(y, x));
            CHECK(g.add(g.add(x, y), z) == g.add(x, g.add(y, z)));
        }
    }
}

TEST_CASE("normalize is idempotent") {
    AbelianGroup g = AbelianGroup::parse("z2xz4xfree1");
    DetRng rng(11);
    for (int it = 0; it < 500; ++it) {
        GroupElement x = {rng.range(-9, 9), rng.range(-9, 9), rng.range(-9, 9)};
        CHECK(g.normalize(g.normalize(x)) == g.normalize(x));
    }
}

TEST_CASE("validate_pair canonicalizes and flags zero") {
    AbelianGroup z5({5}, 0);
    SubsetPair p = validate_pair(z5, {{1}, {2}}, {{2}, {3}});
    CHECK(p.a == std::vector<GroupElement>{{1}, {2}});
    CHECK_FALSE(p.zero_in_b);

    SubsetPair q = validate_pair(z5, {{1}, {2}}, {{0}, {3}});
    CHECK(q.zero_in_b);

    CHECK_THROWS_AS(validate_pair(z5, {{1}, {2}}, {{3}}), std::invalid_argument);
    CHECK_THROWS_AS(validate_pair(z5, {{1}, {1}}, {{2}, {3}}), std::invalid_argument);
    CHECK_THROWS_AS(validate_pair(z5, {}, {}), std::invalid_argument);
    // duplicates after normalization count as duplicates
    CHECK_THROWS_AS(validate_pair(z5, {{1}, {6}}, {{2}, {3}}), std::invalid_argument);
}

TEST_CASE("validate_pair output independent of input order") {
    AbelianGroup g = AbelianGroup::parse("z2xz4");
    std::vector<GroupElement> a = {{0, 1}, {1, 3}, {1, 0}};
    std::vector<GroupElement> b = {{0, 2}, {1, 1}, {0, 3}};
    SubsetPair p = validate_pair(g, a, b);
    std::reverse(a.begin(), a.end());
    std::reverse(b.begin(), b.end());
    SubsetPair q = validate_pair(g, a, b);
    CHECK(p.a == q.a);
    CHECK(p.b == q.b);
}

TEST_CASE("descriptor grammar") {
    CHECK(AbelianGroup::parse("z7").descriptor() == "z7");
    CHECK(AbelianGroup::parse("z2 x z4").descriptor() == "z2xz4");
    CHECK(AbelianGroup::parse("free2").descriptor() == "free2");
    CHECK(AbelianGroup::parse("Z3xFREE1").descriptor() == "z3xfree1");
    CHECK_THROWS_AS(AbelianGroup::parse(""), std::invalid_argument);
    CHECK_THROWS_AS(AbelianGroup::parse("z"), std::invalid_argument);
    CHECK_THROWS_AS(AbelianGroup::parse("z1"), std::invalid_argument);
    CHECK_THROWS_AS(AbelianGroup::parse("q8"), std::invalid_argument);
    CHECK_THROWS_AS(AbelianGroup::parse("z4x"), std::invalid_argument);
}

TEST_CASE("element indexing is a lexicographic bijection") {
    AbelianGroup g = AbelianGroup::parse("z2xz4");
    REQUIRE(g.order() == 8);
    GroupElement prev;
    for (long long i = 0; i < 8; ++i) {
        GroupElement e = g.element_at(i);
        CHECK(g.index_of(e) == i);
        if (i > 0) CHECK(prev < e);
        prev = e;
    }
    CHECK(g.element_at(0) == g.zero());
}

TEST_CASE("element list parsing") {
    AbelianGroup z5({5}, 0);
    auto lst = parse_element_list(z5, "0,2");
    REQUIRE(lst.size() == 2);
    CHECK(lst[0] == GroupElement{0});
    CHECK(lst[1] == GroupElement{2});

    AbelianGroup g = AbelianGroup::parse("z2xz4");
    auto tup = parse_element_list(g, "1,3;0,2");
    REQUIRE(tup.size() == 2);
    CHECK(tup[0] == GroupElement{1, 3});
    CHECK(format_element(tup[0]) == "1,3");

    auto single = parse_element_list(z5, "4");
    REQUIRE(single.size() == 1);
    CHECK(single[0] == GroupElement{4});
}
