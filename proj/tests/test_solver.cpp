#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "csplab/polywidth.hpp"
#include "csplab/solver.hpp"

#include "helpers.hpp"
#include "oracles.hpp"

using namespace csplab;

namespace {

std::vector<std::set<int>> as_sets(const ListAssignment& la) {
    std::vector<std::set<int>> out(la.lists.size());
    for (std::size_t i = 0; i < la.lists.size(); ++i)
        for (int v : la.values(static_cast<int>(i))) out[i].insert(v);
    return out;
}

} // namespace

TEST_CASE("arc consistency rejects the path into T2", "[solver]") {
    CHECK_FALSE(ac_lists(th::p2(), th::t2()).has_value());
}

TEST_CASE("arc consistency cannot refute K3 into K2", "[solver]") {
    auto la = ac_lists(th::k3(), th::k2());
    REQUIRE(la.has_value());
    for (int x = 0; x < 3; ++x) CHECK(la->values(x) == std::vector<int>{0, 1});
}

TEST_CASE("an isolated element keeps the full list", "[solver]") {
    auto b = make_structure("one", {"x"}, {{"E", 2, {}}});
    auto la = ac_lists(b, th::k3());
    REQUIRE(la.has_value());
    CHECK(la->values(0) == std::vector<int>{0, 1, 2});
}

TEST_CASE("ac fixpoint matches the naive rescan oracle", "[solver]") {
    std::mt19937_64 rng(41);
    const Structure templates[] = {th::t2(), th::k2(), th::k3()};
    for (int iter = 0; iter < 200; ++iter) {
        Structure b = th::random_digraph(rng, 5, true);
        const Structure& a = templates[iter % 3];
        auto lib = ac_lists(b, a);
        auto ref = oracle::naive_ac(b, a);
        REQUIRE(lib.has_value() == ref.has_value());
        if (lib) CHECK(as_sets(*lib) == *ref);
    }
}

TEST_CASE("ac success yields a homomorphism into the subset structure", "[solver]") {
    std::mt19937_64 rng(43);
    const Structure templates[] = {th::t2(), th::k2(), th::k3()};
    for (int iter = 0; iter < 60; ++iter) {
        Structure b = th::random_digraph(rng, 5, true);
        const Structure& a = templates[iter % 3];
        auto la = ac_lists(b, a);
        if (!la) continue;
        CHECK(is_hom(b, u_structure(a), lists_to_u_hom(*la)));
    }
}

TEST_CASE("solve_hom on the standard examples", "[solver]") {
    CHECK_FALSE(solve_hom(th::p2(), th::t2()).has_value());

    auto arc = solve_hom(th::single_arc(), th::t2());
    REQUIRE(arc.has_value());
    CHECK(arc->map == std::vector<int>{0, 1}); // x -> s, y -> t

    CHECK(solve_hom(th::k3(), th::k3()).has_value());
}

TEST_CASE("solve_hom agrees with brute-force enumeration", "[solver]") {
    std::mt19937_64 rng(47);
    const Structure templates[] = {th::t2(), th::k2(), th::k3()};
    for (int iter = 0; iter < 200; ++iter) {
        Structure b = th::random_digraph(rng, 5, true);
        const Structure& a = templates[iter % 3];
        auto lib = solve_hom(b, a);
        auto ref = oracle::brute_hom(b, a);
        REQUIRE(lib.has_value() == ref.has_value());
        if (lib) CHECK(is_hom(b, a, *lib));
    }
}

TEST_CASE("ac failure implies no homomorphism, and found homs sit inside the lists",
          "[solver]") {
    std::mt19937_64 rng(53);
    const Structure templates[] = {th::t2(), th::k2(), th::k3()};
    for (int iter = 0; iter < 200; ++iter) {
        Structure b = th::random_digraph(rng, 5, true);
        const Structure& a = templates[iter % 3];
        auto la = ac_lists(b, a);
        auto h = solve_hom(b, a);
        if (!la) CHECK_FALSE(h.has_value());
        if (h) {
            REQUIRE(la.has_value());
            for (std::size_t x = 0; x < h->map.size(); ++x)
                CHECK(la->lists[x].test(h->map[x]));
        }
    }
}

TEST_CASE("for the width-1 template T2, ac success implies a solution", "[solver]") {
    std::mt19937_64 rng(59);
    for (int iter = 0; iter < 200; ++iter) {
        Structure b = th::random_digraph(rng, 6);
        if (ac_lists(b, th::t2()).has_value())
            CHECK(solve_hom(b, th::t2()).has_value());
    }
}

TEST_CASE("solve_hom witnesses are deterministic", "[solver]") {
    std::mt19937_64 rng(61);
    for (int iter = 0; iter < 30; ++iter) {
        Structure b = th::random_digraph(rng, 5, true);
        auto h1 = solve_hom(b, th::k3());
        auto h2 = solve_hom(b, th::k3());
        REQUIRE(h1.has_value() == h2.has_value());
        if (h1) CHECK(h1->map == h2->map);
    }
}

TEST_CASE("hom_lists on the standard examples", "[solver]") {
    auto both = hom_lists(th::k2(), th::k2());
    CHECK(both.values(0) == std::vector<int>{0, 1});
    CHECK(both.values(1) == std::vector<int>{0, 1});

    auto none = hom_lists(th::p2(), th::t2());
    CHECK_FALSE(none.all_nonempty());
    for (int x = 0; x < 3; ++x) CHECK(none.values(x).empty());

    auto vertex = make_structure("pt", {"x"}, {{"E", 2, {}}});
    CHECK(hom_lists(vertex, th::k3()).values(0) == std::vector<int>{0, 1, 2});
}

TEST_CASE("hom_lists equals the enumeration oracle", "[solver]") {
    std::mt19937_64 rng(67);
    const Structure templates[] = {th::t2(), th::k2(), th::k3()};
    for (int iter = 0; iter < 120; ++iter) {
        Structure b = th::random_digraph(rng, 4, true);
        const Structure& a = templates[iter % 3];
        auto lib = hom_lists(b, a);
        auto ref = oracle::brute_lists(b, a);
        CHECK(as_sets(lib) == ref);
        if (lib.all_nonempty()) CHECK(is_hom(b, u_structure(a), lists_to_u_hom(lib)));
    }
}

TEST_CASE("solver rejects signature mismatches and guarded sizes", "[solver]") {
    CHECK_THROWS_AS(ac_lists(th::unary_arc(), th::t2()), std::invalid_argument);
    CHECK_THROWS_AS(solve_hom(th::unary_arc(), th::t2()), std::invalid_argument);
    Limits tight;
    tight.max_power = 4;
    CHECK_THROWS_AS(solve_hom(th::p2(), th::t2(), tight), guard_error);
    CHECK_THROWS_AS(hom_lists(th::p2(), th::t2(), tight), guard_error);
}
