#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "csplab/polywidth.hpp"

#include "helpers.hpp"
#include "oracles.hpp"

using namespace csplab;

namespace {

std::set<int> mask_set(std::uint32_t mask) {
    auto v = u_mask_members(mask);
    return {v.begin(), v.end()};
}

} // namespace

TEST_CASE("subset structure universe size", "[polywidth]") {
    CHECK(u_structure(th::t2()).n_elements() == 3);
    CHECK(u_structure(th::k2()).n_elements() == 3);
    CHECK(u_structure(th::k3()).n_elements() == 7);
}

TEST_CASE("subset structure of T2 has the single expected tuple", "[polywidth]") {
    auto u = u_structure(th::t2());
    // masks ascend: {s}, {t}, {s,t}
    CHECK(u.universe == std::vector<std::string>{"s", "t", "s_t"});
    CHECK(u.relations[0].tuples == std::vector<std::vector<int>>{{0, 1}});
}

TEST_CASE("subset structure of K2", "[polywidth]") {
    auto u = u_structure(th::k2());
    CHECK(u.relations[0].tuples ==
          std::vector<std::vector<int>>{{0, 1}, {1, 0}, {2, 2}}); // includes the loop on {0,1}
}

TEST_CASE("subset structure of K3 has 28 arcs", "[polywidth]") {
    CHECK(u_structure(th::k3()).relations[0].tuples.size() == 28);
}

TEST_CASE("subset structure matches the naive rule on random templates", "[polywidth]") {
    std::mt19937_64 rng(71);
    for (int iter = 0; iter < 40; ++iter) {
        Structure a = th::random_digraph(rng, 3, true);
        auto u = u_structure(a);
        const std::uint32_t num = (1u << a.n_elements()) - 1;
        for (std::uint32_t m1 = 1; m1 <= num; ++m1)
            for (std::uint32_t m2 = 1; m2 <= num; ++m2) {
                bool in_u = std::binary_search(u.relations[0].tuples.begin(),
                                               u.relations[0].tuples.end(),
                                               std::vector<int>{u_index(m1), u_index(m2)});
                bool ref = oracle::u_rule(a, 0, {mask_set(m1), mask_set(m2)});
                REQUIRE(in_u == ref);
            }
    }
}

TEST_CASE("subset structure guard", "[polywidth]") {
    Structure big;
    big.name = "big";
    for (int i = 0; i < 17; ++i) big.universe.push_back("v" + std::to_string(i));
    big.relations.push_back({"E", 2, {}});
    CHECK_THROWS_AS(u_structure(big), guard_error);
}

TEST_CASE("width-1 of the standard templates", "[polywidth]") {
    auto w = width1_witness(th::t2());
    REQUIRE(w.has_value());
    CHECK(is_hom(u_structure(th::t2()), th::t2(), *w));

    CHECK_FALSE(width1_witness(th::k2()).has_value());
    CHECK_FALSE(width1_witness(th::k3()).has_value());
}

TEST_CASE("width-1 agrees with brute-force map enumeration", "[polywidth]") {
    std::mt19937_64 rng(73);
    for (int iter = 0; iter < 30; ++iter) {
        Structure a = th::random_digraph(rng, 3, true);
        CHECK(width1_witness(a).has_value() == oracle::brute_width1(u_structure(a), a));
    }
}

TEST_CASE("cyclic polymorphisms of the standard templates", "[polywidth]") {
    CHECK_FALSE(cyclic_polymorphism(th::k3(), 2).has_value());
    CHECK_FALSE(cyclic_polymorphism(th::k3(), 3).has_value());

    auto w = cyclic_polymorphism(th::t2(), 2);
    REQUIRE(w.has_value());
    CHECK(w->kind == PolyWitness::Kind::cyclic);
    CHECK(is_hom(power(th::t2(), 2), th::t2(), expand_poly(th::t2(), *w)));
}

TEST_CASE("totally symmetric polymorphisms of the standard templates", "[polywidth]") {
    CHECK_FALSE(ts_polymorphism(th::k2(), 2).has_value());

    auto w = ts_polymorphism(th::t2(), 3);
    REQUIRE(w.has_value());
    CHECK(is_hom(power(th::t2(), 3), th::t2(), expand_poly(th::t2(), *w)));

    // arity 1 always admits the identity
    for (const auto& a : {th::t2(), th::k2(), th::k3()})
        CHECK(ts_polymorphism(a, 1).has_value());
}

TEST_CASE("polymorphism searches agree with exhaustive table enumeration", "[polywidth]") {
    std::mt19937_64 rng(79);
    for (int iter = 0; iter < 25; ++iter) {
        Structure a = th::random_digraph(rng, 3, true);
        CHECK(cyclic_polymorphism(a, 2).has_value() == oracle::brute_cyclic(a, 2));
        CHECK(ts_polymorphism(a, 2).has_value() == oracle::brute_ts(a, 2));
    }
}

TEST_CASE("polymorphism keys are canonical and verified", "[polywidth]") {
    auto w = cyclic_polymorphism(th::t2(), 2);
    REQUIRE(w.has_value());
    std::set<std::vector<int>> seen;
    for (const auto& k : w->keys) {
        CHECK(oracle::cyclic_key_of(k) == k);
        CHECK(seen.insert(k).second);
    }
    CHECK(w->keys.size() == 3); // (s,s), (s,t)~(t,s), (t,t)
    CHECK(w->values.size() == w->keys.size());
}

TEST_CASE("a width-1 witness induces totally symmetric witnesses of every arity",
          "[polywidth]") {
    auto a = th::t2();
    auto omega = width1_witness(a);
    REQUIRE(omega.has_value());
    for (int n = 1; n <= 3; ++n) {
        PolyWitness w;
        w.kind = PolyWitness::Kind::totally_symmetric;
        w.arity = n;
        const std::uint32_t num = (1u << a.n_elements()) - 1;
        for (std::uint32_t m = 1; m <= num; ++m) {
            auto members = u_mask_members(m);
            if (static_cast<int>(members.size()) > n) continue;
            w.keys.push_back(members);
            w.values.push_back(omega->map[u_index(m)]);
        }
        CHECK(is_hom(power(a, n), a, expand_poly(a, w)));
    }
}

TEST_CASE("totally symmetric at full arity coincides with width 1", "[polywidth]") {
    std::mt19937_64 rng(83);
    for (int iter = 0; iter < 30; ++iter) {
        Structure a = th::random_digraph(rng, 3, true);
        CHECK(ts_polymorphism(a, a.n_elements()).has_value() ==
              width1_witness(a).has_value());
    }
}
