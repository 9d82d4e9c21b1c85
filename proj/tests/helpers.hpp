#pragma once

// Shared fixtures for the test suite: the standard small templates and seeded
// random structure generators.

#include <random>
#include <string>

#include "csplab/structure.hpp"

namespace th {

inline csplab::Structure t2() {
    return csplab::make_structure("T2", {"s", "t"}, {{"E", 2, {{"s", "t"}}}});
}

inline csplab::Structure p2() {
    return csplab::make_structure("P2", {"x", "y", "z"}, {{"E", 2, {{"x", "y"}, {"y", "z"}}}});
}

inline csplab::Structure k2() {
    return csplab::make_structure("K2", {"0", "1"}, {{"E", 2, {{"0", "1"}, {"1", "0"}}}});
}

inline csplab::Structure k3() {
    return csplab::make_structure(
        "K3", {"0", "1", "2"},
        {{"E", 2, {{"0", "1"}, {"1", "0"}, {"0", "2"}, {"2", "0"}, {"1", "2"}, {"2", "1"}}}});
}

inline csplab::Structure single_arc() {
    return csplab::make_structure("arc", {"x", "y"}, {{"E", 2, {{"x", "y"}}}});
}

// Two-element template with a unary relation and one arc; its generator count
// depends on both relations.
inline csplab::Structure unary_arc() {
    return csplab::make_structure("PA", {"a", "b"},
                                  {{"E", 2, {{"a", "b"}}}, {"P", 1, {{"a"}}}});
}

// Unary-only template (generator count 0).
inline csplab::Structure unary_only() {
    return csplab::make_structure("PU", {"a", "b"}, {{"P", 1, {{"a"}}}});
}

// Digraph on 1..max_n vertices with one binary relation; arcs kept with
// probability ~1/3 (loops allowed iff loops is set).
inline csplab::Structure random_digraph(std::mt19937_64& rng, int max_n, bool loops = false) {
    std::uniform_int_distribution<int> nd(1, max_n);
    const int n = nd(rng);
    csplab::Structure s;
    s.name = "R";
    for (int i = 0; i < n; ++i) s.universe.push_back("x" + std::to_string(i));
    csplab::Relation e;
    e.name = "E";
    e.arity = 2;
    std::uniform_int_distribution<int> coin(0, 2);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j && !loops) continue;
            if (coin(rng) == 0) e.tuples.push_back({i, j});
        }
    s.relations.push_back(e);
    s.normalize();
    return s;
}

// The i-th template over a fixed universe size with a single binary relation:
// bit k of pattern decides whether the k-th of the n*n possible arcs is
// present (loops included).
inline csplab::Structure pattern_template(int n, unsigned pattern) {
    csplab::Structure s;
    s.name = "P" + std::to_string(n) + "_" + std::to_string(pattern);
    for (int i = 0; i < n; ++i) s.universe.push_back("v" + std::to_string(i));
    csplab::Relation e;
    e.name = "E";
    e.arity = 2;
    int bit = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j, ++bit)
            if ((pattern >> bit) & 1u) e.tuples.push_back({i, j});
    s.relations.push_back(e);
    s.normalize();
    return s;
}

} // namespace th
