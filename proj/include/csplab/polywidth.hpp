#pragma once

// The power-set structure U(A), the width-1 test, and polymorphism searches.
//
// U(A) elements are the nonempty subsets of V(A), encoded as bit masks with
// bit 0 = first universe element; the universe lists masks in ascending
// order, so the element index of mask m is m-1.
//
// Polymorphism searches reduce to plain homomorphism search: an n-ary map
// constant on a partition of V(A^n) is a homomorphism A^n -> A exactly when
// the induced block map is a homomorphism quotient(A^n, partition) -> A, so
// both searches delegate to solve_hom on the quotient.

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "csplab/core.hpp"
#include "csplab/solver.hpp"
#include "csplab/structure.hpp"

namespace csplab {

inline std::vector<int> u_mask_members(std::uint32_t mask) {
    std::vector<int> out;
    for (int i = 0; mask >> i; ++i)
        if ((mask >> i) & 1u) out.push_back(i);
    return out;
}

inline int u_index(std::uint32_t mask) { return static_cast<int>(mask) - 1; }
inline std::uint32_t u_mask(int index) { return static_cast<std::uint32_t>(index) + 1; }

// The structure on nonempty subsets: (S_1..S_r) is related iff every choice
// a_j in S_j extends to a witness tuple of R_i(a) with all coordinates in the
// S_k.
inline Structure u_structure(const Structure& a, const Limits& limits = {}) {
    const int k = a.n_elements();
    if (k > static_cast<int>(limits.max_u_universe))
        throw guard_error("u_structure: universe larger than " +
                          std::to_string(limits.max_u_universe) + " elements");
    const std::uint32_t num = (1u << k) - 1;
    for (const auto& r : a.relations)
        if (!checked_pow(num, static_cast<std::size_t>(r.arity), limits.max_power))
            throw guard_error("u_structure: relation " + r.name +
                              " candidate tuples exceed guard");

    Structure u;
    u.name = "U_" + a.name;
    for (std::uint32_t m = 1; m <= num; ++m) {
        std::string id;
        for (int e : u_mask_members(m)) {
            if (!id.empty()) id += '_';
            id += a.universe[e];
        }
        u.universe.push_back(std::move(id));
    }
    ensure_unique_ids(u.universe, "u");

    for (const auto& r : a.relations) {
        // witness tuples through a fixed (position, value)
        std::vector<std::vector<std::vector<int>>> through(
            r.arity, std::vector<std::vector<int>>(a.universe.size()));
        for (std::size_t ti = 0; ti < r.tuples.size(); ++ti)
            for (int pos = 0; pos < r.arity; ++pos)
                through[pos][r.tuples[ti][pos]].push_back(static_cast<int>(ti));

        auto admits = [&](const std::vector<std::uint32_t>& masks) {
            for (int j = 0; j < r.arity; ++j) {
                for (int v = 0; v < k; ++v) {
                    if (!((masks[j] >> v) & 1u)) continue;
                    bool found = false;
                    for (int ti : through[j][v]) {
                        const auto& t = r.tuples[ti];
                        bool inside = true;
                        for (int p = 0; p < r.arity; ++p)
                            if (!((masks[p] >> t[p]) & 1u)) {
                                inside = false;
                                break;
                            }
                        if (inside) {
                            found = true;
                            break;
                        }
                    }
                    if (!found) return false;
                }
            }
            return true;
        };

        Relation ur;
        ur.name = r.name;
        ur.arity = r.arity;
        std::vector<std::uint32_t> masks(r.arity, 1);
        while (true) {
            if (admits(masks)) {
                std::vector<int> row(r.arity);
                for (int p = 0; p < r.arity; ++p) row[p] = u_index(masks[p]);
                ur.tuples.push_back(std::move(row));
            }
            int p = r.arity - 1;
            for (; p >= 0; --p) {
                if (++masks[p] <= num) break;
                masks[p] = 1;
            }
            if (p < 0) break;
        }
        u.relations.push_back(std::move(ur));
    }
    u.normalize();
    return u;
}

// A successful list assignment for (b, a) as a homomorphism b -> U(a): each
// element goes to the subset its list denotes.
inline Hom lists_to_u_hom(const ListAssignment& la) {
    Hom h;
    h.map.reserve(la.lists.size());
    for (const auto& l : la.lists) {
        std::uint32_t mask = 0;
        for (auto v = l.find_first(); v != ValueSet::npos; v = l.find_next(v))
            mask |= 1u << v;
        if (mask == 0) throw std::invalid_argument("lists_to_u_hom: empty list");
        h.map.push_back(u_index(mask));
    }
    return h;
}

// Width 1: a homomorphism U(a) -> a. Deterministic witness via the solver.
inline std::optional<Hom> width1_witness(const Structure& a, const Limits& limits = {}) {
    return solve_hom(u_structure(a, limits), a, limits);
}

struct PolyWitness {
    enum class Kind { cyclic, totally_symmetric };
    Kind kind;
    int arity;
    // argument class -> chosen value; keys[i] is the canonical class key
    // (cyclic: lexicographically least cyclic shift of the argument tuple;
    // totally symmetric: the sorted set of arguments)
    std::vector<std::vector<int>> keys;
    std::vector<int> values;
};

namespace detail {

inline std::vector<int> power_digits(std::size_t index, int base, int n) {
    std::vector<int> d(n);
    for (int k = n - 1; k >= 0; --k) {
        d[k] = static_cast<int>(index % static_cast<std::size_t>(base));
        index /= static_cast<std::size_t>(base);
    }
    return d;
}

inline std::size_t power_index(const std::vector<int>& digits, int base) {
    std::size_t ix = 0;
    for (int d : digits) ix = ix * static_cast<std::size_t>(base) + static_cast<std::size_t>(d);
    return ix;
}

inline std::vector<int> cyclic_key(std::vector<int> t) {
    std::vector<int> best = t;
    for (std::size_t s = 1; s < t.size(); ++s) {
        std::rotate(t.begin(), t.begin() + 1, t.end());
        if (t < best) best = t;
    }
    return best;
}

inline std::vector<int> support_key(std::vector<int> t) {
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    return t;
}

// Partition of power indices by a canonical key of the digit tuple.
template <typename KeyFn>
inline std::vector<std::vector<int>> key_partition(int base, int n, KeyFn key) {
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(base);
    std::map<std::vector<int>, std::vector<int>> blocks;
    for (std::size_t ix = 0; ix < total; ++ix)
        blocks[key(power_digits(ix, base, n))].push_back(static_cast<int>(ix));
    std::vector<std::vector<int>> out;
    out.reserve(blocks.size());
    for (auto& [key_, members] : blocks) out.push_back(std::move(members));
    return out;
}

template <typename KeyFn>
inline std::optional<PolyWitness> poly_search(const Structure& a, int n, PolyWitness::Kind kind,
                                              KeyFn key, const Limits& limits) {
    if (n < 1) throw std::invalid_argument("polymorphism arity must be >= 1");
    Structure pw = power(a, n, limits);
    auto blocks = key_partition(a.n_elements(), n, key);
    Structure q = quotient(pw, blocks);
    auto h = solve_hom(q, a, limits);
    if (!h) return std::nullopt;

    PolyWitness w;
    w.kind = kind;
    w.arity = n;
    // quotient orders blocks by least member; rebuild keys in that order
    std::vector<std::vector<int>> sorted_blocks = blocks;
    for (auto& bl : sorted_blocks) std::sort(bl.begin(), bl.end());
    std::sort(sorted_blocks.begin(), sorted_blocks.end());
    for (const auto& bl : sorted_blocks)
        w.keys.push_back(key(power_digits(static_cast<std::size_t>(bl.front()),
                                          a.n_elements(), n)));
    w.values = h->map;

    // verification against the full power structure
    std::map<std::vector<int>, int> value_of;
    for (std::size_t i = 0; i < w.keys.size(); ++i) value_of[w.keys[i]] = w.values[i];
    Hom full;
    full.map.reserve(pw.universe.size());
    for (std::size_t ix = 0; ix < pw.universe.size(); ++ix)
        full.map.push_back(value_of.at(key(power_digits(ix, a.n_elements(), n))));
    if (!is_hom(pw, a, full)) throw std::logic_error("polymorphism witness failed verification");
    return w;
}

} // namespace detail

// Expands a witness table to the full map on power(a, n) (used for external
// re-verification).
inline Hom expand_poly(const Structure& a, const PolyWitness& w) {
    std::map<std::vector<int>, int> value_of;
    for (std::size_t i = 0; i < w.keys.size(); ++i) value_of[w.keys[i]] = w.values[i];
    std::size_t total = 1;
    for (int i = 0; i < w.arity; ++i) total *= a.universe.size();
    Hom full;
    full.map.reserve(total);
    for (std::size_t ix = 0; ix < total; ++ix) {
        auto digits = detail::power_digits(ix, a.n_elements(), w.arity);
        auto key = w.kind == PolyWitness::Kind::cyclic ? detail::cyclic_key(digits)
                                                       : detail::support_key(digits);
        full.map.push_back(value_of.at(key));
    }
    return full;
}

// A homomorphism power(a,n) -> a constant on cyclic-shift orbits.
inline std::optional<PolyWitness> cyclic_polymorphism(const Structure& a, int n,
                                                      const Limits& limits = {}) {
    if (n < 2) throw std::invalid_argument("cyclic polymorphism needs arity >= 2");
    return detail::poly_search(
        a, n, PolyWitness::Kind::cyclic, [](std::vector<int> t) { return detail::cyclic_key(std::move(t)); },
        limits);
}

// A homomorphism power(a,n) -> a whose value depends only on the set of
// arguments.
inline std::optional<PolyWitness> ts_polymorphism(const Structure& a, int n,
                                                  const Limits& limits = {}) {
    return detail::poly_search(
        a, n, PolyWitness::Kind::totally_symmetric,
        [](std::vector<int> t) { return detail::support_key(std::move(t)); }, limits);
}

} // namespace csplab
