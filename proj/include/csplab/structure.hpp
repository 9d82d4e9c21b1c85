#pragma once

// Finite relational structures: a named universe plus named relations of fixed
// arities, with the structure-level constructions (power, Gaifman components,
// quotient, isomorphism test, homomorphism check).
//
// Conventions used throughout the library:
//   - elements are referred to by index into the universe vector; the universe
//     order is declaration order and is the global tie-break order,
//   - relation tuples are stored sorted and deduplicated, so iteration order is
//     deterministic everywhere.

#include <algorithm>
#include <cassert>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "csplab/core.hpp"

namespace csplab {

struct Relation {
    std::string name;
    int arity = 0;
    std::vector<std::vector<int>> tuples; // sorted, unique, entries are universe indices

    bool operator==(const Relation&) const = default;
};

struct Structure {
    std::string name;
    std::vector<std::string> universe;
    std::vector<Relation> relations;

    bool operator==(const Structure&) const = default;

    int n_elements() const { return static_cast<int>(universe.size()); }

    // Index of an element id, -1 if absent. Linear scan; parser and builders
    // keep their own maps where it matters.
    int elem(const std::string& id) const {
        for (std::size_t i = 0; i < universe.size(); ++i)
            if (universe[i] == id) return static_cast<int>(i);
        return -1;
    }

    const Relation* relation(const std::string& rname) const {
        for (const auto& r : relations)
            if (r.name == rname) return &r;
        return nullptr;
    }

    // Sorts and deduplicates every tuple set.
    void normalize() {
        for (auto& r : relations) {
            std::sort(r.tuples.begin(), r.tuples.end());
            r.tuples.erase(std::unique(r.tuples.begin(), r.tuples.end()), r.tuples.end());
        }
    }
};

using Signature = std::vector<std::pair<std::string, int>>;

inline Signature signature(const Structure& s) {
    Signature sig;
    sig.reserve(s.relations.size());
    for (const auto& r : s.relations) sig.emplace_back(r.name, r.arity);
    return sig;
}

inline bool same_signature(const Structure& a, const Structure& b) {
    return signature(a) == signature(b);
}

// A homomorphism candidate: map[i] is the image (target index) of source
// element i. Source and target are supplied at the call sites.
struct Hom {
    std::vector<int> map;

    bool operator==(const Hom&) const = default;
};

// Convenience builder for tests and tools: tuples given as element ids.
inline Structure make_structure(
    std::string name, std::vector<std::string> universe,
    std::vector<std::tuple<std::string, int, std::vector<std::vector<std::string>>>> rels) {
    Structure s;
    s.name = std::move(name);
    s.universe = std::move(universe);
    std::map<std::string, int> idx;
    for (std::size_t i = 0; i < s.universe.size(); ++i) idx[s.universe[i]] = static_cast<int>(i);
    for (auto& [rname, arity, tuples] : rels) {
        Relation r;
        r.name = rname;
        r.arity = arity;
        for (const auto& t : tuples) {
            std::vector<int> row;
            for (const auto& id : t) {
                auto it = idx.find(id);
                if (it == idx.end()) throw std::invalid_argument("unknown element id: " + id);
                row.push_back(it->second);
            }
            r.tuples.push_back(std::move(row));
        }
        s.relations.push_back(std::move(r));
    }
    s.normalize();
    return s;
}

// Invariant check. Empty result means the structure is well formed; otherwise
// each entry names the offending relation/tuple.
inline std::vector<std::string> validate(const Structure& s) {
    std::vector<std::string> errs;
    if (s.universe.empty()) errs.push_back("empty universe");
    {
        std::set<std::string> seen;
        for (const auto& id : s.universe)
            if (!seen.insert(id).second) errs.push_back("duplicate universe id: " + id);
    }
    {
        std::set<std::string> seen;
        for (const auto& r : s.relations)
            if (!seen.insert(r.name).second) errs.push_back("duplicate relation name: " + r.name);
    }
    const int n = s.n_elements();
    for (const auto& r : s.relations) {
        if (r.arity < 1) errs.push_back("relation " + r.name + ": arity must be >= 1");
        for (std::size_t ti = 0; ti < r.tuples.size(); ++ti) {
            const auto& t = r.tuples[ti];
            if (static_cast<int>(t.size()) != r.arity)
                errs.push_back("relation " + r.name + ": tuple #" + std::to_string(ti) +
                               " has arity " + std::to_string(t.size()) + ", declared " +
                               std::to_string(r.arity));
            for (int e : t)
                if (e < 0 || e >= n)
                    errs.push_back("relation " + r.name + ": tuple #" + std::to_string(ti) +
                                   " references unknown element index " + std::to_string(e));
        }
        if (!std::is_sorted(r.tuples.begin(), r.tuples.end()) ||
            std::adjacent_find(r.tuples.begin(), r.tuples.end()) != r.tuples.end())
            errs.push_back("relation " + r.name + ": tuple set not sorted/unique");
    }
    return errs;
}

// If the joined ids collide (member names containing '_' can make distinct
// generated names equal), fall back to positional ids.
inline void ensure_unique_ids(std::vector<std::string>& ids, const std::string& prefix) {
    std::set<std::string> seen(ids.begin(), ids.end());
    if (seen.size() == ids.size()) return;
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = prefix + std::to_string(i);
}

// n-th power: universe is all n-tuples over V(a) in odometer order (last
// coordinate fastest); a tuple of n-tuples is related iff every coordinate
// slice is related in a.
inline Structure power(const Structure& a, int n, const Limits& limits = {}) {
    if (n < 1) throw std::invalid_argument("power: n must be >= 1");
    const std::size_t base = a.universe.size();
    auto count = checked_pow(base, static_cast<std::size_t>(n), limits.max_power);
    if (!count) throw guard_error("power: universe size " + std::to_string(base) + "^" +
                                  std::to_string(n) + " exceeds guard");
    for (const auto& r : a.relations) {
        if (!checked_pow(r.tuples.size(), static_cast<std::size_t>(n), limits.max_power))
            throw guard_error("power: relation " + r.name + " tuple count exceeds guard");
    }

    Structure p;
    p.name = a.name + "_pow" + std::to_string(n);

    // universe: odometer enumeration of index tuples
    std::vector<int> digits(n, 0);
    for (std::size_t c = 0; c < *count; ++c) {
        std::string id;
        for (int k = 0; k < n; ++k) {
            if (k) id += '_';
            id += a.universe[digits[k]];
        }
        p.universe.push_back(std::move(id));
        for (int k = n - 1; k >= 0; --k) {
            if (++digits[k] < static_cast<int>(base)) break;
            digits[k] = 0;
        }
    }
    ensure_unique_ids(p.universe, "p");

    auto tuple_index = [&](const std::vector<int>& t) {
        std::size_t ix = 0;
        for (int k = 0; k < n; ++k) ix = ix * base + static_cast<std::size_t>(t[k]);
        return static_cast<int>(ix);
    };

    for (const auto& r : a.relations) {
        Relation pr;
        pr.name = r.name;
        pr.arity = r.arity;
        // choose n slice tuples from r; assemble coordinate-wise
        const std::size_t m = r.tuples.size();
        if (m > 0) {
            std::vector<std::size_t> pick(n, 0);
            while (true) {
                std::vector<int> row(r.arity);
                for (int pos = 0; pos < r.arity; ++pos) {
                    std::vector<int> coord(n);
                    for (int k = 0; k < n; ++k) coord[k] = r.tuples[pick[k]][pos];
                    row[pos] = tuple_index(coord);
                }
                pr.tuples.push_back(std::move(row));
                int k = n - 1;
                for (; k >= 0; --k) {
                    if (++pick[k] < m) break;
                    pick[k] = 0;
                }
                if (k < 0) break;
            }
        }
        p.relations.push_back(std::move(pr));
    }
    p.normalize();
    return p;
}

namespace detail {

class UnionFind {
  public:
    explicit UnionFind(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    int find(int x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    // returns false if already joined
    bool join(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (a < b) std::swap(a, b); // keep the least index as root
        parent_[a] = b;
        return true;
    }

  private:
    std::vector<int> parent_;
};

} // namespace detail

// Finest partition such that elements co-occurring in some tuple share a
// block. Blocks are sorted internally and ordered by least member.
inline std::vector<std::vector<int>> gaifman_components(const Structure& s) {
    detail::UnionFind uf(s.n_elements());
    for (const auto& r : s.relations)
        for (const auto& t : r.tuples)
            for (std::size_t k = 1; k < t.size(); ++k) uf.join(t[0], t[k]);
    std::map<int, std::vector<int>> blocks;
    for (int i = 0; i < s.n_elements(); ++i) blocks[uf.find(i)].push_back(i);
    std::vector<std::vector<int>> out;
    out.reserve(blocks.size());
    for (auto& [root, members] : blocks) out.push_back(std::move(members));
    return out;
}

// Quotient by a partition given as blocks of element indices. The new universe
// has one element per block, ordered by least member and named after it; every
// tuple maps to the tuple of blocks.
inline Structure quotient(const Structure& s, const std::vector<std::vector<int>>& blocks) {
    const int n = s.n_elements();
    std::vector<int> block_of(n, -1);
    std::vector<std::vector<int>> sorted_blocks = blocks;
    for (auto& b : sorted_blocks) std::sort(b.begin(), b.end());
    std::sort(sorted_blocks.begin(), sorted_blocks.end());
    for (std::size_t bi = 0; bi < sorted_blocks.size(); ++bi) {
        if (sorted_blocks[bi].empty()) throw std::invalid_argument("quotient: empty block");
        for (int e : sorted_blocks[bi]) {
            if (e < 0 || e >= n || block_of[e] != -1)
                throw std::invalid_argument("quotient: input is not a partition of the universe");
            block_of[e] = static_cast<int>(bi);
        }
    }
    for (int i = 0; i < n; ++i)
        if (block_of[i] == -1)
            throw std::invalid_argument("quotient: input is not a partition of the universe");

    Structure q;
    q.name = s.name;
    for (const auto& b : sorted_blocks) q.universe.push_back(s.universe[b.front()]);
    for (const auto& r : s.relations) {
        Relation qr;
        qr.name = r.name;
        qr.arity = r.arity;
        for (const auto& t : r.tuples) {
            std::vector<int> row(t.size());
            for (std::size_t k = 0; k < t.size(); ++k) row[k] = block_of[t[k]];
            qr.tuples.push_back(std::move(row));
        }
        q.relations.push_back(std::move(qr));
    }
    q.normalize();
    return q;
}

// The map sending each element to its block, as a Hom s -> quotient(s, blocks).
inline Hom quotient_map(const Structure& s, const std::vector<std::vector<int>>& blocks) {
    std::vector<std::vector<int>> sorted_blocks = blocks;
    for (auto& b : sorted_blocks) std::sort(b.begin(), b.end());
    std::sort(sorted_blocks.begin(), sorted_blocks.end());
    Hom h;
    h.map.assign(s.universe.size(), -1);
    for (std::size_t bi = 0; bi < sorted_blocks.size(); ++bi)
        for (int e : sorted_blocks[bi]) h.map[e] = static_cast<int>(bi);
    return h;
}

// g after f: (g ∘ f)(x) = g(f(x)).
inline Hom compose(const Hom& f, const Hom& g) {
    Hom h;
    h.map.reserve(f.map.size());
    for (int v : f.map) h.map.push_back(g.map.at(v));
    return h;
}

// True iff h maps every tuple of b into the corresponding relation of a.
// Requires a total mapping and matching signatures.
inline bool is_hom(const Structure& b, const Structure& a, const Hom& h) {
    if (!same_signature(b, a)) throw std::invalid_argument("is_hom: signature mismatch");
    if (h.map.size() != b.universe.size()) throw std::invalid_argument("is_hom: partial mapping");
    for (int v : h.map)
        if (v < 0 || v >= a.n_elements()) throw std::invalid_argument("is_hom: partial mapping");
    for (std::size_t ri = 0; ri < b.relations.size(); ++ri) {
        const auto& rb = b.relations[ri];
        const auto& ra = a.relations[ri];
        std::vector<int> img(rb.arity);
        for (const auto& t : rb.tuples) {
            for (int k = 0; k < rb.arity; ++k) img[k] = h.map[t[k]];
            if (!std::binary_search(ra.tuples.begin(), ra.tuples.end(), img)) return false;
        }
    }
    return true;
}

namespace detail {

// Per-element invariant used to prune the isomorphism search: occurrence
// counts per (relation, position).
inline std::vector<std::vector<int>> iso_profiles(const Structure& s) {
    std::vector<std::vector<int>> prof(s.universe.size());
    for (auto& p : prof) p.clear();
    for (const auto& r : s.relations)
        for (int pos = 0; pos < r.arity; ++pos) {
            std::vector<int> cnt(s.universe.size(), 0);
            for (const auto& t : r.tuples) ++cnt[t[pos]];
            for (std::size_t i = 0; i < s.universe.size(); ++i) prof[i].push_back(cnt[i]);
        }
    return prof;
}

inline bool iso_extends(const Structure& a, const Structure& b, const std::vector<int>& map) {
    // checks fully-mapped tuples of a land in b, with the partial map
    std::vector<int> img;
    for (std::size_t ri = 0; ri < a.relations.size(); ++ri) {
        const auto& ra = a.relations[ri];
        const auto& rb = b.relations[ri];
        for (const auto& t : ra.tuples) {
            img.assign(t.size(), 0);
            bool full = true;
            for (std::size_t k = 0; k < t.size(); ++k) {
                if (map[t[k]] < 0) {
                    full = false;
                    break;
                }
                img[k] = map[t[k]];
            }
            if (full && !std::binary_search(rb.tuples.begin(), rb.tuples.end(), img)) return false;
        }
    }
    return true;
}

inline bool iso_search(const Structure& a, const Structure& b,
                       const std::vector<std::vector<int>>& pa,
                       const std::vector<std::vector<int>>& pb, std::vector<int>& map,
                       std::vector<bool>& used, int next) {
    const int n = a.n_elements();
    if (next == n) return true;
    for (int cand = 0; cand < n; ++cand) {
        if (used[cand] || pa[next] != pb[cand]) continue;
        map[next] = cand;
        used[cand] = true;
        if (iso_extends(a, b, map) && iso_search(a, b, pa, pb, map, used, next + 1)) return true;
        map[next] = -1;
        used[cand] = false;
    }
    return false;
}

} // namespace detail

inline constexpr int kIsoGuard = 24;

// Backtracking isomorphism search with per-element invariant pruning. The
// returned bijection is verified in both directions before being returned.
inline std::optional<Hom> iso_check(const Structure& a, const Structure& b,
                                    const Limits& = {}) {
    if (a.n_elements() > kIsoGuard || b.n_elements() > kIsoGuard)
        throw guard_error("iso_check: structure larger than " + std::to_string(kIsoGuard) +
                          " elements");
    if (!same_signature(a, b)) return std::nullopt;
    if (a.n_elements() != b.n_elements()) return std::nullopt;
    for (std::size_t ri = 0; ri < a.relations.size(); ++ri)
        if (a.relations[ri].tuples.size() != b.relations[ri].tuples.size()) return std::nullopt;

    auto pa = detail::iso_profiles(a);
    auto pb = detail::iso_profiles(b);
    {
        auto sa = pa, sb = pb;
        std::sort(sa.begin(), sa.end());
        std::sort(sb.begin(), sb.end());
        if (sa != sb) return std::nullopt;
    }
    std::vector<int> map(a.n_elements(), -1);
    std::vector<bool> used(a.n_elements(), false);
    if (!detail::iso_search(a, b, pa, pb, map, used, 0)) return std::nullopt;

    Hom fwd{map};
    Hom bwd;
    bwd.map.assign(map.size(), -1);
    for (std::size_t i = 0; i < map.size(); ++i) bwd.map[map[i]] = static_cast<int>(i);
    if (!is_hom(a, b, fwd) || !is_hom(b, a, bwd)) return std::nullopt; // cannot happen
    return fwd;
}

} // namespace csplab
