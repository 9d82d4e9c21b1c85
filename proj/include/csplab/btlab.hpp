#pragma once

// Desk-scale pieces of the Banach–Tarski-style construction: the generator
// table and its count b, finite fragments of the tree-indexed structure over
// one tree component, the tree homomorphism extension, the set of
// distinct-generator products, the collapse check, and the invariant-point
// search.
//
// One tree component is modeled as the reduced words of the free group on
// D_1..D_b (letters 1..b in word.hpp encoding); the group acts by left
// multiplication. A fragment's universe is ball × V(U(A)) with vertex index
// word_index * |V(U(A))| + uset_index.

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "csplab/core.hpp"
#include "csplab/dsl.hpp"
#include "csplab/polywidth.hpp"
#include "csplab/structure.hpp"
#include "csplab/word.hpp"

namespace csplab {

// One generator D(R_i, tuple, k): k connects tuple coordinate k to k+1
// (1-based, k <= arity-1).
struct GeneratorEntry {
    int rel;   // relation index in the template signature
    int tuple; // tuple index within R_rel(U(A))
    int pos;   // 1..arity-1

    bool operator==(const GeneratorEntry&) const = default;
};

struct GeneratorTable {
    int b = 0;
    Structure u;                        // u_structure of the template
    std::vector<GeneratorEntry> entries; // entries[g-1] describes generator g

    int index_of(int rel, int tuple, int pos) const {
        auto it = lookup_.find(std::make_tuple(rel, tuple, pos));
        if (it == lookup_.end()) throw std::invalid_argument("generator table: no such triple");
        return it->second;
    }

    void build_lookup() {
        lookup_.clear();
        for (std::size_t i = 0; i < entries.size(); ++i)
            lookup_[std::make_tuple(entries[i].rel, entries[i].tuple, entries[i].pos)] =
                static_cast<int>(i) + 1;
    }

  private:
    std::map<std::tuple<int, int, int>, int> lookup_;
};

// b = Σ over relations of (arity-1)·|R_i(U(A))|; generators indexed in
// canonical order (relation, tuple, ascending position).
inline GeneratorTable compute_b(const Structure& a, const Limits& limits = {}) {
    GeneratorTable t;
    t.u = u_structure(a, limits);
    for (std::size_t ri = 0; ri < t.u.relations.size(); ++ri) {
        const auto& r = t.u.relations[ri];
        for (std::size_t ti = 0; ti < r.tuples.size(); ++ti)
            for (int pos = 1; pos <= r.arity - 1; ++pos)
                t.entries.push_back({static_cast<int>(ri), static_cast<int>(ti), pos});
    }
    t.b = static_cast<int>(t.entries.size());
    t.build_lookup();
    return t;
}

// All products of pairwise-distinct positive generators (every length 0..b,
// every order), as reduced words in shortlex order. Size Σ_k b!/(b-k)!.
inline std::vector<Word> build_dset(const GeneratorTable& table, const Limits& limits = {}) {
    // refuse early when the size formula blows past the guard
    std::size_t total = 1, level = 1;
    for (int k = 1; k <= table.b; ++k) {
        level *= static_cast<std::size_t>(table.b - k + 1);
        total += level;
        if (total > limits.max_dset)
            throw guard_error("dset: size exceeds guard (b = " + std::to_string(table.b) + ")");
    }
    std::vector<Word> dset;
    dset.push_back({});
    std::size_t level_begin = 0;
    for (int len = 1; len <= table.b; ++len) {
        std::size_t level_end = dset.size();
        for (std::size_t i = level_begin; i < level_end; ++i) {
            for (int g = 1; g <= table.b; ++g) {
                const Word& w = dset[i];
                if (std::find(w.begin(), w.end(), g) != w.end()) continue;
                Word next = w;
                next.push_back(g);
                dset.push_back(std::move(next));
            }
        }
        level_begin = level_end;
    }
    return dset;
}

struct Fragment {
    Structure a;          // template
    GeneratorTable table; // with u inside
    int radius = 0;
    std::vector<Word> words; // shortlex ball (or another closed word set)
    Structure graph;

    int num_u() const { return table.u.n_elements(); }
    int vertex(int word_ix, int uset_ix) const { return word_ix * num_u() + uset_ix; }
    int word_of(int v) const { return v / num_u(); }
    int uset_of(int v) const { return v % num_u(); }
};

namespace detail {

// The structure on words × V(U(A)) with a tuple rooted at w for each U-tuple,
// kept iff every coordinate word lies in the given set.
inline Structure word_structure(const Structure& a, const GeneratorTable& table,
                                const std::vector<Word>& words) {
    const auto& u = table.u;
    const int nu = u.n_elements();
    auto windex = ball_index(words);

    Structure g;
    g.name = a.name + "_frag";
    for (const auto& w : words)
        for (int si = 0; si < nu; ++si)
            g.universe.push_back(format_tree_path(w) + "_" + u.universe[si]);
    ensure_unique_ids(g.universe, "v");

    for (std::size_t ri = 0; ri < u.relations.size(); ++ri) {
        const auto& ru = u.relations[ri];
        Relation rg;
        rg.name = ru.name;
        rg.arity = ru.arity;
        if (ru.arity == 1) {
            for (const auto& t : ru.tuples)
                for (std::size_t wi = 0; wi < words.size(); ++wi)
                    rg.tuples.push_back({static_cast<int>(wi) * nu + t[0]});
        } else {
            for (std::size_t ti = 0; ti < ru.tuples.size(); ++ti) {
                const auto& t = ru.tuples[ti];
                std::vector<int> gens(ru.arity - 1);
                for (int pos = 1; pos <= ru.arity - 1; ++pos)
                    gens[pos - 1] = table.index_of(static_cast<int>(ri),
                                                   static_cast<int>(ti), pos);
                for (std::size_t wi = 0; wi < words.size(); ++wi) {
                    std::vector<int> row(ru.arity);
                    row[0] = static_cast<int>(wi) * nu + t[0];
                    Word cur = words[wi];
                    bool inside = true;
                    for (int k = 1; k < ru.arity; ++k) {
                        cur = wmul(Word{gens[k - 1]}, cur);
                        auto it = windex.find(cur);
                        if (it == windex.end()) {
                            inside = false;
                            break;
                        }
                        row[k] = it->second * nu + t[k];
                    }
                    if (inside) rg.tuples.push_back(std::move(row));
                }
            }
        }
        g.relations.push_back(std::move(rg));
    }
    g.normalize();
    return g;
}

} // namespace detail

// Fragment over the radius-ρ ball of the rank-b tree component.
inline Fragment build_fragment(const Structure& a, int radius, const Limits& limits = {}) {
    if (radius < 0) throw std::invalid_argument("fragment radius must be >= 0");
    Fragment f;
    f.a = a;
    f.table = compute_b(a, limits);
    f.radius = radius;
    const std::size_t nu = static_cast<std::size_t>(f.table.u.n_elements());
    std::size_t word_cap = limits.max_fragment / (nu == 0 ? 1 : nu);
    f.words = enumerate_ball(f.table.b, radius, word_cap);
    f.graph = detail::word_structure(a, f.table, f.words);
    return f;
}

// Vertex (w,S) ↦ S, a homomorphism fragment → U(A) by construction.
inline Hom projection_hom(const Fragment& f) {
    Hom h;
    const int n = f.graph.n_elements();
    h.map.reserve(n);
    for (int v = 0; v < n; ++v) h.map.push_back(f.uset_of(v));
    return h;
}

// True iff every Gaifman component is a tree: no tuple repeats an element and
// no tuple of arity >= 2 closes a cycle (two tuples over the same pair count
// as one).
inline bool is_forest(const Structure& s) {
    detail::UnionFind uf(s.n_elements());
    for (const auto& r : s.relations) {
        if (r.arity < 2) continue;
        for (const auto& t : r.tuples)
            for (std::size_t k = 1; k < t.size(); ++k)
                if (!uf.join(t[0], t[k])) return false;
    }
    return true;
}

// The "select once and for all" extension: per component, root at
// component[root_rank % size], assign the root the least usable member of its
// subset, and propagate outward with a fixed selection function (lex-least
// witness tuple). root_rank = 0 is the canonical rooting; other ranks
// exercise re-rooting.
inline std::optional<Hom> tree_hom(const Fragment& f, int root_rank = 0) {
    const Structure& g = f.graph;
    const Structure& a = f.a;
    if (!is_forest(g)) throw std::invalid_argument("tree_hom: fragment is not a forest");
    if (root_rank < 0) throw std::invalid_argument("tree_hom: root rank must be >= 0");

    // incidence lists over tuples of arity >= 2
    struct TupleRef {
        int rel;
        int ti;
    };
    std::vector<TupleRef> trefs;
    std::vector<std::vector<int>> incident(g.universe.size());
    for (std::size_t ri = 0; ri < g.relations.size(); ++ri) {
        const auto& r = g.relations[ri];
        if (r.arity < 2) continue;
        for (std::size_t ti = 0; ti < r.tuples.size(); ++ti) {
            int id = static_cast<int>(trefs.size());
            trefs.push_back({static_cast<int>(ri), static_cast<int>(ti)});
            for (int v : r.tuples[ti]) incident[v].push_back(id);
        }
    }

    // lex-least witness tuple of R_rel(a) through (pos, value) with all
    // coordinates inside the U-tuple's subsets
    auto select = [&](int rel, const std::vector<int>& usets, int pos, int value) {
        const auto& ra = a.relations[rel];
        for (const auto& t : ra.tuples) {
            if (t[pos] != value) continue;
            bool inside = true;
            for (std::size_t k = 0; k < t.size(); ++k)
                if (!((u_mask(usets[k]) >> t[k]) & 1u)) {
                    inside = false;
                    break;
                }
            if (inside) return t;
        }
        throw std::logic_error("tree_hom: no witness tuple (U-rule violated)");
    };

    // least member of the root's subset consistent with the unary relations
    auto root_value = [&](int v) {
        int si = f.uset_of(v);
        for (int s : u_mask_members(u_mask(si))) {
            bool ok = true;
            for (std::size_t ri = 0; ri < g.relations.size(); ++ri) {
                const auto& r = g.relations[ri];
                if (r.arity != 1) continue;
                if (!std::binary_search(r.tuples.begin(), r.tuples.end(), std::vector<int>{v}))
                    continue;
                if (!std::binary_search(a.relations[ri].tuples.begin(),
                                        a.relations[ri].tuples.end(), std::vector<int>{s}))
                    ok = false;
            }
            if (ok) return s;
        }
        throw std::invalid_argument("tree_hom: unary relations unsatisfiable at root " +
                                    g.universe[v]);
    };

    Hom h;
    h.map.assign(g.universe.size(), -1);
    std::vector<bool> tuple_done(trefs.size(), false);

    for (const auto& comp : gaifman_components(g)) {
        int root = comp[static_cast<std::size_t>(root_rank) % comp.size()];
        h.map[root] = root_value(root);
        std::deque<int> queue{root};
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            for (int tid : incident[v]) {
                if (tuple_done[tid]) continue;
                tuple_done[tid] = true;
                const auto& row = g.relations[trefs[tid].rel].tuples[trefs[tid].ti];
                int pos = -1;
                std::vector<int> usets(row.size());
                for (std::size_t k = 0; k < row.size(); ++k) {
                    usets[k] = f.uset_of(row[k]);
                    if (row[k] == v && pos < 0) pos = static_cast<int>(k);
                }
                auto witness = select(trefs[tid].rel, usets, pos, h.map[v]);
                for (std::size_t k = 0; k < row.size(); ++k) {
                    if (row[k] == v) continue;
                    h.map[row[k]] = witness[k];
                    queue.push_back(row[k]);
                }
            }
        }
    }

    if (!is_hom(g, a, h)) throw std::logic_error("tree_hom: unverified result");
    return h;
}

// Restrict the construction to distinct-generator product words, collapse each
// U-layer to a point, and compare with U(A).
inline bool collapse_check(const Structure& a, const Limits& limits = {}) {
    GeneratorTable table = compute_b(a, limits);
    auto dset = build_dset(table, limits);
    const int nu = table.u.n_elements();
    if (dset.size() * static_cast<std::size_t>(nu) > limits.max_fragment)
        throw guard_error("collapse: restricted fragment exceeds guard");
    Structure restricted = detail::word_structure(a, table, dset);
    std::vector<std::vector<int>> blocks(nu);
    for (int si = 0; si < nu; ++si)
        for (std::size_t wi = 0; wi < dset.size(); ++wi)
            blocks[si].push_back(static_cast<int>(wi) * nu + si);
    Structure collapsed = quotient(restricted, blocks);
    return iso_check(collapsed, table.u).has_value();
}

struct InvariantPoint {
    enum class Status { found, no_eligible_word, no_invariant_word };
    Status status = Status::no_eligible_word;
    std::optional<Word> word;  // the invariant word t
    std::optional<Hom> hom;    // verified homomorphism U(A) -> A
    int eligible = 0;          // words whose full D-translate stays in the ball
};

// Search the fragment for a word t with d·t inside the word set for every
// d ∈ 𝒟 and φ(t,·) = φ(d·t,·); the common layer map is returned once it
// verifies as a homomorphism U(A) -> A.
inline InvariantPoint invariant_point_hom(const Fragment& f, const Hom& phi,
                                          const Limits& limits = {}) {
    if (!is_hom(f.graph, f.a, phi))
        throw std::invalid_argument("invariant_point_hom: phi is not a homomorphism");
    auto dset = build_dset(f.table, limits);
    auto windex = ball_index(f.words);
    const Structure& u = f.table.u;
    const int nu = u.n_elements();

    InvariantPoint out;
    for (std::size_t wi = 0; wi < f.words.size(); ++wi) {
        const Word& t = f.words[wi];
        std::vector<int> translate; // word index of d·t per d
        bool eligible = true;
        for (const auto& d : dset) {
            auto it = windex.find(wmul(d, t));
            if (it == windex.end()) {
                eligible = false;
                break;
            }
            translate.push_back(it->second);
        }
        if (!eligible) continue;
        ++out.eligible;
        bool invariant = true;
        for (int dw : translate) {
            for (int si = 0; si < nu && invariant; ++si)
                if (phi.map[static_cast<std::size_t>(dw) * nu + si] !=
                    phi.map[wi * static_cast<std::size_t>(nu) + si])
                    invariant = false;
            if (!invariant) break;
        }
        if (!invariant) continue;
        Hom cand;
        cand.map.reserve(nu);
        for (int si = 0; si < nu; ++si)
            cand.map.push_back(phi.map[wi * static_cast<std::size_t>(nu) + si]);
        if (is_hom(u, f.a, cand)) {
            out.status = InvariantPoint::Status::found;
            out.word = t;
            out.hom = std::move(cand);
            return out;
        }
    }
    out.status = out.eligible == 0 ? InvariantPoint::Status::no_eligible_word
                                   : InvariantPoint::Status::no_invariant_word;
    return out;
}

} // namespace csplab
