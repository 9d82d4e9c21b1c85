#pragma once

// Arc consistency over tuple constraints, full homomorphism search on top of
// it, and the per-element list of achievable values.
//
// Lists are bit sets over the target universe in declaration order. The AC
// fixpoint is the greatest one, so scheduling cannot change the result; the
// worklist order is still fixed (relation, tuple, coordinate) to keep traces
// reproducible.

#include <deque>
#include <optional>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "csplab/core.hpp"
#include "csplab/structure.hpp"

namespace csplab {

using ValueSet = boost::dynamic_bitset<>;

// Map from elements of an input structure to subsets of a template universe.
struct ListAssignment {
    std::vector<ValueSet> lists; // indexed by source element

    bool all_nonempty() const {
        for (const auto& l : lists)
            if (l.none()) return false;
        return true;
    }
    std::vector<int> values(int x) const {
        std::vector<int> out;
        for (auto v = lists[x].find_first(); v != ValueSet::npos; v = lists[x].find_next(v))
            out.push_back(static_cast<int>(v));
        return out;
    }
};

namespace detail {

// Prebuilt constraint network for a fixed (b, a) pair.
struct AcNet {
    const Structure* b;
    const Structure* a;
    // one constraint per tuple of b: (relation index, tuple index)
    std::vector<std::pair<int, int>> cons;
    std::vector<std::vector<int>> cons_of;                        // element -> constraint indices
    std::vector<std::vector<std::vector<std::vector<int>>>> witnesses; // [rel][pos][value] -> tuple ids

    AcNet(const Structure& b_, const Structure& a_) : b(&b_), a(&a_) {
        if (!same_signature(b_, a_)) throw std::invalid_argument("solver: signature mismatch");
        cons_of.resize(b_.universe.size());
        for (std::size_t ri = 0; ri < b_.relations.size(); ++ri) {
            const auto& rb = b_.relations[ri];
            for (std::size_t ti = 0; ti < rb.tuples.size(); ++ti) {
                int ci = static_cast<int>(cons.size());
                cons.emplace_back(static_cast<int>(ri), static_cast<int>(ti));
                for (int x : rb.tuples[ti]) {
                    auto& lst = cons_of[x];
                    if (lst.empty() || lst.back() != ci) lst.push_back(ci);
                }
            }
        }
        witnesses.resize(a_.relations.size());
        for (std::size_t ri = 0; ri < a_.relations.size(); ++ri) {
            const auto& ra = a_.relations[ri];
            witnesses[ri].assign(ra.arity,
                                 std::vector<std::vector<int>>(a_.universe.size()));
            for (std::size_t ti = 0; ti < ra.tuples.size(); ++ti)
                for (int pos = 0; pos < ra.arity; ++pos)
                    witnesses[ri][static_cast<std::size_t>(pos)][ra.tuples[ti][pos]].push_back(
                        static_cast<int>(ti));
        }
    }

    bool supported(const std::vector<ValueSet>& lists, int rel, const std::vector<int>& btuple,
                   int pos, int v) const {
        const auto& ra = a->relations[rel];
        for (int ti : witnesses[rel][static_cast<std::size_t>(pos)][static_cast<std::size_t>(v)]) {
            const auto& w = ra.tuples[ti];
            bool ok = true;
            for (std::size_t k = 0; k < w.size(); ++k)
                if (!lists[btuple[k]].test(w[k])) {
                    ok = false;
                    break;
                }
            if (ok) return true;
        }
        return false;
    }

    // Trims lists to the arc-consistency fixpoint. Returns false on wipeout.
    bool refine(std::vector<ValueSet>& lists) const {
        std::deque<int> queue;
        std::vector<bool> queued(cons.size(), false);
        for (std::size_t ci = 0; ci < cons.size(); ++ci) {
            queue.push_back(static_cast<int>(ci));
            queued[ci] = true;
        }
        while (!queue.empty()) {
            int ci = queue.front();
            queue.pop_front();
            queued[ci] = false;
            auto [rel, ti] = cons[ci];
            const auto& bt = b->relations[rel].tuples[ti];
            for (std::size_t pos = 0; pos < bt.size(); ++pos) {
                int x = bt[pos];
                bool changed = false;
                for (auto v = lists[x].find_first(); v != ValueSet::npos;
                     v = lists[x].find_next(v)) {
                    if (!supported(lists, rel, bt, static_cast<int>(pos), static_cast<int>(v))) {
                        lists[x].reset(v);
                        changed = true;
                    }
                }
                if (changed) {
                    if (lists[x].none()) return false;
                    for (int cj : cons_of[x])
                        if (!queued[cj]) {
                            queue.push_back(cj);
                            queued[cj] = true;
                        }
                }
            }
        }
        return true;
    }

    // Backtracking with AC propagation. Variable order: smallest current list
    // (ties by universe order); value order: universe order. Expects lists
    // already refined.
    bool search(std::vector<ValueSet>& lists) const {
        int var = -1;
        std::size_t best = 0;
        for (std::size_t x = 0; x < lists.size(); ++x) {
            std::size_t c = lists[x].count();
            if (c > 1 && (var < 0 || c < best)) {
                var = static_cast<int>(x);
                best = c;
            }
        }
        if (var < 0) return true;
        for (auto v = lists[var].find_first(); v != ValueSet::npos;
             v = lists[var].find_next(v)) {
            std::vector<ValueSet> saved = lists;
            lists[var].reset();
            lists[var].set(v);
            if (refine(lists) && search(lists)) return true;
            lists = saved;
        }
        return false;
    }
};

inline void check_solver_guard(const Structure& b, const Structure& a, const Limits& limits) {
    if (b.universe.size() * a.universe.size() > limits.max_power)
        throw guard_error("solver: |V(b)|*|V(a)| exceeds guard");
}

inline std::vector<ValueSet> full_lists(const Structure& b, const Structure& a) {
    std::vector<ValueSet> lists(b.universe.size(), ValueSet(a.universe.size()));
    for (auto& l : lists) l.set();
    return lists;
}

} // namespace detail

// Greatest arc-consistency fixpoint; nullopt iff some list empties.
inline std::optional<ListAssignment> ac_lists(const Structure& b, const Structure& a,
                                              const Limits& limits = {}) {
    detail::check_solver_guard(b, a, limits);
    detail::AcNet net(b, a);
    auto lists = detail::full_lists(b, a);
    if (!net.refine(lists)) return std::nullopt;
    return ListAssignment{std::move(lists)};
}

// Full homomorphism search (MAC). Deterministic witness for fixed input.
inline std::optional<Hom> solve_hom(const Structure& b, const Structure& a,
                                    const Limits& limits = {}) {
    detail::check_solver_guard(b, a, limits);
    detail::AcNet net(b, a);
    auto lists = detail::full_lists(b, a);
    if (!net.refine(lists) || !net.search(lists)) return std::nullopt;
    Hom h;
    h.map.reserve(lists.size());
    for (const auto& l : lists) h.map.push_back(static_cast<int>(l.find_first()));
    if (!is_hom(b, a, h)) throw std::logic_error("solve_hom: unverified result");
    return h;
}

// l(x) = set of values taken at x over all homomorphisms b -> a. All lists are
// empty iff no homomorphism exists. Probes each (element, value) pair with the
// backtracking solver, reusing found homomorphisms to mark further pairs.
inline ListAssignment hom_lists(const Structure& b, const Structure& a,
                                const Limits& limits = {}) {
    detail::check_solver_guard(b, a, limits);
    detail::AcNet net(b, a);
    const std::size_t nb = b.universe.size(), na = a.universe.size();
    ListAssignment out;
    out.lists.assign(nb, ValueSet(na));

    auto base = detail::full_lists(b, a);
    if (!net.refine(base)) return out; // AC already refutes: all lists empty

    for (std::size_t x = 0; x < nb; ++x) {
        for (auto v = base[x].find_first(); v != ValueSet::npos; v = base[x].find_next(v)) {
            if (out.lists[x].test(v)) continue; // already seen in some found hom
            auto lists = base;
            lists[x].reset();
            lists[x].set(v);
            if (net.refine(lists) && net.search(lists))
                for (std::size_t y = 0; y < nb; ++y) out.lists[y].set(lists[y].find_first());
        }
    }
    return out;
}

} // namespace csplab
