#pragma once

// Free-group words over signed integer letters. A letter +s stands for the
// s-th generator (1-based), -s for its inverse; which symbol s denotes is up
// to the caller (tree generators D_1..D_b in btlab, the Q/D alphabet in so3).
//
// Canonical word order is shortlex with the letter key 2|x| + (x<0), i.e.
// 1 < 1⁻¹ < 2 < 2⁻¹ < …; every enumeration in the library lists words in this
// order so downstream indices are reproducible.

#include <cstdlib>
#include <map>
#include <vector>

#include "csplab/core.hpp"

namespace csplab {

using Word = std::vector<int>;

inline bool is_reduced(const Word& w) {
    for (std::size_t i = 1; i < w.size(); ++i)
        if (w[i] == -w[i - 1]) return false;
    return true;
}

// Free reduction: repeatedly cancel adjacent x, x⁻¹ pairs.
inline Word reduce(const Word& w) {
    Word out;
    out.reserve(w.size());
    for (int x : w) {
        if (x == 0) throw std::invalid_argument("word letter 0");
        if (!out.empty() && out.back() == -x)
            out.pop_back();
        else
            out.push_back(x);
    }
    return out;
}

inline Word winv(const Word& w) {
    Word out;
    out.reserve(w.size());
    for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(-*it);
    return out;
}

// Reduced product u·v.
inline Word wmul(const Word& u, const Word& v) {
    Word out = u;
    out.insert(out.end(), v.begin(), v.end());
    return reduce(out);
}

inline Word wpow(const Word& w, int k) {
    Word base = k >= 0 ? w : winv(w);
    Word out;
    for (int i = 0; i < std::abs(k); ++i) out = wmul(out, base);
    return out;
}

inline int letter_key(int x) { return 2 * std::abs(x) + (x < 0 ? 1 : 0); }

inline bool shortlex_less(const Word& u, const Word& v) {
    if (u.size() != v.size()) return u.size() < v.size();
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u[i] != v[i]) return letter_key(u[i]) < letter_key(v[i]);
    return false;
}

struct ShortlexLess {
    bool operator()(const Word& u, const Word& v) const { return shortlex_less(u, v); }
};

// All reduced words of length ≤ radius over the given positive symbols and
// their inverses, in shortlex order (so index 0 is the empty word). Throws
// guard_error when the ball would exceed cap words.
inline std::vector<Word> enumerate_ball(const std::vector<int>& symbols, int radius,
                                        std::size_t cap) {
    std::vector<Word> ball;
    ball.push_back({});
    std::size_t level_begin = 0;
    for (int len = 1; len <= radius; ++len) {
        std::size_t level_end = ball.size();
        for (std::size_t i = level_begin; i < level_end; ++i) {
            for (int s : symbols) {
                for (int x : {s, -s}) {
                    const Word& w = ball[i];
                    if (!w.empty() && w.back() == -x) continue;
                    Word next = w;
                    next.push_back(x);
                    ball.push_back(std::move(next));
                    if (ball.size() > cap)
                        throw guard_error("word ball exceeds guard (" + std::to_string(cap) +
                                          " words)");
                }
            }
        }
        level_begin = level_end;
    }
    return ball;
}

// Shorthand for the rank-b ball over symbols 1..b.
inline std::vector<Word> enumerate_ball(int rank, int radius, std::size_t cap) {
    std::vector<int> symbols;
    for (int s = 1; s <= rank; ++s) symbols.push_back(s);
    return enumerate_ball(symbols, radius, cap);
}

// Word -> ball index lookup for a fixed enumeration.
inline std::map<Word, int> ball_index(const std::vector<Word>& ball) {
    std::map<Word, int> ix;
    for (std::size_t i = 0; i < ball.size(); ++i) ix[ball[i]] = static_cast<int>(i);
    return ix;
}

} // namespace csplab
