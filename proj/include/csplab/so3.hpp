#pragma once

// Exact-arithmetic rotation group machinery. The base pair is the classical
// free pair of rotations with cosine 3/5, sine 4/5 about orthogonal axes:
// a = rot_z, β = rot_x. The embedded free family on symbols Q1, Q2, D_1..D_b
// is Q1 = β, Q2 = aβa⁻¹, D_j = a^{j+1} β a^{-(j+1)} — pairwise distinct
// conjugates of β by powers of a, which generate freely. All entries stay
// rational with power-of-5 denominators, so identity and displacement tests
// are exact.
//
// Words use the dsl.hpp symbol encoding (1 = Q1, 2 = Q2, 2+j = D_j).

#include <algorithm>
#include <array>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "csplab/core.hpp"
#include "csplab/dsl.hpp"
#include "csplab/word.hpp"

namespace csplab {

using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline std::string rat_str(const Rat& r) {
    return numerator(r).str() + "/" + denominator(r).str();
}

inline double rat_double(const Rat& r) { return r.convert_to<double>(); }

struct Mat3 {
    std::array<Rat, 9> m{}; // row-major

    bool operator==(const Mat3&) const = default;

    static Mat3 identity() {
        Mat3 i;
        i.m[0] = i.m[4] = i.m[8] = 1;
        return i;
    }
    Rat& at(int r, int c) { return m[r * 3 + c]; }
    const Rat& at(int r, int c) const { return m[r * 3 + c]; }

    Mat3 operator*(const Mat3& o) const {
        Mat3 p;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) {
                Rat s = 0;
                for (int k = 0; k < 3; ++k) s += at(r, k) * o.at(k, c);
                p.at(r, c) = s;
            }
        return p;
    }
    Mat3 transpose() const {
        Mat3 t;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) t.at(r, c) = at(c, r);
        return t;
    }
    Rat trace() const { return m[0] + m[4] + m[8]; }
    Rat det() const {
        return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
               m[2] * (m[3] * m[7] - m[4] * m[6]);
    }
    bool is_rotation() const {
        return transpose() * *this == identity() && det() == 1;
    }
};

using Vec3 = std::array<Rat, 3>;

inline bool is_identity(const Mat3& m) { return m == Mat3::identity(); }

// The generator family for a given b; symbol s resolves via mat(s), with
// negative symbols mapping to the (transpose) inverse.
struct RotationSystem {
    int b = 0;
    Mat3 a_rot;             // the conjugating rotation, not itself a generator
    std::vector<Mat3> mats; // mats[s-1] = matrix of symbol s, s = 1..2+b

    const Mat3& positive(int sym) const {
        if (sym < 1 || sym > 2 + b) throw std::invalid_argument("unknown generator symbol");
        return mats[static_cast<std::size_t>(sym) - 1];
    }
    Mat3 mat(int sym) const {
        return sym > 0 ? positive(sym) : positive(-sym).transpose();
    }
};

inline RotationSystem gen_matrices(int b) {
    if (b < 0) throw std::invalid_argument("gen_matrices: b must be >= 0");
    const Rat c(3, 5), s(4, 5);
    Mat3 a; // rotation about z
    a.m = {c, -s, 0, s, c, 0, 0, 0, 1};
    Mat3 beta; // rotation about x
    beta.m = {1, 0, 0, 0, c, -s, 0, s, c};

    RotationSystem sys;
    sys.b = b;
    sys.a_rot = a;
    sys.mats.push_back(beta);                                // Q1
    Mat3 conj = a * beta * a.transpose();
    sys.mats.push_back(conj);                                // Q2 = a β a⁻¹
    Mat3 ak = a * a;                                         // a^{j+1}, starting at j=1
    for (int j = 1; j <= b; ++j) {
        sys.mats.push_back(ak * beta * ak.transpose());      // D_j = a^{j+1} β a^{-(j+1)}
        ak = ak * a;
    }
    return sys;
}

inline Mat3 word_matrix(const RotationSystem& sys, const Word& w) {
    Mat3 m = Mat3::identity();
    for (int x : w) m = m * sys.mat(x);
    return m;
}

// Membership in the normal closure of <Q1, Q2>: delete the Q-letters and
// freely reduce; the word lies in N iff nothing is left (G is free on the
// listed generators, and G/N is free on the D's).
inline bool in_normal_closure(const Word& w) {
    Word residue;
    for (int x : w)
        if (std::abs(x) > 2) residue.push_back(x);
    return reduce(residue).empty();
}

namespace detail {

inline void check_rotation(const Mat3& m) {
    if (!m.is_rotation()) throw std::invalid_argument("matrix is not a rotation");
}

} // namespace detail

// Squared maximum sphere displacement: δ² = 2(1 - cos θ) = 3 - trace(M).
inline Rat delta_sq(const Mat3& m) {
    detail::check_rotation(m);
    return Rat(3) - m.trace();
}

// Unnormalized rational axis (kernel of M - I), in lowest integer terms with
// the first nonzero coordinate positive; nullopt for the identity.
inline std::optional<Vec3> axis(const Mat3& m) {
    detail::check_rotation(m);
    if (is_identity(m)) return std::nullopt;

    std::array<std::array<Rat, 3>, 3> a;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) a[r][c] = m.at(r, c) - (r == c ? 1 : 0);

    // Gauss-Jordan with first-nonzero pivoting
    std::array<int, 3> pivot_col{-1, -1, -1};
    int rank = 0;
    for (int col = 0; col < 3 && rank < 3; ++col) {
        int pr = -1;
        for (int r = rank; r < 3; ++r)
            if (a[r][col] != 0) {
                pr = r;
                break;
            }
        if (pr < 0) continue;
        std::swap(a[rank], a[pr]);
        Rat p = a[rank][col];
        for (int c = 0; c < 3; ++c) a[rank][c] /= p;
        for (int r = 0; r < 3; ++r) {
            if (r == rank || a[r][col] == 0) continue;
            Rat f = a[r][col];
            for (int c = 0; c < 3; ++c) a[r][c] -= f * a[rank][c];
        }
        pivot_col[rank] = col;
        ++rank;
    }
    if (rank >= 3) throw std::logic_error("axis: M - I has full rank for a rotation");

    int free_col = 0;
    while (free_col < 3 &&
           std::find(pivot_col.begin(), pivot_col.end(), free_col) != pivot_col.end())
        ++free_col;
    Vec3 v{0, 0, 0};
    v[free_col] = 1;
    for (int r = 0; r < rank; ++r) v[pivot_col[r]] = -a[r][free_col];

    // clear denominators, divide by gcd, fix sign
    BigInt l = 1;
    for (const auto& x : v) l = lcm(l, denominator(x));
    std::array<BigInt, 3> iv;
    for (int i = 0; i < 3; ++i) iv[i] = numerator(v[i]) * (l / denominator(v[i]));
    BigInt g = 0;
    for (const auto& x : iv) g = gcd(g, x);
    if (g == 0) throw std::logic_error("axis: zero kernel vector");
    for (auto& x : iv) x /= g;
    for (const auto& x : iv) {
        if (x == 0) continue;
        if (x < 0)
            for (auto& y : iv) y = -y;
        break;
    }
    Vec3 out;
    for (int i = 0; i < 3; ++i) out[i] = Rat(iv[i]);
    return out;
}

struct ApproxResult {
    Word m;           // best N-member found (empty at depth 0)
    Rat delta2;       // delta_sq(D·m), exact
    Rat baseline;     // delta_sq(D)
    int depth = 0;
    std::size_t pool = 0; // conjugate pool size at the final stage
};

namespace detail {

struct Candidate {
    Word w;
    Mat3 m;
};

// sin² of the angle between two axes: 1 - (v·w)² / (|v|²|w|²), exact
inline Rat axis_misalignment(const Vec3& v, const Vec3& w) {
    Rat dot = 0, nv = 0, nw = 0;
    for (int i = 0; i < 3; ++i) {
        dot += v[i] * w[i];
        nv += v[i] * v[i];
        nw += w[i] * w[i];
    }
    return 1 - dot * dot / (nv * nw);
}

inline bool word_before(const Word& u, const Word& v) { return shortlex_less(u, v); }

} // namespace detail

// Lemma-1 style search: a pool of N-members (conjugates u q u⁻¹ with
// |u| < stage over the full alphabet, q a signed Q-generator), products of up
// to three of the best pool elements, and powers of the pool elements whose
// axes align best with axis(D) — the proof's alignment heuristic. Stages are
// cumulative, so results are non-increasing in depth; depth 0 is the empty
// pool and returns the identity word. Ties break to the shorter, then
// shortlex-smaller word.
inline ApproxResult approx_search(const RotationSystem& sys, const Word& d, int depth,
                                  const Rat& target = 0, const Limits& limits = {}) {
    if (depth < 0) throw std::invalid_argument("approx_search: depth must be >= 0");
    const Mat3 dm = word_matrix(sys, d);
    detail::check_rotation(dm);

    ApproxResult best;
    best.m = {};
    best.delta2 = delta_sq(dm);
    best.baseline = best.delta2;
    best.depth = depth;

    auto offer = [&](const Word& w, const Mat3& m) {
        Rat d2 = Rat(3) - (dm * m).trace();
        if (d2 < best.delta2 ||
            (d2 == best.delta2 && detail::word_before(w, best.m))) {
            best.delta2 = d2;
            best.m = reduce(w);
        }
    };

    auto d_axis = is_identity(dm) ? std::nullopt : axis(dm);

    std::vector<int> alphabet;
    for (int s = 1; s <= 2 + sys.b; ++s) alphabet.push_back(s);
    const Word q_letters[] = {{kSymQ1}, {-kSymQ1}, {kSymQ2}, {-kSymQ2}};

    constexpr int kTopProducts = 12; // pool elements combined into products
    constexpr int kTopAxis = 8;      // pool elements raised to powers
    constexpr int kMaxPower = 60;

    for (int stage = 1; stage <= depth; ++stage) {
        if (best.delta2 <= target && target > 0) break;
        auto conjugators = enumerate_ball(alphabet, stage - 1, limits.max_pool / 4 + 1);
        std::vector<detail::Candidate> pool;
        pool.reserve(conjugators.size() * 4);
        for (const auto& u : conjugators) {
            Mat3 um = word_matrix(sys, u);
            for (const auto& q : q_letters) {
                detail::Candidate c;
                c.w = wmul(wmul(u, q), winv(u));
                c.m = um * sys.mat(q[0]) * um.transpose();
                pool.push_back(std::move(c));
            }
        }
        if (pool.size() > limits.max_pool)
            throw guard_error("approx_search: pool exceeds guard at depth " +
                              std::to_string(stage));
        best.pool = pool.size();

        // rank by single-step improvement
        std::vector<std::size_t> order(pool.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::vector<Rat> score(pool.size());
        for (std::size_t i = 0; i < pool.size(); ++i) {
            score[i] = Rat(3) - (dm * pool[i].m).trace();
            offer(pool[i].w, pool[i].m);
        }
        std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
            if (score[x] != score[y]) return score[x] < score[y];
            return detail::word_before(pool[x].w, pool[y].w);
        });

        const std::size_t top = std::min<std::size_t>(kTopProducts, order.size());
        for (std::size_t i = 0; i < top; ++i)
            for (std::size_t j = 0; j < top; ++j) {
                const auto &pi = pool[order[i]], &pj = pool[order[j]];
                Mat3 mij = pi.m * pj.m;
                Word wij = wmul(pi.w, pj.w);
                offer(wij, mij);
                for (std::size_t k = 0; k < top; ++k) {
                    const auto& pk = pool[order[k]];
                    offer(wmul(wij, pk.w), mij * pk.m);
                }
            }

        if (d_axis) {
            std::vector<std::size_t> ax_order = order;
            std::vector<Rat> mis(pool.size());
            for (std::size_t i = 0; i < pool.size(); ++i) {
                auto pa = axis(pool[i].m);
                mis[i] = pa ? detail::axis_misalignment(*d_axis, *pa) : Rat(2);
            }
            std::stable_sort(ax_order.begin(), ax_order.end(),
                             [&](std::size_t x, std::size_t y) {
                                 if (mis[x] != mis[y]) return mis[x] < mis[y];
                                 return detail::word_before(pool[x].w, pool[y].w);
                             });
            const std::size_t atop = std::min<std::size_t>(kTopAxis, ax_order.size());
            for (std::size_t i = 0; i < atop; ++i) {
                const auto& p = pool[ax_order[i]];
                Mat3 pk = p.m * p.m;
                Word wk = wmul(p.w, p.w);
                for (int k = 2; k <= kMaxPower; ++k) {
                    offer(wk, pk);
                    pk = pk * p.m;
                    wk = wmul(wk, p.w);
                }
            }
        }
    }

    if (!in_normal_closure(best.m))
        throw std::logic_error("approx_search: result outside the normal closure");
    return best;
}

} // namespace csplab
