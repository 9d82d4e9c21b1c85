#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "csplab/so3.hpp"

using namespace csplab;

namespace {

Mat3 rot_z_of(const Rat& c, const Rat& s) {
    Mat3 r;
    r.m = {c, -s, 0, s, c, 0, 0, 0, 1};
    return r;
}

Vec3 mat_vec(const Mat3& m, const Vec3& v) {
    Vec3 out{0, 0, 0};
    for (int r = 0; r < 3; ++r)
        for (int k = 0; k < 3; ++k) out[r] += m.at(r, k) * v[k];
    return out;
}

Vec3 cross(const Vec3& x, const Vec3& y) {
    return {x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]};
}

bool is_zero(const Vec3& v) { return v[0] == 0 && v[1] == 0 && v[2] == 0; }

Word random_reduced(std::mt19937_64& rng, int max_sym, int len) {
    std::uniform_int_distribution<int> pick(0, 2 * max_sym - 1);
    Word w;
    while (static_cast<int>(w.size()) < len) {
        int r = pick(rng);
        int x = (r % 2 == 0) ? r / 2 + 1 : -(r / 2 + 1);
        if (!w.empty() && w.back() == -x) continue;
        w.push_back(x);
    }
    return w;
}

} // namespace

TEST_CASE("base generators are exact", "[so3]") {
    auto sys = gen_matrices(2);
    const Rat c(3, 5), s(4, 5);

    Mat3 beta;
    beta.m = {1, 0, 0, 0, c, -s, 0, s, c};
    CHECK(sys.positive(kSymQ1) == beta);
    CHECK(sys.a_rot == rot_z_of(c, s));
    CHECK(sys.a_rot.is_rotation());
    for (int sym = 1; sym <= 4; ++sym) CHECK(sys.positive(sym).is_rotation());
    CHECK_THROWS_AS(sys.positive(0), std::invalid_argument);
    CHECK_THROWS_AS(sys.positive(5), std::invalid_argument);
    CHECK_THROWS_AS(gen_matrices(-1), std::invalid_argument);
}

TEST_CASE("conjugate family matches the angle-addition recurrence", "[so3]") {
    auto sys = gen_matrices(4);
    const Mat3& q1 = sys.positive(kSymQ1);

    // cos/sin of k*theta via the addition formulas, exactly
    Rat ck(3, 5), sk(4, 5);
    CHECK(sys.positive(kSymQ2) == rot_z_of(ck, sk) * q1 * rot_z_of(ck, sk).transpose());
    for (int j = 1; j <= 4; ++j) {
        Rat cn = ck * Rat(3, 5) - sk * Rat(4, 5);
        Rat sn = sk * Rat(3, 5) + ck * Rat(4, 5);
        ck = cn;
        sk = sn;
        // now (ck, sk) = cos/sin of (j+1)*theta
        CHECK(sys.positive(2 + j) == rot_z_of(ck, sk) * q1 * rot_z_of(ck, sk).transpose());
    }
    for (int x = 1; x <= 6; ++x)
        for (int y = x + 1; y <= 6; ++y) CHECK_FALSE(sys.positive(x) == sys.positive(y));
}

TEST_CASE("word_matrix multiplies left to right", "[so3]") {
    auto sys = gen_matrices(1);
    CHECK(is_identity(word_matrix(sys, {})));
    CHECK(is_identity(word_matrix(sys, {1, -1})));
    CHECK(is_identity(word_matrix(sys, {3, 2, -2, -3})));

    std::mt19937_64 rng(11);
    for (int it = 0; it < 20; ++it) {
        Word u = random_reduced(rng, 3, 4), v = random_reduced(rng, 3, 4);
        Word uv = u;
        uv.insert(uv.end(), v.begin(), v.end());
        CHECK(word_matrix(sys, uv) == word_matrix(sys, u) * word_matrix(sys, v));
        CHECK(is_identity(word_matrix(sys, u) * word_matrix(sys, winv(u))));
    }
}

TEST_CASE("no nonempty reduced word acts as the identity", "[so3]") {
    auto s0 = gen_matrices(0);
    int bad = 0;
    auto ball = enumerate_ball(2, 6, 2000);
    for (const auto& w : ball)
        if (!w.empty() && is_identity(word_matrix(s0, w))) ++bad;
    CHECK(ball.size() == 1457);
    CHECK(bad == 0);

    auto s1 = gen_matrices(1);
    for (const auto& w : enumerate_ball(3, 4, 1000))
        if (!w.empty() && is_identity(word_matrix(s1, w))) ++bad;
    CHECK(bad == 0);
}

TEST_CASE("normal closure membership is the vanishing D-image", "[so3]") {
    CHECK(in_normal_closure({}));
    CHECK(in_normal_closure({1}));
    CHECK(in_normal_closure({2, -1}));
    CHECK(in_normal_closure({3, 1, -3}));
    CHECK(in_normal_closure({3, 2, -3, -1}));
    CHECK_FALSE(in_normal_closure({3}));
    CHECK_FALSE(in_normal_closure({3, 1, 3}));
    CHECK_FALSE(in_normal_closure({4, 3}));
    CHECK_FALSE(in_normal_closure({4, 1, -3}));

    std::mt19937_64 rng(12);
    for (int it = 0; it < 40; ++it) {
        Word u = random_reduced(rng, 3, it % 5);
        int q = (it % 4 < 2 ? 1 : 2) * (it % 2 == 0 ? 1 : -1);
        Word c = wmul(wmul(u, Word{q}), winv(u));
        CHECK(in_normal_closure(c));
        Word u2 = random_reduced(rng, 3, 3);
        CHECK(in_normal_closure(wmul(c, wmul(wmul(u2, Word{-q}), winv(u2)))));
        CHECK_FALSE(in_normal_closure(wmul(wmul(u, Word{3}), winv(u))));
    }
}

TEST_CASE("displacement is exact", "[so3]") {
    auto sys = gen_matrices(4);
    CHECK(delta_sq(Mat3::identity()) == 0);
    for (int sym = 1; sym <= 6; ++sym) CHECK(delta_sq(sys.positive(sym)) == Rat(4, 5));
    CHECK(delta_sq(word_matrix(sys, {1, 1})) == Rat(64, 25)); // 2 - 2cos(2θ)

    std::mt19937_64 rng(13);
    for (int it = 0; it < 25; ++it) {
        Mat3 m = word_matrix(sys, random_reduced(rng, 6, 3));
        Mat3 u = word_matrix(sys, random_reduced(rng, 6, 3));
        CHECK(delta_sq(u * m * u.transpose()) == delta_sq(m));
        CHECK(delta_sq(m.transpose()) == delta_sq(m));
    }

    Mat3 scaled = Mat3::identity();
    scaled.m[0] = 2;
    CHECK_THROWS_AS(delta_sq(scaled), std::invalid_argument);
}

TEST_CASE("axes of the generators", "[so3]") {
    auto sys = gen_matrices(1);
    CHECK_FALSE(axis(Mat3::identity()).has_value());

    auto ax_q1 = axis(sys.positive(kSymQ1));
    REQUIRE(ax_q1.has_value());
    CHECK(*ax_q1 == Vec3{1, 0, 0});

    auto ax_q2 = axis(sys.positive(kSymQ2));
    REQUIRE(ax_q2.has_value());
    CHECK(*ax_q2 == Vec3{3, 4, 0});

    auto ax_a = axis(sys.a_rot);
    REQUIRE(ax_a.has_value());
    CHECK(*ax_a == Vec3{0, 0, 1});

    // D1 = a² β a⁻², so its axis is a²·x̂ = (-7/25, 24/25, 0), sign-normalized
    auto ax_d1 = axis(sys.positive(3));
    REQUIRE(ax_d1.has_value());
    CHECK(*ax_d1 == Vec3{7, -24, 0});

    Mat3 scaled = Mat3::identity();
    scaled.m[0] = 2;
    CHECK_THROWS_AS(axis(scaled), std::invalid_argument);
}

TEST_CASE("axis is the exact fixed line", "[so3]") {
    auto sys = gen_matrices(2);
    std::mt19937_64 rng(14);
    for (int it = 0; it < 30; ++it) {
        Word w = random_reduced(rng, 4, 1 + it % 4);
        Mat3 m = word_matrix(sys, w);
        auto v = axis(m);
        REQUIRE(v.has_value()); // nonempty reduced word, so not the identity
        CHECK(mat_vec(m, *v) == *v);
        CHECK(axis(m.transpose()) == v);

        Mat3 u = word_matrix(sys, random_reduced(rng, 4, 2));
        auto cv = axis(u * m * u.transpose());
        REQUIRE(cv.has_value());
        CHECK(is_zero(cross(*cv, mat_vec(u, *v))));
    }
}

TEST_CASE("approximation at depth zero reports the baseline", "[so3]") {
    auto sys = gen_matrices(1);
    auto r = approx_search(sys, {3}, 0);
    CHECK(r.m.empty());
    CHECK(r.baseline == Rat(4, 5));
    CHECK(r.delta2 == r.baseline);
    CHECK(r.depth == 0);
    CHECK(r.pool == 0);
}

TEST_CASE("approximation at depth one finds the frozen commutating word", "[so3]") {
    auto sys = gen_matrices(1);
    auto r = approx_search(sys, {3}, 1);
    CHECK(r.m == Word{1, -2});
    CHECK(r.delta2 == Rat(12196, 78125));
    CHECK(r.baseline == Rat(4, 5));
    CHECK(r.pool == 4);
    CHECK(in_normal_closure(r.m));
}

TEST_CASE("deeper searches never get worse and verify exactly", "[so3]") {
    auto sys = gen_matrices(1);
    const Word d{3};
    Rat prev;
    for (int depth = 0; depth <= 3; ++depth) {
        auto r = approx_search(sys, d, depth);
        CHECK(in_normal_closure(r.m));
        CHECK(Rat(3) - word_matrix(sys, wmul(d, r.m)).trace() == r.delta2);
        if (depth > 0) CHECK(r.delta2 <= prev);
        if (depth == 1) CHECK(r.delta2 < r.baseline);
        prev = r.delta2;
    }
}

TEST_CASE("an already-met target stops the search", "[so3]") {
    auto sys = gen_matrices(1);
    auto r = approx_search(sys, {3}, 3, Rat(1));
    CHECK(r.m.empty());
    CHECK(r.delta2 == r.baseline);
    CHECK(r.pool == 0);
    CHECK(r.depth == 3);
}

TEST_CASE("identity displacement stays at zero", "[so3]") {
    auto sys = gen_matrices(1);
    auto r = approx_search(sys, {}, 1);
    CHECK(r.m.empty());
    CHECK(r.delta2 == 0);
    CHECK(r.baseline == 0);
}

TEST_CASE("approximation pool guard", "[so3]") {
    auto sys = gen_matrices(1);
    Limits tiny;
    tiny.max_pool = 3;
    CHECK_THROWS_AS(approx_search(sys, {3}, 1, 0, tiny), guard_error);
}

TEST_CASE("approximation is deterministic", "[so3]") {
    auto sys = gen_matrices(1);
    auto r1 = approx_search(sys, {3}, 2);
    auto r2 = approx_search(sys, {3}, 2);
    CHECK(r1.m == r2.m);
    CHECK(r1.delta2 == r2.delta2);
    CHECK(r1.pool == r2.pool);
}

TEST_CASE("rational strings always carry a denominator", "[so3]") {
    CHECK(rat_str(Rat(4, 5)) == "4/5");
    CHECK(rat_str(Rat(3)) == "3/1");
    CHECK(rat_str(Rat(0)) == "0/1");
    CHECK(rat_str(Rat(-1, 2)) == "-1/2");
    CHECK(rat_double(Rat(1, 4)) == 0.25);
}
