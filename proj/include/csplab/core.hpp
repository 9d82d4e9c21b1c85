#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace csplab {

// Size guards for the constructions that can blow up. Exceeding a guard is an
// explicit refusal (guard_error), never silent truncation.
struct Limits {
    std::size_t max_power = 1'000'000;    // elements/tuples when building powers
    std::size_t max_u_universe = 16;      // template universe cap for the subset structure
    std::size_t max_fragment = 1'000'000; // vertices in word-indexed structures (ball x subsets)
    std::size_t max_dset = 10'000;        // products-of-distinct-generators set size
    std::size_t max_pool = 50'000;        // base pool size in the rotation approximation search
};

struct guard_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised by the text-format parser; positions are 1-based.
struct parse_error : std::runtime_error {
    int line;
    int col;
    parse_error(const std::string& msg, int line_, int col_)
        : std::runtime_error(std::to_string(line_) + ":" + std::to_string(col_) + ": " + msg),
          line(line_), col(col_) {}
};

// a^n if it stays within cap, nullopt otherwise.
inline std::optional<std::size_t> checked_pow(std::size_t base, std::size_t exp, std::size_t cap) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        if (base != 0 && r > cap / base) return std::nullopt;
        r *= base;
        if (r > cap) return std::nullopt;
    }
    return r;
}

} // namespace csplab
