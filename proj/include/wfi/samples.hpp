#pragma once

// Seeded random DSL expressions for property checks and the CLI's sampling verbs.

#include "wfi/structured_set.hpp"

#include <random>
#include <string>

namespace wfi {

class SampleGenerator {
public:
    explicit SampleGenerator(std::uint64_t seed) : rng_(seed) {}

    std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) { return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng_); }
    bool coin() { return uniform(0, 1) == 1; }

    /// A set of naturals: an atom, or a union/inter/diff of two smaller expressions.
    std::string omega_text(int depth = 2) {
        if (depth > 0 && uniform(0, 2) == 0) {
            static const char* ops[] = {"union", "inter", "diff"};
            return std::string(ops[uniform(0, 2)]) + "(" + omega_text(depth - 1) + "," + omega_text(depth - 1) + ")";
        }
        switch (uniform(0, 6)) {
            case 0:
                return "fin{" + list(uniform(0, 4), 40) + "}";
            case 1:
                return "cofin{" + list(uniform(0, 3), 20) + "}";
            case 2:
            case 3:
                return "ap(" + std::to_string(uniform(0, 9)) + "," + std::to_string(uniform(1, 6)) + ")";
            case 4:
                return "geo(" + std::to_string(uniform(0, 5)) + ")";
            case 5:
                return "empty";
            default:
                return "compl(ap(" + std::to_string(uniform(0, 3)) + "," + std::to_string(uniform(2, 4)) + "))";
        }
    }

    std::pair<std::string, SetShape> omega_set(int depth = 2) {
        auto text = omega_text(depth);
        return {text, parse_omega_set(text)};
    }

    /// A finite set of points below `bound`.
    std::set<std::uint64_t> finite_subset(std::uint64_t bound, double density = 0.5) {
        std::set<std::uint64_t> out;
        std::bernoulli_distribution keep(density);
        for (std::uint64_t i = 0; i < bound; ++i) {
            if (keep(rng_)) {
                out.insert(i);
            }
        }
        return out;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::string list(std::uint64_t count, std::uint64_t bound) {
        std::string s;
        for (std::uint64_t i = 0; i < count; ++i) {
            s += (i ? "," : "") + std::to_string(uniform(0, bound));
        }
        return s;
    }

    std::mt19937_64 rng_;
};

}  // namespace wfi
