#pragma once

// Reference implementations written straight from the definitions, for cross-checking the library.
// Nothing here calls into the code it is used to check.

#include "wfi/wfi.hpp"

#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using wfi::Rational;

// ---------------------------------------------------------------------------------------------
// ranks

inline bool strict_prefix(const std::string& u, const std::string& t) { return u.size() < t.size() && t.compare(0, u.size(), u) == 0; }

/// rho(u) = 0 at terminals, max{rho(t) + 1 : t in X, u strict prefix of t} otherwise; rank = max rho.
inline std::uint64_t brute_rank(const std::set<std::string>& x) {
    std::map<std::string, std::uint64_t> memo;
    std::function<std::uint64_t(const std::string&)> rho = [&](const std::string& u) -> std::uint64_t {
        if (auto it = memo.find(u); it != memo.end()) {
            return it->second;
        }
        std::uint64_t r = 0;
        for (const auto& t : x) {
            if (strict_prefix(u, t)) {
                r = std::max(r, rho(t) + 1);
            }
        }
        return memo[u] = r;
    };
    std::uint64_t best = 0;
    for (const auto& u : x) {
        best = std::max(best, rho(u));
    }
    return best;
}

inline std::set<std::string> as_strings(const wfi::FiniteTree& t) {
    std::set<std::string> out;
    for (const auto& s : t) {
        out.insert(s.str());
    }
    return out;
}

/// Random set of strings: grows by extending existing members or starting fresh short strings.
inline wfi::FiniteTree random_tree(std::mt19937_64& rng, std::size_t max_nodes, bool allow_empty_string = true) {
    std::uniform_int_distribution<std::size_t> count(1, max_nodes);
    const std::size_t target = count(rng);
    std::vector<std::string> members;
    std::set<std::string> seen;
    while (members.size() < target) {
        std::string s;
        if (!members.empty() && rng() % 4 != 0) {
            s = members[rng() % members.size()];
        }
        const std::size_t grow = rng() % 3 + (s.empty() && !allow_empty_string ? 1 : 0);
        for (std::size_t i = 0; i < grow; ++i) {
            s.push_back(rng() % 2 ? '1' : '0');
        }
        if (seen.insert(s).second) {
            members.push_back(s);
        }
    }
    wfi::FiniteTree t;
    for (const auto& s : members) {
        t.insert(wfi::BitString(s));
    }
    return t;
}

/// A prefix-closed tree containing the empty string whose rank is exactly r: a spine of length r
/// with random side branches no longer than the spine allows.
inline wfi::FiniteTree rooted_tree_of_rank(std::mt19937_64& rng, std::uint64_t r) {
    std::set<std::string> x{""};
    std::string spine;
    for (std::uint64_t i = 0; i < r; ++i) {
        spine.push_back('0');
        x.insert(spine);
    }
    // side branches at depth j may have length up to r - j - 1 below the branch point's child
    for (std::uint64_t j = 0; j < r; ++j) {
        if (rng() % 2) {
            std::string b = std::string(j, '0') + "1";
            x.insert(b);
            const auto extra = rng() % (r - j);
            for (std::uint64_t k = 0; k < extra; ++k) {
                b.push_back(rng() % 2 ? '1' : '0');
                x.insert(b);
            }
        }
    }
    wfi::FiniteTree t;
    for (const auto& s : x) {
        t.insert(wfi::BitString(s));
    }
    return t;
}

/// Whether sum of 1/(n+1) over s exceeds c, exactly: numerator and denominator built as a product tree, no reduction.
inline bool harmonic_exceeds(const std::set<std::uint64_t>& s, const Rational& c) {
    using wfi::BigNat;
    std::vector<std::pair<BigNat, BigNat>> level;
    for (auto n : s) {
        level.emplace_back(BigNat(1), BigNat(n) + 1);
    }
    if (level.empty()) {
        return c < 0;
    }
    while (level.size() > 1) {
        std::vector<std::pair<BigNat, BigNat>> up;
        for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
            const auto& [a, b] = level[i];
            const auto& [x, y] = level[i + 1];
            up.emplace_back(a * y + x * b, b * y);
        }
        if (level.size() % 2) {
            up.push_back(level.back());
        }
        level = std::move(up);
    }
    return level[0].first * boost::multiprecision::denominator(c) > boost::multiprecision::numerator(c) * level[0].second;
}

// ---------------------------------------------------------------------------------------------
// ordinals below omega^2 as explicit well orders

/// A well order written as a left-to-right list of segments, each a copy of omega or a single point.
struct WellOrder {
    std::vector<bool> omega_segments;  // true = copy of omega, false = one point

    static WellOrder of(std::uint64_t omegas, std::uint64_t points) {
        WellOrder w;
        w.omega_segments.assign(omegas, true);
        w.omega_segments.insert(w.omega_segments.end(), points, false);
        return w;
    }
    WellOrder then(const WellOrder& other) const {
        WellOrder w = *this;
        w.omega_segments.insert(w.omega_segments.end(), other.omega_segments.begin(), other.omega_segments.end());
        return w;
    }

    /// Order type omega*a + b: every element has a successor inside its omega copy, so the points
    /// before a copy of omega are swallowed by it. Walk from the right counting points until the
    /// last copy, then count copies.
    wfi::Ordinal type() const {
        std::uint64_t trailing = 0, omegas = 0;
        bool seen_omega = false;
        for (auto it = omega_segments.rbegin(); it != omega_segments.rend(); ++it) {
            if (*it) {
                seen_omega = true;
                ++omegas;
            } else if (!seen_omega) {
                ++trailing;
            }
        }
        std::vector<wfi::Ordinal::Term> terms;
        if (omegas) {
            terms.push_back({wfi::Ordinal(1), omegas});
        }
        if (trailing) {
            terms.push_back({wfi::Ordinal(0), trailing});
        }
        return wfi::Ordinal::from_terms(terms);
    }
};

// ---------------------------------------------------------------------------------------------
// submeasures

/// Least 2^e with q <= 2^e over integer e, by repeated doubling and halving; 0 for q = 0.
inline Rational dyadic_ceiling(const Rational& q) {
    if (q == 0) {
        return 0;
    }
    Rational p = 1;
    while (p < q) {
        p *= 2;
    }
    while (p / 2 >= q) {
        p /= 2;
    }
    return p;
}

/// All partitions of the bits of `set` into nonempty blocks, minimizing the sum of cost(block).
inline Rational min_partition_cost(wfi::Mask set, const std::function<Rational(wfi::Mask)>& cost) {
    std::vector<wfi::Mask> points;
    for (wfi::Mask m = set; m; m &= m - 1) {
        points.push_back(m & (~m + 1));
    }
    std::optional<Rational> best;
    std::vector<wfi::Mask> blocks;
    std::function<void(std::size_t)> place = [&](std::size_t i) {
        if (i == points.size()) {
            Rational sum = 0;
            for (auto b : blocks) {
                sum += cost(b);
            }
            if (!best || sum < *best) {
                best = sum;
            }
            return;
        }
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            blocks[b] |= points[i];
            place(i + 1);
            blocks[b] &= ~points[i];
        }
        blocks.push_back(points[i]);
        place(i + 1);
        blocks.pop_back();
    };
    place(0);
    return best.value_or(Rational(0));
}

/// A random submeasure on n points: the max of an additive measure and a cover submeasure
/// F -> min{ sum of weights of chosen generators covering F }.
inline wfi::SetFunction random_submeasure(std::mt19937_64& rng, std::size_t n) {
    auto rational = [&] {
        const std::int64_t den = static_cast<std::int64_t>(rng() % 12 + 1);
        return wfi::make_rational(static_cast<std::int64_t>(rng() % (3 * den)), den);
    };
    std::vector<Rational> weights(n);
    for (auto& w : weights) {
        w = rng() % 3 == 0 ? Rational(0) : rational();
    }
    const wfi::Mask full = (wfi::Mask{1} << n) - 1;
    std::vector<std::pair<wfi::Mask, Rational>> generators;
    for (std::size_t i = 0; i < n; ++i) {
        generators.emplace_back(wfi::Mask{1} << i, rational() + 1);  // singletons keep every set coverable
    }
    for (std::size_t g = rng() % 4; g > 0; --g) {
        generators.emplace_back(static_cast<wfi::Mask>(rng()) & full, rational());
    }
    // cover[m] = least total weight of generators whose union contains m
    std::vector<std::optional<Rational>> cover(std::size_t{1} << n);
    cover[0] = Rational(0);
    for (bool changed = true; changed;) {
        changed = false;
        for (wfi::Mask m = 0; m <= full; ++m) {
            if (!cover[m]) {
                continue;
            }
            for (const auto& [g, w] : generators) {
                const wfi::Mask u = m | g;
                const Rational c = *cover[m] + w;
                for (wfi::Mask sub = u;; sub = (sub - 1) & u) {
                    if (!cover[sub] || c < *cover[sub]) {
                        cover[sub] = c;
                        changed = true;
                    }
                    if (sub == 0) {
                        break;
                    }
                }
            }
        }
    }
    cover[0] = Rational(0);
    return wfi::SetFunction::tabulate(n, [&](wfi::Mask m) {
        Rational additive = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (m >> i & 1u) {
                additive += weights[i];
            }
        }
        return wfi::ExtRational(std::max(additive, *cover[m]));
    });
}

/// Direct check of the three submeasure axioms over all pairs.
inline bool is_submeasure(const wfi::SetFunction& f) {
    const wfi::Mask full = f.full();
    if (f[0] != wfi::ExtRational(0)) {
        return false;
    }
    for (wfi::Mask a = 0; a <= full; ++a) {
        for (wfi::Mask b = 0; b <= full; ++b) {
            if ((a & b) == a && f[b] < f[a]) {
                return false;
            }
            if (f[a | b] > f[a] + f[b]) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace oracle
