#pragma once

// Finite sub-families of unbounded families in an F_sigma ideal I = union of closed, downward-closed F_k.
// For each k the search finds a prefix length p_k at which the neighbourhood of (union Z_k) misses F_k,
// then keeps just enough members of Z_k to reproduce that prefix.

#include "wfi/ideals.hpp"
#include "wfi/set_shape.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace wfi {

/// A closed family of subsets of w, closed under subsets, known through the neighbourhoods it meets.
struct ClosedDownwardFamily {
    /// true iff some member X satisfies X restricted to |sigma| = sigma (sigma[i] = i in X)
    std::function<bool(const std::vector<bool>&)> meets;
    std::string label;
};

inline std::vector<bool> characteristic_prefix(const SetShape& x, std::size_t p) {
    std::vector<bool> sigma(p);
    for (std::size_t i = 0; i < p; ++i) {
        sigma[i] = x.contains(i);
    }
    return sigma;
}

inline std::string prefix_text(const std::vector<bool>& sigma) {
    std::string s;
    for (bool b : sigma) {
        s.push_back(b ? '1' : '0');
    }
    return s;
}

/// All subsets of a fixed finite set.
inline ClosedDownwardFamily principal_family(std::set<std::uint64_t> top) {
    std::string label = "P(" + SetShape::finite(top).describe() + ")";
    return {[top = std::move(top)](const std::vector<bool>& sigma) {
                for (std::size_t i = 0; i < sigma.size(); ++i) {
                    if (sigma[i] && !top.count(i)) {
                        return false;
                    }
                }
                return true;
            },
            std::move(label)};
}

/// { X : |X| <= c }
inline ClosedDownwardFamily bounded_size_family(std::uint64_t c) {
    return {[c](const std::vector<bool>& sigma) {
                return static_cast<std::uint64_t>(std::count(sigma.begin(), sigma.end(), true)) <= c;
            },
            "|X|<=" + std::to_string(c)};
}

/// { X : sum over X of 1/(n+1) <= c }
inline ClosedDownwardFamily bounded_weight_family(Rational c) {
    std::string label = "l1-weight<=" + to_string(c);
    return {[c](const std::vector<bool>& sigma) {
                std::set<std::uint64_t> ones;
                for (std::size_t i = 0; i < sigma.size(); ++i) {
                    if (sigma[i]) {
                        ones.insert(i);
                    }
                }
                return ell1_weight_compare(ones, c) <= 0;
            },
            std::move(label)};
}

/// Every subset of w: meets every neighbourhood, so nothing escapes it.
inline ClosedDownwardFamily full_family() {
    return {[](const std::vector<bool>&) { return true; }, "P(w)"};
}

struct EscapeStep {
    std::size_t k = 0;
    std::optional<std::size_t> p;      // escape prefix length
    std::vector<std::size_t> chosen;   // indices into Z_k
    std::string prefix;                // (union H_k) restricted to p, as 0/1 text
    bool certified = false;
};

struct EscapeExtraction {
    std::vector<EscapeStep> steps;
    bool complete() const {
        return std::all_of(steps.begin(), steps.end(), [](const EscapeStep& s) { return s.certified; });
    }
};

inline SetShape family_union(const std::vector<SetShape>& z) {
    SetShape u = SetShape::empty();
    for (const auto& x : z) {
        u = u | x;
    }
    return u;
}

/// For each k: least p_k <= p_bound with N((union Z_k) | p_k) disjoint from F_k, then a cover H_k of
/// (union Z_k) | p_k by members of Z_k, chosen greedily.
inline EscapeExtraction extract_escaping_subfamilies(const std::vector<ClosedDownwardFamily>& f, const std::vector<std::vector<SetShape>>& z,
                                 std::size_t p_bound) {
    if (f.size() != z.size()) {
        throw std::invalid_argument("extract_escaping_subfamilies: need one family Z_k per F_k");
    }
    EscapeExtraction out;
    for (std::size_t k = 0; k < f.size(); ++k) {
        EscapeStep step;
        step.k = k;
        const SetShape u = family_union(z[k]);
        // F_k is closed downward, so once a prefix escapes every longer one does: gallop, then bisect.
        auto escapes = [&](std::size_t p) { return !f[k].meets(characteristic_prefix(u, p)); };
        std::size_t lo = 0, hi = std::min<std::size_t>(1, p_bound);
        if (escapes(0)) {
            step.p = 0;
        } else {
            while (hi < p_bound && !escapes(hi)) {
                lo = hi;
                hi = std::min(2 * hi, p_bound);
            }
            if (escapes(hi)) {
                while (hi - lo > 1) {
                    const std::size_t mid = lo + (hi - lo) / 2;
                    (escapes(mid) ? hi : lo) = mid;
                }
                step.p = hi;
            }
        }
        if (step.p) {
            std::set<std::uint64_t> uncovered;
            for (std::uint64_t n = 0; n < *step.p; ++n) {
                if (u.contains(n)) {
                    uncovered.insert(n);
                }
            }
            while (!uncovered.empty()) {
                std::size_t best = 0, best_hits = 0;
                for (std::size_t i = 0; i < z[k].size(); ++i) {
                    std::size_t hits = 0;
                    for (auto n : uncovered) {
                        hits += z[k][i].contains(n);
                    }
                    if (hits > best_hits) {
                        best = i;
                        best_hits = hits;
                    }
                }
                step.chosen.push_back(best);
                for (auto it = uncovered.begin(); it != uncovered.end();) {
                    it = z[k][best].contains(*it) ? uncovered.erase(it) : std::next(it);
                }
            }
            std::sort(step.chosen.begin(), step.chosen.end());
            std::vector<SetShape> h;
            for (auto i : step.chosen) {
                h.push_back(z[k][i]);
            }
            auto sigma = characteristic_prefix(family_union(h), *step.p);
            step.prefix = prefix_text(sigma);
            step.certified = sigma == characteristic_prefix(u, *step.p) && !f[k].meets(sigma);
        }
        out.steps.push_back(std::move(step));
    }
    return out;
}

/// Recomputes each certified step from the chosen members alone.
inline bool verify_escape_extraction(const std::vector<ClosedDownwardFamily>& f, const std::vector<std::vector<SetShape>>& z, const EscapeExtraction& r) {
    if (r.steps.size() != f.size()) {
        return false;
    }
    for (const auto& step : r.steps) {
        if (!step.certified || !step.p) {
            return false;
        }
        std::vector<SetShape> h;
        for (auto i : step.chosen) {
            if (i >= z[step.k].size()) {
                return false;
            }
            h.push_back(z[step.k][i]);
        }
        auto sigma = characteristic_prefix(family_union(h), *step.p);
        if (prefix_text(sigma) != step.prefix || sigma != characteristic_prefix(family_union(z[step.k]), *step.p) ||
            f[step.k].meets(sigma)) {
            return false;
        }
    }
    return true;
}

}  // namespace wfi
