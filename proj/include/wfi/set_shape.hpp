#pragma once

// Normal form for the subsets of w produced by the set DSL.
//
// Below the threshold N membership is read from an explicit table. From N on,
//   n in X  <=>  mask[n mod L]  xor  (n = 2^k - 1 + c for a sparse family c with kmask[k mod K], k >= K0)
// Sparse families are pairwise disjoint beyond N, so finiteness, density and the l1 tail are all
// decided from the periodic mask and the family masks.

#include "wfi/rational.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace wfi {

class SetShape {
public:
    static constexpr std::uint64_t kMaxThreshold = std::uint64_t{1} << 24;

    static SetShape finite(const std::set<std::uint64_t>& elems) {
        SetShape s;
        s.threshold_ = elems.empty() ? 0 : *elems.rbegin() + 1;
        check_threshold(s.threshold_);
        s.head_.assign(s.threshold_, false);
        for (auto e : elems) {
            s.head_[e] = true;
        }
        return s;
    }

    static SetShape cofinite(const std::set<std::uint64_t>& excluded) { return finite(excluded).complement(); }
    static SetShape all() { return cofinite({}); }
    static SetShape empty() { return finite({}); }

    /// {a + k*d : k in w}; d = 0 gives {a}.
    static SetShape progression(std::uint64_t a, std::uint64_t d) {
        if (d == 0) {
            return finite({a});
        }
        check_threshold(a);
        check_threshold(d);
        SetShape s;
        s.threshold_ = a;
        s.head_.assign(a, false);
        s.period_ = d;
        s.mask_.assign(d, false);
        s.mask_[a % d] = true;
        return s;
    }

    /// {2^k - 1 + c : k in w}
    static SetShape geometric(std::uint64_t c) {
        check_threshold(c);
        SetShape s;
        s.k_start_ = 0;
        while ((std::uint64_t{1} << s.k_start_) <= c) {
            ++s.k_start_;
        }
        s.threshold_ = (std::uint64_t{1} << s.k_start_) + c;
        s.head_.assign(s.threshold_, false);
        for (unsigned k = 0; (std::uint64_t{1} << k) - 1 + c < s.threshold_; ++k) {
            s.head_[(std::uint64_t{1} << k) - 1 + c] = true;
        }
        s.families_[c] = {true};
        return s;
    }

    bool contains(std::uint64_t n) const {
        if (n < threshold_) {
            return head_[n];
        }
        bool bit = mask_[n % period_];
        for (const auto& [c, kmask] : families_) {
            if (auto k = family_exponent(n, c); k && *k >= k_start_ && kmask[*k % k_period_]) {
                bit = !bit;
            }
        }
        return bit;
    }

    SetShape complement() const {
        SetShape s = *this;
        s.head_.flip();
        s.mask_.flip();
        return s;
    }

    friend SetShape operator|(const SetShape& a, const SetShape& b) { return combine(a, b, [](bool x, bool y) { return x || y; }); }
    friend SetShape operator&(const SetShape& a, const SetShape& b) { return combine(a, b, [](bool x, bool y) { return x && y; }); }
    friend SetShape operator-(const SetShape& a, const SetShape& b) { return combine(a, b, [](bool x, bool y) { return x && !y; }); }
    friend SetShape operator^(const SetShape& a, const SetShape& b) { return combine(a, b, [](bool x, bool y) { return x != y; }); }

    /// { n : n + j in X }
    SetShape shifted_down(std::uint64_t j) const {
        SetShape s = *this;
        s.threshold_ = threshold_ > j ? threshold_ - j : 0;
        s.head_.assign(head_.begin() + static_cast<std::ptrdiff_t>(std::min<std::uint64_t>(j, threshold_)), head_.end());
        for (std::uint64_t r = 0; r < period_; ++r) {
            s.mask_[r] = mask_[(r + j) % period_];
        }
        s.families_.clear();
        for (const auto& [c, kmask] : families_) {
            if (c < j) {
                throw std::invalid_argument("shift moves a sparse family below offset 0");
            }
            s.families_[c - j] = kmask;
        }
        // keep sparse points with k < K0 below the new threshold
        if (!s.families_.empty()) {
            s.threshold_ = std::max(s.threshold_, (std::uint64_t{1} << s.k_start_) + s.families_.rbegin()->first);
            s.head_.resize(s.threshold_);
            for (std::uint64_t n = 0; n < s.threshold_; ++n) {
                s.head_[n] = contains(n + j);
            }
        }
        return s;
    }

    bool is_finite() const { return !has_periodic_part() && families_.empty(); }
    bool is_empty() const { return is_finite() && std::none_of(head_.begin(), head_.end(), [](bool b) { return b; }); }
    bool has_periodic_part() const { return std::any_of(mask_.begin(), mask_.end(), [](bool b) { return b; }); }
    bool subset_of(const SetShape& other) const { return (*this - other).is_empty(); }
    bool operator==(const SetShape& other) const { return (*this ^ other).is_empty(); }

    /// Largest element; only for finite sets.
    std::optional<std::uint64_t> max_element() const {
        if (!is_finite()) {
            throw std::logic_error("max_element of an infinite set");
        }
        for (auto n = threshold_; n > 0; --n) {
            if (head_[n - 1]) {
                return n - 1;
            }
        }
        return std::nullopt;
    }

    /// Elements below `bound`, ascending.
    std::vector<std::uint64_t> elements_below(std::uint64_t bound) const {
        std::vector<std::uint64_t> out;
        for (std::uint64_t n = 0; n < bound; ++n) {
            if (contains(n)) {
                out.push_back(n);
            }
        }
        return out;
    }

    /// The first `count` elements (fewer if the set is finite).
    std::vector<std::uint64_t> first_elements(std::size_t count, std::uint64_t scan_limit = std::uint64_t{1} << 22) const {
        std::vector<std::uint64_t> out;
        for (std::uint64_t n = 0; out.size() < count && n < scan_limit; ++n) {
            if (is_finite() && n >= threshold_) {
                break;
            }
            if (contains(n)) {
                out.push_back(n);
            }
        }
        return out;
    }

    /// Asymptotic density |mask| / L.
    Rational density() const {
        auto ones = std::count(mask_.begin(), mask_.end(), true);
        return Rational(BigNat(ones), BigNat(period_));
    }

    /// A residue class r mod L lying in X from the threshold on, apart from the sparse points.
    std::optional<std::pair<std::uint64_t, std::uint64_t>> periodic_witness() const {
        for (std::uint64_t r = 0; r < period_; ++r) {
            if (mask_[r]) {
                std::uint64_t first = threshold_ + (r + period_ - threshold_ % period_) % period_;
                return std::make_pair(first, period_);
            }
        }
        return std::nullopt;
    }

    std::uint64_t threshold() const { return threshold_; }
    std::uint64_t period() const { return period_; }
    std::uint64_t k_start() const { return k_start_; }
    std::uint64_t k_period() const { return k_period_; }
    const std::vector<bool>& mask() const { return mask_; }
    const std::map<std::uint64_t, std::vector<bool>>& families() const { return families_; }

    /// Exponents k >= K0 (within one period block) at which family c flips membership.
    bool family_flips(std::uint64_t c, std::uint64_t k) const {
        auto it = families_.find(c);
        return it != families_.end() && k >= k_start_ && it->second[k % k_period_];
    }

    /// n = 2^k - 1 + c for the returned k, if any.
    static std::optional<std::uint64_t> family_exponent(std::uint64_t n, std::uint64_t c) {
        if (n < c) {
            return std::nullopt;
        }
        std::uint64_t m = n - c + 1;
        if ((m & (m - 1)) != 0) {
            return std::nullopt;
        }
        return static_cast<std::uint64_t>(std::countr_zero(m));
    }

    /// Sum over the elements n >= from of weight(n), for weights 1/(n+1) (kind = Harmonic) or 2^-n
    /// (kind = Dyadic), enclosed in [lower, upper]. Harmonic sums of sets with a periodic part diverge
    /// and yield nullopt.
    enum class Weight { Harmonic, Dyadic };
    struct SumBounds {
        Rational lower, upper;
        bool exact() const { return lower == upper; }
    };
    std::optional<SumBounds> weight_sum(Weight w, std::uint64_t from = 0) const {
        if (w == Weight::Harmonic && has_periodic_part()) {
            return std::nullopt;
        }
        const std::uint64_t head_end = std::max(from, threshold_);
        Rational exact_part = 0;
        for (std::uint64_t n = from; n < threshold_; ++n) {
            if (head_[n]) {
                exact_part += weight(w, n);
            }
        }
        if (w == Weight::Dyadic) {
            // sum of 2^-n over n >= head_end with mask[n mod L]
            Rational block = 0;
            for (std::uint64_t i = 0; i < period_; ++i) {
                if (mask_[(head_end + i) % period_]) {
                    block += pow2(-static_cast<long>(i));
                }
            }
            exact_part += block * pow2(-static_cast<long>(head_end)) / (1 - pow2(-static_cast<long>(period_)));
        }
        Rational lower = exact_part, upper = exact_part;
        // Sparse points beyond the threshold: add a few terms exactly and bound the remainder.
        std::uint64_t k_end = k_start_ + 24;
        while (k_end < 62 && (std::uint64_t{1} << k_end) <= head_end) {
            ++k_end;
        }
        for (const auto& [c, kmask] : families_) {
            std::uint64_t k = k_start_;
            for (; k < k_end; ++k) {
                if (!kmask[k % k_period_]) {
                    continue;
                }
                std::uint64_t n = (std::uint64_t{1} << k) - 1 + c;
                if (w == Weight::Dyadic && n > head_end + 4096) {
                    break;
                }
                if (n < head_end) {
                    continue;
                }
                Rational term = weight(w, n);
                if (mask_[n % period_]) {
                    lower -= term;
                    upper -= term;
                } else {
                    lower += term;
                    upper += term;
                }
            }
            if (w == Weight::Harmonic && c == 0) {
                // sum over residues of 2^-k for k >= k, geometric with ratio 2^-K
                Rational block = 0;
                for (std::uint64_t i = 0; i < k_period_; ++i) {
                    if (kmask[(k + i) % k_period_]) {
                        block += pow2(-static_cast<long>(k + i));
                    }
                }
                Rational rest = block / (1 - pow2(-static_cast<long>(k_period_)));
                lower += rest;
                upper += rest;
            } else {
                // remaining terms: 1/(2^k + c) <= 2^-k each (harmonic), or a dyadic tail from 2^k - 1 + c
                Rational rest = w == Weight::Harmonic ? pow2(1 - static_cast<long>(k))
                                                      : pow2(2 - static_cast<long>((std::uint64_t{1} << k) + c));
                if (w == Weight::Dyadic) {
                    lower -= rest;
                }
                upper += rest;
            }
        }
        if (lower < 0) {
            lower = 0;
        }
        return SumBounds{lower, upper};
    }

    std::string describe() const {
        std::string out = "threshold " + std::to_string(threshold_) + ", period " + std::to_string(period_) + " mask ";
        for (bool b : mask_) {
            out += b ? '1' : '0';
        }
        for (const auto& [c, kmask] : families_) {
            out += ", family 2^k-1+" + std::to_string(c) + " (k>=" + std::to_string(k_start_) + ", k mod " +
                   std::to_string(k_period_) + " in ";
            for (bool b : kmask) {
                out += b ? '1' : '0';
            }
            out += ")";
        }
        return out;
    }

private:
    static void check_threshold(std::uint64_t n) {
        if (n > kMaxThreshold) {
            throw std::invalid_argument("set expression constant " + std::to_string(n) + " exceeds supported range");
        }
    }

    static Rational weight(Weight w, std::uint64_t n) {
        if (w == Weight::Harmonic) {
            return Rational(BigNat(1), BigNat(n) + 1);
        }
        return pow2(-static_cast<long>(n));
    }

    static std::uint64_t pow2_mod(std::uint64_t k, std::uint64_t m) {
        std::uint64_t result = 1 % m, base = 2 % m;
        while (k > 0) {
            if (k & 1) {
                result = static_cast<std::uint64_t>((unsigned __int128)result * base % m);
            }
            base = static_cast<std::uint64_t>((unsigned __int128)base * base % m);
            k >>= 1;
        }
        return result;
    }

    // 2^k mod L is periodic for k >= v2(L) with period ord_{odd part}(2).
    static std::pair<std::uint64_t, std::uint64_t> power_cycle(std::uint64_t L) {
        std::uint64_t e = 0;
        while (L % 2 == 0) {
            L /= 2;
            ++e;
        }
        std::uint64_t ord = 1;
        if (L > 1) {
            std::uint64_t x = 2 % L;
            while (x != 1) {
                x = x * 2 % L;
                ++ord;
            }
        }
        return {e, ord};
    }

    template <class Op>
    static SetShape combine(const SetShape& a, const SetShape& b, Op op) {
        SetShape r;
        r.period_ = std::lcm(a.period_, b.period_);
        check_threshold(r.period_);
        std::set<std::uint64_t> offsets;
        for (const auto& f : a.families_) {
            offsets.insert(f.first);
        }
        for (const auto& f : b.families_) {
            offsets.insert(f.first);
        }
        r.threshold_ = std::max(a.threshold_, b.threshold_);
        if (!offsets.empty()) {
            const std::uint64_t max_c = *offsets.rbegin();
            auto [pre, ord] = power_cycle(r.period_);
            r.k_start_ = std::max({a.k_start_, b.k_start_, pre});
            while ((std::uint64_t{1} << r.k_start_) <= max_c) {
                ++r.k_start_;
            }
            r.k_period_ = std::lcm(std::lcm(a.k_period_, b.k_period_), ord);
            if (r.k_start_ > 40 || r.k_period_ > 4096) {
                throw std::invalid_argument("set expression too large to normalise");
            }
            r.threshold_ = std::max(r.threshold_, (std::uint64_t{1} << r.k_start_) + max_c);
        }
        check_threshold(r.threshold_);
        r.head_.resize(r.threshold_);
        for (std::uint64_t n = 0; n < r.threshold_; ++n) {
            r.head_[n] = op(a.contains(n), b.contains(n));
        }
        r.mask_.resize(r.period_);
        for (std::uint64_t i = 0; i < r.period_; ++i) {
            r.mask_[i] = op(a.mask_[i % a.period_], b.mask_[i % b.period_]);
        }
        for (auto c : offsets) {
            std::vector<bool> kmask(r.k_period_, false);
            bool any = false;
            for (std::uint64_t k = r.k_start_; k < r.k_start_ + r.k_period_; ++k) {
                std::uint64_t res = (pow2_mod(k, r.period_) + r.period_ - 1 + c % r.period_) % r.period_;
                bool pa = a.mask_[res % a.period_], pb = b.mask_[res % b.period_];
                bool xa = pa != a.family_flips(c, k), xb = pb != b.family_flips(c, k);
                bool flip = op(xa, xb) != op(pa, pb);
                kmask[k % r.k_period_] = flip;
                any = any || flip;
            }
            if (any) {
                r.families_[c] = std::move(kmask);
            }
        }
        if (r.families_.empty()) {
            r.k_start_ = 0;
            r.k_period_ = 1;
        }
        return r;
    }

    std::uint64_t threshold_ = 0;
    std::vector<bool> head_;
    std::uint64_t period_ = 1;
    std::vector<bool> mask_{false};
    std::uint64_t k_start_ = 0;
    std::uint64_t k_period_ = 1;
    std::map<std::uint64_t, std::vector<bool>> families_;
};

}  // namespace wfi
