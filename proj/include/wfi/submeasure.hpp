#pragma once

// Exact submeasures on finite carriers {0..n-1} (subsets as bit masks), the dyadic rationalisation
// pi1/pi2, and lower semicontinuous submeasures on w evaluated on SetShape inputs.

#include "wfi/rational.hpp"
#include "wfi/set_shape.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace wfi {

using Mask = std::uint32_t;

inline std::string mask_text(Mask m) {
    std::string s = "{";
    bool first = true;
    for (unsigned i = 0; i < 32; ++i) {
        if (m >> i & 1u) {
            s += (first ? "" : ",") + std::to_string(i);
            first = false;
        }
    }
    return s + "}";
}

struct AxiomViolation {
    std::string axiom;  // "empty", "monotone" or "subadditive"
    Mask a = 0, b = 0;

    std::string describe() const {
        if (axiom == "empty") {
            return "value of the empty set is not 0";
        }
        if (axiom == "monotone") {
            return "monotonicity fails: " + mask_text(a) + " is a subset of " + mask_text(b) + " with a larger value";
        }
        return "subadditivity fails for " + mask_text(a) + " and " + mask_text(b);
    }
};

class SubmeasureError : public std::invalid_argument {
public:
    explicit SubmeasureError(const AxiomViolation& v) : std::invalid_argument(v.describe()), violation(v) {}
    AxiomViolation violation;
};

/// A table of values indexed by subset mask of {0..n-1}. Not necessarily a submeasure; see validate().
class SetFunction {
public:
    static constexpr std::size_t kMaxCarrier = 20;

    SetFunction() : SetFunction(0) {}
    explicit SetFunction(std::size_t n) : n_(n), values_(std::size_t{1} << check(n)) {}
    SetFunction(std::size_t n, std::vector<ExtRational> values) : n_(check(n)), values_(std::move(values)) {
        if (values_.size() != (std::size_t{1} << n_)) {
            throw std::invalid_argument("set function needs 2^n values");
        }
    }
    template <class F>
    static SetFunction tabulate(std::size_t n, F&& f) {
        SetFunction out(n);
        for (Mask m = 0; m < out.values_.size(); ++m) {
            out.values_[m] = f(m);
        }
        return out;
    }

    std::size_t carrier_size() const { return n_; }
    Mask full() const { return static_cast<Mask>(values_.size() - 1); }
    const ExtRational& operator[](Mask m) const { return values_.at(m); }
    ExtRational& operator[](Mask m) { return values_.at(m); }
    const std::vector<ExtRational>& values() const { return values_; }
    bool operator==(const SetFunction&) const = default;

    /// The restriction to subsets of {0..k-1}.
    SetFunction restrict_to(std::size_t k) const {
        if (k > n_) {
            throw std::invalid_argument("restriction to a larger carrier");
        }
        return SetFunction(k, std::vector<ExtRational>(values_.begin(), values_.begin() + (std::ptrdiff_t{1} << k)));
    }

    /// Exhaustive check of the axioms for n <= 12; random pairs (fixed seed) above.
    std::optional<AxiomViolation> validate(std::uint64_t seed = 0, std::size_t samples = 200000) const {
        if (values_[0] != ExtRational(0)) {
            return AxiomViolation{"empty", 0, 0};
        }
        for (Mask m = 0; m <= full(); ++m) {
            for (std::size_t i = 0; i < n_; ++i) {
                Mask bigger = m | (Mask{1} << i);
                if (bigger != m && values_[bigger] < values_[m]) {
                    return AxiomViolation{"monotone", m, bigger};
                }
            }
        }
        // with monotonicity in place it suffices to test disjoint pairs
        auto check_pair = [&](Mask a, Mask b) -> std::optional<AxiomViolation> {
            if (values_[a | b] > values_[a] + values_[b]) {
                return AxiomViolation{"subadditive", a, b};
            }
            return std::nullopt;
        };
        if (n_ <= 12) {
            for (Mask a = 0; a <= full(); ++a) {
                const Mask rest = full() & ~a;
                for (Mask b = rest;; b = (b - 1) & rest) {
                    if (b != 0 && a < b) {
                        if (auto v = check_pair(a, b)) {
                            return v;
                        }
                    }
                    if (b == 0) {
                        break;
                    }
                }
            }
            return std::nullopt;
        }
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<Mask> pick(0, full());
        for (std::size_t s = 0; s < samples; ++s) {
            Mask a = pick(rng), b = pick(rng) & ~a;
            if (auto v = check_pair(a, b)) {
                return v;
            }
        }
        return std::nullopt;
    }
    bool is_submeasure() const { return !validate().has_value(); }

private:
    static std::size_t check(std::size_t n) {
        if (n > kMaxCarrier) {
            throw std::invalid_argument("carrier larger than " + std::to_string(kMaxCarrier));
        }
        return n;
    }

    std::size_t n_;
    std::vector<ExtRational> values_;
};

/// A SetFunction that passed validation.
class Submeasure {
public:
    Submeasure() : table_(0) { table_[0] = 0; }
    explicit Submeasure(SetFunction table) : table_(std::move(table)) {
        if (auto v = table_.validate()) {
            throw SubmeasureError(*v);
        }
    }

    std::size_t carrier_size() const { return table_.carrier_size(); }
    const ExtRational& operator()(Mask m) const { return table_[m]; }
    const SetFunction& table() const { return table_; }
    bool operator==(const Submeasure&) const = default;

    /// sum over the points of `weights`.
    static Submeasure additive(const std::vector<Rational>& weights) {
        return Submeasure(SetFunction::tabulate(weights.size(), [&](Mask m) {
            Rational s = 0;
            for (std::size_t i = 0; i < weights.size(); ++i) {
                if (m >> i & 1u) {
                    s += weights[i];
                }
            }
            return ExtRational(s);
        }));
    }

private:
    SetFunction table_;
};

// ---------------------------------------------------------------------------------------------
// pi1 / pi2

/// Least 2^e (e any integer) with q <= 2^e; 0 for q = 0.
inline Rational dyadic_ceiling(const Rational& q) {
    if (q <= 0) {
        return 0;
    }
    const BigNat num = boost::multiprecision::numerator(q);
    const BigNat den = boost::multiprecision::denominator(q);
    long e = static_cast<long>(boost::multiprecision::msb(num)) - static_cast<long>(boost::multiprecision::msb(den));
    while (pow2(e - 1) >= q) {
        --e;
    }
    while (pow2(e) < q) {
        ++e;
    }
    return pow2(e);
}

inline ExtRational dyadic_ceiling(const ExtRational& q) {
    return q.is_infinite() ? q : ExtRational(dyadic_ceiling(q.value()));
}

/// pi1(F) = inf { 2^e : psi(F) <= 2^e }: monotone, in general not subadditive.
inline SetFunction pi1(const SetFunction& psi) {
    return SetFunction::tabulate(psi.carrier_size(), [&](Mask m) { return dyadic_ceiling(psi[m]); });
}
inline SetFunction pi1(const Submeasure& psi) { return pi1(psi.table()); }

/// A minimising partition found for pi2(F), with its value.
struct Pi2Certificate {
    ExtRational value;
    std::vector<Mask> blocks;
    std::uint64_t nodes = 0;  // search nodes visited
};

namespace detail {

/// pi1 values as integer multiples of 2^-shift (or infinity), for fast exact sums.
struct ScaledDyadic {
    long shift = 0;
    std::vector<std::optional<BigNat>> v;

    explicit ScaledDyadic(const SetFunction& p1) : v(p1.values().size()) {
        for (const auto& x : p1.values()) {
            if (!x.is_infinite() && x.value() > 0) {
                const BigNat den = boost::multiprecision::denominator(x.value());
                shift = std::max(shift, static_cast<long>(boost::multiprecision::msb(den)));
            }
        }
        for (std::size_t m = 0; m < v.size(); ++m) {
            const auto& x = p1.values()[m];
            if (!x.is_infinite()) {
                Rational scaled = x.value() * pow2(shift);
                if (boost::multiprecision::denominator(scaled) != 1) {
                    throw std::invalid_argument("pi2 expects dyadic values (apply pi1 first)");
                }
                v[m] = boost::multiprecision::numerator(scaled);
            }
        }
    }
    ExtRational unscale(const std::optional<BigNat>& x) const {
        return x ? ExtRational(Rational(*x) / pow2(shift)) : ExtRational::infinity();
    }
};

inline std::optional<BigNat> add(const std::optional<BigNat>& a, const std::optional<BigNat>& b) {
    if (!a || !b) {
        return std::nullopt;
    }
    return *a + *b;
}
inline bool less(const std::optional<BigNat>& a, const std::optional<BigNat>& b) { return a && (!b || *a < *b); }

}  // namespace detail

/// Exact pi2 on every subset: the minimum over partitions into nonempty blocks, by dynamic programming
/// over the block holding the least element. Carriers above 12 points are rejected.
inline Submeasure pi2(const SetFunction& p1) {
    if (p1.carrier_size() > 12) {
        throw std::invalid_argument("exhaustive pi2 is limited to 12 points; use pi2_value");
    }
    detail::ScaledDyadic s(p1);
    std::vector<std::optional<BigNat>> best(s.v.size());
    best[0] = BigNat(0);
    for (Mask f = 1; f < best.size(); ++f) {
        const Mask low = f & (~f + 1);
        const Mask rest = f & ~low;
        std::optional<BigNat> b;
        for (Mask sub = rest;; sub = (sub - 1) & rest) {
            auto cand = detail::add(s.v[sub | low], best[f & ~(sub | low)]);
            if (detail::less(cand, b)) {
                b = cand;
            }
            if (sub == 0) {
                break;
            }
        }
        best[f] = b;
    }
    return Submeasure(SetFunction::tabulate(p1.carrier_size(), [&](Mask m) { return s.unscale(best[m]); }));
}

/// pi2(F) for a single F by branch and bound, with the optimal partition as certificate. Valid for
/// carriers up to 16 points; the search is complete, so the returned value is the exact minimum.
inline Pi2Certificate pi2_value(const SetFunction& p1, Mask f) {
    if (p1.carrier_size() > 16) {
        throw std::invalid_argument("pi2_value is limited to 16 points");
    }
    detail::ScaledDyadic s(p1);
    Pi2Certificate cert;
    std::optional<BigNat> best = s.v[f];  // the trivial partition {F}
    std::vector<Mask> best_blocks = f ? std::vector<Mask>{f} : std::vector<Mask>{};
    if (f == 0) {
        best = BigNat(0);
    }
    // lower bound for covering `rest`: the largest singleton value in it
    auto bound = [&](Mask rest) {
        BigNat lb = 0;
        for (Mask r = rest; r; r &= r - 1) {
            const Mask bit = r & (~r + 1);
            if (!s.v[bit]) {
                return std::optional<BigNat>();
            }
            lb = std::max(lb, *s.v[bit]);
        }
        return std::optional<BigNat>(lb);
    };
    std::unordered_map<Mask, std::optional<BigNat>> seen;  // best cost reaching each remaining set
    std::vector<Mask> blocks;
    std::function<void(Mask, const BigNat&)> search = [&](Mask rest, const BigNat& cost) {
        ++cert.nodes;
        if (rest == 0) {
            if (detail::less(cost, best)) {
                best = cost;
                best_blocks = blocks;
            }
            return;
        }
        if (auto it = seen.find(rest); it != seen.end() && it->second && *it->second <= cost) {
            return;
        }
        seen[rest] = cost;
        auto lb = bound(rest);
        if (!lb || !detail::less(cost + *lb, best)) {
            return;
        }
        const Mask low = rest & (~rest + 1);
        const Mask others = rest & ~low;
        for (Mask sub = others;; sub = (sub - 1) & others) {
            const Mask block = sub | low;
            if (s.v[block]) {
                blocks.push_back(block);
                search(rest & ~block, cost + *s.v[block]);
                blocks.pop_back();
            }
            if (sub == 0) {
                break;
            }
        }
    };
    if (f != 0) {
        search(f, BigNat(0));
    }
    cert.value = s.unscale(best);
    cert.blocks = best_blocks;
    return cert;
}

/// Checks a pi2 certificate: the blocks partition F and their pi1 values sum to the reported value.
inline bool verify_pi2_certificate(const SetFunction& p1, Mask f, const Pi2Certificate& c) {
    Mask seen = 0;
    ExtRational sum = 0;
    for (auto b : c.blocks) {
        if (b == 0 || (seen & b) != 0) {
            return false;
        }
        seen |= b;
        sum += p1[b];
    }
    return seen == f && sum == c.value;
}

// ---------------------------------------------------------------------------------------------
// lower semicontinuous submeasures on w

struct ValueBounds {
    ExtRational lower, upper;
    bool exact() const { return lower == upper; }
};

/// phi(X) = sup { finite(F) : F finite subset of X }, with optional exact analysis on SetShapes.
struct LscSubmeasure {
    std::string label;
    std::function<ExtRational(const std::set<std::uint64_t>&)> finite;
    /// the supremum on an infinite set, when the rule admits a closed form
    std::function<std::optional<ValueBounds>(const SetShape&)> analyse;
    /// c > 0 with phi(X \ F) >= c for every finite F, when certifiable
    std::function<std::optional<Rational>(const SetShape&)> uniform_tail_lower;
    /// whether phi(X \ n) -> 0 is certified
    std::function<bool(const SetShape&)> tails_vanish;

    ExtRational operator()(const std::set<std::uint64_t>& f) const { return finite(f); }

    /// Exact on finite sets; otherwise the closed form, else [phi(X cap horizon), inf].
    ValueBounds value(const SetShape& x, std::uint64_t horizon = 4096) const {
        if (x.is_finite()) {
            auto v = finite(as_set(x));
            return {v, v};
        }
        if (analyse) {
            if (auto b = analyse(x)) {
                return *b;
            }
        }
        auto lo = finite(as_set(x, horizon));
        return {lo, ExtRational::infinity()};
    }

    static std::set<std::uint64_t> as_set(const SetShape& x, std::optional<std::uint64_t> below = std::nullopt) {
        std::uint64_t bound = below ? *below : (x.max_element() ? *x.max_element() + 1 : 0);
        auto v = x.elements_below(bound);
        return {v.begin(), v.end()};
    }
};

/// X minus {0..n-1}
inline SetShape tail_from(const SetShape& x, std::uint64_t n) {
    std::set<std::uint64_t> head;
    for (std::uint64_t i = 0; i < n; ++i) {
        head.insert(i);
    }
    return x - SetShape::finite(head);
}

/// Exhaustive axiom check of a finite-set rule on the subsets of {0..points-1}.
inline std::optional<AxiomViolation> check_rule(const std::function<ExtRational(const std::set<std::uint64_t>&)>& rule,
                                                std::size_t points) {
    auto table = SetFunction::tabulate(points, [&](Mask m) {
        std::set<std::uint64_t> f;
        for (std::size_t i = 0; i < points; ++i) {
            if (m >> i & 1u) {
                f.insert(i);
            }
        }
        return rule(f);
    });
    return table.validate();
}

/// The supremum extension of a rule on finite sets. The rule is checked on P({0..check_points-1})
/// and rejected with the violated instance.
inline LscSubmeasure lsc_extend(std::string label, std::function<ExtRational(const std::set<std::uint64_t>&)> rule,
                                std::size_t check_points = 8) {
    if (auto v = check_rule(rule, check_points)) {
        throw SubmeasureError(*v);
    }
    LscSubmeasure out;
    out.label = std::move(label);
    out.finite = std::move(rule);
    return out;
}

inline LscSubmeasure zero_submeasure() {
    LscSubmeasure z = lsc_extend("zero", [](const std::set<std::uint64_t>&) { return ExtRational(0); });
    z.analyse = [](const SetShape&) { return std::optional<ValueBounds>(ValueBounds{0, 0}); };
    z.uniform_tail_lower = [](const SetShape&) { return std::optional<Rational>(); };
    z.tails_vanish = [](const SetShape&) { return true; };
    return z;
}

inline LscSubmeasure cardinality_submeasure() {
    LscSubmeasure c = lsc_extend("cardinality", [](const std::set<std::uint64_t>& f) { return ExtRational(Rational(f.size())); });
    c.analyse = [](const SetShape& x) -> std::optional<ValueBounds> {
        if (x.is_finite()) {
            return std::nullopt;
        }
        return ValueBounds{ExtRational::infinity(), ExtRational::infinity()};
    };
    c.uniform_tail_lower = [](const SetShape& x) -> std::optional<Rational> {
        return x.is_finite() ? std::nullopt : std::optional<Rational>(1);
    };
    c.tails_vanish = [](const SetShape& x) { return x.is_finite(); };
    return c;
}

/// sum over F of 1/(n+1) (Harmonic) or 2^-n (Dyadic).
inline LscSubmeasure weight_submeasure(SetShape::Weight w) {
    auto weight = [w](std::uint64_t n) {
        return w == SetShape::Weight::Harmonic ? Rational(BigNat(1), BigNat(n) + 1) : pow2(-static_cast<long>(n));
    };
    LscSubmeasure s = lsc_extend(w == SetShape::Weight::Harmonic ? "l1" : "dyadic", [weight](const std::set<std::uint64_t>& f) {
        Rational sum = 0;
        for (auto n : f) {
            sum += weight(n);
        }
        return ExtRational(sum);
    });
    s.analyse = [w](const SetShape& x) -> std::optional<ValueBounds> {
        auto b = x.weight_sum(w);
        if (!b) {
            return ValueBounds{ExtRational::infinity(), ExtRational::infinity()};
        }
        return ValueBounds{b->lower, b->upper};
    };
    s.uniform_tail_lower = [w](const SetShape& x) -> std::optional<Rational> {
        // a periodic part makes every harmonic tail infinite
        if (w == SetShape::Weight::Harmonic && x.has_periodic_part()) {
            return Rational(1);
        }
        return std::nullopt;
    };
    s.tails_vanish = [w](const SetShape& x) { return w == SetShape::Weight::Dyadic || !x.has_periodic_part(); };
    return s;
}

// ---------------------------------------------------------------------------------------------
// block-periodic submeasures

/// psi(X) = sum_j c_j psi0((X cap [jm, (j+1)m)) - jm) with c_j = 1 (Constant) or 2^-j (Dyadic).
struct BlockSubmeasure {
    enum class Scale { Constant, Dyadic };
    Submeasure base;
    Scale scale = Scale::Constant;

    std::uint64_t block() const { return base.carrier_size(); }
    Rational coefficient(std::uint64_t j) const { return scale == Scale::Constant ? Rational(1) : pow2(-static_cast<long>(j)); }

    /// The block masks of a finite set, keyed by block index.
    std::map<std::uint64_t, Mask> blocks_of(const std::set<std::uint64_t>& f) const {
        std::map<std::uint64_t, Mask> out;
        for (auto n : f) {
            out[n / block()] |= Mask{1} << (n % block());
        }
        return out;
    }

    ExtRational operator()(const std::set<std::uint64_t>& f) const {
        ExtRational sum = 0;
        for (auto [j, m] : blocks_of(f)) {
            const auto& v = base(m);
            sum += v.is_infinite() ? v : ExtRational(coefficient(j) * v.value());
        }
        return sum;
    }

    /// Offsets o with psi0({o}) > 0.
    SetShape positive_residues() const {
        SetShape out = SetShape::empty();
        for (std::uint64_t o = 0; o < block(); ++o) {
            if (base(Mask{1} << o) > ExtRational(0)) {
                out = out | SetShape::progression(o, block());
            }
        }
        return out;
    }
};

/// The lsc extension of a block submeasure with its Exh analysis: under Dyadic scaling every tail is
/// at most psi0(full) 2^(1-j); under Constant scaling X is exhaustive iff it meets the positive
/// residues finitely often, and otherwise each tail holds a translate of a positive point.
inline LscSubmeasure lsc_block(const BlockSubmeasure& b, std::string label) {
    auto shared = std::make_shared<BlockSubmeasure>(b);
    LscSubmeasure s = lsc_extend(std::move(label), [shared](const std::set<std::uint64_t>& f) { return (*shared)(f); },
                                 std::min<std::size_t>(10, 2 * b.block()));
    s.uniform_tail_lower = [shared](const SetShape& x) -> std::optional<Rational> {
        if (shared->scale == BlockSubmeasure::Scale::Dyadic) {
            return std::nullopt;
        }
        auto hits = x & shared->positive_residues();
        if (hits.is_finite()) {
            return std::nullopt;
        }
        std::optional<Rational> least;
        for (std::uint64_t o = 0; o < shared->block(); ++o) {
            const auto& v = shared->base(Mask{1} << o);
            if (v > ExtRational(0) && !(hits & SetShape::progression(o, shared->block())).is_finite()) {
                Rational q = v.is_infinite() ? Rational(1) : v.value();
                least = least ? std::min(*least, q) : q;
            }
        }
        return least;
    };
    s.tails_vanish = [shared](const SetShape& x) {
        if (shared->scale == BlockSubmeasure::Scale::Dyadic) {
            return !shared->base(shared->base.table().full()).is_infinite();
        }
        return (x & shared->positive_residues()).is_finite();
    };
    s.analyse = [shared](const SetShape& x) -> std::optional<ValueBounds> {
        if (shared->scale == BlockSubmeasure::Scale::Constant) {
            if (!(x & shared->positive_residues()).is_finite()) {
                return ValueBounds{ExtRational::infinity(), ExtRational::infinity()};
            }
            // only finitely many positive points; the rest are null
            auto pos = x & shared->positive_residues();
            auto v = (*shared)(LscSubmeasure::as_set(pos));
            return ValueBounds{v, v};
        }
        const auto& full = shared->base(shared->base.table().full());
        if (full.is_infinite()) {
            return std::nullopt;
        }
        // head exactly, then at most psi0(full) 2^-j per later block
        const std::uint64_t blocks = 24;
        auto head = (*shared)(LscSubmeasure::as_set(x, blocks * shared->block()));
        return ValueBounds{head, head + ExtRational(full.value() * pow2(1 - static_cast<long>(blocks)))};
    };
    return s;
}

/// pi2 of a block submeasure on finite subsets of w, computed by branch and bound over the whole set
/// (at most 16 points). The Exh analysis uses single-block values, which pi1 and pi2 treat like psi
/// up to the dyadic scale, together with subadditivity of pi2 over blocks.
inline LscSubmeasure lsc_block_pi2(const BlockSubmeasure& b, std::string label) {
    auto shared = std::make_shared<BlockSubmeasure>(b);
    auto p1_block = std::make_shared<SetFunction>(pi1(b.base));
    auto p2_block = std::make_shared<Submeasure>(pi2(*p1_block));
    auto rule = [shared](const std::set<std::uint64_t>& f) -> ExtRational {
        std::vector<std::uint64_t> pts(f.begin(), f.end());
        if (pts.size() > 16) {
            throw std::invalid_argument("pi2 evaluation is limited to 16 points");
        }
        auto p1 = SetFunction::tabulate(pts.size(), [&](Mask m) {
            std::set<std::uint64_t> sub;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                if (m >> i & 1u) {
                    sub.insert(pts[i]);
                }
            }
            return dyadic_ceiling((*shared)(sub));
        });
        return pi2_value(p1, p1.full()).value;
    };
    LscSubmeasure s;
    s.label = std::move(label);
    s.finite = rule;
    s.uniform_tail_lower = [shared, p2_block](const SetShape& x) -> std::optional<Rational> {
        if (shared->scale == BlockSubmeasure::Scale::Dyadic) {
            return std::nullopt;
        }
        std::optional<Rational> least;
        for (std::uint64_t o = 0; o < shared->block(); ++o) {
            const auto& v = (*p2_block)(Mask{1} << o);
            if (v > ExtRational(0) && !(x & SetShape::progression(o, shared->block())).is_finite()) {
                Rational q = v.is_infinite() ? Rational(1) : v.value();
                least = least ? std::min(*least, q) : q;
            }
        }
        return least;
    };
    s.analyse = [shared, p1_block, rule](const SetShape& x) -> std::optional<ValueBounds> {
        if (shared->scale == BlockSubmeasure::Scale::Constant) {
            auto pos = x & shared->positive_residues();
            if (!pos.is_finite() || LscSubmeasure::as_set(pos).size() > 16) {
                return std::nullopt;
            }
            // the remaining points are null, and pi2 is subadditive
            auto v = rule(LscSubmeasure::as_set(pos));
            return ValueBounds{v, v};
        }
        const auto& full = (*p1_block)[p1_block->full()];
        if (full.is_infinite()) {
            return std::nullopt;
        }
        // pi2 <= sum over blocks of pi1 of the block part; pi1 commutes with the 2^-j scale
        const std::uint64_t blocks = 24;
        ExtRational upper = ExtRational(full.value() * pow2(1 - static_cast<long>(blocks)));
        for (auto [j, m] : shared->blocks_of(LscSubmeasure::as_set(x, blocks * shared->block()))) {
            upper += ExtRational(pow2(-static_cast<long>(j)) * (*p1_block)[m].value());
        }
        auto head = x.first_elements(16, blocks * shared->block());
        auto lower = rule(std::set<std::uint64_t>(head.begin(), head.end()));
        return ValueBounds{lower, upper};
    };
    s.tails_vanish = [shared, p1_block, p2_block](const SetShape& x) {
        if (shared->scale == BlockSubmeasure::Scale::Dyadic) {
            return !(*p1_block)[p1_block->full()].is_infinite();
        }
        for (std::uint64_t o = 0; o < shared->block(); ++o) {
            if ((*p2_block)(Mask{1} << o) > ExtRational(0) && !(x & SetShape::progression(o, shared->block())).is_finite()) {
                return false;
            }
        }
        return true;
    };
    return s;
}

// ---------------------------------------------------------------------------------------------
// Exh probing

enum class ExhVerdict { In, Out, Unknown };

inline std::string to_string(ExhVerdict v) {
    switch (v) {
        case ExhVerdict::In:
            return "IN";
        case ExhVerdict::Out:
            return "OUT";
        default:
            return "UNKNOWN";
    }
}

struct ExhProbe {
    ExhVerdict verdict = ExhVerdict::Unknown;
    std::set<std::uint64_t> f;          // IN: phi(X \ F) < eps
    std::optional<Rational> tail_upper;  // IN: the certified tail bound
    std::optional<Rational> lower;       // OUT: phi(X \ F) >= lower for all finite F
};

/// IN(F) when phi(X \ F) < eps is certified for an initial segment F of X below the horizon;
/// OUT when every tail is bounded below by a positive constant.
inline ExhProbe exh_probe(const LscSubmeasure& phi, const SetShape& x, const Rational& eps, std::uint64_t horizon) {
    if (eps <= 0) {
        throw std::invalid_argument("eps must be positive");
    }
    ExhProbe r;
    if (x.is_finite()) {
        r.verdict = ExhVerdict::In;
        r.f = LscSubmeasure::as_set(x);
        r.tail_upper = 0;
        return r;
    }
    if (phi.uniform_tail_lower) {
        if (auto lb = phi.uniform_tail_lower(x)) {
            r.verdict = ExhVerdict::Out;
            r.lower = *lb;
            return r;
        }
    }
    for (std::uint64_t n = 1; n <= horizon; n *= 2) {
        auto b = phi.value(tail_from(x, n));
        if (!b.upper.is_infinite() && b.upper.value() < eps) {
            r.verdict = ExhVerdict::In;
            r.f = LscSubmeasure::as_set(x, n);
            r.tail_upper = b.upper.value();
            return r;
        }
    }
    return r;
}

/// Membership in Exh(phi): OUT on a uniform tail bound, IN when tails are certified to vanish.
inline ExhVerdict exh_member(const LscSubmeasure& phi, const SetShape& x) {
    if (x.is_finite()) {
        return ExhVerdict::In;
    }
    if (phi.uniform_tail_lower && phi.uniform_tail_lower(x)) {
        return ExhVerdict::Out;
    }
    if (phi.tails_vanish && phi.tails_vanish(x)) {
        return ExhVerdict::In;
    }
    return ExhVerdict::Unknown;
}

}  // namespace wfi
