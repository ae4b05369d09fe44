#pragma once

// Structured subsets of the three countable carriers w, w x w and 2^<w, with exact membership
// and the classifications the ideal oracles need.

#include "wfi/bitstring.hpp"
#include "wfi/dsl.hpp"
#include "wfi/set_shape.hpp"

#include <functional>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace wfi {

class UnsupportedShape : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------------------------
// w x w

/// A subset of w x w. Membership is exact; column sections are classified modulo finite sets by a
/// partition of the rows into SetShape atoms.
class PairSet {
public:
    struct Atom {
        SetShape rows;
        SetShape columns;  // meaningful modulo finite sets only
    };

    static PairSet finite(std::set<std::pair<std::uint64_t, std::uint64_t>> pts) {
        auto p = std::make_shared<std::set<std::pair<std::uint64_t, std::uint64_t>>>(std::move(pts));
        return PairSet(
            [p](std::uint64_t m, std::uint64_t n) { return p->count({m, n}) != 0; },
            [p](std::uint64_t m) {
                std::set<std::uint64_t> col;
                for (auto it = p->lower_bound({m, 0}); it != p->end() && it->first == m; ++it) {
                    col.insert(it->second);
                }
                return SetShape::finite(col);
            },
            {Atom{SetShape::all(), SetShape::empty()}});
    }

    static PairSet product(SetShape rows, SetShape cols) {
        auto r = std::make_shared<SetShape>(rows);
        auto c = std::make_shared<SetShape>(cols);
        std::vector<Atom> atoms;
        if (!rows.is_empty()) {
            atoms.push_back({rows, cols});
        }
        if (auto rest = rows.complement(); !rest.is_empty()) {
            atoms.push_back({rest, SetShape::empty()});
        }
        return PairSet([r, c](std::uint64_t m, std::uint64_t n) { return r->contains(m) && c->contains(n); },
                       [r, c](std::uint64_t m) { return r->contains(m) ? *c : SetShape::empty(); }, std::move(atoms));
    }

    /// {(m, n) : n <= a*m + b}
    static PairSet triangle(std::uint64_t a, std::uint64_t b) {
        return PairSet([a, b](std::uint64_t m, std::uint64_t n) { return n <= a * m + b; },
                       [a, b](std::uint64_t m) {
                           std::set<std::uint64_t> col;
                           for (std::uint64_t n = 0; n <= a * m + b; ++n) {
                               col.insert(n);
                           }
                           return SetShape::finite(col);
                       },
                       {Atom{SetShape::all(), SetShape::empty()}});
    }

    bool contains(std::uint64_t m, std::uint64_t n) const { return member_(m, n); }
    SetShape column(std::uint64_t m) const { return column_(m); }
    const std::vector<Atom>& atoms() const { return atoms_; }

    /// A row whose column section is infinite, if any.
    std::optional<std::uint64_t> infinite_column() const {
        for (const auto& a : atoms_) {
            if (!a.columns.is_finite()) {
                return a.rows.first_elements(1).front();
            }
        }
        return std::nullopt;
    }

    /// Finite sets only: all points.
    std::set<std::pair<std::uint64_t, std::uint64_t>> finite_points(std::uint64_t row_bound) const {
        std::set<std::pair<std::uint64_t, std::uint64_t>> out;
        for (std::uint64_t m = 0; m < row_bound; ++m) {
            auto col = column(m);
            if (!col.is_finite()) {
                throw std::logic_error("finite_points: infinite column");
            }
            for (auto n : col.elements_below(col.threshold())) {
                out.insert({m, n});
            }
        }
        return out;
    }

    friend PairSet operator|(const PairSet& a, const PairSet& b) { return combine(a, b, [](bool x, bool y) { return x || y; }); }
    friend PairSet operator&(const PairSet& a, const PairSet& b) { return combine(a, b, [](bool x, bool y) { return x && y; }); }
    friend PairSet operator-(const PairSet& a, const PairSet& b) { return combine(a, b, [](bool x, bool y) { return x && !y; }); }

private:
    using Member = std::function<bool(std::uint64_t, std::uint64_t)>;
    using Column = std::function<SetShape(std::uint64_t)>;

    PairSet(Member member, Column column, std::vector<Atom> atoms)
        : member_(std::move(member)), column_(std::move(column)), atoms_(std::move(atoms)) {}

    template <class Op>
    static PairSet combine(const PairSet& a, const PairSet& b, Op op) {
        std::vector<Atom> atoms;
        for (const auto& x : a.atoms_) {
            for (const auto& y : b.atoms_) {
                SetShape rows = x.rows & y.rows;
                if (rows.is_empty()) {
                    continue;
                }
                SetShape cols = op_shape(x.columns, y.columns, op);
                bool merged = false;
                for (auto& existing : atoms) {
                    if ((existing.columns ^ cols).is_finite()) {
                        existing.rows = existing.rows | rows;
                        merged = true;
                        break;
                    }
                }
                if (!merged) {
                    atoms.push_back({rows, cols});
                }
            }
        }
        Member ma = a.member_, mb = b.member_;
        Column ca = a.column_, cb = b.column_;
        return PairSet([ma, mb, op](std::uint64_t m, std::uint64_t n) { return op(ma(m, n), mb(m, n)); },
                       [ca, cb, op](std::uint64_t m) { return op_shape(ca(m), cb(m), op); }, std::move(atoms));
    }

    template <class Op>
    static SetShape op_shape(const SetShape& x, const SetShape& y, Op op) {
        if (op(true, false) && op(false, true)) {
            return x | y;
        }
        if (op(true, false)) {
            return x - y;
        }
        return x & y;
    }

    Member member_;
    Column column_;
    std::vector<Atom> atoms_;
};

// ---------------------------------------------------------------------------------------------
// 2^<w

/// Enumeration index of s as a big integer (for strings too long for 64 bits).
inline BigNat enumeration_index_big(const BitString& s) {
    BigNat value = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        value = value * 2 + (s[i] == '1' ? 1 : 0);
    }
    return (BigNat(1) << s.size()) - 1 + value;
}

/// A subset of 2^<w: strings whose enumeration index lies in an index shape, together with a chain
/// {alpha|(n+1) : n in X} of prefixes of the characteristic sequence alpha of a set A.
class BranchSet {
public:
    struct Chain {
        SetShape a;  // alpha = characteristic sequence of A
        SetShape x;  // levels n, standing for alpha|(n+1)
    };

    BranchSet() = default;
    static BranchSet of_indices(SetShape idx) {
        BranchSet b;
        b.indices_ = std::move(idx);
        return b;
    }
    static BranchSet of_strings(const std::set<BitString>& strings) {
        std::set<std::uint64_t> idx;
        for (const auto& s : strings) {
            idx.insert(enumeration_index(s));
        }
        return of_indices(SetShape::finite(idx));
    }
    /// {alpha|(n+1) : n in x} for alpha the characteristic sequence of a.
    static BranchSet chain(SetShape a, SetShape x) {
        BranchSet b;
        b.chain_ = Chain{std::move(a), std::move(x)};
        return b;
    }
    /// B = { s^1 }: indices 2, 4, 6, ...
    static SetShape ends_in_one() { return SetShape::progression(2, 2); }
    static SetShape ends_in_zero() { return SetShape::progression(1, 2); }

    bool contains(const BitString& s) const {
        if (index_contains(s)) {
            return true;
        }
        if (!chain_ || s.size() == 0) {
            return false;
        }
        for (std::size_t i = 0; i < s.size(); ++i) {
            if ((s[i] == '1') != chain_->a.contains(i)) {
                return false;
            }
        }
        return chain_->x.contains(s.size() - 1);
    }

    const SetShape& indices() const { return indices_; }
    const std::optional<Chain>& chain_part() const { return chain_; }

    /// The chain levels whose strings are not already covered by the index part.
    SetShape chain_outside_indices() const {
        if (!chain_) {
            return SetShape::empty();
        }
        return chain_->x - chain_levels_in(indices_, chain_->a);
    }

    /// X intersect B is finite.
    bool meets_ends_in_one_finitely() const {
        bool idx_finite = (indices_ & ends_in_one()).is_finite();
        bool chain_finite = !chain_ || (chain_->x & chain_->a).is_finite();
        return idx_finite && chain_finite;
    }

    /// Number of elements ending in 1, when finite.
    std::optional<std::uint64_t> count_ends_in_one() const {
        if (!meets_ends_in_one_finitely()) {
            return std::nullopt;
        }
        auto idx = indices_ & ends_in_one();
        std::uint64_t count = idx.elements_below(idx.threshold()).size();
        if (chain_) {
            auto levels = chain_outside_indices() & chain_->a;
            count += levels.elements_below(levels.threshold()).size();
        }
        return count;
    }

    /// Sum of 2^-index over the set, enclosed in [lower, upper].
    SetShape::SumBounds dyadic_weight() const {
        auto bounds = *indices_.weight_sum(SetShape::Weight::Dyadic);
        if (chain_) {
            // chain indices grow like 2^(n+1): a dozen exact levels, then a far smaller tail
            constexpr std::uint64_t kExactLevels = 12;
            auto levels = chain_outside_indices();
            auto exact = levels.elements_below(kExactLevels);
            for (auto n : exact) {
                auto idx = chain_index(n);
                bounds.lower += pow2_big(idx);
                bounds.upper += pow2_big(idx);
            }
            if (!(levels - SetShape::finite({exact.begin(), exact.end()})).is_empty()) {
                bounds.upper += pow2(-static_cast<long>((std::uint64_t{1} << (kExactLevels + 1)) - 2));
            }
        }
        return bounds;
    }

    friend BranchSet operator|(const BranchSet& a, const BranchSet& b) {
        BranchSet r;
        r.indices_ = a.indices_ | b.indices_;
        r.chain_ = merge_chains(a.chain_, b.chain_, [](const SetShape& x, const SetShape& y) { return x | y; });
        return r;
    }

    friend BranchSet operator&(const BranchSet& a, const BranchSet& b) {
        BranchSet r;
        r.indices_ = a.indices_ & b.indices_;
        std::optional<Chain> parts;
        auto add = [&](const std::optional<Chain>& c) {
            parts = merge_chains(parts, c, [](const SetShape& x, const SetShape& y) { return x | y; });
        };
        if (a.chain_) {
            add(Chain{a.chain_->a, a.chain_->x & chain_levels_in(b.indices_, a.chain_->a)});
        }
        if (b.chain_) {
            add(Chain{b.chain_->a, b.chain_->x & chain_levels_in(a.indices_, b.chain_->a)});
        }
        if (a.chain_ && b.chain_) {
            add(merge_chains(a.chain_, b.chain_, [](const SetShape& x, const SetShape& y) { return x & y; }));
        }
        r.chain_ = parts;
        return r;
    }

    friend BranchSet operator-(const BranchSet& a, const BranchSet& b) {
        BranchSet r;
        r.indices_ = a.indices_ - b.indices_;
        if (b.chain_) {
            // remove the chain strings of b that fall inside the remaining index part
            auto hit = b.chain_->x & chain_levels_in(r.indices_, b.chain_->a);
            if (!hit.is_finite()) {
                throw UnsupportedShape("difference removes infinitely many chain strings from an index set");
            }
            std::set<std::uint64_t> drop;
            for (auto n : hit.elements_below(hit.threshold())) {
                if (n >= 62) {
                    throw UnsupportedShape("difference removes a chain string beyond the index range");
                }
                drop.insert(enumeration_index(chain_string(b.chain_->a, n)));
            }
            r.indices_ = r.indices_ - SetShape::finite(drop);
        }
        if (a.chain_) {
            SetShape levels = a.chain_->x - chain_levels_in(b.indices_, a.chain_->a);
            if (b.chain_) {
                check_same_sequence(a.chain_->a, b.chain_->a);
                levels = levels - b.chain_->x;
            }
            r.chain_ = Chain{a.chain_->a, levels};
        }
        return r;
    }

    static BitString chain_string(const SetShape& a, std::uint64_t n) {
        std::string bits(n + 1, '0');
        for (std::uint64_t i = 0; i <= n; ++i) {
            bits[i] = a.contains(i) ? '1' : '0';
        }
        return BitString(bits);
    }

    std::string describe() const {
        std::string out = "indices: " + indices_.describe();
        if (chain_) {
            out += "; chain over A = " + chain_->a.describe() + " at levels " + chain_->x.describe();
        }
        return out;
    }

private:
    bool index_contains(const BitString& s) const {
        if (s.size() < 62) {
            return indices_.contains(enumeration_index(s));
        }
        // beyond the threshold: residue and sparse-family test on the big index
        BigNat idx = enumeration_index_big(s);
        bool bit = indices_.mask()[static_cast<std::size_t>(idx % indices_.period())];
        for (const auto& [c, kmask] : indices_.families()) {
            BigNat m = idx + 1 - c;
            if (m > 0 && (m & (m - 1)) == 0) {
                auto k = static_cast<std::uint64_t>(boost::multiprecision::msb(m));
                if (indices_.family_flips(c, k)) {
                    bit = !bit;
                }
            }
        }
        return bit;
    }

    /// 2^-e
    static Rational pow2_big(const BigNat& e) { return Rational(BigNat(1), BigNat(1) << static_cast<std::size_t>(e)); }

    BigNat chain_index(std::uint64_t n) const { return enumeration_index_big(chain_string(chain_->a, n)); }

    /// Levels n whose chain string alpha|(n+1) has its index in `idx`. Exact for index shapes that agree
    /// modulo finite sets with the empty set, everything, B or its complement.
    static SetShape chain_levels_in(const SetShape& idx, const SetShape& a) {
        const SetShape b = ends_in_one();
        SetShape rule;
        SetShape diff;
        if ((diff = idx).is_finite()) {
            rule = SetShape::empty();
        } else if ((diff = idx ^ SetShape::all()).is_finite()) {
            rule = SetShape::all();
        } else if ((diff = idx ^ b).is_finite()) {
            rule = a;
        } else if ((diff = idx ^ b.complement()).is_finite()) {
            rule = a.complement();
        } else {
            throw UnsupportedShape("index set is not comparable with the chain strings");
        }
        // the rule is exact once the chain index exceeds every exceptional index
        auto exceptional = diff.max_element();
        std::set<std::uint64_t> fix_in, fix_out;
        for (std::uint64_t n = 0; exceptional && n < 62 && (std::uint64_t{1} << (n + 1)) - 1 <= *exceptional; ++n) {
            bool in = idx.contains(enumeration_index(chain_string(a, n)));
            (in ? fix_in : fix_out).insert(n);
        }
        return (rule - SetShape::finite(fix_out)) | SetShape::finite(fix_in);
    }

    static void check_same_sequence(const SetShape& a, const SetShape& b) {
        if (!(a == b)) {
            throw UnsupportedShape("combining chains over different sequences");
        }
    }

    template <class Op>
    static std::optional<Chain> merge_chains(const std::optional<Chain>& a, const std::optional<Chain>& b, Op op) {
        if (!a && !b) {
            return std::nullopt;
        }
        if (!a || !b) {
            // absent chain behaves as the empty chain
            const Chain& c = a ? *a : *b;
            SetShape none = SetShape::empty();
            return Chain{c.a, a ? op(c.x, none) : op(none, c.x)};
        }
        check_same_sequence(a->a, b->a);
        return Chain{a->a, op(a->x, b->x)};
    }

    SetShape indices_ = SetShape::empty();
    std::optional<Chain> chain_;
};

// ---------------------------------------------------------------------------------------------
// Parsing

enum class Carrier { Omega, OmegaSquared, Strings };

inline std::string carrier_name(Carrier c) {
    switch (c) {
        case Carrier::Omega:
            return "w";
        case Carrier::OmegaSquared:
            return "wxw";
        case Carrier::Strings:
            return "2^<w";
    }
    return "?";
}

using StructuredSet = std::variant<SetShape, PairSet, BranchSet>;

namespace detail {

inline SetShape build_omega(const dsl::Expr& e);

template <class T, class Build>
T fold(const dsl::Expr& e, Build build) {
    if (e.args.empty()) {
        throw dsl::ParseError(e.text + " needs at least one argument", e.position);
    }
    T acc = build(e.args[0]);
    for (std::size_t i = 1; i < e.args.size(); ++i) {
        if (e.text == "union") {
            acc = acc | build(e.args[i]);
        } else if (e.text == "inter") {
            acc = acc & build(e.args[i]);
        } else {
            acc = acc - build(e.args[i]);
        }
    }
    return acc;
}

inline bool is_boolean(const dsl::Expr& e) {
    return e.kind == dsl::Expr::Kind::Call && (e.text == "union" || e.text == "inter" || e.text == "diff");
}

inline SetShape build_omega(const dsl::Expr& e) {
    using K = dsl::Expr::Kind;
    if (is_boolean(e)) {
        return fold<SetShape>(e, build_omega);
    }
    if (e.is(K::Name, "all") || e.is(K::Name, "w")) {
        return SetShape::all();
    }
    if (e.is(K::Name, "empty")) {
        return SetShape::empty();
    }
    if (e.kind == K::Braces && (e.text == "fin" || e.text == "cofin")) {
        std::set<std::uint64_t> elems;
        for (const auto& a : e.args) {
            elems.insert(a.number());
        }
        return e.text == "fin" ? SetShape::finite(elems) : SetShape::cofinite(elems);
    }
    if (e.is(K::Call, "ap")) {
        e.expect_args(2);
        return SetShape::progression(e.args[0].number(), e.args[1].number());
    }
    if (e.is(K::Call, "geo")) {
        e.expect_args(1);
        return SetShape::geometric(e.args[0].number());
    }
    if (e.is(K::Call, "compl")) {
        e.expect_args(1);
        return build_omega(e.args[0]).complement();
    }
    throw dsl::ParseError("unknown set expression '" + e.text + "' over w", e.position);
}

inline PairSet build_pairs(const dsl::Expr& e) {
    using K = dsl::Expr::Kind;
    if (is_boolean(e)) {
        return fold<PairSet>(e, build_pairs);
    }
    if (e.is(K::Name, "empty")) {
        return PairSet::finite({});
    }
    if (e.is(K::Name, "all")) {
        return PairSet::product(SetShape::all(), SetShape::all());
    }
    if (e.kind == K::Braces && e.text == "fin") {
        std::set<std::pair<std::uint64_t, std::uint64_t>> pts;
        for (const auto& a : e.args) {
            if (a.kind != K::Tuple || a.args.size() != 2) {
                throw dsl::ParseError("expected a pair (m,n)", a.position);
            }
            pts.insert({a.args[0].number(), a.args[1].number()});
        }
        return PairSet::finite(pts);
    }
    if (e.is(K::Call, "prod")) {
        e.expect_args(2);
        return PairSet::product(build_omega(e.args[0]), build_omega(e.args[1]));
    }
    if (e.is(K::Call, "col")) {
        e.expect_args(1);
        return PairSet::product(SetShape::finite({e.args[0].number()}), SetShape::all());
    }
    if (e.is(K::Call, "tri")) {
        e.expect_args(2);
        return PairSet::triangle(e.args[0].number(), e.args[1].number());
    }
    throw dsl::ParseError("unknown set expression '" + e.text + "' over w x w", e.position);
}

inline BranchSet build_strings(const dsl::Expr& e) {
    using K = dsl::Expr::Kind;
    if (is_boolean(e)) {
        return fold<BranchSet>(e, build_strings);
    }
    if (e.is(K::Name, "empty")) {
        return BranchSet();
    }
    if (e.is(K::Name, "all")) {
        return BranchSet::of_indices(SetShape::all());
    }
    if (e.is(K::Name, "ends1")) {
        return BranchSet::of_indices(BranchSet::ends_in_one());
    }
    if (e.is(K::Name, "ends0")) {
        return BranchSet::of_indices(BranchSet::ends_in_zero());
    }
    if (e.kind == K::Braces && (e.text == "fin" || e.text == "strs")) {
        std::set<BitString> strings;
        for (const auto& a : e.args) {
            strings.insert(BitString(a.bits()));
        }
        return BranchSet::of_strings(strings);
    }
    if (e.is(K::Call, "idx")) {
        e.expect_args(1);
        return BranchSet::of_indices(build_omega(e.args[0]));
    }
    if (e.is(K::Call, "pullback")) {
        e.expect_args(2);
        const auto& map = e.args[0];
        if (!map.is(K::Call, "lcp") || map.args.size() != 1) {
            throw dsl::ParseError("pullback supports the map lcp(A) only", map.position);
        }
        return BranchSet::chain(build_omega(map.args[0]), build_omega(e.args[1]));
    }
    throw dsl::ParseError("unknown set expression '" + e.text + "' over 2^<w", e.position);
}

}  // namespace detail

inline SetShape parse_omega_set(std::string_view text) { return detail::build_omega(dsl::parse(text)); }
inline PairSet parse_pair_set(std::string_view text) { return detail::build_pairs(dsl::parse(text)); }
inline BranchSet parse_string_set(std::string_view text) { return detail::build_strings(dsl::parse(text)); }

inline StructuredSet parse_structured_set(Carrier carrier, std::string_view text) {
    switch (carrier) {
        case Carrier::Omega:
            return parse_omega_set(text);
        case Carrier::OmegaSquared:
            return parse_pair_set(text);
        case Carrier::Strings:
            return parse_string_set(text);
    }
    throw std::logic_error("unknown carrier");
}

}  // namespace wfi
