// wfi: batch front-end over the wfi library.
//
// Every report is a JSON object {schema, kind, request, outcome, ...}. Reports re-validate through
// `wfi verify --certificate FILE`, which re-runs the request and, for refutations, NWD probes and
// pi2 partitions, also checks the certificate independently.

#include "wfi/wfi.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using json = nlohmann::ordered_json;
using namespace wfi;

constexpr const char* kSchema = "wfi-report/1";

enum Exit : int { kOk = 0, kFound = 2, kUnknown = 3, kUsage = 64 };

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::size_t default_depth() {
    if (const char* env = std::getenv("WFI_DEFAULT_DEPTH")) {
        try {
            return std::stoul(env);
        } catch (const std::exception&) {
            throw UsageError(std::string("WFI_DEFAULT_DEPTH is not a number: ") + env);
        }
    }
    return 24;
}

struct Params {
    std::string verb, sub;
    std::string tree, set, ideal, a = "ap(0,2)", alpha = "w", y, claim, map, pi = "l1", s, family;
    std::string phi = "l1", eps = "1/100", scale = "constant", codomain_ideal = "l1", domain_ideal = "l1";
    json table;  // submeasure table, loaded from --table
    std::vector<std::string> sets;
    std::size_t depth = 24, n = 5, terms = 5, length = 8, d = 4, big_d = 12, samples = 50, budget = kRefuterBudget;
    std::uint64_t horizon = 4096, value = 0, seed = 0;
    std::optional<Mask> mask;

    json to_json() const {
        json j;
        j["verb"] = verb;
        auto put = [&](const char* key, const std::string& v) {
            if (!v.empty()) {
                j[key] = v;
            }
        };
        put("sub", sub);
        put("tree", tree);
        put("set", set);
        put("ideal", ideal);
        put("claim", claim);
        put("map", map);
        put("y", y);
        put("s", s);
        put("family", family);
        j["a"] = a;
        j["alpha"] = alpha;
        j["pi"] = pi;
        j["phi"] = phi;
        j["eps"] = eps;
        j["scale"] = scale;
        j["codomain_ideal"] = codomain_ideal;
        j["domain_ideal"] = domain_ideal;
        if (!table.is_null()) {
            j["table"] = table;
        }
        if (!sets.empty()) {
            j["sets"] = sets;
        }
        j["depth"] = depth;
        j["n"] = n;
        j["terms"] = terms;
        j["length"] = length;
        j["d"] = d;
        j["D"] = big_d;
        j["samples"] = samples;
        j["budget"] = budget;
        j["horizon"] = horizon;
        j["value"] = value;
        j["seed"] = seed;
        if (mask) {
            j["mask"] = *mask;
        }
        json kept;
        for (const auto& key : relevant_keys()) {
            if (j.contains(key)) {
                kept[key] = j[key];
            }
        }
        return kept;
    }

    std::vector<std::string> relevant_keys() const {
        std::vector<std::string> keys{"verb"};
        auto add = [&](std::initializer_list<const char*> ks) { keys.insert(keys.end(), ks.begin(), ks.end()); };
        auto map_keys = [&] {
            add({"map"});
            if (map == "lcp" || map == "lcp-unshifted") {
                add({"a"});
            } else if (map == "rank-boosting") {
                add({"alpha"});
            } else if (map == "constant") {
                add({"value"});
            } else if (map == "antichain") {
                add({"y"});
            } else if (map == "universal") {
                add({"pi", "length", "table", "scale"});
            }
        };
        if (verb == "rank") {
            add({"tree", "depth"});
        } else if (verb == "member") {
            add({"ideal", "set"});
            if (ideal == "J_A") {
                add({"a"});
            } else if (ideal == "I_alpha" || ideal == "I_wf") {
                add({"alpha", "depth"});
            } else if (ideal == "NWD") {
                add({"d", "D"});
            }
        } else if (verb == "reduce") {
            map_keys();
            add({"set", "depth", "budget"});
        } else if (verb == "verify") {
            map_keys();
            add({"sets", "samples", "seed", "codomain_ideal", "domain_ideal"});
        } else if (verb == "refute") {
            add({"claim"});
            map_keys();
            add({"n", "terms", "y", "depth", "budget"});
        } else if (verb == "submeasure") {
            add({"sub", "table", "mask", "s", "family", "seed"});
        } else if (verb == "exh") {
            add({"phi", "set", "eps", "horizon", "table", "scale"});
        } else if (verb == "report") {
            add({"set", "a"});
        }
        return keys;
    }

    static Params from_json(const json& j) {
        Params p;
        auto get = [&](const char* key, auto& field) {
            if (j.contains(key)) {
                j.at(key).get_to(field);
            }
        };
        get("verb", p.verb);
        get("sub", p.sub);
        get("tree", p.tree);
        get("set", p.set);
        get("ideal", p.ideal);
        get("claim", p.claim);
        get("map", p.map);
        get("y", p.y);
        get("s", p.s);
        get("family", p.family);
        get("a", p.a);
        get("alpha", p.alpha);
        get("pi", p.pi);
        get("phi", p.phi);
        get("eps", p.eps);
        get("scale", p.scale);
        get("codomain_ideal", p.codomain_ideal);
        get("domain_ideal", p.domain_ideal);
        if (j.contains("table")) {
            p.table = j.at("table");
        }
        get("sets", p.sets);
        get("depth", p.depth);
        get("n", p.n);
        get("terms", p.terms);
        get("length", p.length);
        get("d", p.d);
        get("D", p.big_d);
        get("samples", p.samples);
        get("budget", p.budget);
        get("horizon", p.horizon);
        get("value", p.value);
        get("seed", p.seed);
        if (j.contains("mask")) {
            p.mask = j.at("mask").get<Mask>();
        }
        return p;
    }
};

json report(const Params& p, const std::string& kind) {
    json j;
    j["schema"] = kSchema;
    j["kind"] = kind;
    j["request"] = p.to_json();
    return j;
}

template <class Range>
json strings(const Range& r) {
    json a = json::array();
    for (const auto& s : r) {
        a.push_back(s.str());
    }
    return a;
}

json decision_json(const Decision& d) {
    json j;
    j["verdict"] = to_string(d.verdict);
    json c = json::object();
    for (const auto& [k, v] : d.certificate) {
        c[k] = v;
    }
    j["certificate"] = c;
    return j;
}

// ---------------------------------------------------------------------------------------------
// submeasure tables

SetFunction table_from_json(const json& t) {
    const auto n = t.at("carrier").get<std::size_t>();
    if (n > SetFunction::kMaxCarrier) {
        throw UsageError("table carrier too large: " + std::to_string(n));
    }
    SetFunction f(n);
    std::vector<bool> seen(std::size_t{1} << n);
    for (const auto& [key, value] : t.at("values").items()) {
        Mask m = 0;
        try {
            m = static_cast<Mask>(std::stoul(key));
        } catch (const std::exception&) {
            throw UsageError("table key is not a subset mask: " + key);
        }
        if (m > f.full()) {
            throw UsageError("table mask " + key + " exceeds the carrier");
        }
        f[m] = value.is_number_integer() ? ExtRational(Rational(value.get<std::int64_t>()))
                                         : parse_ext_rational(value.get<std::string>());
        seen[m] = true;
    }
    for (Mask m = 0; m <= f.full(); ++m) {
        if (!seen[m]) {
            throw UsageError("table has no value for mask " + std::to_string(m));
        }
    }
    return f;
}

json table_to_json(const SetFunction& f) {
    json t;
    t["carrier"] = f.carrier_size();
    json v;
    for (Mask m = 0; m <= f.full(); ++m) {
        v[std::to_string(m)] = to_string(f[m]);
    }
    t["values"] = v;
    return t;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot open " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError(path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------------------------
// maps and submeasures by id

LscSubmeasure named_submeasure(const Params& p, const std::string& name) {
    if (name == "l1") {
        return weight_submeasure(SetShape::Weight::Harmonic);
    }
    if (name == "dyadic") {
        return weight_submeasure(SetShape::Weight::Dyadic);
    }
    if (name == "card") {
        return cardinality_submeasure();
    }
    if (name == "zero") {
        return zero_submeasure();
    }
    if (name == "block" || name == "block-pi2") {
        if (p.table.is_null()) {
            throw UsageError(name + " needs --table");
        }
        if (p.scale != "constant" && p.scale != "dyadic") {
            throw UsageError("--scale is constant or dyadic");
        }
        BlockSubmeasure b{Submeasure(table_from_json(p.table)),
                          p.scale == "dyadic" ? BlockSubmeasure::Scale::Dyadic : BlockSubmeasure::Scale::Constant};
        return name == "block" ? lsc_block(b, "block(" + p.scale + ")") : lsc_block_pi2(b, "block-pi2(" + p.scale + ")");
    }
    throw UsageError("unknown submeasure '" + name + "' (l1, dyadic, card, zero, block, block-pi2)");
}

bool string_valued(const std::string& id) { return id == "rank-boosting" || id == "fixture3"; }

StringToOmegaMap omega_map(const Params& p) {
    const auto& id = p.map;
    if (id == "lcp") {
        return lcp_reduction(parse_omega_set(p.a));
    }
    if (id == "lcp-unshifted") {
        return lcp_reduction_unshifted(parse_omega_set(p.a));
    }
    if (id == "fixture1") {
        return fixtures::fixture1();
    }
    if (id == "fixture2") {
        return fixtures::fixture2();
    }
    if (id == "constant") {
        return fixtures::constant_string_map(p.value);
    }
    if (id == "antichain") {
        return fixtures::antichain_length_map(InfiniteSequence::parse(p.y.empty() ? "(0)" : p.y));
    }
    if (id == "universal") {
        return branch_adapter(universal_reduction(named_submeasure(p, p.pi), p.length));
    }
    if (string_valued(id)) {
        throw UsageError("map '" + id + "' takes values in strings, not naturals");
    }
    throw UsageError("unknown map '" + id + "'");
}

StringToStringMap string_map(const Params& p) {
    if (p.map == "rank-boosting") {
        return rank_boosting_map(parse_ordinal(p.alpha)).as_map();
    }
    if (p.map == "fixture3") {
        return fixtures::fixture3();
    }
    throw UsageError("map '" + p.map + "' does not take values in strings");
}

IdealOracle omega_oracle(const std::string& name, const Params& p) {
    if (name == "l1") {
        return ell1_oracle();
    }
    if (name == "Z0") {
        return density_zero_oracle();
    }
    if (name == "fin") {
        return fin_oracle();
    }
    if (name == "J_A") {
        return finite_on_oracle(parse_omega_set(p.a));
    }
    if (name == "I_*") {
        return lcp_oracle();
    }
    if (name == "0xFin") {
        return empty_times_fin_oracle();
    }
    throw UsageError("unknown ideal '" + name + "'");
}

// ---------------------------------------------------------------------------------------------
// verbs

int run_rank(const Params& p, json& out) {
    out = report(p, "rank");
    auto v = parse_tree_expr(p.tree);
    if (v.finite) {
        auto r = rank_with_nodes(*v.finite);
        out["outcome"] = "EXACT";
        out["rank"] = r.rank;
        out["nodes"] = v.finite->size();
        out["longest_chain"] = strings(longest_chain(*v.finite));
        return kOk;
    }
    const auto& t = v.lazy;
    out["description"] = t.describe();
    out["well_founded_by_construction"] = t.well_founded_by_construction();
    auto probe = wf_probe(t, p.depth);
    out["probe"] = {{"depth", probe.depth}, {"max_chain_length", probe.max_chain_length}, {"path_suspect", probe.path_suspect}};
    if (t.rank_claim()) {
        out["rank"] = to_string(*t.rank_claim());
        out["claim_checked"] = t.claim_checked();
    }
    const bool known = t.rank_claim() && t.claim_checked();
    out["outcome"] = known ? "CLAIMED" : "UNKNOWN";
    return known ? kOk : kUnknown;
}

int run_member(const Params& p, json& out) {
    out = report(p, "membership");
    out["ideal"] = p.ideal;
    Decision d;
    if (p.ideal == "I_alpha") {
        auto v = parse_tree_expr(p.set);
        auto alpha = parse_ordinal(p.alpha);
        d = v.finite ? I_alpha_member(*v.finite, alpha) : I_alpha_member(v.lazy, alpha, p.depth);
    } else if (p.ideal == "I_wf") {
        auto v = parse_tree_expr(p.set);
        if (v.finite) {
            d.verdict = Verdict::In;
            d.certificate["rank"] = std::to_string(rank_finite(*v.finite));
        } else if (v.lazy.well_founded_by_construction()) {
            d.verdict = Verdict::In;
            d.certificate["construction"] = v.lazy.describe();
        } else {
            auto probe = wf_probe(v.lazy, p.depth);
            d.verdict = Verdict::Unknown;
            d.certificate["max_chain_length"] = std::to_string(probe.max_chain_length);
            d.certificate["path_suspect"] = probe.path_suspect ? "true" : "false";
        }
    } else if (p.ideal == "NWD") {
        auto closed = image_in_nwd(parse_pair_set(p.set));
        auto probe = nwd_probe(closed, p.d, p.big_d);
        const bool ok = probe.certified && verify_nwd_certificate(closed, probe);
        out["outcome"] = ok ? "IN" : "UNKNOWN";
        out["verdict"] = out["outcome"];
        json esc = json::object();
        for (const auto& [s, t] : probe.escapes) {
            esc[s.str()] = t.str();
        }
        out["certificate"] = {{"dense_depth", p.d}, {"escape_depth", p.big_d}, {"escapes", esc}};
        if (probe.failure) {
            out["certificate"]["no_escape_from"] = probe.failure->str();
        }
        if (!probe.closure_violations.empty()) {
            out["certificate"]["closure_violations"] = strings(probe.closure_violations);
        }
        return ok ? kOk : kUnknown;
    } else {
        auto oracle = omega_oracle(p.ideal, p);
        d = oracle.decide(parse_structured_set(oracle.carrier, p.set));
    }
    auto dj = decision_json(d);
    out["outcome"] = dj["verdict"];
    out["verdict"] = dj["verdict"];
    out["certificate"] = dj["certificate"];
    return d.decided() ? kOk : kUnknown;
}

json tree_summary(const BoundedPreimage& b) {
    json j;
    j["depth"] = b.depth;
    j["cut"] = b.cut;
    j["nodes"] = b.tree.size();
    j["rank"] = rank_finite(b.tree);
    if (b.tree.size() <= 64) {
        j["elements"] = strings(b.tree);
    }
    return j;
}

int run_reduce(const Params& p, json& out) {
    out = report(p, "reduction");
    out["outcome"] = "COMPUTED";
    if (p.map == "universal") {
        auto x = parse_omega_set(p.set);
        if (!x.is_finite()) {
            throw UsageError("the universal reduction is evaluated on finite sets");
        }
        auto f = universal_reduction(named_submeasure(p, p.pi), p.length);
        auto xs = LscSubmeasure::as_set(x);
        auto pre = f.preimage(xs);
        auto tilde = f.phi_max(pre);
        json list = json::array();
        for (const auto& s : pre) {
            list.push_back(to_string(s));
        }
        auto pi_x = f.pi()(xs);
        out["branch"] = to_string(f.alpha());
        out["preimage"] = list;
        out["phi_max"] = to_string(tilde.value);
        out["pi"] = to_string(pi_x);
        out["identity_holds"] = tilde.value == pi_x;
        if (tilde.witness) {
            out["attained_at"] = to_string(*tilde.witness);
        }
        return tilde.value == pi_x ? kOk : kFound;
    }
    if (string_valued(p.map)) {
        auto f = string_map(p);
        auto target = parse_string_set(p.set);
        out["preimage"] = tree_summary(preimage_levels<BitString>(
            f, [&](const BitString& v) { return target.contains(v); }, p.depth, p.budget));
        return kOk;
    }
    auto f = omega_map(p);
    auto x = parse_omega_set(p.set);
    if (f.preimage_exact) {
        if (auto exact = f.preimage_exact(x)) {
            out["exact_preimage"] = std::visit(
                [](const auto& s) -> std::string {
                    if constexpr (std::is_same_v<std::decay_t<decltype(s)>, PairSet>) {
                        return "pair set";
                    } else {
                        return s.describe();
                    }
                },
                *exact);
        }
    }
    out["preimage"] = tree_summary(
        preimage_levels<std::uint64_t>(f, [&](const std::uint64_t& v) { return x.contains(v); }, p.depth, p.budget));
    return kOk;
}

int run_wrk(const Params& p, json& out) {
    out = report(p, "wrk");
    std::vector<std::pair<std::string, StructuredSet>> samples;
    for (const auto& text : p.sets) {
        samples.emplace_back(text, parse_omega_set(text));
    }
    SampleGenerator gen(p.seed);
    for (std::size_t i = 0; i < p.samples; ++i) {
        auto [text, x] = gen.omega_set();
        samples.emplace_back(text, x);
    }
    WrkReport r;
    if (p.map == "lcp" || p.map == "lcp-unshifted") {
        r = wrk_verify(omega_map(p), finite_on_oracle(parse_omega_set(p.a)), lcp_oracle(), samples);
    } else if (p.map == "identity" || p.map == "constant") {
        auto f = p.map == "identity" ? identity_map() : constant_map(p.value);
        r = wrk_verify(f, omega_oracle(p.codomain_ideal, p), omega_oracle(p.domain_ideal, p), samples);
    } else {
        throw UsageError("verify --map takes lcp, lcp-unshifted, identity or constant");
    }
    out["map"] = r.map_id;
    out["codomain_ideal"] = r.codomain_ideal;
    out["domain_ideal"] = r.domain_ideal;
    json list = json::array();
    for (const auto& s : r.samples) {
        json e;
        e["sample"] = s.sample;
        e["status"] = to_string(s.status);
        e["codomain_side"] = decision_json(s.codomain_side);
        e["domain_side"] = decision_json(s.domain_side);
        if (!s.note.empty()) {
            e["note"] = s.note;
        }
        list.push_back(e);
    }
    const auto violations = r.count(SampleStatus::Violation), inconclusive = r.count(SampleStatus::Inconclusive);
    out["counts"] = {{"CONSISTENT", r.count(SampleStatus::Consistent)}, {"VIOLATION", violations}, {"INCONCLUSIVE", inconclusive}};
    out["samples"] = list;
    out["outcome"] = violations ? "VIOLATION" : inconclusive ? "INCONCLUSIVE" : "CONSISTENT";
    return violations ? kFound : inconclusive ? kUnknown : kOk;
}

int run_refute(const Params& p, json& out) {
    out = report(p, "refutation");
    out["claim"] = p.claim;
    RefuteOutcome outcome;
    json cert;
    std::string witness;
    if (p.claim == "ell1-to-Iomega") {
        auto r = refute_ell1_to_Iomega(omega_map(p), p.n, p.depth, p.budget);
        outcome = r.outcome;
        cert["kind"] = r.kind;
        cert["weight"] = to_string(r.weight);
        if (r.stalled_at) {
            cert["stalled_at"] = *r.stalled_at;
        }
        json rounds = json::array();
        for (const auto& round : r.rounds) {
            rounds.push_back({{"n", round.n}, {"values", round.values}, {"rank", round.rank}, {"preimage", strings(round.preimage)}});
        }
        cert["rounds"] = rounds;
        cert["witness"] = r.witness;
        if (outcome == RefuteOutcome::Witness) {
            witness = r.witness_text();
        }
        out["depth_reached"] = r.depth;
    } else if (p.claim == "ell1-to-Iwf") {
        std::optional<InfiniteSequence> y;
        if (!p.y.empty()) {
            y = InfiniteSequence::parse(p.y);
        }
        auto r = refute_ell1_to_Iwf(omega_map(p), y, p.depth, p.terms, p.budget);
        outcome = r.outcome;
        cert["k"] = r.k;
        cert["t"] = strings(r.t);
        cert["path_prefix"] = r.path_prefix.str();
        cert["weight"] = to_string(r.weight);
        if (outcome == RefuteOutcome::Witness) {
            witness = r.witness_text();
        }
        out["depth_reached"] = r.depth;
    } else if (p.claim == "Iomega-to-Iwf") {
        auto r = refute_Iomega_to_Iwf(string_map(p), p.depth, p.terms, p.budget);
        outcome = r.outcome;
        cert["t"] = strings(r.t);
        json ki = json::array();
        for (auto [k, i] : r.ki) {
            ki.push_back({k, i});
        }
        cert["ki"] = ki;
        cert["antichain"] = strings(r.antichain());
        if (outcome == RefuteOutcome::Witness) {
            witness = r.witness_text();
        }
        out["depth_reached"] = r.depth;
    } else {
        throw UsageError("unknown claim '" + p.claim + "' (ell1-to-Iomega, ell1-to-Iwf, Iomega-to-Iwf)");
    }
    out["outcome"] = to_string(outcome);
    if (!witness.empty()) {
        out["witness"] = witness;
    }
    out["certificates"] = cert;
    return outcome == RefuteOutcome::Witness ? kFound : kUnknown;
}

int run_submeasure(const Params& p, json& out) {
    out = report(p, "submeasure");
    const auto& sub = p.sub;
    if (sub == "phi_s") {
        auto s = parse_omega_string(p.s);
        auto& coding = default_coding();
        out["sequence"] = to_string(s);
        out["valid_code"] = coding.valid_code(s);
        out["table"] = table_to_json(coding.phi(s)->table());
        out["outcome"] = "COMPUTED";
        return kOk;
    }
    if (sub == "phi_tilde") {
        std::set<OmegaString> f;
        std::stringstream in(p.family);
        for (std::string part; std::getline(in, part, ';');) {
            f.insert(parse_omega_string(part));
        }
        auto t = phi_tilde(f);
        out["value"] = to_string(t.value);
        if (t.witness) {
            out["attained_at"] = to_string(*t.witness);
        }
        out["outcome"] = "COMPUTED";
        return kOk;
    }
    if (p.table.is_null()) {
        throw UsageError("submeasure " + sub + " needs --table");
    }
    auto psi = table_from_json(p.table);
    if (auto v = psi.validate(p.seed)) {
        out["outcome"] = "VIOLATION";
        out["violation"] = {{"axiom", v->axiom}, {"a", mask_text(v->a)}, {"b", mask_text(v->b)}, {"detail", v->describe()}};
        return kFound;
    }
    if (sub == "validate") {
        out["outcome"] = "VALID";
        return kOk;
    }
    auto p1 = pi1(psi);
    if (sub == "pi1") {
        out["outcome"] = "COMPUTED";
        out["pi1"] = table_to_json(p1);
        return kOk;
    }
    if (sub == "pi2") {
        out["pi1"] = table_to_json(p1);
        if (p.mask) {
            if (*p.mask > psi.full()) {
                throw UsageError("--mask exceeds the carrier");
            }
            auto cert = pi2_value(p1, *p.mask);
            out["mask"] = *p.mask;
            out["set"] = mask_text(*p.mask);
            out["pi2"] = to_string(cert.value);
            json blocks = json::array();
            for (auto b : cert.blocks) {
                blocks.push_back(b);
            }
            out["blocks"] = blocks;
            out["search_nodes"] = cert.nodes;
            const bool ok = verify_pi2_certificate(p1, *p.mask, cert);
            out["outcome"] = ok ? "COMPUTED" : "VIOLATION";
            return ok ? kOk : kFound;
        }
        if (psi.carrier_size() > 12) {
            throw UsageError("full pi2 tables need a carrier of at most 12 points; pass --mask");
        }
        auto p2 = pi2(p1);
        out["pi2"] = table_to_json(p2.table());
        out["equals_pi1"] = p2.table() == p1;
        bool sandwich = true;
        for (Mask m = 0; m <= psi.full(); ++m) {
            const auto& lo = psi[m];
            const auto& hi = p2(m);
            // psi <= pi2 < 2 psi, with 0 = 0 on the empty set
            if (m == 0) {
                sandwich = sandwich && hi == ExtRational(0);
            } else if (lo.is_infinite() || hi.is_infinite()) {
                sandwich = sandwich && lo.is_infinite() && hi.is_infinite();
            } else {
                sandwich = sandwich && lo.value() <= hi.value() && (lo.value() == 0 ? hi.value() == 0 : hi.value() < 2 * lo.value());
            }
        }
        out["sandwich_holds"] = sandwich;
        out["outcome"] = sandwich ? "COMPUTED" : "VIOLATION";
        return sandwich ? kOk : kFound;
    }
    if (sub == "encode") {
        Submeasure whole(psi);
        OmegaString code;
        Submeasure prev;
        for (std::size_t k = 1; k <= psi.carrier_size(); ++k) {
            Submeasure next(psi.restrict_to(k));
            code.push_back(encode_extension(prev, next));
            prev = next;
        }
        out["sequence"] = to_string(code);
        out["decodes_back"] = code.empty() || default_coding().phi(code)->table() == psi;
        out["outcome"] = "COMPUTED";
        return kOk;
    }
    throw UsageError("unknown submeasure operation '" + sub + "' (validate, pi1, pi2, phi_s, phi_tilde, encode)");
}

int run_exh(const Params& p, json& out) {
    out = report(p, "exh");
    auto phi = named_submeasure(p, p.phi);
    auto x = parse_omega_set(p.set);
    auto probe = exh_probe(phi, x, parse_rational(p.eps), p.horizon);
    auto member = exh_member(phi, x);
    out["submeasure"] = phi.label;
    out["probe"] = to_string(probe.verdict);
    out["membership"] = to_string(member);
    json cert = json::object();
    if (probe.verdict == ExhVerdict::In) {
        cert["F"] = probe.f;
        cert["tail_upper"] = to_string(*probe.tail_upper);
    }
    if (probe.lower) {
        cert["tail_lower"] = to_string(*probe.lower);
    }
    out["certificate"] = cert;
    out["outcome"] = to_string(member);
    return member == ExhVerdict::Unknown ? kUnknown : kOk;
}

int run_report(const Params& p, json& out) {
    out = report(p, "summary");
    auto x = parse_omega_set(p.set);
    out["set"] = x.describe();
    json ideals;
    for (const char* name : {"l1", "Z0", "fin", "J_A"}) {
        ideals[name] = decision_json(omega_oracle(name, p).decide(x));
    }
    out["ideals"] = ideals;
    json exh;
    for (const char* name : {"l1", "dyadic", "card"}) {
        exh[name] = to_string(exh_member(named_submeasure(p, name), x));
    }
    out["exh"] = exh;
    out["outcome"] = "COMPUTED";
    return kOk;
}

int dispatch(const Params& p, json& out);

// ---------------------------------------------------------------------------------------------
// certificate checks that do not trust the re-run

std::optional<std::string> independent_check(const json& cert) {
    const auto kind = cert.at("kind").get<std::string>();
    const auto p = Params::from_json(cert.at("request"));
    if (kind == "refutation" && cert.at("outcome") == "WITNESS") {
        const auto& c = cert.at("certificates");
        bool ok = false;
        if (p.claim == "ell1-to-Iomega") {
            Ell1IomegaResult r;
            r.outcome = RefuteOutcome::Witness;
            r.kind = c.at("kind").get<std::string>();
            r.witness = c.at("witness").get<std::set<std::uint64_t>>();
            for (const auto& round : c.at("rounds")) {
                Ell1IomegaRound rr;
                rr.n = round.at("n").get<std::uint64_t>();
                rr.values = round.at("values").get<std::vector<std::uint64_t>>();
                rr.rank = round.at("rank").get<std::uint64_t>();
                for (const auto& s : round.at("preimage")) {
                    rr.preimage.insert(BitString(s.get<std::string>()));
                }
                r.rounds.push_back(std::move(rr));
            }
            ok = verify_ell1_to_Iomega(omega_map(p), r);
        } else if (p.claim == "ell1-to-Iwf") {
            Ell1IwfResult r;
            r.outcome = RefuteOutcome::Witness;
            r.k = c.at("k").get<std::vector<std::uint64_t>>();
            for (const auto& s : c.at("t")) {
                r.t.emplace_back(s.get<std::string>());
            }
            r.path_prefix = BitString(c.at("path_prefix").get<std::string>());
            ok = verify_ell1_to_Iwf(omega_map(p), r);
        } else if (p.claim == "Iomega-to-Iwf") {
            IomegaIwfResult r;
            r.outcome = RefuteOutcome::Witness;
            for (const auto& s : c.at("t")) {
                r.t.emplace_back(s.get<std::string>());
            }
            for (const auto& ki : c.at("ki")) {
                r.ki.emplace_back(ki.at(0).get<std::uint64_t>(), ki.at(1).get<std::uint64_t>());
            }
            ok = verify_Iomega_to_Iwf(string_map(p), r);
        }
        return ok ? std::nullopt : std::optional<std::string>("refutation certificate does not re-verify");
    }
    if (kind == "membership" && p.ideal == "NWD" && cert.at("outcome") == "IN") {
        NwdProbeResult r;
        r.certified = true;
        r.dense_depth = p.d;
        r.escape_depth = p.big_d;
        for (const auto& [s, t] : cert.at("certificate").at("escapes").items()) {
            r.escapes.emplace(BitString(s), BitString(t.get<std::string>()));
        }
        if (!verify_nwd_certificate(image_in_nwd(parse_pair_set(p.set)), r)) {
            return "escape certificate does not re-verify";
        }
    }
    if (kind == "submeasure" && p.sub == "pi2" && p.mask && cert.contains("blocks")) {
        Pi2Certificate c;
        c.value = parse_ext_rational(cert.at("pi2").get<std::string>());
        for (const auto& b : cert.at("blocks")) {
            c.blocks.push_back(b.get<Mask>());
        }
        if (!verify_pi2_certificate(pi1(table_from_json(p.table)), *p.mask, c)) {
            return "pi2 partition does not re-verify";
        }
    }
    return std::nullopt;
}

int run_verify(const Params& p, const std::string& certificate_path, json& out) {
    if (certificate_path.empty()) {
        return run_wrk(p, out);
    }
    auto cert = load_json_file(certificate_path);
    out = json::object();
    out["schema"] = kSchema;
    out["kind"] = "verification";
    out["certificate"] = certificate_path;
    if (!cert.is_object() || cert.value("schema", "") != kSchema || !cert.contains("request")) {
        out["outcome"] = "INVALID";
        out["reason"] = "not a wfi report";
        return kFound;
    }
    out["certificate_kind"] = cert.at("kind");
    auto problem = independent_check(cert);
    json rerun;
    dispatch(Params::from_json(cert.at("request")), rerun);
    if (!problem && rerun != cert) {
        problem = "re-running the request gives a different report";
    }
    out["outcome"] = problem ? "INVALID" : "VALID";
    if (problem) {
        out["reason"] = *problem;
    }
    return problem ? kFound : kOk;
}

int dispatch(const Params& p, json& out) {
    if (p.verb == "rank") {
        return run_rank(p, out);
    }
    if (p.verb == "member") {
        return run_member(p, out);
    }
    if (p.verb == "reduce") {
        return run_reduce(p, out);
    }
    if (p.verb == "verify") {
        return run_wrk(p, out);
    }
    if (p.verb == "refute") {
        return run_refute(p, out);
    }
    if (p.verb == "submeasure") {
        return run_submeasure(p, out);
    }
    if (p.verb == "exh") {
        return run_exh(p, out);
    }
    if (p.verb == "report") {
        return run_report(p, out);
    }
    throw UsageError("unknown verb '" + p.verb + "'");
}

// ---------------------------------------------------------------------------------------------
// output

std::string scalar_text(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

void flatten(const json& v, const std::string& path, std::vector<std::pair<std::string, std::string>>& rows) {
    if (v.is_object() && !v.empty()) {
        for (const auto& [k, x] : v.items()) {
            flatten(x, path.empty() ? k : path + "." + k, rows);
        }
    } else if (v.is_array() && !v.empty() && (v.front().is_object() || v.front().is_array())) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            flatten(v[i], path + "." + std::to_string(i), rows);
        }
    } else {
        rows.emplace_back(path, scalar_text(v));
    }
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string q = "\"";
    for (char c : s) {
        q += c == '"' ? std::string("\"\"") : std::string(1, c);
    }
    return q + "\"";
}

std::string render(const json& j, const std::string& format) {
    if (format == "json") {
        return j.dump(2) + "\n";
    }
    std::vector<std::pair<std::string, std::string>> rows;
    flatten(j, "", rows);
    std::string s = format == "csv" ? "key,value\n" : "";
    for (const auto& [k, v] : rows) {
        s += format == "csv" ? csv_field(k) + "," + csv_field(v) + "\n" : k + ": " + v + "\n";
    }
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wfi: ranks, ideal memberships, reductions, refuters and submeasures"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    Params p;
    std::string format = "json", out_path, table_path, certificate_path;
    std::optional<std::size_t> depth;
    std::optional<std::uint64_t> mask;

    auto common = [&](CLI::App* c) {
        c->add_option("--depth", depth, "depth bound (default: $WFI_DEFAULT_DEPTH or 24)");
        c->add_option("--seed", p.seed, "sampling seed");
        c->add_option("--format", format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
        c->add_option("--out", out_path, "write the report here instead of stdout");
    };

    auto* rank = app.add_subcommand("rank", "rank of a tree expression");
    rank->add_option("--tree", p.tree, "tree expression")->required();

    auto* member = app.add_subcommand("member", "decide membership in an ideal");
    member->add_option("--ideal", p.ideal, "l1, Z0, fin, J_A, I_*, 0xFin, I_alpha, I_wf or NWD")->required();
    member->add_option("--set", p.set, "DSL set or tree expression")->required();
    member->add_option("--A", p.a, "the set A for J_A");
    member->add_option("--alpha", p.alpha, "ordinal for I_alpha");
    member->add_option("--d", p.d, "NWD dense depth");
    member->add_option("--D", p.big_d, "NWD escape depth");

    auto* reduce = app.add_subcommand("reduce", "preimage of a set under a reduction map");
    reduce->add_option("--map", p.map, "lcp, lcp-unshifted, rank-boosting, fixture1-3, constant, antichain, universal")->required();
    reduce->add_option("--set", p.set, "DSL set in the codomain")->required();

    auto* verify = app.add_subcommand("verify", "re-validate a certificate, or check a wRK reduction on samples");
    verify->add_option("--certificate", certificate_path, "a report written by this tool");
    verify->add_option("--map", p.map, "lcp, lcp-unshifted, identity or constant");
    verify->add_option("--set", p.sets, "explicit sample sets (repeatable)");
    verify->add_option("--samples", p.samples, "number of random DSL samples");
    verify->add_option("--codomain-ideal", p.codomain_ideal, "ideal on the codomain (identity/constant)");
    verify->add_option("--domain-ideal", p.domain_ideal, "ideal on the domain (identity/constant)");

    auto* refute = app.add_subcommand("refute", "search for a witness against a claimed reduction");
    refute->add_option("--claim", p.claim, "ell1-to-Iomega, ell1-to-Iwf or Iomega-to-Iwf")->required();
    refute->add_option("--map", p.map, "map id")->required();
    refute->add_option("--n", p.n, "rounds for ell1-to-Iomega");
    refute->add_option("--terms", p.terms, "least witness length for the chain refuters");
    refute->add_option("--y", p.y, "path for ell1-to-Iwf, e.g. (0) or 1(01)");
    refute->add_option("--budget", p.budget, "node budget per level");

    auto* submeasure = app.add_subcommand("submeasure", "submeasure tables: validate, pi1, pi2, phi_s, phi_tilde, encode");
    submeasure->add_option("op", p.sub, "operation")->required();
    submeasure->add_option("--table", table_path, "JSON table {carrier, values: {mask: \"p/q\"}}");
    submeasure->add_option("--mask", mask, "a single subset for pi2");
    submeasure->add_option("--s", p.s, "comma-separated code sequence for phi_s");
    submeasure->add_option("--F", p.family, "semicolon-separated code sequences for phi_tilde");

    auto* exh = app.add_subcommand("exh", "membership in Exh(phi)");
    exh->add_option("--phi", p.phi, "l1, dyadic, card, zero, block or block-pi2");
    exh->add_option("--set", p.set, "DSL set")->required();
    exh->add_option("--eps", p.eps, "tail threshold");
    exh->add_option("--horizon", p.horizon, "largest initial segment tried");
    exh->add_option("--table", table_path, "base table for block submeasures");
    exh->add_option("--scale", p.scale, "constant or dyadic block coefficients");

    auto* summary = app.add_subcommand("report", "a set against every ideal on naturals");
    summary->add_option("--set", p.set, "DSL set")->required();
    summary->add_option("--A", p.a, "the set A for J_A");

    for (auto* c : {reduce, refute}) {
        c->add_option("--A", p.a, "the set A for lcp maps");
        c->add_option("--alpha", p.alpha, "ordinal for the rank-boosting map");
        c->add_option("--value", p.value, "value of the constant map");
        c->add_option("--pi", p.pi, "base submeasure for the universal map");
        c->add_option("--length", p.length, "computed branch length for the universal map");
    }
    verify->add_option("--A", p.a, "the set A for lcp maps");
    verify->add_option("--value", p.value, "value of the constant map");
    for (auto* c : {rank, member, reduce, verify, refute, submeasure, exh, summary}) {
        common(c);
    }

    int code = kOk;
    try {
        app.parse(argc, argv);
        p.verb = app.get_subcommands().front()->get_name();
        p.depth = depth ? *depth : default_depth();
        if (mask) {
            p.mask = static_cast<Mask>(*mask);
        }
        if (!table_path.empty()) {
            p.table = load_json_file(table_path);
        }
        json out;
        code = p.verb == "verify" ? run_verify(p, certificate_path, out) : dispatch(p, out);
        auto text = render(out, format);
        if (out_path.empty()) {
            std::cout << text;
        } else {
            std::ofstream f(out_path);
            if (!f) {
                throw UsageError("cannot write " + out_path);
            }
            f << text;
        }
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    } catch (const dsl::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kUsage;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const SubmeasureError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFound;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const json::exception& e) {
        std::cerr << "error: malformed certificate: " << e.what() << "\n";
        return kUsage;
    }
    return code;
}
