// Experiment driver: one JSON run specification in, one canonical JSON report out.

#include <wfl/checks.hpp>
#include <wfl/counting.hpp>
#include <wfl/densities.hpp>
#include <wfl/polygon.hpp>
#include <wfl/singular_locus.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <sys/resource.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#ifndef WFL_VERSION
#define WFL_VERSION "0.0.0"
#endif

using json = nlohmann::json;
using namespace wfl;

namespace {

enum ExitCode { kOk = 0, kAssertion = 1, kSchema = 2, kBudget = 3 };

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- schema

enum class Kind { Uint, Uints, BigInt, Rational, Bool, Choice };

struct Param {
    std::string name;
    Kind kind;
    bool required;
    json fallback;  // null: optional with no default
    std::string help;
    std::vector<std::string> choices = {};
};

struct Experiment {
    std::string name, help;
    std::vector<Param> params;
};

Param req(std::string n, std::string h) { return {std::move(n), Kind::Uint, true, nullptr, std::move(h)}; }
Param opt(std::string n, Kind k, json d, std::string h) { return {std::move(n), k, false, std::move(d), std::move(h)}; }

const std::vector<Experiment>& experiments() {
    static const std::vector<Experiment> all = {
        {"count", "N(f) for every f of degree <= ke",
         {req("q", "field size"), req("k", "exponent"), req("s", "number of summands"), req("e", "degree bound on the a_i"),
          opt("f", Kind::Uints, nullptr, "coefficient indices of one f, constant first"),
          {"method", Kind::Choice, false, "convolution", "convolution, bruteforce or both", {"convolution", "bruteforce", "both"}}}},
        {"circle-verify", "brute-force counts against the character-sum formula, every f",
         {req("q", "field size"), req("k", "exponent"), req("s", "number of summands"), req("e", "degree bound")}},
        {"arcs", "major/minor classification of all alpha, plus optional local-sum checks",
         {req("q", "field size"), req("k", "exponent"), req("e", "degree bound"),
          opt("local_table", Kind::Bool, false, "check the local sums at places of degree <= 2"),
          opt("multiplicativity_trials", Kind::Uint, 0, "random splittings Z = Z1 + Z2 to check"),
          opt("major_check", Kind::Bool, false, "compare S_1 with q^{e+1} S_Z on every major alpha")}},
        {"local-density", "l_v(f) by the recursion and by enumeration",
         {req("q", "field size"), req("k", "exponent"), req("s", "number of summands"),
          opt("place", Kind::Uints, nullptr, "monic irreducible pi, coefficient indices constant first; omit for infinity"),
          opt("f", Kind::Uints, json::array({1}), "coefficient indices of f"), opt("e", Kind::Uint, 0, "degree bound (places f at infinity)"),
          opt("r_cap", Kind::Uint, 6, "largest r for the enumeration")}},
        {"singular-series", "truncated product of local densities with a certified tail",
         {req("q", "field size"), req("k", "exponent"), req("s", "number of summands"), req("e", "degree bound"),
          opt("f", Kind::Uints, json::array({1}), "coefficient indices of f"), opt("D", Kind::Uint, 4, "places of degree <= D")}},
        {"sing-dim", "dimension of the singular locus for given or random alpha",
         {req("q", "field size"), req("k", "exponent"), req("e", "degree bound"), opt("alpha", Kind::Uints, nullptr, "coordinates of alpha"),
          opt("samples", Kind::Uint, 20, "random alpha when none is given"), opt("m_max", Kind::Uint, 3, "largest extension degree counted")}},
        {"katz-check", "|S_1(alpha)| against 3(k+1)^{e+1} q^{(e+1+dim)/2} for every alpha",
         {req("q", "field size"), req("k", "exponent"), req("e", "degree bound"), opt("m_max", Kind::Uint, 3, "largest extension degree counted")}},
        {"manin", "degree-e maps from P^1 to the Fermat hypersurface",
         {req("q", "field size"), req("n", "projective dimension"), req("d", "degree"), req("e", "map degree"),
          opt("D", Kind::Uint, 4, "places of degree <= D in the main term"), opt("direct", Kind::Bool, true, "also count by listing tuples")}},
        {"gamma", "the polygon and gamma_{k,p}", {req("k", "exponent"), req("p", "characteristic")}},
        {"thresholds", "q, s, theta and delta thresholds",
         {req("k", "exponent"), req("p", "characteristic"), {"q", Kind::BigInt, true, nullptr, "field size"},
          opt("s", Kind::Uint, nullptr, "number of summands")}},
        {"appendix", "inequality system for a general hypersurface",
         {req("n", "projective dimension"), req("d", "degree"), req("g", "genus"), opt("delta", Kind::Rational, "1/10", "saving exponent"),
          opt("e_min", Kind::Uint, 1, "first e"), opt("e_max", Kind::Uint, 300, "last e"), opt("grid_e_max", Kind::Uint, 8, "largest e in the case grid"),
          opt("witness_max", Kind::Uint, 15, "witness triples in [0, witness_max]^3"), opt("slack", Kind::Rational, "0", "allowance on each derived constant")}},
        {"convergence", "max_f |N(f)/MainTerm(f) - 1| by degree",
         {req("q", "field size"), req("k", "exponent"), req("s", "number of summands"), opt("e_min", Kind::Uint, 1, "first e"),
          opt("e_max", Kind::Uint, 4, "last e"), opt("D", Kind::Uint, 6, "places of degree <= D")}},
    };
    return all;
}

const Experiment& find_experiment(const std::string& name) {
    for (const auto& ex : experiments())
        if (ex.name == name) return ex;
    throw SchemaError("unknown experiment '" + name + "'");
}

const char* kind_name(Kind k) {
    switch (k) {
        case Kind::Uint: return "unsigned integer";
        case Kind::Uints: return "array of unsigned integers";
        case Kind::BigInt: return "unsigned integer or decimal string";
        case Kind::Rational: return "rational string such as \"1/10\"";
        case Kind::Bool: return "boolean";
        case Kind::Choice: return "string";
    }
    return "";
}

void check_kind(const Param& p, const json& v) {
    auto bad = [&] { throw SchemaError("parameter '" + p.name + "' must be " + kind_name(p.kind)); };
    switch (p.kind) {
        case Kind::Uint:
            if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) bad();
            break;
        case Kind::Uints:
            if (!v.is_array()) bad();
            for (const auto& x : v)
                if (!x.is_number_unsigned() && !(x.is_number_integer() && x.get<long long>() >= 0)) bad();
            break;
        case Kind::BigInt:
            if (v.is_string()) {
                const auto s = v.get<std::string>();
                if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) bad();
            } else if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
                bad();
            }
            break;
        case Kind::Rational:
            if (v.is_number_integer()) break;
            if (!v.is_string()) bad();
            try {
                parse_rational(v.get<std::string>());
            } catch (const std::exception&) {
                bad();
            }
            break;
        case Kind::Bool:
            if (!v.is_boolean()) bad();
            break;
        case Kind::Choice:
            if (!v.is_string() || std::find(p.choices.begin(), p.choices.end(), v.get<std::string>()) == p.choices.end()) bad();
            break;
    }
}

struct Budgets {
    std::uint64_t memory = kDefaultMemoryBudget;
    std::uint64_t oracle = kDefaultOracleBudget;
    double seconds = 0;  // 0: unlimited
};

/// Validates and fills defaults. The result is what the report embeds.
json normalize(const json& spec) {
    if (!spec.is_object()) throw SchemaError("run specification must be a JSON object");
    static const std::vector<std::string> top = {"experiment", "params", "budgets", "seed", "output", "csv"};
    for (const auto& [key, _] : spec.items())
        if (std::find(top.begin(), top.end(), key) == top.end()) throw SchemaError("unknown field '" + key + "'");
    if (!spec.contains("experiment") || !spec["experiment"].is_string()) throw SchemaError("'experiment' must be a string");
    const Experiment& ex = find_experiment(spec["experiment"]);
    json out = json::object();
    out["experiment"] = ex.name;

    json params = spec.value("params", json::object());
    if (!params.is_object()) throw SchemaError("'params' must be an object");
    for (const auto& [key, _] : params.items())
        if (std::none_of(ex.params.begin(), ex.params.end(), [&](const Param& p) { return p.name == key; }))
            throw SchemaError("unknown parameter '" + key + "' for " + ex.name);
    json filled = json::object();
    for (const auto& p : ex.params) {
        if (params.contains(p.name)) {
            check_kind(p, params[p.name]);
            filled[p.name] = params[p.name];
        } else if (p.required) {
            throw SchemaError("missing parameter '" + p.name + "' for " + ex.name);
        } else if (!p.fallback.is_null()) {
            filled[p.name] = p.fallback;
        }
    }
    out["params"] = filled;

    json budgets = spec.value("budgets", json::object());
    if (!budgets.is_object()) throw SchemaError("'budgets' must be an object");
    Budgets def;
    json b = {{"memory_bytes", def.memory}, {"oracle", def.oracle}, {"seconds", def.seconds}};
    for (const auto& [key, v] : budgets.items()) {
        if (!b.contains(key)) throw SchemaError("unknown budget '" + key + "'");
        if (!v.is_number() || v.get<double>() < 0) throw SchemaError("budget '" + key + "' must be a nonnegative number");
        b[key] = v;
    }
    out["budgets"] = b;

    json seed = spec.value("seed", json(0));
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0)) throw SchemaError("'seed' must be an unsigned integer");
    out["seed"] = seed;
    for (const char* key : {"output", "csv"})
        if (spec.contains(key)) {
            if (!spec[key].is_string()) throw SchemaError(std::string("'") + key + "' must be a string");
            out[key] = spec[key];
        }
    return out;
}

json schema_document() {
    json doc = json::object();
    for (const auto& ex : experiments()) {
        json ps = json::object();
        for (const auto& p : ex.params) {
            json d = {{"type", kind_name(p.kind)}, {"required", p.required}, {"help", p.help}};
            if (!p.fallback.is_null()) d["default"] = p.fallback;
            if (!p.choices.empty()) d["choices"] = p.choices;
            ps[p.name] = d;
        }
        doc["experiments"][ex.name] = {{"help", ex.help}, {"params", ps}};
    }
    doc["fields"] = {{"experiment", "experiment name (required)"},
                     {"params", "object of experiment parameters"},
                     {"budgets", "object: memory_bytes, oracle (enumeration size), seconds (0 = none)"},
                     {"seed", "unsigned integer seeding std::mt19937_64"},
                     {"output", "report path; stdout when absent"},
                     {"csv", "optional table path"}};
    return doc;
}

// ---------------------------------------------------------------- experiment plumbing

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

struct Outcome {
    json result = json::object();
    std::vector<std::pair<std::string, bool>> assertions;
    json witness;  // smallest failing item, when an assertion fails
    Table table;

    void check(const std::string& name, bool ok) { assertions.emplace_back(name, ok); }
    bool passed() const {
        return std::all_of(assertions.begin(), assertions.end(), [](const auto& a) { return a.second; });
    }
};

struct Context {
    json params;
    Budgets budgets;
    std::mt19937_64 rng;

    unsigned u(const char* key) const { return params.at(key).get<unsigned>(); }
    bool has(const char* key) const { return params.contains(key); }
    std::vector<std::uint32_t> list(const char* key) const { return params.at(key).get<std::vector<std::uint32_t>>(); }
    Rational rational(const char* key) const {
        const auto& v = params.at(key);
        return v.is_string() ? parse_rational(v.get<std::string>()) : Rational(v.get<long long>());
    }
    Int bigint(const char* key) const {
        const auto& v = params.at(key);
        return v.is_string() ? Int(v.get<std::string>()) : Int(v.get<unsigned long long>());
    }
    const Field& field() const {
        const auto q = params.at("q").get<unsigned long long>();
        if (q > kMaxFieldSize) throw std::invalid_argument("field size too large");
        return Field::of_size(static_cast<std::uint32_t>(q));
    }
};

std::string str(const Rational& r) { return to_string(r); }
std::string str(const Int& v) { return v.str(); }
std::string str(u128 v) { return to_string(v); }

json interval_json(const Interval& iv) {
    json j = {{"lo", str(iv.lo)}, {"lo_approx", to_double(iv.lo)}};
    if (iv.hi) {
        j["hi"] = str(*iv.hi);
        j["hi_approx"] = to_double(*iv.hi);
    } else {
        j["hi"] = nullptr;
    }
    return j;
}

json density_json(const LocalDensity& d) {
    json j = {{"value", str(d.value)}, {"approx", to_double(d.value)}, {"flagged", d.flagged},
              {"method", d.method == LocalDensity::Method::Recursion ? "recursion" : "enumeration"}};
    j["stabilized_at"] = d.stabilized_at ? json(*d.stabilized_at) : json(nullptr);
    j["valuation"] = d.valuation ? json(*d.valuation) : json(nullptr);
    return j;
}

// ---------------------------------------------------------------- experiments

Outcome run_count(Context& c) {
    const Field& F = c.field();
    const unsigned k = c.u("k"), s = c.u("s"), e = c.u("e");
    const std::string method = c.params.at("method");
    Outcome o;
    WaringInstance inst{&F, k, s, e, Poly(F)};
    inst.validate();
    o.result["outside_asymptotic_range"] = inst.warning();
    std::optional<GroupFn> conv, brute;
    if (method != "bruteforce") conv = count_all(F, k, s, e, c.budgets.memory);
    if (method != "convolution") brute = count_bruteforce_all(F, k, s, e, c.budgets.oracle);
    const GroupFn& N = conv ? *conv : *brute;
    Int total = 0;
    for (auto v : N.values) total += from_u128(v);
    o.result["group_size"] = N.size();
    o.result["total"] = str(total);
    o.check("counts sum to q^{s(e+1)}", total == ipow(Int(F.q()), s * (e + 1)));
    if (conv && brute) {
        std::optional<std::size_t> bad;
        for (std::size_t i = 0; i < N.size() && !bad; ++i)
            if (conv->values[i] != brute->values[i]) bad = i;
        o.check("convolution equals brute force", !bad);
        if (bad) o.witness = {{"f_index", *bad}};
    }
    if (c.has("f")) {
        Poly f = Poly::from_ints(F, c.list("f"));
        if (f.deg() > static_cast<int>(k * e)) throw std::invalid_argument("deg f exceeds ke");
        std::uint64_t idx = 0;
        for (int i = f.deg(); i >= 0; --i) idx = idx * F.q() + f.coeff(static_cast<unsigned>(i)).v;
        o.result["f_index"] = idx;
        o.result["count"] = str(N.values[idx]);
    }
    if (N.size() <= 729) {
        json vals = json::array();
        for (auto v : N.values) vals.push_back(str(v));
        o.result["values"] = vals;
    }
    o.table.header = {"f_index", "count"};
    for (std::size_t i = 0; i < N.size(); ++i) o.table.rows.push_back({std::to_string(i), str(N.values[i])});
    return o;
}

Outcome run_circle(Context& c) {
    const Field& F = c.field();
    const unsigned k = c.u("k"), s = c.u("s"), e = c.u("e");
    auto chk = circle_verify(F, k, s, e, c.budgets.oracle);
    Outcome o;
    o.result = {{"values", chk.values}, {"mismatches", chk.mismatches}, {"exact", chk.passed()}};
    o.check("circle identity holds exactly for every f", chk.passed());
    if (chk.first_mismatch) o.witness = {{"f_index", *chk.first_mismatch}};
    o.table.header = {"f_index", "direct", "circle"};
    for (std::size_t i = 0; i < chk.values; ++i) o.table.rows.push_back({std::to_string(i), str(chk.direct[i]), str(chk.circle[i])});
    return o;
}

Outcome run_arcs(Context& c) {
    const Field& F = c.field();
    const unsigned k = c.u("k"), e = c.u("e");
    auto r = arc_split(F, k, e, c.budgets.oracle);
    Outcome o;
    json by_deg = json::object();
    for (const auto& [d, n] : r.by_degree) by_deg[std::to_string(d)] = n;
    o.result = {{"total", r.total}, {"major", r.major}, {"minor", r.minor}, {"by_degree", by_deg}, {"divisor_tally", str(r.divisor_tally)},
                {"pair_tally", r.pair_tally}, {"uniqueness_expected", r.uniqueness_expected}};
    o.check("divisor and pair tallies agree", r.tallies_agree);
    if (r.uniqueness_expected) o.check("major count matches the divisor tally", r.major_matches_tally);
    if (r.quadratic_checked) {
        o.result["quadratic"] = {{"min", r.quadratic_min_count}, {"max", r.quadratic_max_count}};
        o.check("every quadratic alpha factors", r.quadratic_all_factor);
    }
    if (c.params.at("local_table").get<bool>()) {
        auto t = local_sum_table(F, k, 2, c.rng);
        o.result["local_table"] = {{"forms", t.forms},           {"exact_checked", t.exact_checked}, {"bound_checked", t.bound_checked},
                                   {"direct_checked", t.direct_checked}, {"worst_bound_ratio", t.worst_bound_ratio}};
        o.check("local sums match their closed forms and direct summation", t.passed());
        if (!t.passed()) o.witness["local_table"] = t.first_failure;
    }
    if (unsigned n = c.u("multiplicativity_trials")) {
        auto m = multiplicativity_check(F, k, n, 4, c.rng);
        o.result["multiplicativity"] = {{"trials", m.trials}, {"failures", m.failures}};
        o.check("S_Z is multiplicative", m.passed());
        if (!m.passed()) o.witness["multiplicativity"] = m.first_failure;
    }
    if (c.params.at("major_check").get<bool>()) {
        auto m = major_arc_check(F, k, e);
        o.result["major_check"] = {{"alphas", m.alphas}, {"pairs", m.pairs}, {"failures", m.failures}};
        o.check("S_1 equals q^{e+1} S_Z on major arcs", m.passed());
        if (m.first_failure) o.witness["alpha_index"] = *m.first_failure;
    }
    o.table.header = {"degree", "alphas"};
    for (const auto& [d, n] : r.by_degree) o.table.rows.push_back({std::to_string(d), std::to_string(n)});
    return o;
}

Outcome run_local_density(Context& c) {
    const Field& F = c.field();
    const unsigned k = c.u("k"), s = c.u("s"), e = c.u("e");
    const int r_cap = static_cast<int>(c.u("r_cap"));
    Poly f = Poly::from_ints(F, c.list("f"));
    Outcome o;
    LocalDensity rec, en;
    if (c.has("place")) {
        Place v = Place::finite(Poly::from_ints(F, c.list("place")));
        o.result["place"] = v.to_string();
        rec = ell_v(f, v, s, k);
        en = density_enumeration(f, v, s, k, r_cap, c.budgets.oracle);
    } else {
        if (f.deg() > static_cast<int>(k * e)) throw std::invalid_argument("deg f exceeds ke");
        o.result["place"] = "inf";
        rec = ell_infty(f, e, k, s);
        en = density_enumeration(infinity_local_poly(f, k * e), Place::infinity(F), s, k, r_cap, c.budgets.oracle);
    }
    o.result["recursion"] = density_json(rec);
    o.result["enumeration"] = density_json(en);
    if (!en.flagged) o.check("recursion equals enumeration", rec.value == en.value);
    if (positivity_hypotheses(F, k, s)) o.check("density is positive", rec.value > 0);
    o.table.header = {"method", "value", "stabilized_at"};
    o.table.rows.push_back({"recursion", str(rec.value), rec.stabilized_at ? std::to_string(*rec.stabilized_at) : ""});
    o.table.rows.push_back({"enumeration", str(en.value), en.stabilized_at ? std::to_string(*en.stabilized_at) : ""});
    return o;
}

Outcome run_singular_series(Context& c) {
    const Field& F = c.field();
    const unsigned k = c.u("k"), s = c.u("s"), e = c.u("e");
    const int D = static_cast<int>(c.u("D"));
    Poly f = Poly::from_ints(F, c.list("f"));
    auto ss = singular_series(f, e, k, s, D);
    auto mt = main_term_waring(WaringInstance{&F, k, s, e, f}, D);
    Outcome o;
    o.result = {{"partial", str(ss.partial)}, {"partial_approx", to_double(ss.partial)}, {"tail", interval_json(ss.tail)},
                {"value", interval_json(ss.value)}, {"main_term", interval_json(mt)}, {"hypotheses_ok", ss.hypotheses_ok},
                {"at_infinity", density_json(ss.at_infinity)}};
    if (ss.hypotheses_ok) {
        o.check("tail interval is bounded", ss.value.bounded());
        o.check("interval contains the truncated product", ss.value.contains(ss.partial));
    }
    if (positivity_hypotheses(F, k, s)) o.check("truncated product is positive", ss.partial > 0);
    o.table.header = {"place", "degree", "valuation", "density"};
    o.table.rows.push_back({"inf", "1", ss.at_infinity.valuation ? std::to_string(*ss.at_infinity.valuation) : "", str(ss.at_infinity.value)});
    for (const auto& [v, d] : ss.places)
        o.table.rows.push_back({v.to_string(), std::to_string(v.degree), d.valuation ? std::to_string(*d.valuation) : "", str(d.value)});
    return o;
}

Outcome run_sing_dim(Context& c) {
    const Field& F = c.field();
    const unsigned k = c.u("k"), e = c.u("e"), m_max = c.u("m_max");
    const int D = static_cast<int>(k * e);
    std::vector<LinearForm> alphas;
    if (c.has("alpha")) {
        auto coords = c.list("alpha");
        if (coords.size() != static_cast<std::size_t>(D + 1)) throw std::invalid_argument("alpha needs ke+1 coordinates");
        LinearForm a{&F, {}};
        for (auto x : coords) {
            if (x >= F.q()) throw std::invalid_argument("alpha coordinate out of range");
            a.coords.push_back(Fq{x});
        }
        alphas.push_back(std::move(a));
    } else {
        for (unsigned t = 0; t < c.u("samples"); ++t) {
            LinearForm a{&F, std::vector<Fq>(static_cast<std::size_t>(D + 1))};
            for (auto& x : a.coords) x = Fq{static_cast<std::uint32_t>(c.rng() % F.q())};
            alphas.push_back(std::move(a));
        }
    }
    const bool with_gamma = (k - 1) % F.p() != 0;
    const Rational g = with_gamma ? gamma(k, F.p()).gamma : Rational(0);
    Outcome o;
    json rows = json::array();
    std::uint64_t stable = 0, bound_ok = 0;
    o.table.header = {"alpha_index", "dim", "stable", "method", "counts"};
    for (const auto& a : alphas) {
        auto est = sing_dim_estimate(a, e, k, m_max);
        json counts = json::array();
        std::string cs;
        for (const auto& [m, n] : est.counts) {
            counts.push_back({m, n});
            cs += (cs.empty() ? "" : ";") + std::to_string(m) + ":" + std::to_string(n);
        }
        json row = {{"alpha_index", a.index()}, {"dim", est.dim}, {"stable", est.stable}, {"method", to_string(est.method)}, {"counts", counts}};
        if (with_gamma && est.stable) {
            auto rep = overall_dim_bound_check(a, e, k, g, m_max);
            row["overall_bound_holds"] = rep.holds_any;
            bound_ok += rep.holds_any;
            if (!rep.holds_any && o.witness.is_null()) o.witness = {{"alpha_index", a.index()}};
        }
        stable += est.stable;
        rows.push_back(row);
        o.table.rows.push_back({std::to_string(a.index()), std::to_string(est.dim), est.stable ? "1" : "0", to_string(est.method), cs});
    }
    o.result = {{"alphas", rows}, {"stable", stable}, {"gamma", with_gamma ? json(str(g)) : json(nullptr)}};
    if (with_gamma) o.check("overall dimension bound holds for every stable alpha", bound_ok == stable);
    return o;
}

Outcome run_katz(Context& c) {
    const Field& F = c.field();
    const unsigned k = c.u("k"), e = c.u("e");
    auto rep = katz_bound_check(F, e, k, c.u("m_max"));
    Outcome o;
    o.result = {{"alphas", rep.rows.size()}, {"checked", rep.checked}, {"unstable", rep.unstable},
                {"violations", rep.violations}, {"max_ratio", rep.max_ratio}, {"worst_index", rep.worst_index}};
    o.check("Katz bound holds for every alpha with a stable dimension", rep.passed());
    if (!rep.passed()) {
        for (const auto& row : rep.rows)
            if (row.dim.stable && row.s1_abs > row.bound * (1 + 1e-9)) {
                o.witness = {{"alpha_index", row.alpha_index}};
                break;
            }
    }
    o.table.header = {"alpha_index", "alpha_degree", "dim", "stable", "s1_abs", "bound"};
    for (const auto& row : rep.rows) {
        std::ostringstream a, b;
        a.precision(17);
        b.precision(17);
        a << row.s1_abs;
        b << row.bound;
        o.table.rows.push_back({std::to_string(row.alpha_index), std::to_string(row.alpha_degree), std::to_string(row.dim.dim), row.dim.stable ? "1" : "0", a.str(), b.str()});
    }
    return o;
}

Outcome run_manin(Context& c) {
    const Field& F = c.field();
    FermatInstance inst{&F, c.u("n"), c.u("d"), c.u("e")};
    inst.validate();
    auto moe = morphism_count_moebius_detail(inst, c.budgets.memory);
    Outcome o;
    o.result["moebius"] = str(moe.value);
    if (c.params.at("direct").get<bool>()) {
        auto direct = morphism_count_direct(inst, c.budgets.oracle);
        o.result["direct"] = str(direct);
        o.check("Moebius count equals direct count", direct == moe.value);
    }
    // The main term is only defined when n + 1 > d.
    if (inst.n + 1 > inst.d) {
        auto mt = main_term_manin(inst, static_cast<int>(c.u("D")));
        o.result["main_term"] = interval_json(mt.value);
        o.result["convergent"] = mt.convergent;
        o.result["leading"] = str(mt.leading);
        o.result["partial"] = str(mt.partial);
        o.table.header = {"degree", "points"};
        for (const auto& [d, n] : mt.point_counts) o.table.rows.push_back({std::to_string(d), str(n)});
    } else {
        o.result["main_term"] = nullptr;
    }
    return o;
}

Outcome run_gamma(Context& c) {
    const unsigned k = c.u("k"), p = c.u("p");
    auto r = gamma(k, p);
    Outcome o;
    json verts = json::array();
    for (const auto& v : r.polygon.vertices) verts.push_back({v.i, v.j});
    o.result = {{"gamma", str(r.gamma)}, {"vertices", verts}, {"box", r.polygon.box}, {"certified", r.polygon.certified}};
    if (r.entry) o.result["entry"] = {str(r.entry->first), str(r.entry->second)};
    o.check("boundary stable under box doubling", r.polygon.certified);
    if (k == 2) o.check("gamma is zero for k = 2", r.gamma == 0);
    if (k >= 3 && p > k) {
        o.result["lower_bound"] = str(gamma_lower_bound(k));
        o.result["upper_bound"] = str(gamma_upper_bound(k, p));
        o.check("gamma within its lower and upper bounds", gamma_lower_bound(k) <= r.gamma && r.gamma <= gamma_upper_bound(k, p));
    }
    o.table.header = {"i", "j"};
    for (const auto& v : r.polygon.vertices) o.table.rows.push_back({std::to_string(v.i), std::to_string(v.j)});
    return o;
}

Outcome run_thresholds(Context& c) {
    std::optional<long> s;
    if (c.has("s")) s = static_cast<long>(c.u("s"));
    auto r = thresholds(c.u("k"), c.u("p"), c.bigint("q"), s);
    auto opt = [](const std::optional<Rational>& v) { return v ? json(str(*v)) : json(nullptr); };
    Outcome o;
    o.result = {{"gamma", str(r.gamma)},
                {"log_ratio", {{"lo", str(r.log_ratio.lo)}, {"hi", str(r.log_ratio.hi)}, {"approx", to_double(r.log_ratio.hi)}}},
                {"q_min", str(r.q_min)},
                {"q_ok", r.q_ok},
                {"s_bound_gamma", opt(r.s_bound_gamma)},
                {"s_bound_k", opt(r.s_bound_k)},
                {"s_min", opt(r.s_min)},
                {"s_min_integer", r.s_min_integer ? json(*r.s_min_integer) : json(nullptr)}};
    if (s) {
        o.result["theta_strict"] = opt(r.theta_strict);
        o.result["theta_weak"] = opt(r.theta_weak);
        o.result["theta_max"] = r.theta_max ? json(str(*r.theta_max)) : json("infeasible");
        o.result["delta_max"] = opt(r.delta_max);
        o.result["feasible"] = r.feasible;
        o.check("positive theta exists exactly when the q and s conditions hold", r.consistent);
    }
    o.table.header = {"quantity", "value"};
    for (const auto& [key, v] : o.result.items())
        if (!v.is_object()) o.table.rows.push_back({key, v.is_string() ? v.get<std::string>() : v.dump()});
    return o;
}

Outcome run_appendix(Context& c) {
    AppendixOptions opt{static_cast<long>(c.u("e_min")), static_cast<long>(c.u("e_max")), static_cast<long>(c.u("grid_e_max")),
                        static_cast<long>(c.u("witness_max")), c.rational("slack")};
    auto r = appendix_verify(c.u("n"), c.u("d"), c.u("g"), c.rational("delta"), opt);
    auto o3 = [](const auto& a) { return json::array({a[0], a[1], a[2]}); };
    json e0 = json::array();
    for (const auto& v : r.e0_each) e0.push_back(v ? json(*v) : json(nullptr));
    json margins = json::array(), consts = json::array();
    for (int i = 0; i < 3; ++i) {
        margins.push_back(str(r.min_margin[i]));
        consts.push_back(str(r.case_constants[i]));
    }
    Outcome o;
    o.result = {{"above_threshold", r.above_threshold}, {"e0", r.e0 ? json(*r.e0) : json(nullptr)}, {"e0_each", e0},
                {"failures", o3(r.failures)}, {"fails_at_e_max", o3(r.fails_at_e_max)}, {"grid_points", r.grid_points},
                {"side_conditions_ok", r.side_conditions_ok}, {"case_constants", consts}, {"min_margin", margins},
                {"reductions_ok", r.reductions_ok}, {"witnesses", o3(r.witnesses)}, {"witness_failures", o3(r.witness_failures)},
                {"witness_not_tight", o3(r.witness_not_tight)}};
    if (r.above_threshold) {
        o.check("all three inequalities hold from e0 to e_max", r.e0.has_value());
        o.check("case reductions hold on the grid", r.reductions_ok && r.side_conditions_ok);
        o.check("tightness witnesses satisfy every constraint", r.witnesses_ok());
    } else {
        o.check("some inequality fails at e_max below the threshold", r.any_fails_at_e_max());
    }
    if (r.first_bad_witness) o.witness = {{"i", o3(*r.first_bad_witness)}};
    o.table.header = {"inequality", "e0", "failures", "fails_at_e_max"};
    for (int i = 0; i < 3; ++i)
        o.table.rows.push_back({std::to_string(i + 1), r.e0_each[i] ? std::to_string(*r.e0_each[i]) : "", std::to_string(r.failures[i]), r.fails_at_e_max[i] ? "1" : "0"});
    return o;
}

Outcome run_convergence(Context& c) {
    const Field& F = c.field();
    const unsigned k = c.u("k"), s = c.u("s"), e_min = c.u("e_min"), e_max = c.u("e_max");
    const int D = static_cast<int>(c.u("D"));
    if (e_min < 1 || e_max < e_min) throw std::invalid_argument("need 1 <= e_min <= e_max");
    Outcome o;
    json rows = json::array();
    std::vector<ConvergenceRow> all;
    o.table.header = {"e", "D", "r", "r_lo", "r_hi", "tail_width", "worst_index"};
    bool respected = true, narrow = true;
    for (unsigned e = e_min; e <= e_max; ++e) {
        auto row = convergence_row(F, k, s, e, D);
        respected = respected && row.r_lo <= row.r && row.r <= row.r_hi;
        narrow = narrow && row.tail_width < 1e-4;
        rows.push_back({{"e", e}, {"r", row.r}, {"r_lo", row.r_lo}, {"r_hi", row.r_hi}, {"tail_width", row.tail_width}, {"worst_index", row.worst_index}, {"patterns", row.patterns}});
        std::ostringstream line;
        line.precision(17);
        o.table.rows.push_back({std::to_string(e), std::to_string(D), (line << row.r, line.str())});
        for (double x : {row.r_lo, row.r_hi, row.tail_width}) {
            std::ostringstream t;
            t.precision(17);
            t << x;
            o.table.rows.back().push_back(t.str());
        }
        o.table.rows.back().push_back(std::to_string(row.worst_index));
        all.push_back(row);
    }
    o.result = {{"rows", rows}, {"D", D}};
    o.check("ratio lies within the tail interval", respected);
    o.check("tail interval narrower than 1e-4", narrow);
    if (all.size() > 1) o.check("error at the last e is below the first", all.back().r < all.front().r);
    return o;
}

Outcome dispatch(const std::string& name, Context& c) {
    if (name == "count") return run_count(c);
    if (name == "circle-verify") return run_circle(c);
    if (name == "arcs") return run_arcs(c);
    if (name == "local-density") return run_local_density(c);
    if (name == "singular-series") return run_singular_series(c);
    if (name == "sing-dim") return run_sing_dim(c);
    if (name == "katz-check") return run_katz(c);
    if (name == "manin") return run_manin(c);
    if (name == "gamma") return run_gamma(c);
    if (name == "thresholds") return run_thresholds(c);
    if (name == "appendix") return run_appendix(c);
    if (name == "convergence") return run_convergence(c);
    throw SchemaError("unknown experiment '" + name + "'");
}

// ---------------------------------------------------------------- driver

std::filesystem::path resolve_output(const std::string& path) {
    // The only environment override: redirect reports into another directory.
    if (const char* dir = std::getenv("WFL_OUTPUT_DIR"); dir && *dir) return std::filesystem::path(dir) / std::filesystem::path(path).filename();
    return path;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return out + "\"";
}

void write_csv(const std::filesystem::path& path, const Table& t) {
    std::ofstream os(path);
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << csv_field(cells[i]);
        os << "\n";
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
}

long peak_rss_kb() {
    rusage ru{};
    getrusage(RUSAGE_SELF, &ru);
    return ru.ru_maxrss;
}

int run_spec(const json& raw) {
    json spec;
    try {
        spec = normalize(raw);
    } catch (const SchemaError& e) {
        std::cerr << "wfl: schema error: " << e.what() << "\n";
        return kSchema;
    }
    Context ctx;
    ctx.params = spec["params"];
    ctx.budgets = {spec["budgets"]["memory_bytes"].get<std::uint64_t>(), spec["budgets"]["oracle"].get<std::uint64_t>(),
                   spec["budgets"]["seconds"].get<double>()};
    ctx.rng.seed(spec["seed"].get<std::uint64_t>());

    json report = {{"artifact", {{"name", "wfl"}, {"version", WFL_VERSION}}},
                   {"spec", spec},
                   {"rng", {{"generator", "std::mt19937_64"}, {"seed", spec["seed"]}}}};
    const auto t0 = std::chrono::steady_clock::now();
    int code = kOk;
    Outcome out;
    try {
        out = dispatch(spec["experiment"], ctx);
        json asserts = json::array();
        for (const auto& [name, ok] : out.assertions) asserts.push_back({{"name", name}, {"passed", ok}});
        report["result"] = out.result;
        report["assertions"] = asserts;
        if (!out.passed()) {
            code = kAssertion;
            report["reproducer"] = {{"spec", spec}, {"witness", out.witness}};
        }
    } catch (const BudgetExceeded& e) {
        code = kBudget;
        report["error"] = e.what();
    } catch (const ConsistencyFailure& e) {
        code = kAssertion;
        report["error"] = e.what();
        report["reproducer"] = {{"spec", spec}};
    } catch (const std::invalid_argument& e) {
        std::cerr << "wfl: invalid parameters: " << e.what() << "\n";
        return kSchema;
    } catch (const std::exception& e) {
        // Parameters outside an operation's domain (e.g. no tail bound).
        std::cerr << "wfl: " << e.what() << "\n";
        return kSchema;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (code == kOk && ctx.budgets.seconds > 0 && seconds > ctx.budgets.seconds) {
        code = kBudget;
        report["error"] = "time budget exceeded";
    }
    report["status"] = code == kOk ? "ok" : code == kAssertion ? "assertion-failure" : "budget-exceeded";

    // Timing and memory vary between runs, so they stay out of the report.
    json metrics = {{"wall_seconds", seconds}, {"peak_rss_kb", peak_rss_kb()}, {"threads", worker_threads()}};
    const std::string text = report.dump(2) + "\n";
    if (spec.contains("output")) {
        auto path = resolve_output(spec["output"]);
        std::ofstream(path) << text;
        std::ofstream(path.string() + ".metrics.json") << metrics.dump(2) << "\n";
    } else {
        std::cout << text;
    }
    std::cerr << "wfl: " << spec["experiment"].get<std::string>() << " " << report["status"].get<std::string>() << " in " << seconds << " s, peak "
              << metrics["peak_rss_kb"].get<long>() << " kB\n";
    if (spec.contains("csv") && !out.table.header.empty()) write_csv(resolve_output(spec["csv"]), out.table);
    return code;
}

json flag_value(const Param& p, const std::string& text) {
    auto as_uint = [&](const std::string& t) -> json {
        if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos) throw SchemaError("--" + p.name + " expects " + kind_name(p.kind));
        return std::stoull(t);
    };
    switch (p.kind) {
        case Kind::Uint: return as_uint(text);
        case Kind::Uints: {
            json arr = json::array();
            std::stringstream ss(text);
            for (std::string item; std::getline(ss, item, ',');) arr.push_back(as_uint(item));
            return arr;
        }
        case Kind::BigInt:
        case Kind::Rational:
        case Kind::Choice: return text;
        case Kind::Bool:
            if (text == "true" || text == "1") return true;
            if (text == "false" || text == "0") return false;
            throw SchemaError("--" + p.name + " expects true or false");
    }
    return text;
}

std::string flag_name(std::string s) {
    std::replace(s.begin(), s.end(), '_', '-');
    return "--" + s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Waring's problem over F_q[T]: exact counts, local densities, thresholds"};
    app.require_subcommand(1);
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("--threads", threads, "worker threads (results do not depend on it)");

    std::string spec_path;
    auto* run = app.add_subcommand("run", "run a JSON specification");
    run->add_option("spec", spec_path, "path to the specification")->required();
    auto* schema = app.add_subcommand("schema", "print the specification schema");

    struct Shorthand {
        CLI::App* cmd;
        std::map<std::string, std::string> values;
        std::string seed, output, csv, memory, oracle, seconds;
    };
    std::map<std::string, Shorthand> shorthands;
    for (const auto& ex : experiments()) {
        auto& sh = shorthands[ex.name];
        sh.cmd = app.add_subcommand(ex.name, ex.help);
        for (const auto& p : ex.params) {
            auto* opt = sh.cmd->add_option(flag_name(p.name), sh.values[p.name], p.help);
            if (p.required) opt->required();
        }
        sh.cmd->add_option("--seed", sh.seed, "RNG seed");
        sh.cmd->add_option("-o,--output", sh.output, "report path");
        sh.cmd->add_option("--csv", sh.csv, "table path");
        sh.cmd->add_option("--memory-budget", sh.memory, "bytes");
        sh.cmd->add_option("--oracle-budget", sh.oracle, "enumeration size");
        sh.cmd->add_option("--time-budget", sh.seconds, "seconds");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kSchema;
    }
    set_worker_threads(threads);

    if (schema->parsed()) {
        std::cout << schema_document().dump(2) << "\n";
        return kOk;
    }
    if (run->parsed()) {
        std::ifstream is(spec_path);
        if (!is) {
            std::cerr << "wfl: cannot read " << spec_path << "\n";
            return kSchema;
        }
        json raw = json::parse(is, nullptr, false);
        if (raw.is_discarded()) {
            std::cerr << "wfl: schema error: " << spec_path << " is not valid JSON\n";
            return kSchema;
        }
        return run_spec(raw);
    }
    for (auto& [name, sh] : shorthands) {
        if (!sh.cmd->parsed()) continue;
        try {
            json spec = {{"experiment", name}, {"params", json::object()}};
            for (const auto& p : find_experiment(name).params)
                if (sh.cmd->count(flag_name(p.name))) spec["params"][p.name] = flag_value(p, sh.values[p.name]);
            if (!sh.seed.empty()) spec["seed"] = flag_value(Param{"seed", Kind::Uint, false, nullptr, ""}, sh.seed);
            if (!sh.output.empty()) spec["output"] = sh.output;
            if (!sh.csv.empty()) spec["csv"] = sh.csv;
            json budgets = json::object();
            if (!sh.memory.empty()) budgets["memory_bytes"] = flag_value(Param{"memory-budget", Kind::Uint, false, nullptr, ""}, sh.memory);
            if (!sh.oracle.empty()) budgets["oracle"] = flag_value(Param{"oracle-budget", Kind::Uint, false, nullptr, ""}, sh.oracle);
            if (!sh.seconds.empty()) budgets["seconds"] = std::stod(sh.seconds);
            if (!budgets.empty()) spec["budgets"] = budgets;
            return run_spec(spec);
        } catch (const SchemaError& e) {
            std::cerr << "wfl: schema error: " << e.what() << "\n";
            return kSchema;
        } catch (const std::invalid_argument&) {
            std::cerr << "wfl: schema error: --time-budget expects a number\n";
            return kSchema;
        }
    }
    return kSchema;
}
