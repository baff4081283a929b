#include "hsat/io.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "hsat/errors.hpp"

#ifndef HSAT_VERSION
#define HSAT_VERSION "0.0.0"
#endif

namespace hsat {

std::string version() { return HSAT_VERSION; }

namespace {

// Typed access into a JSON object that reports failures by pointer.
class Reader {
public:
    Reader(const json& j, std::string pointer) : j_(j), ptr_(std::move(pointer)) {
        if (!j_.is_object()) throw ParseError("expected an object", ptr_);
    }

    const std::string& pointer() const { return ptr_; }
    std::string at(const std::string& key) const { return ptr_ + "/" + key; }
    bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    double number(const std::string& key) const {
        if (!has(key)) throw ParseError("missing field '" + key + "'", at(key));
        return as_number(j_.at(key), at(key));
    }
    double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

    int integer(const std::string& key) const {
        if (!has(key) || !j_.at(key).is_number_integer()) throw ParseError("expected an integer", at(key));
        return j_.at(key).get<int>();
    }
    int integer(const std::string& key, int fallback) const { return has(key) ? integer(key) : fallback; }

    bool boolean(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        if (!j_.at(key).is_boolean()) throw ParseError("expected a boolean", at(key));
        return j_.at(key).get<bool>();
    }

    std::string string(const std::string& key) const {
        if (!has(key) || !j_.at(key).is_string()) throw ParseError("expected a string", at(key));
        return j_.at(key).get<std::string>();
    }

    const json& array(const std::string& key) const {
        if (!has(key) || !j_.at(key).is_array()) throw ParseError("expected an array", at(key));
        return j_.at(key);
    }

    Reader object(const std::string& key) const {
        if (!has(key)) throw ParseError("missing field '" + key + "'", at(key));
        return Reader(j_.at(key), at(key));
    }

    const json& raw(const std::string& key) const { return j_.at(key); }

    void allow_only(std::initializer_list<const char*> keys) const {
        for (const auto& [k, v] : j_.items()) {
            bool ok = false;
            for (const char* a : keys) ok = ok || k == a;
            if (!ok) throw ParseError("unknown field '" + k + "'", at(k));
        }
    }

    static double as_number(const json& v, const std::string& ptr) {
        if (!v.is_number()) throw ParseError("expected a number", ptr);
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ParseError("expected a finite number", ptr);
        return x;
    }

private:
    const json& j_;
    std::string ptr_;
};

std::vector<double> numbers(const json& arr, const std::string& ptr) {
    std::vector<double> out;
    for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(Reader::as_number(arr[i], ptr + "/" + std::to_string(i)));
    return out;
}

cplx complex_from(const Reader& r) { return {r.number("re", 0.0), r.number("im", 0.0)}; }

json complex_json(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

// non-finite doubles become null
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json nums(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

template <class T>
json opt(const std::optional<T>& v) {
    return v ? num(static_cast<double>(*v)) : json(nullptr);
}

ModulusFactor factor_from(const Reader& r) {
    const auto type = r.string("type");
    if (type == "poly") {
        r.allow_only({"type", "coeffs"});
        PolyModulus p;
        const auto& a = r.array("coeffs");
        for (std::size_t i = 0; i < a.size(); ++i) p.coeffs.push_back(complex_from(Reader(a[i], r.at("coeffs") + "/" + std::to_string(i))));
        return p;
    }
    if (type == "trig_log") {
        r.allow_only({"type", "constant", "cos", "sin"});
        TrigLogModulus t;
        t.constant = r.number("constant", 0.0);
        if (r.has("cos")) t.cos = numbers(r.array("cos"), r.at("cos"));
        if (r.has("sin")) t.sin = numbers(r.array("sin"), r.at("sin"));
        return t;
    }
    if (type == "power_distance") {
        r.allow_only({"type", "angle", "exponent"});
        return PowerDistance{r.number("angle"), r.number("exponent")};
    }
    throw ParseError("unknown factor type '" + type + "'", r.at("type"));
}

ModulusPiece piece_from(const Reader& r) {
    ModulusPiece p;
    p.start = r.number("start");
    p.end = r.number("end");
    const auto type = r.string("type");
    if (type == "constant") {
        r.allow_only({"start", "end", "type", "value"});
        p.kind = ModulusPiece::Kind::constant;
        p.value = r.number("value");
    } else if (type == "power") {
        r.allow_only({"start", "end", "type", "center", "scale", "exponent"});
        p.kind = ModulusPiece::Kind::power;
        p.center = r.number("center");
        p.scale = r.number("scale");
        p.exponent = r.number("exponent");
    } else {
        throw ParseError("unknown piece type '" + type + "'", r.at("type"));
    }
    return p;
}

template <class F>
auto with_pointer(const std::string& ptr, F&& f) {
    try {
        return f();
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(e.what(), ptr);
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// spec formats

OuterSpec outer_from_json(const json& j, const std::string& pointer) {
    const Reader r(j, pointer);
    r.allow_only({"kind", "payload"});
    const auto kind = r.string("kind");
    const auto p = r.object("payload");
    OuterSpec out;
    if (kind == "formula") {
        p.allow_only({"factors"});
        FormulaModulus f;
        const auto& a = p.array("factors");
        for (std::size_t i = 0; i < a.size(); ++i) f.factors.push_back(factor_from(Reader(a[i], p.at("factors") + "/" + std::to_string(i))));
        out = OuterSpec(f);
    } else if (kind == "piecewise") {
        p.allow_only({"default", "pieces", "continuous"});
        PiecewiseModulus pw;
        pw.default_modulus = p.number("default", 1.0);
        pw.continuous = p.boolean("continuous", false);
        if (p.has("pieces")) {
            const auto& a = p.array("pieces");
            for (std::size_t i = 0; i < a.size(); ++i) pw.pieces.push_back(piece_from(Reader(a[i], p.at("pieces") + "/" + std::to_string(i))));
        }
        out = OuterSpec(pw);
    } else if (kind == "grid") {
        p.allow_only({"m", "log_modulus", "continuous"});
        GridLogModulus g;
        g.m = p.integer("m");
        g.values = numbers(p.array("log_modulus"), p.at("log_modulus"));
        g.continuous = p.boolean("continuous", false);
        out = OuterSpec(g);
    } else {
        throw ParseError("outer kind must be grid, formula or piecewise", r.at("kind"));
    }
    with_pointer(pointer, [&] { out.validate(); return 0; });
    return out;
}

json to_json(const OuterSpec& o) {
    return std::visit(
        [](const auto& rep) -> json {
            using T = std::decay_t<decltype(rep)>;
            if constexpr (std::is_same_v<T, FormulaModulus>) {
                json fs = json::array();
                for (const auto& f : rep.factors) {
                    fs.push_back(std::visit(
                        [](const auto& x) -> json {
                            using F = std::decay_t<decltype(x)>;
                            if constexpr (std::is_same_v<F, PolyModulus>) {
                                json c = json::array();
                                for (auto z : x.coeffs) c.push_back(complex_json(z));
                                return {{"type", "poly"}, {"coeffs", c}};
                            } else if constexpr (std::is_same_v<F, TrigLogModulus>) {
                                return {{"type", "trig_log"}, {"constant", x.constant}, {"cos", x.cos}, {"sin", x.sin}};
                            } else {
                                return {{"type", "power_distance"}, {"angle", x.angle}, {"exponent", x.exponent}};
                            }
                        },
                        f));
                }
                return {{"kind", "formula"}, {"payload", {{"factors", fs}}}};
            } else if constexpr (std::is_same_v<T, PiecewiseModulus>) {
                json ps = json::array();
                for (const auto& p : rep.pieces) {
                    if (p.kind == ModulusPiece::Kind::constant) {
                        ps.push_back({{"start", p.start}, {"end", p.end}, {"type", "constant"}, {"value", p.value}});
                    } else {
                        ps.push_back({{"start", p.start}, {"end", p.end}, {"type", "power"}, {"center", p.center},
                                      {"scale", p.scale}, {"exponent", p.exponent}});
                    }
                }
                return {{"kind", "piecewise"},
                        {"payload", {{"default", rep.default_modulus}, {"pieces", ps}, {"continuous", rep.continuous}}}};
            } else {
                return {{"kind", "grid"},
                        {"payload", {{"m", rep.m}, {"log_modulus", rep.values}, {"continuous", rep.continuous}}}};
            }
        },
        o.representation());
}

SymbolSpec symbol_from_json(const json& j) {
    const Reader r(j, "");
    r.allow_only({"constant", "blaschke", "singular", "outer"});
    SymbolSpec s;
    if (r.has("constant")) s.constant = complex_from(r.object("constant"));
    if (r.has("blaschke")) {
        const auto b = r.object("blaschke");
        b.allow_only({"zeros", "accumulation"});
        if (b.has("zeros")) {
            const auto& a = b.array("zeros");
            for (std::size_t i = 0; i < a.size(); ++i) {
                const Reader z(a[i], b.at("zeros") + "/" + std::to_string(i));
                z.allow_only({"re", "im", "mult"});
                s.blaschke.zeros.push_back({complex_from(z), z.integer("mult", 1)});
            }
        }
        if (b.has("accumulation")) {
            const auto& a = b.array("accumulation");
            for (std::size_t i = 0; i < a.size(); ++i) {
                const Reader z(a[i], b.at("accumulation") + "/" + std::to_string(i));
                z.allow_only({"angle"});
                s.blaschke.accumulation.push_back(z.number("angle"));
            }
        }
        with_pointer("/blaschke", [&] { s.blaschke.validate(); return 0; });
    }
    if (r.has("singular")) {
        const auto g = r.object("singular");
        g.allow_only({"atoms"});
        if (g.has("atoms")) {
            const auto& a = g.array("atoms");
            for (std::size_t i = 0; i < a.size(); ++i) {
                const Reader z(a[i], g.at("atoms") + "/" + std::to_string(i));
                z.allow_only({"angle", "mass"});
                s.singular.atoms.push_back({z.number("angle"), z.number("mass")});
            }
        }
        with_pointer("/singular", [&] { s.singular.validate(); return 0; });
    }
    if (r.has("outer")) s.outer = outer_from_json(r.raw("outer"), "/outer");
    with_pointer("", [&] { s.validate(); return 0; });
    return s;
}

json to_json(const SymbolSpec& s) {
    json zeros = json::array(), acc = json::array(), atoms = json::array();
    for (const auto& z : s.blaschke.zeros) zeros.push_back({{"re", z.a.real()}, {"im", z.a.imag()}, {"mult", z.multiplicity}});
    for (double a : s.blaschke.accumulation) acc.push_back({{"angle", a}});
    for (const auto& a : s.singular.atoms) atoms.push_back({{"angle", a.angle}, {"mass", a.mass}});
    return {{"constant", complex_json(s.constant)},
            {"blaschke", {{"zeros", zeros}, {"accumulation", acc}}},
            {"singular", {{"atoms", atoms}}},
            {"outer", to_json(s.outer)}};
}

ThinSetSpec thin_set_from_json(const json& j, const std::string& pointer) {
    const Reader r(j, pointer);
    r.allow_only({"arcs", "family"});
    ThinSetSpec u;
    if (r.has("family")) {
        const auto f = r.object("family");
        f.allow_only({"dyadic"});
        const auto d = f.object("dyadic");
        d.allow_only({"a", "b", "count"});
        u = with_pointer(d.pointer(), [&] { return ThinSetSpec::dyadic(d.number("a"), d.number("b"), d.integer("count")); });
    }
    if (r.has("arcs")) {
        const auto& a = r.array("arcs");
        for (std::size_t i = 0; i < a.size(); ++i) {
            const Reader z(a[i], r.at("arcs") + "/" + std::to_string(i));
            z.allow_only({"center_angle", "length"});
            u.arcs.push_back({z.number("center_angle"), z.number("length")});
        }
    }
    if (!r.has("arcs") && !r.has("family")) throw ParseError("thin set needs 'arcs' or 'family'", pointer);
    with_pointer(pointer, [&] { u.validate(); return 0; });
    return u;
}

json to_json(const ThinSetSpec& u) {
    json arcs = json::array();
    for (const auto& a : u.arcs) arcs.push_back({{"center_angle", a.center}, {"length", a.length}});
    return {{"arcs", arcs}};
}

WeightInput weight_from_json(const json& j) {
    const Reader r(j, "");
    r.allow_only({"weight", "floor_exponent", "w_kappa", "thin_set"});
    WeightInput in;
    const double R = r.number("floor_exponent", kDefaultFloorExponent);
    if (!(R > 0.0)) throw ParseError("floor exponent must be positive", r.at("floor_exponent"));
    if (r.has("w_kappa")) {
        const auto w = r.object("w_kappa");
        w.allow_only({"thin_set", "kappa"});
        in.thin_set = thin_set_from_json(w.raw("thin_set"), w.at("thin_set"));
        in.kappa = w.number("kappa");
        in.weight = with_pointer(w.pointer(), [&] { return build_w_kappa(*in.thin_set, *in.kappa, R); });
    } else if (r.has("weight")) {
        in.weight = WeightSpec{outer_from_json(r.raw("weight"), "/weight"), R};
        if (r.has("thin_set")) in.thin_set = thin_set_from_json(r.raw("thin_set"), "/thin_set");
    } else {
        throw ParseError("weight input needs 'weight' or 'w_kappa'", "");
    }
    return in;
}

// ---------------------------------------------------------------------------
// reports

json to_json(const NormEstimate& e) {
    json sizes = json::array();
    for (const auto& d : e.diagnostics) {
        sizes.push_back({{"n", d.n},
                         {"value", d.value},
                         {"residual", num(d.residual)},
                         {"matvecs", d.matvecs},
                         {"status", to_string(d.status)}});
    }
    return {{"final_value", e.final_value()},
            {"converged", e.converged},
            {"undecided", e.undecided},
            {"sizes", sizes},
            {"witness_length", e.witness.size()},
            {"warnings", e.warnings}};
}

json to_json(const GapReport& g) {
    return {{"l2", g.l2},
            {"sup", g.sup},
            {"norm", g.norm_est.final_value()},
            {"minimality_gap", g.minimality_gap},
            {"maximality_gap", g.maximality_gap},
            {"maximality_gaps", nums(g.maximality_gaps)},
            {"classification", to_string(g.classification)},
            {"leakage", g.leakage},
            {"norm_estimate", to_json(g.norm_est)},
            {"warnings", g.warnings}};
}

json to_json(const ImproverResult& r) {
    json gamma = json::array();
    for (const auto& a : r.gamma) {
        gamma.push_back({{"start_angle", a.start_angle()}, {"end_angle", a.end_angle()}, {"nodes", a.length}});
    }
    return {{"success", r.success},
            {"grid_exponent", r.m},
            {"delta", r.delta},
            {"delta_used", r.delta_used},
            {"epsilon_used", r.epsilon_used},
            {"apical_epsilon", r.apical_epsilon},
            {"sup", r.sup},
            {"achieved_sup", r.achieved_sup},
            {"gain", num(r.gain)},
            {"sup_vtilde", r.sup_vtilde},
            {"nonpositive_energy", r.nonpositive_energy},
            {"refined_gain", opt(r.refined_gain)},
            {"gamma", gamma},
            {"diagnostics", r.diagnostics}};
}

json to_json(const SaturationVerdict& v) {
    json out = {{"verdict", to_string(v.verdict)},
                {"basis", to_string(v.basis)},
                {"grid_exponent", v.m},
                {"sup", v.sup},
                {"level_tolerance", v.level_tolerance},
                {"transcript", v.transcript}};
    if (v.continuous) {
        const auto& c = *v.continuous;
        out["continuous"] = {{"separation", num(c.separation)},
                             {"resolution", c.resolution},
                             {"witness", opt(c.witness)},
                             {"spectrum", nums(c.spectrum)},
                             {"argmax_nodes", c.argmax.size()},
                             {"saturated", c.saturated}};
    }
    if (v.badapp) {
        json steps = json::array();
        for (const auto& s : v.badapp->steps) {
            steps.push_back({{"delta", s.delta}, {"pass", s.pass}, {"witness", opt(s.witness)}, {"interior_arcs", s.interior_arcs}});
        }
        out["badapp"] = {{"pass", v.badapp->pass}, {"steps", steps}};
    }
    if (v.outer) {
        const auto& t = *v.outer;
        json steps = json::array();
        for (const auto& s : t.steps) {
            steps.push_back({{"n", s.n},
                             {"theta", s.theta},
                             {"nodes", s.nodes},
                             {"minus_fraction", s.minus_fraction},
                             {"plus_fraction", s.plus_fraction},
                             {"minus_sup", s.minus_sup}});
        }
        out["outer"] = {{"pass", t.pass},
                        {"grid_exponent", t.m},
                        {"a", t.a},
                        {"b", t.b},
                        {"measured_a", t.measured_a},
                        {"measured_b", t.measured_b},
                        {"sup_near_base", t.sup_near_base},
                        {"limit_holds", t.limit_holds},
                        {"fractions_hold", t.fractions_hold},
                        {"steps", steps},
                        {"notes", t.notes}};
    }
    if (v.improver) out["improver"] = to_json(*v.improver);
    if (v.gaps) out["gaps"] = to_json(*v.gaps);
    return out;
}

json to_json(const ApicalCertificate& c) {
    return {{"grid_exponent", c.m},
            {"delta", c.delta},
            {"provenance", to_string(c.provenance)},
            {"status", to_string(c.status)},
            {"pass", c.pass},
            {"sup_vtilde", c.sup_vtilde},
            {"margin", c.margin},
            {"u_sup", c.u_sup},
            {"v_l1", c.v_l1},
            {"reconstruction_error", c.reconstruction_error},
            {"distance", num(c.distance)},
            {"analytic_bound", num(c.analytic_bound)},
            {"floor_exponent", c.floor_exponent},
            {"refined_sup_vtilde", opt(c.refined_sup_vtilde)}};
}

json to_json(const A2Report& r) {
    return {{"max_depth", r.max_depth},
            {"estimate", r.estimate},
            {"growing", r.growing},
            {"per_depth", nums(r.per_depth)},
            {"cumulative", nums(r.cumulative)}};
}

json to_json(const ThinnessReport& r) {
    return {{"grid_exponent", r.m},
            {"n_terms", r.n_terms},
            {"margin", r.margin},
            {"partial", nums(r.partial)},
            {"block", r.block},
            {"block_ratios", nums(r.block_ratios)},
            {"stabilizes", r.stabilizes}};
}

json to_json(const ClaimReport& r) {
    json arcs = json::array();
    for (const auto& a : r.arcs) {
        arcs.push_back({{"n", a.n}, {"quadrature", a.quadrature}, {"grid", a.grid}, {"envelope", a.envelope}});
    }
    return {{"kappa", r.kappa},
            {"epsilon", r.epsilon},
            {"epsilon_kappa", r.epsilon_kappa},
            {"epsilon_admissible", r.epsilon_admissible},
            {"fitted_constant", num(r.fitted_constant)},
            {"arcs", arcs},
            {"thinness", to_json(r.thinness)},
            {"certificate", to_json(r.certificate)},
            {"flags", r.flags},
            {"pass", r.pass}};
}

// ---------------------------------------------------------------------------
// commands

void RunConfig::validate() const {
    if (grid_exponent) check_grid_exponent(*grid_exponent);
    if (!(tol_rel >= 0.0) || !(tol_gap > 0.0) || !(margin >= 0.0)) throw ConfigError("tolerances must be positive");
    if (n_min < 1 || n_max < n_min) throw ConfigError("need 1 <= n_min <= n_max");
    for (double d : delta_grid) {
        if (!(d > 0.0 && d < 1.0)) throw ConfigError("delta grid values must lie in (0, 1)");
    }
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
    if (epsilon && !(*epsilon > 0.0 && *epsilon <= 1.0)) throw ConfigError("epsilon must lie in (0, 1]");
    if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
}

json RunConfig::to_json() const {
    return {{"grid_exponent", opt(grid_exponent)},
            {"n_min", n_min},
            {"n_max", n_max},
            {"tol_rel", tol_rel},
            {"tol_gap", tol_gap},
            {"seed", seed},
            {"delta_grid", delta_grid},
            {"thetas", thetas},
            {"arc_base", arc_base},
            {"delta", delta},
            {"epsilon", opt(epsilon)},
            {"kappa", kappa},
            {"margin", margin},
            {"max_depth", opt(max_depth)}};
}

RunConfig run_config_from_json(const json& j) {
    RunConfig cfg;
    if (j.is_null()) return cfg;
    const Reader r(j, "");
    r.allow_only({"grid_exponent", "n_min", "n_max", "tol_rel", "tol_gap", "seed", "delta_grid", "thetas", "arc_base",
                  "delta", "epsilon", "kappa", "margin", "max_depth", "timings", "require_decision"});
    if (r.has("grid_exponent")) cfg.grid_exponent = r.integer("grid_exponent");
    auto size = [&](const char* key, std::size_t fallback) {
        if (!r.has(key)) return fallback;
        const int v = r.integer(key);
        if (v < 1) throw ParseError("expected a positive integer", r.at(key));
        return static_cast<std::size_t>(v);
    };
    cfg.n_min = size("n_min", cfg.n_min);
    cfg.n_max = size("n_max", cfg.n_max);
    cfg.tol_rel = r.number("tol_rel", cfg.tol_rel);
    cfg.tol_gap = r.number("tol_gap", cfg.tol_gap);
    if (r.has("seed")) {
        if (!r.raw("seed").is_number_unsigned()) throw ParseError("expected a nonnegative integer", r.at("seed"));
        cfg.seed = r.raw("seed").get<std::uint64_t>();
    }
    if (r.has("delta_grid")) cfg.delta_grid = numbers(r.array("delta_grid"), r.at("delta_grid"));
    if (r.has("thetas")) cfg.thetas = numbers(r.array("thetas"), r.at("thetas"));
    cfg.arc_base = r.number("arc_base", cfg.arc_base);
    cfg.delta = r.number("delta", cfg.delta);
    if (r.has("epsilon")) cfg.epsilon = r.number("epsilon");
    cfg.kappa = r.number("kappa", cfg.kappa);
    cfg.margin = r.number("margin", cfg.margin);
    if (r.has("max_depth")) cfg.max_depth = r.integer("max_depth");
    cfg.timings = r.boolean("timings", cfg.timings);
    cfg.require_decision = r.boolean("require_decision", cfg.require_decision);
    return cfg;
}

namespace {

GapConfig gap_config(const RunConfig& cfg) {
    GapConfig g;
    g.grid_exponent = cfg.grid_exponent.value_or(16);
    g.tol_gap = cfg.tol_gap;
    g.norm.tol_rel = cfg.tol_rel;
    g.norm.n_min = cfg.n_min;
    g.norm.n_max = cfg.n_max;
    g.norm.seed = cfg.seed;
    return g;
}

SaturationConfig saturation_config(const RunConfig& cfg) {
    SaturationConfig s;
    s.grid_exponent = cfg.grid_exponent.value_or(14);
    s.delta_grid = cfg.delta_grid;
    if (!cfg.thetas.empty()) s.arcs = ArcFamily{cfg.arc_base, cfg.thetas};
    return s;
}

Outcome run_norm(const json& input, const RunConfig& cfg) {
    const auto spec = symbol_from_json(input);
    const auto g = gap_report(spec, gap_config(cfg));
    return {{{"input", to_json(spec)}, {"result", to_json(g)}}, g.classification != GapClass::undecided};
}

Outcome run_saturation(const json& input, const RunConfig& cfg) {
    const auto spec = symbol_from_json(input);
    const auto v = saturation_verdict(spec, saturation_config(cfg));
    return {{{"input", to_json(spec)}, {"result", to_json(v)}}, v.verdict != Verdict::undecided};
}

Outcome run_weights(const json& input, const RunConfig& cfg) {
    const auto in = weight_from_json(input);
    const int m = cfg.grid_exponent.value_or(16);
    json result;
    const int depth = cfg.max_depth.value_or(std::max(0, m - 4));
    result["a2"] = to_json(estimate_a2(in.weight, m, std::min(depth, m)));
    const double eps = cfg.epsilon.value_or(cfg.delta / 2.0);
    bool decided = true;
    try {
        const auto c = apical_from_distance(in.weight, cfg.delta, eps, m, cfg.margin);
        result["apical"] = to_json(c);
        decided = c.status != CertificateStatus::undecided;
    } catch (const InapplicableError& e) {
        result["apical"] = {{"status", "inapplicable"}, {"reason", e.what()}};
    }
    if (in.thin_set) result["thinness"] = to_json(thinness_margin(*in.thin_set, in.thin_set->arcs.size(), m));
    json echo = {{"weight", to_json(in.weight.log_weight)}, {"floor_exponent", in.weight.floor_exponent}};
    if (in.kappa) echo["kappa"] = *in.kappa;
    if (in.thin_set) echo["thin_set"] = to_json(*in.thin_set);
    return {{{"input", echo}, {"result", result}}, decided};
}

Outcome run_claim(const json& input, const RunConfig& cfg) {
    const Reader r(input, "");
    const auto U = r.has("thin_set") ? thin_set_from_json(r.raw("thin_set"), "/thin_set") : thin_set_from_json(input);
    ClaimConfig cc;
    cc.m = cfg.grid_exponent.value_or(17);
    cc.n_terms = U.arcs.size();
    cc.margin = cfg.margin;
    const auto rep = verify_claim(U, cfg.kappa, cfg.epsilon.value_or(0.01), cc);
    return {{{"input", {{"thin_set", to_json(U)}}}, {"result", to_json(rep)}},
            rep.certificate.status != CertificateStatus::undecided};
}

SymbolSpec linear_symbol(double sign, bool atom) {
    SymbolSpec s;
    if (atom) s.singular.atoms = {{0.0, 1.0}};
    s.outer = OuterSpec(FormulaModulus{{PolyModulus{{1.0, sign}}}});
    return s;
}

Outcome run_examples(const RunConfig& cfg) {
    json checks = json::array();
    bool all = true;
    auto check = [&](const std::string& name, const std::function<std::pair<bool, json>()>& f) {
        json row = {{"name", name}};
        try {
            auto [ok, detail] = f();
            row["pass"] = ok;
            row["detail"] = detail;
        } catch (const std::exception& e) {
            row["pass"] = false;
            row["detail"] = std::string("error: ") + e.what();
        }
        all = all && row["pass"].get<bool>();
        checks.push_back(row);
    };
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    check("(1+z) times the atom at 1 is saturated by continuity", [&] {
        const auto v = saturation_verdict(linear_symbol(1.0, true), saturation_config(cfg));
        return std::pair{v.verdict == Verdict::saturated && v.basis == Basis::continuous,
                         json{{"verdict", to_string(v.verdict)}, {"basis", to_string(v.basis)}}};
    });
    check("1+z has gaps (sqrt(5)/2 + 1/2 - sqrt 2, 3/2 - sqrt(5)/2)", [&] {
        auto g = gap_config(cfg);
        g.grid_exponent = 12;
        g.norm.n_max = 64;
        const auto r = gap_report(linear_symbol(1.0, false), g);
        const bool ok = std::abs(r.minimality_gap - (golden - std::sqrt(2.0))) < 1e-6 &&
                        std::abs(r.maximality_gap - (2.0 - golden)) < 1e-6 &&
                        r.classification == GapClass::strict_interior;
        return std::pair{ok, json{{"minimality_gap", r.minimality_gap}, {"maximality_gap", r.maximality_gap}}};
    });
    check("(1-z) times the atom at 1 is improved", [&] {
        const auto v = saturation_verdict(linear_symbol(-1.0, true), saturation_config(cfg));
        return std::pair{v.verdict == Verdict::not_saturated,
                         json{{"verdict", to_string(v.verdict)}, {"gain", v.improver ? v.improver->gain : 0.0}}};
    });
    check("1+z without inner factor is improved", [&] {
        const auto v = saturation_verdict(linear_symbol(1.0, false), saturation_config(cfg));
        return std::pair{v.verdict == Verdict::not_saturated, json{{"verdict", to_string(v.verdict)}}};
    });
    check("z^3 has constant modulus", [&] {
        SymbolSpec s;
        s.blaschke.zeros = {{cplx{0.0}, 3}};
        const auto v = saturation_verdict(s, saturation_config(cfg));
        return std::pair{v.verdict == Verdict::saturated && v.basis == Basis::constant_modulus,
                         json{{"verdict", to_string(v.verdict)}, {"basis", to_string(v.basis)}}};
    });
    check("dyadic jump modulus passes the outer hypotheses", [&] {
        auto sc = saturation_config(cfg);
        sc.arcs = ArcFamily::geometric(0.0, 0.25, 5);
        const auto v = saturation_verdict(dyadic_jump_symbol(), sc);
        return std::pair{v.verdict == Verdict::saturated && v.basis == Basis::outer,
                         json{{"verdict", to_string(v.verdict)},
                              {"a", v.outer ? v.outer->measured_a : 0.0},
                              {"b", v.outer ? v.outer->measured_b : 0.0}}};
    });
    const auto U = ThinSetSpec::dyadic(1.0, 0.25, 12);
    check("dyadic family with b = 1/4 is thin", [&] {
        const auto t = thinness_margin(U, 12, 18);
        return std::pair{t.stabilizes, json{{"margin", t.margin}}};
    });
    check("w_kappa claim holds for kappa = 1, eps = 0.01", [&] {
        const auto r = verify_claim(U, 1.0, 0.01);
        return std::pair{r.pass, json{{"sup_vtilde", r.certificate.sup_vtilde}}};
    });
    check("A2 trend separates kappa = 2 from kappa = 1/2", [&] {
        const auto two = estimate_a2(build_w_kappa(U, 2.0), 16, 12);
        const auto half = estimate_a2(build_w_kappa(U, 0.5), 16, 12);
        return std::pair{two.growing && !half.growing, json{{"kappa_2", two.estimate}, {"kappa_half", half.estimate}}};
    });
    std::size_t passed = 0;
    for (const auto& c : checks) passed += c["pass"].get<bool>() ? 1 : 0;
    return {{{"input", nullptr}, {"result", {{"checks", checks}, {"passed", passed}, {"total", checks.size()}, {"all_pass", all}}}},
            all};
}

}  // namespace

Outcome run_command(const std::string& command, const json& input, const RunConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    if (command == "norm") {
        o = run_norm(input, cfg);
    } else if (command == "saturation") {
        o = run_saturation(input, cfg);
    } else if (command == "weights") {
        o = run_weights(input, cfg);
    } else if (command == "claim") {
        o = run_claim(input, cfg);
    } else if (command == "examples") {
        o = run_examples(cfg);
    } else {
        throw ConfigError("unknown command '" + command + "'");
    }
    json report = {{"tool", "hankel-saturate"}, {"version", version()}, {"command", command}, {"config", cfg.to_json()}};
    report["input"] = o.report["input"];
    report["result"] = o.report["result"];
    report["decided"] = o.decided;
    if (cfg.timings) {
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        report["timings"] = {{"total_ms", ms}};
    }
    o.report = std::move(report);
    return o;
}

// ---------------------------------------------------------------------------
// csv

namespace {

std::string cell(const json& v) {
    if (v.is_null()) return "";
    if (v.is_string()) {
        auto s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    }
    return v.dump();
}

std::string table(const std::vector<std::string>& cols, const json& rows) {
    std::ostringstream os;
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << "\n";
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cell(r.value(cols[i], json(nullptr)));
        os << "\n";
    }
    return os.str();
}

}  // namespace

std::string to_csv(const json& report) {
    const auto cmd = report.at("command").get<std::string>();
    const auto& res = report.at("result");
    if (cmd == "norm") return table({"n", "value", "residual", "matvecs", "status"}, res["norm_estimate"]["sizes"]);
    if (cmd == "saturation") {
        json rows = json::array();
        if (res.contains("badapp")) rows = res["badapp"]["steps"];
        return table({"delta", "pass", "witness", "interior_arcs"}, rows);
    }
    if (cmd == "weights") {
        json rows = json::array();
        const auto& a2 = res["a2"];
        for (std::size_t k = 0; k < a2["per_depth"].size(); ++k) {
            rows.push_back({{"depth", k}, {"per_depth", a2["per_depth"][k]}, {"cumulative", a2["cumulative"][k]}});
        }
        return table({"depth", "per_depth", "cumulative"}, rows);
    }
    if (cmd == "claim") return table({"n", "quadrature", "grid", "envelope"}, res["arcs"]);
    return table({"name", "pass"}, res["checks"]);
}

}  // namespace hsat
