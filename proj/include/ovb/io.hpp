#pragma once

// JSON run configuration, report serialization and the CLI command runners.
// All numeric output is locale-independent: CSV fields are printed with 17
// significant digits via to_chars, JSON through nlohmann's own writer, so
// identical configurations produce identical bytes.

#include <atomic>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "ovb/billiard.hpp"
#include "ovb/errors.hpp"
#include "ovb/orbits.hpp"
#include "ovb/oval.hpp"
#include "ovb/perturb.hpp"
#include "ovb/verify.hpp"

namespace ovb {

using json = nlohmann::json;

inline std::string fmt17(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Run configuration

struct RunConfig {
    OvalSpec spec;
    int resolution = 2048;
    Tolerances tol;
    std::uint64_t seed = 0;
};

namespace detail {

inline void reject_unknown_keys(const json& j, std::initializer_list<const char*> known,
                                const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) { ok = true; break; }
        if (!ok) throw usage_error("config: unknown key '" + it.key() + "' in " + where);
    }
}

inline SurfaceKind parse_surface(const std::string& s) {
    if (s == "euclidean") return SurfaceKind::Euclidean;
    if (s == "sphere") return SurfaceKind::Sphere;
    if (s == "hyperbolic") return SurfaceKind::Hyperbolic;
    throw usage_error("config: unknown surface '" + s + "'");
}

}  // namespace detail

inline json oval_spec_to_json(const OvalSpec& spec) {
    json curve;
    if (const auto* c = std::get_if<CircleFamily>(&spec.family)) {
        curve["family"] = "circle";
        curve["radius"] = c->radius;
    } else if (const auto* e = std::get_if<EllipseFamily>(&spec.family)) {
        curve["family"] = "ellipse";
        curve["a"] = e->a;
        curve["b"] = e->b;
    } else {
        const auto& p = std::get<PolarFamily>(spec.family);
        curve["family"] = "polar";
        curve["c0"] = p.c0;
        json coeffs = json::array();
        for (const auto& [a, b] : p.coeffs) coeffs.push_back(json::array({a, b}));
        curve["coeffs"] = coeffs;
    }
    if (spec.center) curve["center"] = json::array({spec.center->r.x, spec.center->r.y, spec.center->r.z});
    return json{{"surface", to_string(spec.kind)}, {"curve", curve}};
}

inline OvalSpec oval_spec_from_json(const json& j) {
    detail::reject_unknown_keys(j, {"surface", "curve"}, "oval spec");
    OvalSpec spec;
    spec.kind = detail::parse_surface(j.at("surface").get<std::string>());
    const json& c = j.at("curve");
    const std::string family = c.at("family").get<std::string>();
    if (family == "circle") {
        detail::reject_unknown_keys(c, {"family", "radius", "center"}, "curve");
        spec.family = CircleFamily{c.at("radius").get<double>()};
    } else if (family == "ellipse") {
        detail::reject_unknown_keys(c, {"family", "a", "b", "center"}, "curve");
        spec.family = EllipseFamily{c.at("a").get<double>(), c.at("b").get<double>()};
    } else if (family == "polar") {
        detail::reject_unknown_keys(c, {"family", "c0", "coeffs", "center"}, "curve");
        PolarFamily p;
        p.c0 = c.at("c0").get<double>();
        if (c.contains("coeffs"))
            for (const auto& pair : c.at("coeffs")) {
                if (!pair.is_array() || pair.size() != 2)
                    throw usage_error("config: polar coeffs must be [a_j, b_j] pairs");
                p.coeffs.emplace_back(pair[0].get<double>(), pair[1].get<double>());
            }
        spec.family = std::move(p);
    } else {
        throw usage_error("config: unknown curve family '" + family + "'");
    }
    if (c.contains("center")) {
        const auto& ctr = c.at("center");
        if (!ctr.is_array() || ctr.size() != 3) throw usage_error("config: center must be [x, y, z]");
        spec.center = SurfacePoint(spec.kind, {ctr[0].get<double>(), ctr[1].get<double>(), ctr[2].get<double>()});
    }
    return spec;
}

inline RunConfig parse_run_config(const json& j) {
    detail::reject_unknown_keys(j, {"surface", "curve", "resolution", "tolerances", "seed"}, "config");
    RunConfig cfg;
    cfg.spec = oval_spec_from_json(json{{"surface", j.at("surface")}, {"curve", j.at("curve")}});
    if (j.contains("resolution")) cfg.resolution = j.at("resolution").get<int>();
    if (cfg.resolution < 64) throw usage_error("config: resolution must be at least 64");
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        detail::reject_unknown_keys(t,
                                    {"gen_first", "gen_second", "jacobian_rel", "det_measure",
                                     "reversibility", "newton", "closure"},
                                    "tolerances");
        auto get = [&](const char* k, double& dst) {
            if (t.contains(k)) {
                dst = t.at(k).get<double>();
                if (!(dst > 0.0)) throw usage_error(std::string("config: tolerance '") + k + "' must be positive");
            }
        };
        get("gen_first", cfg.tol.gen_first);
        get("gen_second", cfg.tol.gen_second);
        get("jacobian_rel", cfg.tol.jacobian_rel);
        get("det_measure", cfg.tol.det_measure);
        get("reversibility", cfg.tol.reversibility);
        get("newton", cfg.tol.newton);
        get("closure", cfg.tol.closure);
    }
    return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw usage_error("config: cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw usage_error(std::string("config: JSON parse error: ") + ex.what());
    }
    return parse_run_config(j);
}

// ---------------------------------------------------------------------------
// Reports

inline json orbit_to_json(const PeriodicOrbit& o, bool strip_ok) {
    json s = json::array(), psi = json::array();
    for (const PhasePoint& p : o.points) {
        s.push_back(p.s);
        psi.push_back(p.psi);
    }
    return json{{"n", o.config.n},
                {"m", o.config.m},
                {"s", s},
                {"psi", psi},
                {"trace", o.trace},
                {"hessian_det", o.hessian_det},
                {"class", to_string(o.cls)},
                {"residue_lhs", o.residue_lhs},
                {"residue_rhs", o.residue_rhs},
                {"residue_rel_err", std::fabs(o.residue_lhs - o.residue_rhs) /
                                        std::max(1.0, std::fabs(o.residue_lhs))},
                {"action", o.action},
                {"closure_residual", o.closure_residual},
                {"degenerate_family", o.degenerate_family},
                {"strip_ok", strip_ok}};
}

inline json verify_report_to_json(const VerifyReport& rep, int samples) {
    auto check = [](const CheckResult& c) {
        return json{{"max_residual", c.max_residual}, {"tolerance", c.tolerance}, {"pass", c.pass}};
    };
    return json{{"samples", samples},
                {"all_pass", rep.all_pass()},
                {"checks",
                 json{{"gen_first", check(rep.gen_first)},
                      {"gen_second", check(rep.gen_second)},
                      {"jacobian", check(rep.jacobian)},
                      {"det_measure", check(rep.det_measure)},
                      {"reversibility", check(rep.reversibility)},
                      {"twist", json{{"min_b", rep.twist_min}, {"pass", rep.twist_pass}}}}}};
}

// ---------------------------------------------------------------------------
// Command runners (the CLI is a thin argv wrapper around these)

inline void cmd_simulate(const RunConfig& cfg, double s0, double psi0, int steps, std::ostream& os) {
    if (steps < 0) throw usage_error("simulate: steps must be nonnegative");
    const Oval oval = build_oval(cfg.spec, cfg.resolution);
    os << "i,s,psi,p\n";
    PhasePoint x{wrap_periodic(s0, oval.length()), psi0};
    for (int i = 0; i <= steps; ++i) {
        os << i << ',' << fmt17(x.s) << ',' << fmt17(x.psi) << ',' << fmt17(-std::cos(x.psi)) << '\n';
        if (i < steps) x = next_impact(oval, x);
    }
}

inline void cmd_portrait(const RunConfig& cfg, int grid_s, int grid_psi, int steps, std::ostream& os) {
    if (grid_s < 1 || grid_psi < 1) throw usage_error("portrait: grid sizes must be at least 1");
    if (steps < 1) throw usage_error("portrait: steps must be positive");
    const Oval oval = build_oval(cfg.spec, cfg.resolution);
    const double pi = std::acos(-1.0);
    const double l = oval.length();

    struct Ic {
        double s0, psi0;
    };
    std::vector<Ic> ics;
    ics.reserve(static_cast<std::size_t>(grid_s) * grid_psi);
    for (int a = 0; a < grid_s; ++a)
        for (int b = 0; b < grid_psi; ++b)
            ics.push_back({l * a / grid_s, pi * (b + 1) / (grid_psi + 1)});

    // Initial conditions are independent; fan out, then emit in order.
    std::vector<std::string> blocks(ics.size());
    std::atomic<std::size_t> cursor{0};
    auto work = [&]() {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= ics.size()) return;
            std::string out;
            const std::string head = fmt17(ics[i].s0) + ',' + fmt17(ics[i].psi0) + ',';
            PhasePoint x{ics[i].s0, ics[i].psi0};
            for (int k = 0; k < steps; ++k) {
                out += head;
                out += std::to_string(k);
                out += ',';
                out += fmt17(x.s);
                out += ',';
                out += fmt17(x.psi);
                out += '\n';
                if (k + 1 < steps) x = next_impact(oval, x);
            }
            blocks[i] = std::move(out);
        }
    };
    const unsigned hw = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < hw; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();

    os << "s0,psi0,i,s,psi\n";
    for (const std::string& b : blocks) os << b;
}

inline json cmd_find_orbits(const RunConfig& cfg, int m, int n, int seeds) {
    const Oval oval = build_oval(cfg.spec, cfg.resolution);
    const std::vector<PeriodicOrbit> orbits = find_birkhoff(oval, m, n, seeds, cfg.seed);
    const StripBound bound = strip_bound(oval, n);
    json jorbits = json::array();
    for (const PeriodicOrbit& o : orbits) jorbits.push_back(orbit_to_json(o, strip_check(o, bound)));
    json strip{{"n", bound.n}, {"delta", bound.delta}};
    if (oval.kind() == SurfaceKind::Sphere) {
        strip["m0"] = bound.m0;
        strip["area"] = bound.area;
    }
    return json{{"surface", to_string(oval.kind())}, {"m", m},     {"n", n},
                {"seeds", seeds},                    {"count", orbits.size()},
                {"strip", strip},                    {"orbits", jorbits}};
}

inline json cmd_verify(const RunConfig& cfg, int samples, bool* all_pass = nullptr) {
    if (samples < 1) throw usage_error("verify: samples must be positive");
    const Oval oval = build_oval(cfg.spec, cfg.resolution);
    const VerifyReport rep = run_verify_suite(oval, samples, cfg.seed, cfg.tol);
    if (all_pass) *all_pass = rep.all_pass();
    json j = verify_report_to_json(rep, samples);
    j["surface"] = to_string(oval.kind());
    return j;
}

inline json cmd_perturb(const RunConfig& cfg, int m, int n, int index, double width,
                        double amplitude, int seeds = 32) {
    const Oval oval = build_oval(cfg.spec, cfg.resolution);
    const std::vector<PeriodicOrbit> orbits = find_birkhoff(oval, m, n, seeds, cfg.seed);
    if (index < 0 || index >= static_cast<int>(orbits.size()))
        throw usage_error("perturb: orbit index out of range (found " +
                          std::to_string(orbits.size()) + " orbits)");
    const BreakDegeneracyResult r = break_degeneracy(oval, orbits[static_cast<std::size_t>(index)],
                                                     width, amplitude);
    return json{{"m", m},
                {"n", n},
                {"index", index},
                {"width", width},
                {"amplitude", amplitude},
                {"lambda_c2_norm", r.lambda_c2_norm},
                {"old_trace", r.old_trace},
                {"new_trace", r.new_trace},
                {"trace_shift", r.new_trace - r.old_trace},
                {"orbit_residual", r.orbit_residual},
                {"moved_off_two", r.moved_off_two},
                {"perturbed_length", r.new_oval.length()},
                {"perturbed_min_curvature", r.new_oval.certificate().min_curvature}};
}

inline json cmd_area(const RunConfig& cfg) {
    const Oval oval = build_oval(cfg.spec, cfg.resolution);
    return json{{"surface", to_string(oval.kind())},
                {"length", oval.length()},
                {"area", oval.enclosed_area()},
                {"min_curvature", oval.certificate().min_curvature}};
}

}  // namespace ovb
