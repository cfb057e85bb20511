// Command-line front end for the oval billiard library.
//
// Exit codes: 0 success, 1 configuration error, 2 solver/domain error,
// 3 invariant verification failure.

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "ovb/ovb.hpp"

namespace {

struct OutputSink {
    std::unique_ptr<std::ofstream> file;
    std::ostream* os = &std::cout;

    explicit OutputSink(const std::string& path) {
        if (path != "-") {
            file = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file) throw ovb::usage_error("cannot open output file '" + path + "'");
            os = file.get();
        }
    }
};

int config_error(const std::exception& ex) {
    std::cerr << "config error: " << ex.what() << "\n";
    return 1;
}

int run_error(const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"billiards in convex ovals on constant-curvature surfaces"};
    app.require_subcommand(1);

    std::string config_path, out_path = "-";
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--out", out_path, "output path or '-' for stdout");

    double s0 = 0.0, psi0 = 1.5707963267948966;
    int steps = 100;
    auto* sim = app.add_subcommand("simulate", "iterate one trajectory, CSV output");
    sim->add_option("--s0", s0, "initial arclength");
    sim->add_option("--psi0", psi0, "initial angle in (0, pi)");
    sim->add_option("--steps", steps, "number of map iterations");

    int grid_s = 10, grid_psi = 10, psteps = 100;
    auto* por = app.add_subcommand("portrait", "phase portrait over a grid of initial conditions");
    por->add_option("--grid-s", grid_s, "initial conditions along s");
    por->add_option("--grid-psi", grid_psi, "initial conditions along psi");
    por->add_option("--steps", psteps, "iterations per initial condition");

    int m = 1, n = 2, seeds = 32;
    auto* fo = app.add_subcommand("find-orbits", "search Birkhoff (m,n) orbits, JSON report");
    fo->add_option("--m", m, "winding number");
    fo->add_option("--n", n, "period");
    fo->add_option("--seeds", seeds, "multistart seeds");

    int samples = 100;
    auto* ver = app.add_subcommand("verify", "run the invariant suite, JSON summary");
    ver->add_option("--samples", samples, "random samples per check");

    int pm = 1, pn = 2, pindex = 0;
    double width = 0.5, amplitude = 0.05;
    auto* per = app.add_subcommand("perturb", "bump one orbit vertex and track the trace");
    per->add_option("--m", pm, "orbit winding number");
    per->add_option("--n", pn, "orbit period");
    per->add_option("--index", pindex, "orbit index in find-orbits order");
    per->add_option("--width", width, "bump support width");
    per->add_option("--amplitude", amplitude, "bump amplitude");

    auto* area = app.add_subcommand("area", "enclosed area and length, JSON output");
    (void)area;

    CLI11_PARSE(app, argc, argv);

    ovb::RunConfig cfg;
    try {
        cfg = ovb::load_run_config(config_path);
    } catch (const std::exception& ex) {
        return config_error(ex);
    }

    try {
        OutputSink sink(out_path);
        if (sim->parsed()) {
            std::ostringstream buf;
            ovb::cmd_simulate(cfg, s0, psi0, steps, buf);
            *sink.os << buf.str();
        } else if (por->parsed()) {
            std::ostringstream buf;
            ovb::cmd_portrait(cfg, grid_s, grid_psi, psteps, buf);
            *sink.os << buf.str();
        } else if (fo->parsed()) {
            *sink.os << ovb::cmd_find_orbits(cfg, m, n, seeds).dump(2) << "\n";
        } else if (ver->parsed()) {
            bool all_pass = false;
            *sink.os << ovb::cmd_verify(cfg, samples, &all_pass).dump(2) << "\n";
            if (!all_pass) return 3;
        } else if (per->parsed()) {
            *sink.os << ovb::cmd_perturb(cfg, pm, pn, pindex, width, amplitude).dump(2) << "\n";
        } else {
            *sink.os << ovb::cmd_area(cfg).dump(2) << "\n";
        }
        sink.os->flush();
    } catch (const ovb::usage_error& ex) {
        return config_error(ex);
    } catch (const std::exception& ex) {
        return run_error(ex);
    }
    return 0;
}
