// phicp: experiment driver for the quadratic-class primal-dual solvers.
//
//   phicp run --experiment ex1 --algorithm phi_cp [--config run.json] ...
//   phicp verify prox
//   phicp list-experiments
//
// Exit codes: 0 clean finish or algorithm self-stop, 1 verification
// failure, 2 configuration error, 3 numeric failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "phicp/algorithms.hpp"
#include "phicp/io.hpp"
#include "phicp/tomography.hpp"
#include "phicp/toy_problems.hpp"
#include "phicp/verify.hpp"

namespace {

using nlohmann::json;
using namespace phicp;

struct RunConfig {
    std::string experiment = "ex1";  // ex1 | ex2 | tomo
    std::string algorithm = "phi_cp";
    std::optional<double> tau, sigma;
    std::optional<long> iterations;
    std::optional<double> x0, y0, phi0_a, phi0_u, abar0;
    std::optional<std::string> schedule;
    std::optional<double> eps;
    std::optional<int> ex2_case;
    std::optional<double> gamma, ppa_xstar;
    std::optional<std::string> phantom;
    std::optional<int> size, detectors;
    std::optional<std::vector<double>> angles;
    std::optional<double> noise_sigma;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> monitors;
    std::string output_dir;
};

const std::set<std::string> kAlgorithms = {"cp",        "phi_cp",  "full_phi_cp",
                                           "phi_cp_v2", "phi_ppa", "phi_ppa_restricted"};

// Schema-checked config file; unknown keys are rejected outright.
RunConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("config: cannot open '" + path + "'");
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw std::invalid_argument("config: " + std::string(e.what()));
    }
    const std::set<std::string> known = {
        "experiment", "algorithm", "tau",       "sigma",     "iterations",  "x0",   "y0",
        "phi0_a",     "phi0_u",    "abar0",     "schedule",  "eps",         "case", "gamma",
        "ppa_xstar",  "phantom",   "size",      "detectors", "angles",      "noise_sigma",
        "seed",       "monitors",  "output_dir"};
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) throw std::invalid_argument("config: unknown key '" + key + "'");

    RunConfig c;
    try {
        if (j.contains("experiment")) c.experiment = j["experiment"].get<std::string>();
        if (j.contains("algorithm")) c.algorithm = j["algorithm"].get<std::string>();
        if (j.contains("tau")) c.tau = j["tau"].get<double>();
        if (j.contains("sigma")) c.sigma = j["sigma"].get<double>();
        if (j.contains("iterations")) c.iterations = j["iterations"].get<long>();
        if (j.contains("x0")) c.x0 = j["x0"].get<double>();
        if (j.contains("y0")) c.y0 = j["y0"].get<double>();
        if (j.contains("phi0_a")) c.phi0_a = j["phi0_a"].get<double>();
        if (j.contains("phi0_u")) c.phi0_u = j["phi0_u"].get<double>();
        if (j.contains("abar0")) c.abar0 = j["abar0"].get<double>();
        if (j.contains("schedule")) c.schedule = j["schedule"].get<std::string>();
        if (j.contains("eps")) c.eps = j["eps"].get<double>();
        if (j.contains("case")) c.ex2_case = j["case"].get<int>();
        if (j.contains("gamma")) c.gamma = j["gamma"].get<double>();
        if (j.contains("ppa_xstar")) c.ppa_xstar = j["ppa_xstar"].get<double>();
        if (j.contains("phantom")) c.phantom = j["phantom"].get<std::string>();
        if (j.contains("size")) c.size = j["size"].get<int>();
        if (j.contains("detectors")) c.detectors = j["detectors"].get<int>();
        if (j.contains("angles")) c.angles = j["angles"].get<std::vector<double>>();
        if (j.contains("noise_sigma")) c.noise_sigma = j["noise_sigma"].get<double>();
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("monitors")) c.monitors = j["monitors"].get<std::vector<std::string>>();
        if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
    } catch (const json::exception& e) {
        throw std::invalid_argument("config: " + std::string(e.what()));
    }
    return c;
}

std::string resolve_output_dir(const RunConfig& cfg) {
    if (!cfg.output_dir.empty()) return cfg.output_dir;
    if (const char* env = std::getenv("PHICP_OUTPUT_DIR"); env && *env) return env;
    return ".";
}

ASchedule make_schedule(const std::string& name, double a0, double eps) {
    if (name == "constant") return ASchedule::constant(a0);
    if (name == "quartic_feasible") return ASchedule::quartic_feasible(a0, eps);
    if (name == "quartic_full") return ASchedule::quartic_full(a0, eps);
    if (name == "inverse_square") return ASchedule::inverse_square(a0);
    if (name == "decrement") return ASchedule::decrement(a0, eps);
    throw std::invalid_argument("config: unknown schedule '" + name + "'");
}

json stop_to_json(const std::optional<StopInfo>& stop) {
    if (!stop) return nullptr;
    return json{{"reason", stop->reason}, {"iteration", stop->iteration}};
}

int run_toy(const RunConfig& cfg, const std::string& outdir) {
    const int which = cfg.experiment == "ex1" ? 1 : 2;
    const double tau = cfg.tau.value_or(0.25);
    const double sigma = cfg.sigma.value_or(0.25);
    const long iters = cfg.iterations.value_or(501);

    // initialization defaults per experiment (ex2 cases 1..3)
    double x0 = which == 1 ? 5.0 : 2.0;
    double y0 = 10.0;
    QuadraticPhi phi0 = which == 1 ? QuadraticPhi{2.0, {-5.0}} : QuadraticPhi{1.5, {2.0}};
    double abar0 = which == 1 ? 100.0 : 200.0;
    if (which == 2 && cfg.ex2_case) {
        switch (*cfg.ex2_case) {
            case 1: x0 = 2.0; phi0 = {1.5, {2.0}}; break;
            case 2: x0 = 5.0; phi0 = {1.5, {2.0}}; break;
            case 3: x0 = 5.0; phi0 = {5.0, {0.0}}; break;
            default: throw std::invalid_argument("config: ex2 case must be 1, 2 or 3");
        }
    }
    if (cfg.x0) x0 = *cfg.x0;
    if (cfg.y0) y0 = *cfg.y0;
    if (cfg.phi0_a) phi0.a = *cfg.phi0_a;
    if (cfg.phi0_u) phi0.u = {*cfg.phi0_u};
    if (cfg.abar0) abar0 = *cfg.abar0;
    const double eps = cfg.eps.value_or(1e-3);

    const StepSizes steps(tau, sigma, 1.0);
    RunResult run;
    ToyProblem toy;

    if (cfg.algorithm == "cp") {
        toy = build_example(which, Formulation::Classical);
        run = run_classical_cp(toy.spec, steps, make_classical_init({x0}, {y0}), iters);
    } else if (cfg.algorithm == "phi_cp") {
        toy = build_example(which, Formulation::PhiCp);
        const ASchedule sched = make_schedule(cfg.schedule.value_or("quartic_feasible"), abar0, eps);
        run = run_phi_cp(toy.spec, steps, sched, make_classical_init({x0}, {y0}), iters);
    } else if (cfg.algorithm == "full_phi_cp" || cfg.algorithm == "phi_cp_v2") {
        toy = build_example(which, Formulation::FullPhi);
        const ASchedule sched = make_schedule(cfg.schedule.value_or("quartic_full"), abar0, eps);
        const PDState init = make_phi_init({x0}, phi0);
        if (cfg.algorithm == "full_phi_cp")
            run = run_full_phi_cp(toy.spec, steps, sched, init, iters);
        else
            run = run_phi_cp_v2(toy.spec, steps, sched, init, iters);
    } else {
        throw std::invalid_argument("config: algorithm '" + cfg.algorithm + "' not valid for " + cfg.experiment);
    }

    annotate_distances(run.trace, toy);
    io::write_trace_csv(outdir + "/trace.csv", run.trace);

    double sup_abs_x = std::abs(run.trace.initial.x.at(0));
    for (const auto& rec : run.trace.records) sup_abs_x = std::max(sup_abs_x, std::abs(rec.x.at(0)));

    json metrics{{"experiment", cfg.experiment},
                 {"algorithm", cfg.algorithm},
                 {"iterations_run", run.state.n},
                 {"stop", stop_to_json(run.state.stopped)},
                 {"final_x", run.state.x.at(0)},
                 {"final_dist_primal", distance_to_saddle(run.state.x.at(0), toy)},
                 {"min_dist_primal", min_primal_distance(run.trace)},
                 {"sup_abs_x", sup_abs_x}};
    if (which == 2 && cfg.ex2_case) metrics["case"] = *cfg.ex2_case;
    io::write_text_file(outdir + "/metrics.json", metrics.dump() + "\n");

    for (const std::string& m : cfg.monitors) {
        if (m == "saddle_gap" && (cfg.algorithm == "cp" || cfg.algorithm == "phi_cp")) {
            const auto res =
                monitor_saddle_gap(run.trace, {toy.primal_refs.front()}, *toy.dual_ref_y, steps, toy.spec);
            double worst = std::numeric_limits<double>::infinity();
            for (double v : res) worst = std::min(worst, v);
            std::cout << "monitor saddle_gap: worst residual " << io::format_g17(worst) << "\n";
        }
    }
    std::cout << "wrote " << outdir << "/trace.csv and metrics.json ("
              << (run.state.stopped ? "stopped: " + run.state.stopped->reason : "completed") << ")\n";
    return 0;
}

int run_ppa(const RunConfig& cfg, const std::string& outdir) {
    const double c = cfg.experiment == "ex2" ? -1.0 : 1.0;
    const double xstar = cfg.ppa_xstar.value_or(0.0);
    const double gamma = cfg.gamma.value_or(1.0);
    const long iters = cfg.iterations.value_or(1000);
    const QuadraticPhi phi0{cfg.phi0_a.value_or(0.0), {cfg.phi0_u.value_or(5.0)}};
    const bool restricted = cfg.algorithm == "phi_ppa_restricted";

    const PhiPpaProblem P = make_quadratic_conjugate_ppa(c, xstar);
    const PpaResult res = run_phi_ppa(P, gamma, phi0, iters, restricted);
    io::write_ppa_trace_csv(outdir + "/trace.csv", res.trace);

    json metrics{{"experiment", cfg.experiment},
                 {"algorithm", cfg.algorithm},
                 {"iterations_run", static_cast<long>(res.trace.size()) - 1},
                 {"stop", stop_to_json(res.stopped)},
                 {"final_a", res.phi.a},
                 {"final_u", res.phi.u.at(0)},
                 {"final_h", res.trace.back().h}};
    io::write_text_file(outdir + "/metrics.json", metrics.dump() + "\n");
    std::cout << "wrote " << outdir << "/trace.csv and metrics.json\n";
    return 0;
}

int run_tomo(const RunConfig& cfg, const std::string& outdir) {
    const int size = cfg.size.value_or(32);
    const int detectors = cfg.detectors.value_or(size);
    const std::vector<double> angles = cfg.angles.value_or(std::vector<double>{0.0, 50.0, 100.0, 150.0});
    const double noise_sigma = cfg.noise_sigma.value_or(0.01);
    const std::uint64_t seed = cfg.seed.value_or(42);
    const long iters = cfg.iterations.value_or(500);
    const double abar0 = cfg.abar0.value_or(100.0);
    const std::string shape = cfg.phantom.value_or("disk");

    const Phantom ph = make_phantom(shape, size);
    const ProjectionOperator A = build_projector(size, size, angles, detectors);
    const TomoResult res = run_tomo_experiment(ph, A, noise_sigma, seed, iters, abar0);
    const CglsResult base = cgls_baseline(A, res.sinogram.values, 200);

    io::write_trace_csv(outdir + "/trace.csv", res.trace);
    io::write_pgm(outdir + "/phantom.pgm", ph.width, ph.height, ph.pixels);
    io::write_pgm(outdir + "/reconstruction.pgm", ph.width, ph.height, res.x);
    io::write_pgm(outdir + "/reconstruction_binary.pgm", ph.width, ph.height, res.x_binary);
    io::write_pgm(outdir + "/cgls_thresholded.pgm", ph.width, ph.height, base.x_thresholded);
    io::write_flat_csv(outdir + "/phantom.csv", ph.pixels);
    io::write_flat_csv(outdir + "/reconstruction.csv", res.x);
    io::write_flat_csv(outdir + "/sinogram.csv", res.sinogram.values);

    const json metrics{{"phantom", shape},
                       {"angles", angles},
                       {"sigma", noise_sigma},
                       {"seed", seed},
                       {"iters", iters},
                       {"hamming", res.metrics.hamming},
                       {"binariness", res.metrics.binariness},
                       {"residual", res.metrics.residual}};
    io::write_text_file(outdir + "/metrics.json", metrics.dump() + "\n");

    std::cout << "tomo " << shape << " " << size << "x" << size << ": ||A||=" << res.op_norm
              << " hamming=" << res.metrics.hamming << " (cgls "
              << hamming_distance(base.x_thresholded, ph.pixels) << ") binariness=" << res.metrics.binariness
              << " residual=" << res.metrics.residual << "\n";
    std::cout << "wrote trace.csv, metrics.json, sinogram.csv and pgm images under " << outdir << "\n";
    return 0;
}

int cmd_run(const RunConfig& cfg) {
    if (!kAlgorithms.count(cfg.algorithm))
        throw std::invalid_argument("config: unknown algorithm '" + cfg.algorithm + "'");
    if (cfg.experiment != "ex1" && cfg.experiment != "ex2" && cfg.experiment != "tomo")
        throw std::invalid_argument("config: unknown experiment '" + cfg.experiment + "'");

    const std::string outdir = resolve_output_dir(cfg);
    std::filesystem::create_directories(outdir);

    if (cfg.algorithm == "phi_ppa" || cfg.algorithm == "phi_ppa_restricted") return run_ppa(cfg, outdir);
    if (cfg.experiment == "tomo") {
        if (cfg.algorithm != "phi_cp")
            throw std::invalid_argument("config: the tomography experiment runs algorithm phi_cp");
        return run_tomo(cfg, outdir);
    }
    return run_toy(cfg, outdir);
}

int cmd_verify(const std::string& suite) {
    const auto results = verify::run_suite(suite);
    for (const auto& r : results)
        std::cout << (r.passed ? "[ok]   " : "[FAIL] ") << r.name << (r.detail.empty() ? "" : " - " + r.detail)
                  << "\n";
    const bool ok = verify::all_passed(results);
    std::cout << (ok ? "all properties passed" : "PROPERTY FAILURES") << " (" << suite << ")\n";
    return ok ? 0 : 1;
}

int cmd_list() {
    std::cout << "experiments:\n"
              << "  ex1   min x^4 + x^2   (tau=sigma=0.25, N=501, x0=5, y0=10, phi0=(2,-5), abar0=100)\n"
              << "        algorithms: cp, phi_cp, full_phi_cp, phi_cp_v2, phi_ppa, phi_ppa_restricted\n"
              << "  ex2   min x^4 - x^2   (tau=sigma=0.25, N=501, abar0=200; --case 1|2|3 picks the\n"
              << "        initialization: 1: x0=2, phi0=(1.5,2)  2: x0=5, phi0=(1.5,2)  3: x0=5, phi0=(5,0))\n"
              << "        algorithms: full_phi_cp, phi_cp_v2 (classical cp is rejected: g is not convex)\n"
              << "  tomo  binary tomography (phantom disk|rect|annulus|two-disks, size 32, detectors=size,\n"
              << "        angles 0,50,100,150, noise sigma 0.01, seed 42, N=500, abar0=100,\n"
              << "        schedule inverse_square, steps tau=sigma=0.9/||A||)\n"
              << "verify suites: phi_calculus, prox, monitors, tomo_geometry\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quadratic-class primal-dual experiments"};
    app.require_subcommand(1);

    RunConfig flags;
    std::string config_path;
    std::vector<double> angles_flag;
    std::uint64_t seed_flag = 0;

    CLI::App* run = app.add_subcommand("run", "run one experiment and write trace/metrics files");
    run->add_option("--config", config_path, "JSON config file (flags override it)");
    auto* o_exp = run->add_option("--experiment", flags.experiment, "ex1 | ex2 | tomo");
    auto* o_alg = run->add_option("--algorithm", flags.algorithm,
                                  "cp | phi_cp | full_phi_cp | phi_cp_v2 | phi_ppa | phi_ppa_restricted");
    run->add_option("--tau", flags.tau, "dual step size");
    run->add_option("--sigma", flags.sigma, "primal step size");
    run->add_option("--iters", flags.iterations, "iteration budget");
    run->add_option("--x0", flags.x0, "primal initialization");
    run->add_option("--y0", flags.y0, "classical dual initialization");
    run->add_option("--phi0-a", flags.phi0_a, "pair dual initialization, a");
    run->add_option("--phi0-u", flags.phi0_u, "pair dual initialization, u");
    run->add_option("--abar0", flags.abar0, "initial primal curvature");
    run->add_option("--schedule", flags.schedule,
                    "constant | quartic_feasible | quartic_full | inverse_square | decrement");
    run->add_option("--eps", flags.eps, "schedule damping");
    run->add_option("--case", flags.ex2_case, "ex2 initialization case (1|2|3)");
    run->add_option("--gamma", flags.gamma, "dual-space proximal step");
    run->add_option("--ppa-xstar", flags.ppa_xstar, "anchor point of the dual-space objective");
    run->add_option("--phantom", flags.phantom, "disk | rect | annulus | two-disks");
    run->add_option("--size", flags.size, "phantom side length");
    run->add_option("--detectors", flags.detectors, "detector count");
    auto* o_angles = run->add_option("--angles", angles_flag, "projection angles in degrees");
    run->add_option("--noise-sigma", flags.noise_sigma, "measurement noise level");
    auto* o_seed = run->add_option("--seed", seed_flag, "noise seed");
    auto* o_monitors = run->add_option("--monitors", flags.monitors, "monitors to evaluate after the run");
    auto* o_outdir = run->add_option("--output-dir", flags.output_dir,
                                     "output directory (default $PHICP_OUTPUT_DIR or .)");

    std::string suite;
    CLI::App* verify_cmd = app.add_subcommand("verify", "run a property suite and report per-property results");
    verify_cmd->add_option("suite", suite, "phi_calculus | prox | monitors | tomo_geometry")->required();

    CLI::App* list_cmd = app.add_subcommand("list-experiments", "describe experiments and their defaults");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (list_cmd->parsed()) return cmd_list();
        if (verify_cmd->parsed()) return cmd_verify(suite);

        if (o_angles->count()) flags.angles = angles_flag;
        if (o_seed->count()) flags.seed = seed_flag;

        RunConfig cfg = flags;
        if (!config_path.empty()) {
            cfg = parse_config_file(config_path);
            // explicit flags win over the file
            if (o_exp->count()) cfg.experiment = flags.experiment;
            if (o_alg->count()) cfg.algorithm = flags.algorithm;
            if (flags.tau) cfg.tau = flags.tau;
            if (flags.sigma) cfg.sigma = flags.sigma;
            if (flags.iterations) cfg.iterations = flags.iterations;
            if (flags.x0) cfg.x0 = flags.x0;
            if (flags.y0) cfg.y0 = flags.y0;
            if (flags.phi0_a) cfg.phi0_a = flags.phi0_a;
            if (flags.phi0_u) cfg.phi0_u = flags.phi0_u;
            if (flags.abar0) cfg.abar0 = flags.abar0;
            if (flags.schedule) cfg.schedule = flags.schedule;
            if (flags.eps) cfg.eps = flags.eps;
            if (flags.ex2_case) cfg.ex2_case = flags.ex2_case;
            if (flags.gamma) cfg.gamma = flags.gamma;
            if (flags.ppa_xstar) cfg.ppa_xstar = flags.ppa_xstar;
            if (flags.phantom) cfg.phantom = flags.phantom;
            if (flags.size) cfg.size = flags.size;
            if (flags.detectors) cfg.detectors = flags.detectors;
            if (flags.angles) cfg.angles = flags.angles;
            if (flags.noise_sigma) cfg.noise_sigma = flags.noise_sigma;
            if (flags.seed) cfg.seed = flags.seed;
            if (o_monitors->count()) cfg.monitors = flags.monitors;
            if (o_outdir->count()) cfg.output_dir = flags.output_dir;
        }
        return cmd_run(cfg);
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const phicp::schedule_error& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const phicp::prox_error& e) {
        std::cerr << "numeric failure at iteration " << e.iteration() << ": " << e.what() << "\n";
        return 3;
    } catch (const phicp::numeric_error& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
