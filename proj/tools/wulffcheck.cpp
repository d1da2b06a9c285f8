// wulffcheck: builds Wulff shapes, runs verification suites and the
// stability pipeline, and summarizes reports.
//
// Exit codes: 0 pass, 1 numerical failure, 2 invalid input, 3 hypothesis
// violated.

#include "wulff/config.hpp"
#include "wulff/io.hpp"
#include "wulff/parallel.hpp"
#include "wulff/stability.hpp"
#include "wulff/suites.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

using namespace wulff;
using nlohmann::ordered_json;

namespace {

enum Exit { exit_pass = 0, exit_numerical = 1, exit_input = 2, exit_hypothesis = 3 };

struct Flags {
    std::string config;
    std::optional<int> resolution;
    std::optional<std::string> out;
    std::optional<int> workers;
    std::optional<double> tol_scale;
    std::optional<int> n;
    std::optional<int> samples;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> surface;
    std::optional<std::string> model;
    std::vector<std::string> suites;
    std::vector<std::string> inputs;
};

void add_common(CLI::App* cmd, Flags& f)
{
    cmd->add_option("--config", f.config, "JSON run configuration");
    cmd->add_option("--resolution", f.resolution, "Grid resolution N (polar nodes per half turn)");
    cmd->add_option("--out", f.out, "Output directory");
    cmd->add_option("--workers", f.workers, "Worker threads for node-parallel kernels");
    cmd->add_option("--tol-scale", f.tol_scale, "Multiplier applied to every tolerance");
    cmd->add_option("--n", f.n, "Hypersurface dimension");
    cmd->add_option("--samples", f.samples, "Random samples for the algebra suites");
    cmd->add_option("--seed", f.seed, "Random seed");
    cmd->add_option("--surface", f.surface, "Surface kind: sphere, ellipsoid, wulff, torus");
    cmd->add_option("--model", f.model, "Anisotropy kind: isotropic, quadric, pnorm, dip");
}

RunConfig make_config(const Flags& f)
{
    RunConfig cfg = f.config.empty() ? RunConfig{} : load_config(f.config);
    if (f.resolution) cfg.resolution = *f.resolution;
    if (f.out) cfg.out = *f.out;
    if (f.workers) cfg.workers = *f.workers;
    if (f.tol_scale) cfg.tol_scale = *f.tol_scale;
    if (f.n) cfg.n = *f.n;
    if (f.samples) cfg.samples = *f.samples;
    if (f.seed) cfg.seed = *f.seed;
    if (f.surface) cfg.surface.kind = *f.surface;
    if (f.model) cfg.anisotropy.kind = *f.model;
    if (!f.suites.empty()) cfg.suites = f.suites;
    validate_config(cfg);
    set_worker_count(cfg.workers);
    return cfg;
}

void finish(ordered_json& j, int code)
{
    static const char* names[] = {"pass", "numerical-fail", "invalid-input", "hypothesis-violated"};
    j["status"] = names[code];
    j["exit_code"] = code;
}

int cmd_wulffgen(const RunConfig& cfg)
{
    const AnisotropyModel model = make_model(cfg.surface.model ? *cfg.surface.model : cfg.anisotropy, cfg.n);
    const ConvexityReport scan = convexity_scan(model);
    std::cout << "convexity: min eigenvalue " << scan.min_eigenvalue << " over " << scan.samples << " samples\n";
    if (!scan.accepted()) {
        std::cout << "model is not convex; minimum at (";
        for (int i = 0; i < scan.argmin.size(); ++i) std::cout << (i ? ", " : "") << scan.argmin(i);
        std::cout << ")\n";
        return exit_input;
    }
    const SampledImmersion imm = build_parametric(wulff_map(model, cfg.surface.scale), cfg.resolution);
    ensure_directory(cfg.out);
    const std::string csv = cfg.out + "/wulff_samples.csv";
    write_positions_csv(imm, csv);
    ordered_json rep = report_header(cfg, "wulffgen");
    rep["convexity_min_eigenvalue"] = scan.min_eigenvalue;
    rep["nodes"] = imm.size();
    rep["area"] = total_area(imm);
    rep["enclosed_volume"] = enclosed_volume(imm);
    ordered_json files = ordered_json::array({csv});
    if (cfg.n == 2) {
        const std::string off = cfg.out + "/wulff.off";
        write_off(imm, off);
        files.push_back(off);
    }
    if (model.kind() == AnisotropyModel::Kind::quadric) {
        const Mat qinv = model.q_matrix().inverse();
        double residual = 0.0;
        for (const Vec& z : imm.position) {
            const Vec y = z / cfg.surface.scale;
            residual = std::max(residual, std::abs(y.dot(qinv * y) - 1.0));
        }
        std::cout << "membership residual max |z^T Q^-1 z - 1| = " << residual << "\n";
        rep["membership_residual"] = residual;
    }
    rep["files"] = files;
    finish(rep, exit_pass);
    write_json(rep, cfg.out + "/wulffgen.json");
    std::cout << "wrote " << imm.size() << " samples to " << cfg.out << "\n";
    return exit_pass;
}

int cmd_verify(const RunConfig& cfg)
{
    const AnisotropyModel model = make_model(cfg.anisotropy, cfg.n);
    const ConvexityReport scan = convexity_scan(model);
    if (!scan.accepted()) {
        std::cout << "model is not convex: min eigenvalue " << scan.min_eigenvalue << "\n";
        return exit_input;
    }
    std::vector<std::string> suites = cfg.suites.empty() ? known_suites() : cfg.suites;
    ordered_json rep = report_header(cfg, "verify");
    ordered_json results = ordered_json::array();
    bool all = true;
    for (const auto& name : suites) {
        SuiteResult res;
        try {
            res = run_suite(name, cfg);
        } catch (const ConditioningError& e) {
            res = SuiteResult{name, false, {{"error", e.what()}}};
        } catch (const ConsistencyError& e) {
            res = SuiteResult{name, false, {{"error", e.what()}}};
        }
        all = all && res.passed;
        std::cout << (res.passed ? "PASS " : "FAIL ") << name << "\n";
        results.push_back({{"suite", res.name}, {"passed", res.passed}, {"details", res.details}});
    }
    rep["suites"] = results;
    rep["passed"] = all;
    const int code = all ? exit_pass : exit_numerical;
    finish(rep, code);
    ensure_directory(cfg.out);
    write_json(rep, cfg.out + "/verify.json");
    return code;
}

int cmd_stability(const RunConfig& cfg)
{
    const AnisotropyModel model = make_model(cfg.anisotropy, cfg.n);
    if (!convexity_scan(model).accepted()) {
        std::cout << "model is not convex\n";
        return exit_input;
    }
    const ChartMap surface = make_surface(cfg.surface, model, cfg.n);
    const StabilityProblem problem =
        make_problem(build_parametric(surface, cfg.resolution), model, cfg.problem.r, cfg.problem.s, cfg.problem.a);
    PipelineOptions opts;
    opts.test.beta_tol = cfg.tolerance("beta_constancy", opts.test.beta_tol);
    opts.equality_gap_tol = cfg.tolerance("equality_gap", opts.equality_gap_tol);
    opts.route_rel_tol = cfg.tolerance("route_rel", opts.route_rel_tol);
    opts.route_abs_tol = cfg.tolerance("route_abs", opts.route_abs_tol);
    opts.sign_tol = cfg.tolerance("sign", opts.sign_tol);
    const StabilityReport sr = theorem_pipeline(problem, opts);

    int code = exit_pass;
    if (sr.verdict == Verdict::hypothesis_violated) {
        code = exit_hypothesis;
    } else if (!sr.routes_agree || !sr.signs_ok || !sr.mean_zero_ok) {
        code = exit_numerical;
    }

    ensure_directory(cfg.out + "/fields");
    const TestFunction test = build_test_function(problem, opts.test);
    const auto& imm = problem.immersion;
    write_field_csv(imm, test.f, cfg.out + "/fields/test_function.csv");
    write_field_csv(imm, problem.beta_field(), cfg.out + "/fields/beta.csv");
    for (int j = problem.r; j <= problem.s; ++j) {
        std::vector<double> gap(imm.size());
        for (std::size_t i = 0; i < imm.size(); ++i) {
            const auto& pt = problem.field.points[i];
            gap[i] = pt.h_at(1) * pt.h_at(j + 1) - pt.h_at(j + 2);
        }
        write_field_csv(imm, gap, cfg.out + "/fields/equality_gap_j" + std::to_string(j) + ".csv");
    }

    ordered_json rep = report_header(cfg, "stability");
    rep["report"] = to_json(sr);
    finish(rep, code);
    write_json(rep, cfg.out + "/stability.json");
    std::cout << "verdict: " << to_string(sr.verdict) << (sr.exploratory ? " (exploratory diagnostics only)" : "")
              << "\n";
    if (sr.j2_operator) {
        std::cout << "J'' operator " << *sr.j2_operator << ", closed form " << *sr.j2_closed_form << ", fd ";
        if (sr.j2_fd) {
            std::cout << *sr.j2_fd << "\n";
        } else {
            std::cout << "skipped\n";
        }
    }
    return code;
}

int cmd_report(const Flags& f)
{
    std::vector<std::string> inputs = f.inputs;
    const std::string dir = f.out.value_or("out");
    if (inputs.empty()) {
        for (const char* name : {"wulffgen.json", "verify.json", "stability.json"}) {
            const std::string path = dir + "/" + name;
            if (std::filesystem::exists(path)) inputs.push_back(path);
        }
    }
    if (inputs.empty()) throw InputError("no reports found");
    int worst = exit_pass;
    ordered_json summary = ordered_json::array();
    for (const auto& path : inputs) {
        std::ifstream in(path);
        if (!in) throw InputError("cannot open " + path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception&) {
            throw InputError(path + " is not valid JSON");
        }
        if (!j.contains("command") || !j.contains("exit_code")) throw InputError(path + " is not a wulffcheck report");
        const int code = j.at("exit_code").get<int>();
        worst = std::max(worst, code);
        std::cout << path << ": " << j.at("command").get<std::string>() << " " << j.value("status", "?")
                  << " (config " << j.value("config_hash", "?") << ", resolution " << j.value("resolution", 0) << ")\n";
        if (j.at("command") == "verify" && j.contains("suites")) {
            for (const auto& s : j.at("suites")) {
                std::cout << "  " << (s.at("passed").get<bool>() ? "PASS " : "FAIL ") << s.at("suite").get<std::string>()
                          << "\n";
            }
        }
        if (j.at("command") == "stability" && j.contains("report")) {
            std::cout << "  verdict " << j.at("report").at("verdict").get<std::string>() << "\n";
        }
        summary.push_back({{"file", path}, {"command", j.at("command")}, {"status", j.value("status", "?")},
            {"exit_code", code}, {"config_hash", j.value("config_hash", "")}});
    }
    ordered_json out;
    out["tool"] = tool_name;
    out["version"] = tool_version;
    out["command"] = "report";
    out["reports"] = summary;
    ensure_directory(dir);
    write_json(out, dir + "/summary.json");
    return worst;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Numerical checks for anisotropic curvature and Wulff-shape stability"};
    app.require_subcommand(1);
    Flags flags;
    CLI::App* gen = app.add_subcommand("wulffgen", "Sample a Wulff shape (CSV, and OFF for n = 2)");
    CLI::App* verify = app.add_subcommand("verify", "Run verification suites at two resolutions");
    CLI::App* stab = app.add_subcommand("stability", "Run the second-variation pipeline on a test function");
    CLI::App* report = app.add_subcommand("report", "Summarize JSON reports");
    for (CLI::App* cmd : {gen, verify, stab, report}) add_common(cmd, flags);
    verify->add_option("--suite", flags.suites, "Suite to run (repeatable); default all");
    report->add_option("inputs", flags.inputs, "Report files; default the reports in --out");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_pass : exit_input;
    }

    try {
        if (report->parsed()) return cmd_report(flags);
        const RunConfig cfg = make_config(flags);
        if (gen->parsed()) return cmd_wulffgen(cfg);
        if (verify->parsed()) return cmd_verify(cfg);
        return cmd_stability(cfg);
    } catch (const InputError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return exit_input;
    } catch (const ModelError& e) {
        std::cerr << "invalid model: " << e.what() << "\n";
        return exit_input;
    } catch (const BuildError& e) {
        std::cerr << "invalid surface: " << e.what() << "\n";
        return exit_input;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    }
}
