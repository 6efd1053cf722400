#include "mfvi/config.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace mfvi {

namespace fs = std::filesystem;
using nlohmann::json;

ProductMeasure RunConfig::initial_measure() const {
    ProductMeasure nu;
    for (size_t i = 0; i < grids.size(); ++i)
        nu.marginals.push_back(gaussian_on_grid(grids[i], init_means[i], init_stds[i]));
    return nu;
}

CompareConfig RunConfig::compare_config() const {
    CompareConfig c;
    c.cavi_tol = cavi_tol;
    c.cavi_max_sweeps = cavi_max_sweeps;
    c.jko = jko;
    c.jko_horizon = jko_horizon;
    c.fp = fp;
    c.fp_horizon = fp_horizon;
    c.sde = sde;
    c.sde_horizon = sde_horizon;
    c.sde_burn_in = sde_burn_in;
    return c;
}

namespace {

Model parse_model(const json& j) {
    if (!j.contains("model")) throw ValidationError("config: missing model block");
    const json& m = j.at("model");
    std::string type = m.value("type", "quadratic");
    if (type == "quadratic") {
        if (!m.contains("A") || !m.contains("b"))
            throw ValidationError("config: quadratic model needs A and b");
        auto rows = m.at("A").get<std::vector<std::vector<double>>>();
        auto bvec = m.at("b").get<std::vector<double>>();
        const int d = static_cast<int>(bvec.size());
        Eigen::MatrixXd A(d, d);
        if (static_cast<int>(rows.size()) != d)
            throw ValidationError("config: A row count != length of b");
        for (int r = 0; r < d; ++r) {
            if (static_cast<int>(rows[r].size()) != d)
                throw ValidationError("config: A must be square");
            for (int c = 0; c < d; ++c) A(r, c) = rows[r][c];
        }
        Eigen::VectorXd b = Eigen::Map<Eigen::VectorXd>(bvec.data(), d);
        return QuadraticModel(std::move(A), std::move(b));
    }
    if (type == "catalog") {
        std::string name = m.value("name", "");
        int dim = m.value("dim", 2);
        double coupling = m.value("coupling", 0.0);
        return catalog_model(name, dim, coupling);
    }
    throw ValidationError("config: unknown model type '" + type + "'");
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config: ") + e.what());
    }

    Model model = parse_model(j);
    const int d = dimension(model);
    RunConfig cfg(std::move(model));

    double x_min = -8.0, x_max = 8.0;
    int cells = 512;
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        x_min = g.value("x_min", x_min);
        x_max = g.value("x_max", x_max);
        cells = g.value("M", cells);
    }
    for (int i = 0; i < d; ++i) cfg.grids.emplace_back(x_min, x_max, cells);

    cfg.init_means.assign(d, 0.0);
    cfg.init_stds.assign(d, 1.0);
    if (j.contains("init")) {
        const json& in = j.at("init");
        if (in.contains("means")) cfg.init_means = in.at("means").get<std::vector<double>>();
        if (in.contains("stds")) cfg.init_stds = in.at("stds").get<std::vector<double>>();
        if (static_cast<int>(cfg.init_means.size()) != d ||
            static_cast<int>(cfg.init_stds.size()) != d)
            throw ValidationError("config: init means/stds length != model dimension");
        for (double s : cfg.init_stds)
            if (!(s > 0.0)) throw ValidationError("config: init stds must be > 0");
    }

    if (j.contains("cavi")) {
        const json& c = j.at("cavi");
        cfg.cavi_tol = c.value("tol", cfg.cavi_tol);
        cfg.cavi_max_sweeps = c.value("max_sweeps", cfg.cavi_max_sweeps);
    }
    if (!(cfg.cavi_tol > 0.0)) throw ValidationError("config: cavi.tol must be > 0");
    if (cfg.cavi_max_sweeps < 1) throw ValidationError("config: cavi.max_sweeps must be >= 1");

    cfg.jko.levels = 4 * cells;
    if (j.contains("jko")) {
        const json& c = j.at("jko");
        cfg.jko.h = c.value("h", cfg.jko.h);
        cfg.jko.levels = c.value("K", cfg.jko.levels);
        cfg.jko.inner_tol = c.value("inner_tol", cfg.jko.inner_tol);
        cfg.jko.inner_max_iters = c.value("inner_max_iters", cfg.jko.inner_max_iters);
        cfg.jko_horizon = c.value("T", cfg.jko_horizon);
    }
    if (!(cfg.jko.h > 0.0)) throw ValidationError("config: JkoConfig.h must be > 0");
    cfg.jko.validate();

    if (j.contains("fp")) {
        const json& c = j.at("fp");
        cfg.fp.dt = c.value("dt", cfg.fp.dt);
        cfg.fp.semi_implicit = c.value("semi_implicit", cfg.fp.semi_implicit);
        cfg.fp.refresh_every = c.value("refresh_every", cfg.fp.refresh_every);
        cfg.fp_horizon = c.value("T", cfg.fp_horizon);
    }
    cfg.fp.validate();

    if (j.contains("sde")) {
        const json& c = j.at("sde");
        cfg.sde.particles = c.value("N", cfg.sde.particles);
        cfg.sde.dt = c.value("dt", cfg.sde.dt);
        cfg.sde.bandwidth = c.value("bandwidth", cfg.sde.bandwidth);
        cfg.sde_horizon = c.value("T", cfg.sde_horizon);
        cfg.sde_burn_in = c.value("burn_in", cfg.sde_burn_in);
    }
    cfg.sde.validate();
    if (!(cfg.sde_horizon > cfg.sde_burn_in))
        throw ValidationError("config: sde.T must be > sde.burn_in");

    if (j.contains("study")) {
        const json& c = j.at("study");
        if (c.contains("h_list")) cfg.study_h_list = c.at("h_list").get<std::vector<double>>();
        if (c.contains("times")) cfg.study_times = c.at("times").get<std::vector<double>>();
    }

    cfg.seed = j.value("seed", cfg.seed);
    cfg.sde.seed = cfg.seed;
    if (j.contains("output")) {
        const json& o = j.at("output");
        cfg.out_dir = o.value("dir", cfg.out_dir);
        cfg.emit_traces = o.value("traces", cfg.emit_traces);
        cfg.emit_snapshots = o.value("snapshots", cfg.emit_snapshots);
        cfg.emit_report = o.value("report", cfg.emit_report);
    }

    // fully-resolved echo
    json resolved;
    resolved["model"] = j.at("model");
    resolved["grid"] = {{"x_min", x_min}, {"x_max", x_max}, {"M", cells}};
    resolved["init"] = {{"means", cfg.init_means}, {"stds", cfg.init_stds}};
    resolved["cavi"] = {{"tol", cfg.cavi_tol}, {"max_sweeps", cfg.cavi_max_sweeps}};
    resolved["jko"] = {{"h", cfg.jko.h},
                       {"K", cfg.jko.levels},
                       {"inner_tol", cfg.jko.inner_tol},
                       {"inner_max_iters", cfg.jko.inner_max_iters},
                       {"T", cfg.jko_horizon}};
    resolved["fp"] = {{"dt", cfg.fp.dt},
                      {"semi_implicit", cfg.fp.semi_implicit},
                      {"refresh_every", cfg.fp.refresh_every},
                      {"T", cfg.fp_horizon}};
    resolved["sde"] = {{"N", cfg.sde.particles},
                       {"dt", cfg.sde.dt},
                       {"bandwidth", cfg.sde.bandwidth},
                       {"T", cfg.sde_horizon},
                       {"burn_in", cfg.sde_burn_in}};
    resolved["study"] = {{"h_list", cfg.study_h_list}, {"times", cfg.study_times}};
    resolved["seed"] = cfg.seed;
    resolved["output"] = {{"dir", cfg.out_dir},
                          {"traces", cfg.emit_traces},
                          {"snapshots", cfg.emit_snapshots},
                          {"report", cfg.emit_report}};
    cfg.resolved_text = resolved.dump(2);
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

namespace {

void atomic_write(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
    }
    fs::rename(tmp, path);
}

void write_marginals_csv(const fs::path& path, const ProductMeasure& nu) {
    std::ostringstream os;
    os.precision(17);
    os << "x";
    for (int i = 0; i < nu.dim(); ++i) os << ",rho_" << i + 1;
    os << "\n";
    const Grid1D& g = nu.marginals[0].grid;
    for (int j = 0; j < g.cells; ++j) {
        os << g.center(j);
        for (int i = 0; i < nu.dim(); ++i) os << "," << nu.marginals[i].density[j];
        os << "\n";
    }
    atomic_write(path, os.str());
}

json report_skeleton(const RunConfig& cfg) {
    json r;
    r["config"] = json::parse(cfg.resolved_text);
    return r;
}

void write_run_meta(const RunConfig& cfg) {
    json meta;
    auto now = std::chrono::system_clock::now();
    meta["timestamp_unix"] =
        std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
    meta["seed"] = cfg.seed;
    atomic_write(fs::path(cfg.out_dir) / "run_meta.json", meta.dump(2));
}

}  // namespace

int dispatch(const RunConfig& cfg, const std::string& subcommand, bool quiet) {
    fs::create_directories(cfg.out_dir);
    write_run_meta(cfg);
    const ProductMeasure init = cfg.initial_measure();
    auto note = [&](const std::string& line) {
        if (!quiet) std::cerr << line << "\n";
    };

    try {
        if (subcommand == "run-cavi") {
            CaviResult res = cavi_solve(cfg.model, init, cfg.cavi_tol, cfg.cavi_max_sweeps);
            if (cfg.emit_traces) {
                std::ostringstream os;
                write_cavi_trace_csv(os, res.trace);
                atomic_write(fs::path(cfg.out_dir) / "trace_cavi.csv", os.str());
            }
            if (cfg.emit_snapshots)
                write_marginals_csv(fs::path(cfg.out_dir) / "marginals_cavi_final.csv", res.state);
            note("cavi: J=" + std::to_string(res.trace.sweeps.back().objective) +
                 (res.trace.converged ? " converged" : " budget-exhausted"));
            return 0;
        }
        if (subcommand == "run-jko") {
            JkoTrajectory traj = jko_run(cfg.model, init, cfg.jko, cfg.jko_horizon);
            if (cfg.emit_traces) {
                std::ostringstream os;
                write_jko_trace_csv(os, traj);
                atomic_write(fs::path(cfg.out_dir) / "trace_jko.csv", os.str());
            }
            if (cfg.emit_snapshots)
                write_marginals_csv(fs::path(cfg.out_dir) / "marginals_jko_final.csv",
                                    traj.snapshots.back());
            note("jko: J=" + std::to_string(traj.records.back().objective));
            return 0;
        }
        if (subcommand == "run-fp") {
            FpRunResult run = fp_run(cfg.model, init, cfg.fp, cfg.fp_horizon);
            if (cfg.emit_traces) {
                std::ostringstream os;
                write_fp_trace_csv(os, run);
                atomic_write(fs::path(cfg.out_dir) / "trace_fp.csv", os.str());
            }
            if (cfg.emit_snapshots)
                write_marginals_csv(fs::path(cfg.out_dir) / "marginals_fp_final.csv",
                                    run.final_state.nu);
            note("fp: J=" + std::to_string(run.records.back().objective) +
                 " residual=" + std::to_string(run.records.back().residual));
            return 0;
        }
        if (subcommand == "run-sde") {
            SdeRunResult run =
                mkv_run(cfg.model, init, cfg.grids, cfg.sde, cfg.sde_horizon, cfg.sde_burn_in);
            if (cfg.emit_traces) {
                std::ostringstream os;
                write_sde_trace_csv(os, run);
                atomic_write(fs::path(cfg.out_dir) / "trace_sde.csv", os.str());
            }
            write_marginals_csv(fs::path(cfg.out_dir) / "marginals_sde_final.csv", run.averaged);
            note("sde: done");
            return 0;
        }
        if (subcommand == "compare") {
            AgreementReport rep = compare_all(cfg.model, init, cfg.compare_config());
            json r = report_skeleton(cfg);
            for (const auto& m : rep.methods)
                r["methods"][m.name] = {{"mean", m.mean}, {"var", m.var}};
            r["distance_w2"] = rep.distance;
            r["method_order"] = json::array();
            for (const auto& m : rep.methods) r["method_order"].push_back(m.name);
            r["verdict"] = rep.pass ? "PASS" : "FAIL";
            if (cfg.emit_report)
                atomic_write(fs::path(cfg.out_dir) / "report.json", r.dump(2));
            note(std::string("compare: ") + (rep.pass ? "PASS" : "FAIL"));
            return rep.pass ? 0 : 3;
        }
        if (subcommand == "study-h") {
            HRefinementStudy study = h_refinement_study(cfg.model, init, cfg.jko,
                                                        cfg.study_h_list, cfg.study_times);
            std::ostringstream os;
            write_study_csv(os, study);
            atomic_write(fs::path(cfg.out_dir) / "study_h.csv", os.str());
            note(std::string("study-h: gaps ") +
                 (study.monotone ? "monotone-decreasing" : "NOT monotone"));
            return 0;
        }
        if (subcommand == "dissipation") {
            JkoTrajectory traj = jko_run(cfg.model, init, cfg.jko, cfg.jko_horizon);
            DissipationLedger ledger = dissipation_check(traj, cfg.jko.inner_tol);
            std::ostringstream os;
            write_ledger_csv(os, ledger);
            atomic_write(fs::path(cfg.out_dir) / "ledger_jko.csv", os.str());
            note("dissipation: cumulative=" + std::to_string(ledger.cumulative) +
                 " bound=" + std::to_string(ledger.bound) +
                 (ledger.violated ? " VIOLATED" : " ok"));
            return ledger.violated ? 3 : 0;
        }
    } catch (const Error& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 1;
    }
    std::cerr << "unknown subcommand: " << subcommand << "\n";
    return 2;
}

}  // namespace mfvi
