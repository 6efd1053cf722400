// Acceptance suite: one line per criterion, nonzero exit if any fail.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mfvi/config.hpp"
#include "mfvi/diagnostics.hpp"
#include "mfvi/oracles.hpp"

using namespace mfvi;
namespace fs = std::filesystem;

namespace {

Model coupled2d() {
    Eigen::MatrixXd A(2, 2);
    A << 1, 0.5, 0.5, 1;
    return QuadraticModel(A, Eigen::VectorXd::Zero(2));
}

ProductMeasure gaussians(const Grid1D& g, std::vector<double> means, std::vector<double> stds) {
    ProductMeasure nu;
    for (size_t i = 0; i < means.size(); ++i)
        nu.marginals.push_back(gaussian_on_grid(g, means[i], stds[i]));
    return nu;
}

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

// ---- criterion bodies ----------------------------------------------------

// shared settings for the coupled-Gaussian model runs (criteria 1, 3, 9)
const Grid1D kGrid{-8.0, 8.0, 512};

void criterion_gaussian_fixed_point(Check& c) {
    Model m = coupled2d();
    auto init = gaussians(kGrid, {2.0, -2.0}, {1.0, 1.0});
    auto oracle = oracle::gaussian_cavi_fixed_point(
        [] {
            Eigen::MatrixXd A(2, 2);
            A << 1, 0.5, 0.5, 1;
            return A;
        }(),
        Eigen::VectorXd::Zero(2));
    for (int i = 0; i < 2; ++i) {
        c.require(std::abs(oracle.means[i]) < 1e-12, "oracle mean");
        c.require(std::abs(oracle.variances[i] - 1.0) < 1e-12, "oracle variance");
    }

    auto cavi = cavi_solve(m, init, 1e-8, 500);
    JkoConfig jcfg;
    jcfg.h = 0.05;
    jcfg.levels = 2048;
    auto jko = jko_run(m, init, jcfg, 20.0);
    FpConfig fcfg;
    fcfg.dt = 1e-3;
    auto fp = fp_run(m, init, fcfg, 20.0, 50);

    std::vector<std::pair<std::string, const ProductMeasure*>> grid_methods = {
        {"cavi", &cavi.state}, {"jko", &jko.snapshots.back()}, {"fp", &fp.final_state.nu}};
    for (auto& [name, nu] : grid_methods) {
        for (int i = 0; i < 2; ++i) {
            c.require(std::abs(nu->marginals[i].mean()) < 2e-3, name + " mean");
            c.require(std::abs(nu->marginals[i].variance() - 1.0) < 1e-2, name + " variance");
        }
    }

    SdeConfig scfg;
    scfg.particles = 20000;
    scfg.dt = 1e-3;
    scfg.seed = 1;
    auto sde = mkv_run(m, init, {kGrid, kGrid}, scfg, 10.0, 5.0);
    for (int i = 0; i < 2; ++i)
        c.require(std::abs(sde.averaged.marginals[i].variance() - 1.0) < 5e-2, "sde variance");
}

void criterion_separable_exact(Check& c) {
    Eigen::MatrixXd A(2, 2);
    A << 2, 0, 0, 4;
    Eigen::VectorXd b(2);
    b << -2, 4;
    Model m = QuadraticModel(A, b);
    Grid1D g(-8.0, 8.0, 512);
    auto init = gaussians(g, {0.0, 0.0}, {1.0, 1.0});
    auto exact1 = gaussian_on_grid(g, 1.0, std::sqrt(0.5));
    auto exact2 = gaussian_on_grid(g, -1.0, 0.5);

    auto cavi = cavi_solve(m, init, 1e-8, 500);
    JkoConfig jcfg;
    jcfg.h = 0.05;
    jcfg.levels = 2048;
    auto jko = jko_run(m, init, jcfg, 20.0);
    FpConfig fcfg;
    fcfg.dt = 1e-3;
    auto fp = fp_run(m, init, fcfg, 20.0, 50);
    SdeConfig scfg;
    scfg.particles = 20000;
    scfg.dt = 1e-3;
    scfg.seed = 2;
    auto sde = mkv_run(m, init, {g, g}, scfg, 10.0, 5.0);

    auto check_pair = [&](const ProductMeasure& nu, double tol, const std::string& name) {
        c.require(w2(nu.marginals[0], exact1, 2048) < tol, name + " coord 1");
        c.require(w2(nu.marginals[1], exact2, 2048) < tol, name + " coord 2");
    };
    check_pair(cavi.state, 1e-2, "cavi");
    check_pair(jko.snapshots.back(), 1e-2, "jko");
    check_pair(fp.final_state.nu, 1e-2, "fp");
    check_pair(sde.averaged, 5e-2, "sde");
}

void criterion_under_dispersion(Check& c) {
    // full posterior covariance A^{-1} has marginal variance 4/3; the
    // mean-field answer is 1/A_ii = 1, separated by more than 0.25
    Model m = coupled2d();
    auto init = gaussians(kGrid, {1.0, -1.0}, {1.0, 1.0});
    const double full_marginal = 4.0 / 3.0;

    auto cavi = cavi_solve(m, init, 1e-8, 500);
    JkoConfig jcfg;
    jcfg.h = 0.05;
    jcfg.levels = 2048;
    auto jko = jko_run(m, init, jcfg, 20.0);
    FpConfig fcfg;
    fcfg.dt = 1e-3;
    auto fp = fp_run(m, init, fcfg, 20.0, 50);
    SdeConfig scfg;
    scfg.particles = 20000;
    scfg.dt = 1e-3;
    scfg.seed = 3;
    auto sde = mkv_run(m, init, {kGrid, kGrid}, scfg, 10.0, 5.0);

    std::vector<std::pair<std::string, double>> vars = {
        {"cavi", cavi.state.marginals[0].variance()},
        {"jko", jko.snapshots.back().marginals[0].variance()},
        {"fp", fp.final_state.nu.marginals[0].variance()},
        {"sde", sde.averaged.marginals[0].variance()}};
    for (auto& [name, v] : vars) {
        double tol = name == "sde" ? 5e-2 : 1e-2;
        c.require(std::abs(v - 1.0) < tol, name + " variance off 1.0");
        c.require(full_marginal - v > 0.25, name + " not under-dispersed");
    }
}

void criterion_dissipation(Check& c) {
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> um(-3.0, 3.0), us(0.5, 2.0), uc(-0.8, 0.8),
        ud(1.0, 3.0);
    Grid1D g(-8.0, 8.0, 256);
    for (int rep = 0; rep < 20; ++rep) {
        double d1 = ud(rng), d2 = ud(rng);
        double off = uc(rng) * std::sqrt(d1 * d2) * 0.5;  // keep A positive definite
        Eigen::MatrixXd A(2, 2);
        A << d1, off, off, d2;
        Eigen::VectorXd b(2);
        b << um(rng) * 0.3, um(rng) * 0.3;
        Model m = QuadraticModel(A, b);
        auto init = gaussians(g, {um(rng), um(rng)}, {us(rng), us(rng)});
        JkoConfig cfg;
        cfg.h = 0.05;
        cfg.levels = 1024;
        auto traj = jko_run(m, init, cfg, 2.0);
        auto ledger = dissipation_check(traj, cfg.inner_tol);
        c.require(!ledger.violated, "ledger violated at rep " + std::to_string(rep));
    }
}

void criterion_elbo_monotone(Check& c) {
    std::vector<Model> models;
    models.push_back(coupled2d());
    {
        Eigen::MatrixXd A(2, 2);
        A << 2, 0, 0, 4;
        Eigen::VectorXd b(2);
        b << -2, 4;
        models.push_back(QuadraticModel(A, b));
    }
    models.push_back(catalog_model("double_well", 2, 0.1));
    Grid1D g(-8.0, 8.0, 512);
    for (size_t k = 0; k < models.size(); ++k) {
        auto init = gaussians(g, {2.0, -2.0}, {1.0, 1.0});
        auto cavi = cavi_solve(models[k], init, 1e-8, 200);
        for (size_t s = 1; s < cavi.trace.sweeps.size(); ++s)
            c.require(cavi.trace.sweeps[s].objective <=
                          cavi.trace.sweeps[s - 1].objective + 1e-8,
                      "cavi J rose, model " + std::to_string(k));

        JkoConfig cfg;
        cfg.h = 0.05;
        cfg.levels = 2048;
        auto traj = jko_run(models[k], init, cfg, 5.0);
        double j_prev = traj.initial_objective;
        // inner-tolerance slack plus the spatial representation floor dx^2
        double slack =
            10.0 * cfg.inner_tol * std::abs(traj.initial_objective) + g.dx() * g.dx();
        for (const auto& rec : traj.records) {
            c.require(rec.objective <= j_prev + slack, "jko J rose, model " + std::to_string(k));
            j_prev = rec.objective;
        }
    }
}

void criterion_h_refinement(Check& c) {
    Model m = coupled2d();
    auto init = gaussians(kGrid, {2.0, -2.0}, {1.0, 1.0});
    JkoConfig cfg;
    cfg.levels = 2048;
    auto study = h_refinement_study(m, init, cfg, {0.2, 0.1, 0.05, 0.025}, {1.0});
    c.require(study.rows.size() == 3, "row count");
    for (size_t r = 1; r < study.rows.size(); ++r) {
        c.require(study.rows[r].gap_l2 < study.rows[r - 1].gap_l2, "gap not decreasing");
        c.require(study.rows[r - 1].gap_l2 / study.rows[r].gap_l2 >= 1.3,
                  "halving factor below 1.3");
    }
}

void criterion_fp_conservation(Check& c) {
    Model m = coupled2d();
    auto init = gaussians(kGrid, {2.0, -2.0}, {1.0, 1.0});
    FpConfig cfg;
    cfg.dt = 1e-3;
    auto st = fp_init(m, init, {});
    for (int s = 0; s < 20000; ++s) {
        st = fp_step(st, m, cfg);
        if (s % 1000 == 0) {
            for (int i = 0; i < 2; ++i)
                for (double v : st.nu.marginals[i].density)
                    c.require(v >= 0.0, "negative density");
        }
    }
    for (int i = 0; i < 2; ++i)
        c.require(std::abs(st.nu.marginals[i].mass() - 1.0) < 1e-8, "mass drift");

    auto cavi = cavi_solve(m, init, 1e-8, 500);
    c.require(stationary_residual(cavi.state, m) < 1e-4, "stationary residual");

    // OU moment tracking on the diagonal model
    Eigen::MatrixXd A(2, 2);
    A << 2, 0, 0, 4;
    Model diag = QuadraticModel(A, Eigen::VectorXd::Zero(2));
    Grid1D g(-10.0, 10.0, 1024);
    auto ou_init = gaussians(g, {1.5, -1.0}, {std::sqrt(0.2), std::sqrt(0.3)});
    FpConfig ocfg;
    ocfg.dt = 1e-3;
    auto ost = fp_init(diag, ou_init, {});
    std::vector<double> checkpoints = {0.5, 1.0, 2.0};
    size_t next = 0;
    const double a_coef[2] = {2.0, 4.0};
    const double m0[2] = {1.5, -1.0};
    const double v0[2] = {0.2, 0.3};
    for (int s = 1; s <= 2000 && next < checkpoints.size(); ++s) {
        ost = fp_step(ost, diag, ocfg);
        if (std::abs(ost.t - checkpoints[next]) < 0.5 * ocfg.dt) {
            for (int i = 0; i < 2; ++i) {
                auto [mm, vv] = oracle::ou_moments(a_coef[i], m0[i], v0[i], checkpoints[next]);
                c.require(std::abs(ost.nu.marginals[i].mean() - mm) <=
                              0.01 * std::max(std::abs(mm), 1.0),
                          "ou mean at t=" + std::to_string(checkpoints[next]));
                c.require(std::abs(ost.nu.marginals[i].variance() - vv) <= 0.01 * vv + 1e-4,
                          "ou var at t=" + std::to_string(checkpoints[next]));
            }
            ++next;
        }
    }
    c.require(next == checkpoints.size(), "missed an OU checkpoint");
}

void criterion_w2_correctness(Check& c) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ux(-3.0, 3.0);
    std::uniform_int_distribution<int> un(1, 6);
    for (int rep = 0; rep < 200; ++rep) {
        int n = un(rng);
        std::vector<double> a(n), b(n);
        for (int i = 0; i < n; ++i) {
            a[i] = ux(rng);
            b[i] = ux(rng);
        }
        double brute = oracle::discrete_ot_bruteforce(a, b);
        // sorted pairing equals the optimal coupling in 1D
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
        c.require(std::abs(std::sqrt(s / n) - brute) < 1e-10,
                  "atom mismatch rep " + std::to_string(rep));
    }
    Grid1D g(-8.0, 8.0, 512);
    std::uniform_real_distribution<double> um(-2.0, 2.0), us(0.5, 2.0);
    for (int rep = 0; rep < 20; ++rep) {
        double m1 = um(rng), m2 = um(rng), s1 = us(rng), s2 = us(rng);
        double closed = std::sqrt((m1 - m2) * (m1 - m2) + (s1 - s2) * (s1 - s2));
        double numeric =
            w2(gaussian_on_grid(g, m1, s1), gaussian_on_grid(g, m2, s2), 2048);
        c.require(std::abs(numeric - closed) < 2e-2, "gaussian pair rep " + std::to_string(rep));
    }
}

void criterion_uniqueness(Check& c) {
    Model m = coupled2d();
    FpConfig cfg;
    cfg.dt = 2e-3;
    auto run_a = fp_run(m, gaussians(kGrid, {3.0, -3.0}, {0.6, 1.5}), cfg, 20.0, 20);
    auto run_b = fp_run(m, gaussians(kGrid, {-2.0, 1.0}, {2.0, 0.8}), cfg, 20.0, 20);
    for (int i = 0; i < 2; ++i)
        c.require(w2(run_a.final_state.nu.marginals[i], run_b.final_state.nu.marginals[i],
                     2048) < 1e-2,
                  "stationary states differ on coord " + std::to_string(i + 1));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_reproducibility(Check& c) {
    fs::path dir = fs::temp_directory_path() / "mfvi_acceptance_repro";
    fs::remove_all(dir);
    fs::create_directories(dir);
    fs::path cfgp = dir / "config.json";
    {
        std::ofstream out(cfgp);
        out << R"({
  "model": {"type": "quadratic", "A": [[1.0, 0.5], [0.5, 1.0]], "b": [0.0, 0.0]},
  "grid": {"M": 256},
  "init": {"means": [2.0, -2.0], "stds": [1.0, 1.0]},
  "sde": {"N": 4000, "dt": 2e-3, "T": 2.0, "burn_in": 1.0},
  "seed": 17
})";
    }
    auto invoke = [&](const std::string& sub, const fs::path& out) {
        std::string cmd = std::string(MFVI_CLI_PATH) + " " + sub + " --config " +
                          cfgp.string() + " --out " + out.string() + " --quiet >/dev/null 2>&1";
        return WEXITSTATUS(std::system(cmd.c_str()));
    };
    c.require(invoke("run-sde", dir / "a") == 0, "first sde invocation failed");
    c.require(invoke("run-sde", dir / "b") == 0, "second sde invocation failed");
    c.require(slurp(dir / "a" / "trace_sde.csv") == slurp(dir / "b" / "trace_sde.csv"),
              "sde traces differ");
    c.require(slurp(dir / "a" / "marginals_sde_final.csv") ==
                  slurp(dir / "b" / "marginals_sde_final.csv"),
              "sde marginals differ");
    c.require(invoke("run-cavi", dir / "c") == 0, "first cavi invocation failed");
    c.require(invoke("run-cavi", dir / "d") == 0, "second cavi invocation failed");
    c.require(slurp(dir / "c" / "trace_cavi.csv") == slurp(dir / "d" / "trace_cavi.csv"),
              "cavi traces differ");
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<void(Check&)> body;
    };
    const std::vector<Criterion> criteria = {
        {"gaussian fixed point, coupled model, all four methods", criterion_gaussian_fixed_point},
        {"exactness on separable targets", criterion_separable_exact},
        {"under-dispersion below the full posterior", criterion_under_dispersion},
        {"dissipation inequality over 20 seeded runs", criterion_dissipation},
        {"objective monotonicity for CAVI and JKO", criterion_elbo_monotone},
        {"h-refinement gap contraction", criterion_h_refinement},
        {"FP conservation, stationarity, OU tracking", criterion_fp_conservation},
        {"W2 against brute force and closed forms", criterion_w2_correctness},
        {"uniqueness of the stationary product state", criterion_uniqueness},
        {"seeded reproducibility through the CLI", criterion_reproducibility},
    };

    int failures = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        Check check;
        try {
            criteria[i].body(check);
        } catch (const std::exception& e) {
            check.ok = false;
            check.detail = std::string("exception: ") + e.what();
        }
        std::printf("criterion %2zu [%s]: %s%s%s\n", i + 1, check.ok ? "PASS" : "FAIL",
                    criteria[i].name, check.ok ? "" : " -- ",
                    check.ok ? "" : check.detail.c_str());
        std::fflush(stdout);
        failures += check.ok ? 0 : 1;
    }
    if (failures) std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
