#include "mfvi/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace mfvi {

DissipationLedger dissipation_check(const JkoTrajectory& traj, double inner_tol) {
    DissipationLedger ledger;
    if (traj.records.empty()) return ledger;
    for (const auto& rec : traj.records) {
        for (size_t i = 0; i < rec.w2_step.size(); ++i) {
            double half = 0.5 * rec.w2_step[i] * rec.w2_step[i];
            ledger.entries.push_back({rec.k, static_cast<int>(i), half});
            ledger.cumulative += half;
        }
    }
    double j_last = traj.records.back().objective;
    ledger.bound = traj.h * (traj.initial_objective - j_last);
    ledger.slack = 10.0 * inner_tol * traj.h * std::abs(traj.initial_objective) *
                       static_cast<double>(traj.records.size()) +
                   1e-12;
    ledger.violated = ledger.cumulative > ledger.bound + ledger.slack;
    return ledger;
}

DissipationResiduals energy_dissipation_residual(const JkoTrajectory& traj) {
    DissipationResiduals out;
    if (traj.records.empty()) return out;
    double j_prev = traj.initial_objective;
    std::vector<double> abs_rel;
    for (const auto& rec : traj.records) {
        double movement = 0.0;
        for (double s : rec.w2_step) movement += s * s;
        double residual = (j_prev - rec.objective) - movement / traj.h;
        out.residuals.push_back(residual);
        abs_rel.push_back(std::abs(residual));
        j_prev = rec.objective;
    }
    std::sort(abs_rel.begin(), abs_rel.end());
    double median = abs_rel[abs_rel.size() / 2];
    out.median_relative = median / (std::abs(traj.initial_objective) + 1e-12);
    return out;
}

HRefinementStudy h_refinement_study(const Model& model, const ProductMeasure& init,
                                    const JkoConfig& base_cfg, const std::vector<double>& h_list,
                                    const std::vector<double>& times, const PsiOptions& opt) {
    HRefinementStudy study;
    if (h_list.size() < 2) return study;
    double horizon = *std::max_element(times.begin(), times.end());
    std::vector<JkoTrajectory> runs;
    for (double h : h_list) {
        JkoConfig cfg = base_cfg;
        cfg.h = h;
        runs.push_back(jko_run(model, init, cfg, horizon + h, opt));
    }
    const int d = init.dim();
    for (double t : times) {
        double prev_gap = -1.0;
        for (size_t a = 0; a + 1 < h_list.size(); ++a) {
            const ProductMeasure& coarse = runs[a].at_time(t);
            const ProductMeasure& fine = runs[a + 1].at_time(t);
            HRefinementRow row{t, h_list[a], h_list[a + 1], {}, 0.0};
            double sq = 0.0;
            for (int i = 0; i < d; ++i) {
                double g = w2(coarse.marginals[i], fine.marginals[i], base_cfg.levels);
                row.gap.push_back(g);
                sq += g * g;
            }
            row.gap_l2 = std::sqrt(sq);
            if (prev_gap >= 0.0 && row.gap_l2 >= prev_gap) study.monotone = false;
            prev_gap = row.gap_l2;
            study.rows.push_back(std::move(row));
        }
    }
    return study;
}

AgreementReport compare_all(const Model& model, const ProductMeasure& init,
                            const CompareConfig& cfg, const PsiOptions& opt) {
    const int d = init.dim();
    std::vector<Grid1D> grids;
    for (const auto& mu : init.marginals) grids.push_back(mu.grid);

    AgreementReport report;
    std::vector<ProductMeasure> states;

    try {
        CaviResult cavi = cavi_solve(model, init, cfg.cavi_tol, cfg.cavi_max_sweeps, opt);
        states.push_back(cavi.state);
        report.methods.push_back({"cavi", {}, {}});
    } catch (const Error& e) {
        throw SolverFailureError("cavi", e.what());
    }
    try {
        JkoTrajectory jko = jko_run(model, init, cfg.jko, cfg.jko_horizon, opt);
        states.push_back(jko.snapshots.back());
        report.methods.push_back({"jko", {}, {}});
    } catch (const Error& e) {
        throw SolverFailureError("jko", e.what());
    }
    try {
        FpRunResult fp = fp_run(model, init, cfg.fp, cfg.fp_horizon, 50, opt);
        states.push_back(fp.final_state.nu);
        report.methods.push_back({"fp", {}, {}});
    } catch (const Error& e) {
        throw SolverFailureError("fp", e.what());
    }
    try {
        SdeRunResult sde =
            mkv_run(model, init, grids, cfg.sde, cfg.sde_horizon, cfg.sde_burn_in, opt);
        states.push_back(sde.averaged);
        report.methods.push_back({"sde", {}, {}});
    } catch (const Error& e) {
        throw SolverFailureError("sde", e.what());
    }

    for (size_t a = 0; a < states.size(); ++a) {
        for (int i = 0; i < d; ++i) {
            if (!(states[a].marginals[i].grid == grids[i]))
                throw GridMismatchError("compare_all: method grids differ");
            report.methods[a].mean.push_back(states[a].marginals[i].mean());
            report.methods[a].var.push_back(states[a].marginals[i].variance());
        }
    }

    const int n = static_cast<int>(states.size());
    report.distance.assign(n, std::vector<std::vector<double>>(n, std::vector<double>(d, 0.0)));
    report.pass = true;
    const int levels = 4 * grids[0].cells;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            bool sde_pair = (report.methods[a].name == "sde" || report.methods[b].name == "sde");
            double threshold = sde_pair ? cfg.sde_pair_threshold : cfg.grid_pair_threshold;
            for (int i = 0; i < d; ++i) {
                double dist = w2(states[a].marginals[i], states[b].marginals[i], levels);
                report.distance[a][b][i] = dist;
                report.distance[b][a][i] = dist;
                if (dist >= threshold) report.pass = false;
            }
        }
    }
    return report;
}

void write_ledger_csv(std::ostream& os, const DissipationLedger& ledger) {
    os << "k,coord,half_w2_sq\n";
    os.precision(17);
    for (const auto& e : ledger.entries)
        os << e.k << "," << e.coord + 1 << "," << e.half_w2_sq << "\n";
    os << "# cumulative=" << ledger.cumulative << " bound=" << ledger.bound
       << " slack=" << ledger.slack << " violated=" << (ledger.violated ? 1 : 0) << "\n";
}

void write_study_csv(std::ostream& os, const HRefinementStudy& study) {
    if (study.rows.empty()) return;
    const size_t d = study.rows.front().gap.size();
    os << "t,h_coarse,h_fine";
    for (size_t i = 0; i < d; ++i) os << ",gap_" << i + 1;
    os << ",gap_l2\n";
    os.precision(17);
    for (const auto& r : study.rows) {
        os << r.t << "," << r.h_coarse << "," << r.h_fine;
        for (double g : r.gap) os << "," << g;
        os << "," << r.gap_l2 << "\n";
    }
}

}  // namespace mfvi
