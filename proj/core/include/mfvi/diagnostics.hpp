#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "mfvi/cavi.hpp"
#include "mfvi/fp.hpp"
#include "mfvi/jko.hpp"
#include "mfvi/sde.hpp"

namespace mfvi {

struct DissipationEntry {
    int k;
    int coord;
    double half_w2_sq;
};

// Telescoped movement bound for a minimizing-movement run:
// sum_k sum_i 1/2 W2(nu_i^{k-1}, nu_i^k)^2 <= h (J_first - J_last) + slack.
struct DissipationLedger {
    std::vector<DissipationEntry> entries;
    double cumulative = 0.0;
    double bound = 0.0;
    double slack = 0.0;
    bool violated = false;
};

DissipationLedger dissipation_check(const JkoTrajectory& traj, double inner_tol);

// residual_k = J(nu^{k-1}) - J(nu^k) - sum_i W2(nu_i^{k-1}, nu_i^k)^2 / h;
// approaches 0 with h on smooth stretches. Reported, not asserted.
struct DissipationResiduals {
    std::vector<double> residuals;
    double median_relative = 0.0;
};
DissipationResiduals energy_dissipation_residual(const JkoTrajectory& traj);

struct HRefinementRow {
    double t;
    double h_coarse;
    double h_fine;
    std::vector<double> gap;  // per-coordinate W2(nu_h(t), nu_{h/2}(t))
    double gap_l2;
};

struct HRefinementStudy {
    std::vector<HRefinementRow> rows;
    bool monotone = true;  // gaps decrease along the halving sequence at each t
};

HRefinementStudy h_refinement_study(const Model& model, const ProductMeasure& init,
                                    const JkoConfig& base_cfg, const std::vector<double>& h_list,
                                    const std::vector<double>& times,
                                    const PsiOptions& opt = {});

struct CompareConfig {
    double cavi_tol = 1e-7;
    int cavi_max_sweeps = 500;
    JkoConfig jko;
    double jko_horizon = 20.0;
    FpConfig fp;
    double fp_horizon = 20.0;
    SdeConfig sde;
    double sde_horizon = 10.0;
    double sde_burn_in = 5.0;
    double grid_pair_threshold = 1e-2;
    double sde_pair_threshold = 5e-2;
};

struct MethodSummary {
    std::string name;
    std::vector<double> mean;
    std::vector<double> var;
};

struct AgreementReport {
    std::vector<MethodSummary> methods;  // cavi, jko, fp, sde
    // distance[a][b][i] = W2 between method a and b on coordinate i
    std::vector<std::vector<std::vector<double>>> distance;
    bool pass = false;
};

AgreementReport compare_all(const Model& model, const ProductMeasure& init,
                            const CompareConfig& cfg, const PsiOptions& opt = {});

void write_ledger_csv(std::ostream& os, const DissipationLedger& ledger);
void write_study_csv(std::ostream& os, const HRefinementStudy& study);

}  // namespace mfvi
