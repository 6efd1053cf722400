#pragma once

#include <ostream>
#include <vector>

#include "mfvi/functionals.hpp"

namespace mfvi {

struct FpConfig {
    double dt = 1e-3;
    bool semi_implicit = true;  // diffusion implicit via tridiagonal solve
    int refresh_every = 1;      // steps between Psi profile refreshes

    void validate() const;
};

struct FpState {
    double t = 0.0;
    ProductMeasure nu;
    std::vector<PsiProfile> profiles;  // cached, refreshed per config
    int steps_since_refresh = 0;
};

struct FpRecord {
    double t;
    double objective;
    double residual;
    std::vector<double> mean;
    std::vector<double> var;
};

struct FpRunResult {
    FpState final_state;
    std::vector<FpRecord> records;
};

FpState fp_init(const Model& model, const ProductMeasure& init, const PsiOptions& opt = {});

// One time step of the coupled system: per coordinate, a conservative
// Chang-Cooper finite-volume update with no-flux boundaries; Jacobi coupling
// (all Psi profiles frozen at the start of the step).
FpState fp_step(const FpState& state, const Model& model, const FpConfig& cfg,
                const PsiOptions& opt = {});

FpRunResult fp_run(const Model& model, const ProductMeasure& init, const FpConfig& cfg,
                   double horizon, int n_records = 200, const PsiOptions& opt = {});

// max over coordinates of the discrete L1 norm of the stationary operator
// d_i(d_i Psi_i rho_i) + d_i^2 rho_i applied to the marginals.
double stationary_residual(const ProductMeasure& nu, const Model& model,
                           const PsiOptions& opt = {});

void write_fp_trace_csv(std::ostream& os, const FpRunResult& run);

}  // namespace mfvi
