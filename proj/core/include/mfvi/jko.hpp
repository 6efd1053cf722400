#pragma once

#include <ostream>
#include <vector>

#include "mfvi/functionals.hpp"

namespace mfvi {

struct JkoConfig {
    double h = 0.05;          // outer (time) step
    int levels = 2048;        // quantile resolution K of the inner problem
    double inner_tol = 1e-9;  // relative objective-change stop threshold
    int inner_max_iters = 500;
    double initial_rate = 1.0;       // damping for the preconditioned step
    double shrink = 0.5;             // backtracking shrink factor
    double sufficient_decrease = 1e-4;

    void validate() const;
};

struct JkoRecord {
    int k;
    double t;
    double objective;
    std::vector<double> w2_step;
    std::vector<double> mean;
    std::vector<double> var;
};

struct JkoTrajectory {
    double h = 0.0;
    double initial_objective = 0.0;  // J at the initial state
    std::vector<ProductMeasure> snapshots;  // snapshots[k] = state after k sweeps
    std::vector<JkoRecord> records;         // one per sweep, k >= 1

    // piecewise-constant interpolation: nu_h(t) = nu^k for t in [kh, (k+1)h)
    const ProductMeasure& at_time(double t) const;
};

// One coordinate step: argmin over nu of 1/2 W2(nu_i^{k-1}, nu)^2 + h J_i(nu),
// solved in quantile coordinates by projected gradient descent (PAV
// projection onto the monotone cone). Never returns a worse V than staying
// put: falls back to the input measure.
GridMeasure1D jko_inner_step(const Model& model, int coord, const ProductMeasure& prev,
                             const JkoConfig& cfg, const PsiOptions& opt = {});

// Gauss-Seidel sweep over coordinates 0..d-1.
ProductMeasure jko_sweep(const Model& model, const ProductMeasure& prev,
                         const JkoConfig& cfg, const PsiOptions& opt = {});

JkoTrajectory jko_run(const Model& model, const ProductMeasure& init, const JkoConfig& cfg,
                      double horizon, const PsiOptions& opt = {});

// Discretized inner objective, exposed for optimality-residual checks:
// V(Q) = (1/2K) sum (Q_k - P_k)^2 + h[(1/K) sum Psi(Q_k) - H_disc(Q)].
double jko_inner_objective(const std::vector<double>& q, const std::vector<double>& q_prev,
                           const PsiProfile& profile, double h);

// Euclidean projection onto the nondecreasing cone (pool adjacent violators).
std::vector<double> pav_projection(std::vector<double> v);

void write_jko_trace_csv(std::ostream& os, const JkoTrajectory& traj);

}  // namespace mfvi
