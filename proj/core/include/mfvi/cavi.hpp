#pragma once

#include <ostream>
#include <vector>

#include "mfvi/functionals.hpp"

namespace mfvi {

struct CaviSweepRecord {
    int sweep;
    double objective;
    std::vector<double> w2_move;
    std::vector<double> mean;
    std::vector<double> var;
};

struct CaviTrace {
    std::vector<CaviSweepRecord> sweeps;
    bool converged = false;
};

struct CaviResult {
    ProductMeasure state;
    CaviTrace trace;
};

// Exact block update: nu_i <- normalize(exp(-Psi_i(.; nu_{-i}))).
GridMeasure1D cavi_update(const Model& model, int coord, const ProductMeasure& nu,
                          const PsiOptions& opt = {});

// Gauss-Seidel sweeps in coordinate order 0..d-1; stops when the max
// per-coordinate W2 movement drops below tol or the sweep budget runs out
// (trace.converged reports which).
CaviResult cavi_solve(const Model& model, const ProductMeasure& init, double tol,
                      int max_sweeps, const PsiOptions& opt = {});

void write_cavi_trace_csv(std::ostream& os, const CaviTrace& trace);

}  // namespace mfvi
