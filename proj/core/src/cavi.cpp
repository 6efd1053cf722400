#include "mfvi/cavi.hpp"

#include <algorithm>
#include <cmath>

namespace mfvi {

GridMeasure1D cavi_update(const Model& model, int coord, const ProductMeasure& nu,
                          const PsiOptions& opt) {
    PsiProfile p = psi_profile(model, coord, nu, opt);
    double lo = *std::min_element(p.values.begin(), p.values.end());
    if (!std::isfinite(lo)) throw NonFiniteError("cavi_update: non-finite Psi profile");
    std::vector<double> raw(p.values.size());
    double hi = 0.0;
    for (size_t j = 0; j < raw.size(); ++j) {
        raw[j] = std::exp(-(p.values[j] - lo));  // recentered by the minimum
        hi = std::max(hi, raw[j]);
    }
    if (hi < 1e-280) throw UnderflowError("cavi_update: exp(-Psi) underflows after recentering");
    return normalize(raw, p.grid);
}

CaviResult cavi_solve(const Model& model, const ProductMeasure& init, double tol,
                      int max_sweeps, const PsiOptions& opt) {
    if (tol <= 0.0) throw ValidationError("cavi_solve: tol must be > 0");
    if (max_sweeps < 1) throw ValidationError("cavi_solve: max_sweeps must be >= 1");
    const int d = init.dim();
    CaviResult res{init, {}};
    for (int k = 1; k <= max_sweeps; ++k) {
        CaviSweepRecord rec;
        rec.sweep = k;
        double max_move = 0.0;
        for (int i = 0; i < d; ++i) {
            GridMeasure1D next = cavi_update(model, i, res.state, opt);
            int levels = 4 * next.grid.cells;
            double move = w2(res.state.marginals[i], next, levels);
            res.state.marginals[i] = std::move(next);
            rec.w2_move.push_back(move);
            max_move = std::max(max_move, move);
        }
        rec.objective = objective_J(model, res.state, opt);
        for (int i = 0; i < d; ++i) {
            rec.mean.push_back(res.state.marginals[i].mean());
            rec.var.push_back(res.state.marginals[i].variance());
        }
        res.trace.sweeps.push_back(std::move(rec));
        if (max_move < tol) {
            res.trace.converged = true;
            break;
        }
    }
    return res;
}

void write_cavi_trace_csv(std::ostream& os, const CaviTrace& trace) {
    if (trace.sweeps.empty()) return;
    const size_t d = trace.sweeps.front().w2_move.size();
    os << "sweep,J";
    for (size_t i = 0; i < d; ++i) os << ",w2_move_" << i + 1;
    for (size_t i = 0; i < d; ++i) os << ",mean_" << i + 1;
    for (size_t i = 0; i < d; ++i) os << ",var_" << i + 1;
    os << "\n";
    os.precision(17);
    for (const auto& r : trace.sweeps) {
        os << r.sweep << "," << r.objective;
        for (double v : r.w2_move) os << "," << v;
        for (double v : r.mean) os << "," << v;
        for (double v : r.var) os << "," << v;
        os << "\n";
    }
}

}  // namespace mfvi
