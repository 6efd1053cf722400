#include "mfvi/jko.hpp"

#include <algorithm>
#include <cmath>

namespace mfvi {

namespace {
constexpr double kMinGap = 1e-12;  // clamp inside log and its gradient
}

void JkoConfig::validate() const {
    if (!(h >= 0.0)) throw ValidationError("JkoConfig.h must be >= 0");
    if (levels < 64) throw ValidationError("JkoConfig.levels must be >= 64");
    if (!(inner_tol > 0.0)) throw ValidationError("JkoConfig.inner_tol must be > 0");
    if (inner_max_iters < 1) throw ValidationError("JkoConfig.inner_max_iters must be >= 1");
}

const ProductMeasure& JkoTrajectory::at_time(double t) const {
    if (snapshots.empty()) throw Error("JkoTrajectory: empty");
    int k = static_cast<int>(std::floor(t / h));
    k = std::clamp(k, 0, static_cast<int>(snapshots.size()) - 1);
    return snapshots[k];
}

std::vector<double> pav_projection(std::vector<double> v) {
    const int n = static_cast<int>(v.size());
    // stack of blocks (value, weight)
    std::vector<double> val(n), wgt(n);
    std::vector<int> len(n);
    int top = 0;
    for (int i = 0; i < n; ++i) {
        val[top] = v[i];
        wgt[top] = 1.0;
        len[top] = 1;
        ++top;
        while (top > 1 && val[top - 2] > val[top - 1]) {
            double w = wgt[top - 2] + wgt[top - 1];
            val[top - 2] = (wgt[top - 2] * val[top - 2] + wgt[top - 1] * val[top - 1]) / w;
            wgt[top - 2] = w;
            len[top - 2] += len[top - 1];
            --top;
        }
    }
    int i = 0;
    for (int b = 0; b < top; ++b)
        for (int r = 0; r < len[b]; ++r) v[i++] = val[b];
    return v;
}

namespace {

// discrete entropy H(Q) = (1/K) sum log(dQ_k / s_k); centered differences,
// one-sided at the endpoints
double entropy_of_quantiles(const std::vector<double>& q) {
    const int k = static_cast<int>(q.size());
    double s = 0.0;
    for (int j = 0; j < k; ++j) {
        int lo = (j == 0) ? 0 : j - 1;
        int hi = (j == k - 1) ? k - 1 : j + 1;
        double gap = std::max(q[hi] - q[lo], kMinGap);
        double span = static_cast<double>(hi - lo) / k;
        s += std::log(gap / span);
    }
    return s / k;
}

void entropy_gradient(const std::vector<double>& q, std::vector<double>& g) {
    const int k = static_cast<int>(q.size());
    std::fill(g.begin(), g.end(), 0.0);
    for (int j = 0; j < k; ++j) {
        int lo = (j == 0) ? 0 : j - 1;
        int hi = (j == k - 1) ? k - 1 : j + 1;
        double gap = std::max(q[hi] - q[lo], kMinGap);
        g[hi] += 1.0 / gap;
        g[lo] -= 1.0 / gap;
    }
    for (double& v : g) v /= k;
}

// banded Cholesky (lower, bandwidth bw) in place: band[b][i] = A(i+b, i)
void banded_cholesky(std::vector<std::vector<double>>& band, int n, int bw) {
    for (int i = 0; i < n; ++i) {
        double d = band[0][i];
        for (int b = 1; b <= bw; ++b)
            if (i - b >= 0) d -= band[b][i - b] * band[b][i - b];
        if (d <= 0.0) throw TridiagonalSingularError("jko_inner_step: Hessian not SPD");
        d = std::sqrt(d);
        band[0][i] = d;
        for (int r = 1; r <= bw; ++r) {
            if (i + r >= n) break;
            double s = band[r][i];
            for (int b = 1; b <= bw - r; ++b)
                if (i - b >= 0) s -= band[r + b][i - b] * band[b][i - b];
            band[r][i] = s / d;
        }
    }
}

void banded_solve(const std::vector<std::vector<double>>& band, int n, int bw,
                  std::vector<double>& x) {
    for (int i = 0; i < n; ++i) {
        double s = x[i];
        for (int b = 1; b <= bw; ++b)
            if (i - b >= 0) s -= band[b][i - b] * x[i - b];
        x[i] = s / band[0][i];
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        for (int b = 1; b <= bw; ++b)
            if (i + b < n) s -= band[b][i] * x[i + b];
        x[i] = s / band[0][i];
    }
}

}  // namespace

double jko_inner_objective(const std::vector<double>& q, const std::vector<double>& q_prev,
                           const PsiProfile& profile, double h) {
    const int k = static_cast<int>(q.size());
    double transport = 0.0, potential = 0.0;
    for (int j = 0; j < k; ++j) {
        double d = q[j] - q_prev[j];
        transport += d * d;
        potential += profile.value_at(q[j]);
    }
    return 0.5 * transport / k + h * (potential / k - entropy_of_quantiles(q));
}

GridMeasure1D jko_inner_step(const Model& model, int coord, const ProductMeasure& prev,
                             const JkoConfig& cfg, const PsiOptions& opt) {
    cfg.validate();
    const GridMeasure1D& mu_prev = prev.marginals[coord];
    if (cfg.h == 0.0) return mu_prev;  // transport term pins the minimizer

    PsiProfile profile = psi_profile(model, coord, prev, opt);
    const int k = cfg.levels;
    std::vector<double> q_prev = to_quantile(mu_prev, k).q;
    double prev_range = q_prev.back() - q_prev.front();

    std::vector<double> q = q_prev;  // warm start
    std::vector<double> grad(k), ent_grad(k), step(k), trial(k);
    const int bw = 2;  // centered differences couple j with j +/- 2
    std::vector<std::vector<double>> band(bw + 1, std::vector<double>(k, 0.0));
    double v = jko_inner_objective(q, q_prev, profile, cfg.h);
    const double v_stay = v;
    double rate = cfg.initial_rate;
    const double eps = mu_prev.grid.dx();

    for (int iter = 0; iter < cfg.inner_max_iters; ++iter) {
        entropy_gradient(q, ent_grad);
        double gnorm2 = 0.0;
        for (int j = 0; j < k; ++j) {
            grad[j] = (q[j] - q_prev[j]) / k + cfg.h * (profile.slope_at(q[j]) / k - ent_grad[j]);
            gnorm2 += grad[j] * grad[j];
        }
        if (gnorm2 == 0.0) break;

        // Newton step on the SPD Hessian: transport (1/k) I + potential
        // diag h psi''/k (clamped >= 0) + entropy rank-one terms
        // (h/k) (e_hi - e_lo)(e_hi - e_lo)^T / gap^2
        for (auto& row : band) std::fill(row.begin(), row.end(), 0.0);
        for (int j = 0; j < k; ++j) {
            double psi2 =
                (profile.slope_at(q[j] + eps) - profile.slope_at(q[j] - eps)) / (2.0 * eps);
            band[0][j] = (1.0 + cfg.h * std::max(psi2, 0.0)) / k;
        }
        for (int j = 0; j < k; ++j) {
            int lo = (j == 0) ? 0 : j - 1;
            int hi = (j == k - 1) ? k - 1 : j + 1;
            double gap = std::max(q[hi] - q[lo], kMinGap);
            double w = cfg.h / (k * gap * gap);
            band[0][hi] += w;
            band[0][lo] += w;
            band[hi - lo][lo] -= w;
        }
        banded_cholesky(band, k, bw);
        step = grad;
        banded_solve(band, k, bw, step);

        bool accepted = false;
        double v_new = v;
        while (rate > 1e-14) {
            for (int j = 0; j < k; ++j) trial[j] = q[j] - rate * step[j];
            trial = pav_projection(std::move(trial));
            v_new = jko_inner_objective(trial, q_prev, profile, cfg.h);
            // sufficient decrease along the projected step
            double dec = 0.0;
            for (int j = 0; j < k; ++j) dec += grad[j] * (q[j] - trial[j]);
            if (std::isfinite(v_new) && v_new <= v - cfg.sufficient_decrease * dec) {
                accepted = true;
                break;
            }
            rate *= cfg.shrink;
        }
        if (!accepted) break;
        double rel_change = std::abs(v - v_new) / (std::abs(v) + 1e-12);
        q.swap(trial);
        v = v_new;
        rate = std::min(rate * 2.0, cfg.initial_rate);
        if (rel_change < cfg.inner_tol) break;
    }

    if (!std::isfinite(v)) throw NonFiniteError("jko_inner_step: objective became non-finite");
    if (prev_range > 1e-8 && q.back() - q.front() < 1e-12)
        throw MonotonicityCollapseError("jko_inner_step: PAV collapsed to a point (h too large?)");
    if (v > v_stay) return mu_prev;  // fallback: never worse than not moving

    QuantileMeasure1D qm{std::move(q)};
    return to_density(qm, mu_prev.grid);
}

ProductMeasure jko_sweep(const Model& model, const ProductMeasure& prev,
                         const JkoConfig& cfg, const PsiOptions& opt) {
    ProductMeasure cur = prev;
    for (int i = 0; i < cur.dim(); ++i)
        cur.marginals[i] = jko_inner_step(model, i, cur, cfg, opt);
    return cur;
}

JkoTrajectory jko_run(const Model& model, const ProductMeasure& init, const JkoConfig& cfg,
                      double horizon, const PsiOptions& opt) {
    cfg.validate();
    if (horizon < cfg.h) throw ValidationError("jko_run: horizon must be >= h");
    const int d = init.dim();
    const int steps = static_cast<int>(std::ceil(horizon / cfg.h));
    JkoTrajectory traj;
    traj.h = cfg.h;
    traj.initial_objective = objective_J(model, init, opt);
    traj.snapshots.push_back(init);

    int quiet_sweeps = 0;
    for (int k = 1; k <= steps; ++k) {
        const ProductMeasure& prev = traj.snapshots.back();
        ProductMeasure cur = prev;
        JkoRecord rec;
        rec.k = k;
        rec.t = k * cfg.h;
        double max_move = 0.0;
        for (int i = 0; i < d; ++i) {
            GridMeasure1D next = jko_inner_step(model, i, cur, cfg, opt);
            double move = w2(cur.marginals[i], next, cfg.levels);
            cur.marginals[i] = std::move(next);
            rec.w2_step.push_back(move);
            max_move = std::max(max_move, move);
        }
        rec.objective = objective_J(model, cur, opt);
        for (int i = 0; i < d; ++i) {
            rec.mean.push_back(cur.marginals[i].mean());
            rec.var.push_back(cur.marginals[i].variance());
        }
        traj.snapshots.push_back(std::move(cur));
        traj.records.push_back(std::move(rec));
        quiet_sweeps = (max_move < 1e-6) ? quiet_sweeps + 1 : 0;
        if (quiet_sweeps >= 3) break;  // stationarity reached
    }
    return traj;
}

void write_jko_trace_csv(std::ostream& os, const JkoTrajectory& traj) {
    if (traj.records.empty()) return;
    const size_t d = traj.records.front().w2_step.size();
    os << "k,t,J";
    for (size_t i = 0; i < d; ++i) os << ",w2_step_" << i + 1;
    for (size_t i = 0; i < d; ++i) os << ",mean_" << i + 1;
    for (size_t i = 0; i < d; ++i) os << ",var_" << i + 1;
    os << "\n";
    os.precision(17);
    for (const auto& r : traj.records) {
        os << r.k << "," << r.t << "," << r.objective;
        for (double v : r.w2_step) os << "," << v;
        for (double v : r.mean) os << "," << v;
        for (double v : r.var) os << "," << v;
        os << "\n";
    }
}

}  // namespace mfvi
