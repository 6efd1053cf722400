#include "mfvi/fp.hpp"

#include <algorithm>
#include <cmath>

namespace mfvi {

void FpConfig::validate() const {
    if (!(dt > 0.0)) throw ValidationError("FpConfig.dt must be > 0");
    if (refresh_every < 1) throw ValidationError("FpConfig.refresh_every must be >= 1");
}

namespace {

// Chang-Cooper face weight: delta(w) = 1/w - 1/(e^w - 1), with w the
// potential increment across the face. Exact on Gibbs equilibria.
double cc_delta(double w) {
    if (std::abs(w) < 1e-8) return 0.5 - w / 12.0;
    return 1.0 / w - 1.0 / std::expm1(w);
}

struct FaceCoeffs {
    // flux through face j+1/2: G = alpha * rho_j + beta * rho_{j+1}
    std::vector<double> alpha, beta;
};

FaceCoeffs face_coeffs(const PsiProfile& psi) {
    const int m = psi.grid.cells;
    const double dx = psi.grid.dx();
    FaceCoeffs fc{std::vector<double>(m - 1), std::vector<double>(m - 1)};
    for (int j = 0; j < m - 1; ++j) {
        double w = psi.values[j + 1] - psi.values[j];  // dx * drift / diffusion
        double drift = w / dx;
        double delta = cc_delta(w);
        fc.alpha[j] = drift * delta - 1.0 / dx;
        fc.beta[j] = drift * (1.0 - delta) + 1.0 / dx;
    }
    return fc;
}

// d rho/dt at each cell: (G_{j+1/2} - G_{j-1/2}) / dx with no-flux boundaries.
std::vector<double> apply_operator(const FaceCoeffs& fc, const std::vector<double>& rho,
                                   double dx) {
    const int m = static_cast<int>(rho.size());
    std::vector<double> out(m);
    auto flux = [&](int j) {  // face j+1/2, j in [0, m-2]
        return fc.alpha[j] * rho[j] + fc.beta[j] * rho[j + 1];
    };
    for (int j = 0; j < m; ++j) {
        double g_right = (j < m - 1) ? flux(j) : 0.0;
        double g_left = (j > 0) ? flux(j - 1) : 0.0;
        out[j] = (g_right - g_left) / dx;
    }
    return out;
}

// Thomas solve of (I - lambda * L) rho_new = rho_old where L is the
// tridiagonal Chang-Cooper operator.
std::vector<double> implicit_update(const FaceCoeffs& fc, const std::vector<double>& rho,
                                    double dt, double dx) {
    const int m = static_cast<int>(rho.size());
    const double lam = dt / dx;
    std::vector<double> lower(m, 0.0), diag(m, 1.0), upper(m, 0.0);
    for (int j = 0; j < m; ++j) {
        if (j < m - 1) {  // face j+1/2 contributes +G/dx to cell j
            diag[j] -= lam * fc.alpha[j];
            upper[j] = -lam * fc.beta[j];
        }
        if (j > 0) {  // face j-1/2 contributes -G/dx to cell j
            diag[j] += lam * fc.beta[j - 1];
            lower[j] = lam * fc.alpha[j - 1];
        }
    }
    std::vector<double> c(m), d(m), out(m);
    double piv = diag[0];
    if (piv == 0.0) throw TridiagonalSingularError("fp_step: singular tridiagonal system");
    c[0] = upper[0] / piv;
    d[0] = rho[0] / piv;
    for (int j = 1; j < m; ++j) {
        piv = diag[j] - lower[j] * c[j - 1];
        if (piv == 0.0) throw TridiagonalSingularError("fp_step: singular tridiagonal system");
        c[j] = upper[j] / piv;
        d[j] = (rho[j] - lower[j] * d[j - 1]) / piv;
    }
    out[m - 1] = d[m - 1];
    for (int j = m - 2; j >= 0; --j) out[j] = d[j] - c[j] * out[j + 1];
    return out;
}

}  // namespace

FpState fp_init(const Model& model, const ProductMeasure& init, const PsiOptions& opt) {
    FpState st;
    st.t = 0.0;
    st.nu = init;
    for (int i = 0; i < init.dim(); ++i) st.profiles.push_back(psi_profile(model, i, init, opt));
    return st;
}

FpState fp_step(const FpState& state, const Model& model, const FpConfig& cfg,
                const PsiOptions& opt) {
    cfg.validate();
    FpState next = state;
    if (next.steps_since_refresh >= cfg.refresh_every || next.profiles.empty()) {
        next.profiles.clear();
        for (int i = 0; i < next.nu.dim(); ++i)
            next.profiles.push_back(psi_profile(model, i, next.nu, opt));
        next.steps_since_refresh = 0;
    }
    for (int i = 0; i < next.nu.dim(); ++i) {
        GridMeasure1D& mu = next.nu.marginals[i];
        const double dx = mu.grid.dx();
        FaceCoeffs fc = face_coeffs(next.profiles[i]);
        if (cfg.semi_implicit) {
            mu.density = implicit_update(fc, mu.density, cfg.dt, dx);
        } else {
            if (cfg.dt > 0.5 * dx * dx)
                throw CflViolationError("fp_step: explicit mode needs dt <= dx^2/2");
            std::vector<double> rate = apply_operator(fc, mu.density, dx);
            for (int j = 0; j < mu.grid.cells; ++j) mu.density[j] += cfg.dt * rate[j];
        }
        for (double& v : mu.density) v = std::max(v, 0.0);
    }
    next.t += cfg.dt;
    next.steps_since_refresh += 1;
    return next;
}

double stationary_residual(const ProductMeasure& nu, const Model& model,
                           const PsiOptions& opt) {
    double worst = 0.0;
    for (int i = 0; i < nu.dim(); ++i) {
        PsiProfile p = psi_profile(model, i, nu, opt);
        FaceCoeffs fc = face_coeffs(p);
        const double dx = nu.marginals[i].grid.dx();
        std::vector<double> rate = apply_operator(fc, nu.marginals[i].density, dx);
        double l1 = 0.0;
        for (double r : rate) l1 += std::abs(r) * dx;
        worst = std::max(worst, l1);
    }
    return worst;
}

FpRunResult fp_run(const Model& model, const ProductMeasure& init, const FpConfig& cfg,
                   double horizon, int n_records, const PsiOptions& opt) {
    cfg.validate();
    if (horizon < 0.0) throw ValidationError("fp_run: horizon must be >= 0");
    FpRunResult out{fp_init(model, init, opt), {}};
    const int steps = static_cast<int>(std::llround(horizon / cfg.dt));
    const int every = std::max(1, n_records > 0 ? steps / n_records : steps + 1);

    auto record = [&](const FpState& st) {
        FpRecord r;
        r.t = st.t;
        r.objective = objective_J(model, st.nu, opt);
        r.residual = stationary_residual(st.nu, model, opt);
        for (const auto& mu : st.nu.marginals) {
            r.mean.push_back(mu.mean());
            r.var.push_back(mu.variance());
        }
        out.records.push_back(std::move(r));
    };
    record(out.final_state);
    for (int s = 1; s <= steps; ++s) {
        out.final_state = fp_step(out.final_state, model, cfg, opt);
        if (s % every == 0 || s == steps) record(out.final_state);
    }
    return out;
}

void write_fp_trace_csv(std::ostream& os, const FpRunResult& run) {
    if (run.records.empty()) return;
    const size_t d = run.records.front().mean.size();
    os << "t,J,residual";
    for (size_t i = 0; i < d; ++i) os << ",mean_" << i + 1;
    for (size_t i = 0; i < d; ++i) os << ",var_" << i + 1;
    os << "\n";
    os.precision(17);
    for (const auto& r : run.records) {
        os << r.t << "," << r.objective << "," << r.residual;
        for (double v : r.mean) os << "," << v;
        for (double v : r.var) os << "," << v;
        os << "\n";
    }
}

}  // namespace mfvi
