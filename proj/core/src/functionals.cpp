#include "mfvi/functionals.hpp"

#include <cmath>
#include <random>

namespace mfvi {

double PsiProfile::value_at(double x) const {
    const double dx = grid.dx();
    double s = (x - grid.x_min) / dx - 0.5;
    int m = grid.cells;
    if (s <= 0.0) return values[0] + slopes[0] * (x - grid.center(0));
    if (s >= m - 1) return values[m - 1] + slopes[m - 1] * (x - grid.center(m - 1));
    int j = static_cast<int>(std::floor(s));
    double w = s - j;
    return (1.0 - w) * values[j] + w * values[j + 1];
}

double PsiProfile::slope_at(double x) const {
    const double dx = grid.dx();
    double s = (x - grid.x_min) / dx - 0.5;
    int m = grid.cells;
    if (s <= 0.0) return slopes[0];
    if (s >= m - 1) return slopes[m - 1];
    int j = static_cast<int>(std::floor(s));
    double w = s - j;
    return (1.0 - w) * slopes[j] + w * slopes[j + 1];
}

namespace {

void check_product(const Model& model, const ProductMeasure& nu) {
    if (nu.dim() != dimension(model))
        throw DimensionMismatchError("functionals: model/measure dimension mismatch");
    if (nu.dim() < 1) throw DimensionMismatchError("functionals: empty product measure");
}

PsiProfile quadratic_profile(const QuadraticModel& q, int i, const ProductMeasure& nu) {
    const int d = nu.dim();
    std::vector<double> m(d), s(d);  // mean and second raw moment of each marginal
    for (int j = 0; j < d; ++j) {
        m[j] = nu.marginals[j].mean();
        s[j] = moment(nu.marginals[j], 2, 0.0);
    }
    double lin = q.b(i);
    for (int j = 0; j < d; ++j)
        if (j != i) lin += q.A(i, j) * m[j];
    double c = 0.0;
    for (int j = 0; j < d; ++j) {
        if (j == i) continue;
        c += 0.5 * q.A(j, j) * s[j] + q.b(j) * m[j];
        for (int k = 0; k < d; ++k)
            if (k != i && k != j) c += 0.5 * q.A(j, k) * m[j] * m[k];
    }
    const Grid1D& g = nu.marginals[i].grid;
    PsiProfile out{i, g, std::vector<double>(g.cells), std::vector<double>(g.cells)};
    double a = q.A(i, i);
    for (int j = 0; j < g.cells; ++j) {
        double x = g.center(j);
        out.values[j] = 0.5 * a * x * x + lin * x + c;
        out.slopes[j] = a * x + lin;
    }
    return out;
}

// Tensor-product quadrature over the other marginals (d <= 3).
PsiProfile quadrature_profile(const Model& model, int i, const ProductMeasure& nu) {
    const int d = nu.dim();
    const Grid1D& g = nu.marginals[i].grid;
    PsiProfile out{i, g, std::vector<double>(g.cells, 0.0), std::vector<double>(g.cells, 0.0)};
    std::vector<int> others;
    for (int j = 0; j < d; ++j)
        if (j != i) others.push_back(j);

    std::vector<double> theta(d, 0.0);
    auto accumulate = [&](double weight) {
        for (int j = 0; j < g.cells; ++j) {
            theta[i] = g.center(j);
            out.values[j] += weight * neg_log_p(model, theta);
            out.slopes[j] += weight * grad_neg_log_p(model, theta)[i];
        }
    };

    if (others.empty()) {
        accumulate(1.0);
    } else if (others.size() == 1) {
        const auto& mu = nu.marginals[others[0]];
        double dx = mu.grid.dx();
        for (int a = 0; a < mu.grid.cells; ++a) {
            double w = mu.density[a] * dx;
            if (w == 0.0) continue;
            theta[others[0]] = mu.grid.center(a);
            accumulate(w);
        }
    } else if (others.size() == 2) {
        const auto& mu = nu.marginals[others[0]];
        const auto& la = nu.marginals[others[1]];
        double wa, wb;
        for (int a = 0; a < mu.grid.cells; ++a) {
            wa = mu.density[a] * mu.grid.dx();
            if (wa == 0.0) continue;
            theta[others[0]] = mu.grid.center(a);
            for (int b = 0; b < la.grid.cells; ++b) {
                wb = la.density[b] * la.grid.dx();
                if (wb == 0.0) continue;
                theta[others[1]] = la.grid.center(b);
                accumulate(wa * wb);
            }
        }
    } else {
        throw QuadratureOverflowError(
            "psi_profile: d > 3 requires Monte Carlo (set PsiOptions.monte_carlo)");
    }
    return out;
}

// Monte Carlo over the other marginals with a fixed seed.
PsiProfile monte_carlo_profile(const Model& model, int i, const ProductMeasure& nu,
                               const PsiOptions& opt) {
    const int d = nu.dim();
    const Grid1D& g = nu.marginals[i].grid;
    PsiProfile out{i, g, std::vector<double>(g.cells, 0.0), std::vector<double>(g.cells, 0.0)};

    // quantile tables for inverse-CDF sampling
    std::vector<QuantileMeasure1D> qt;
    for (int j = 0; j < d; ++j) qt.push_back(to_quantile(nu.marginals[j], 4096));

    std::mt19937_64 rng(opt.mc_seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> theta(d, 0.0);
    double w = 1.0 / opt.mc_samples;
    for (int n = 0; n < opt.mc_samples; ++n) {
        for (int j = 0; j < d; ++j) {
            if (j == i) continue;
            double u = unif(rng);
            int k = std::min(static_cast<int>(u * 4096), 4095);
            theta[j] = qt[j].q[k];
        }
        for (int j = 0; j < g.cells; ++j) {
            theta[i] = g.center(j);
            out.values[j] += w * neg_log_p(model, theta);
            out.slopes[j] += w * grad_neg_log_p(model, theta)[i];
        }
    }
    return out;
}

}  // namespace

PsiProfile psi_profile(const Model& model, int coord, const ProductMeasure& nu,
                       const PsiOptions& opt) {
    check_product(model, nu);
    if (coord < 0 || coord >= nu.dim())
        throw DimensionMismatchError("psi_profile: coordinate index out of range");
    if (const auto* q = std::get_if<QuadraticModel>(&model))
        return quadratic_profile(*q, coord, nu);
    if (nu.dim() > 3 || opt.monte_carlo) {
        if (!opt.monte_carlo)
            throw QuadratureOverflowError(
                "psi_profile: d > 3 requires Monte Carlo (set PsiOptions.monte_carlo)");
        return monte_carlo_profile(model, coord, nu, opt);
    }
    return quadrature_profile(model, coord, nu);
}

double objective_J(const Model& model, const ProductMeasure& nu, const PsiOptions& opt) {
    check_product(model, nu);
    double e_u;
    if (const auto* q = std::get_if<QuadraticModel>(&model)) {
        const int d = nu.dim();
        std::vector<double> m(d), s(d);
        for (int j = 0; j < d; ++j) {
            m[j] = nu.marginals[j].mean();
            s[j] = moment(nu.marginals[j], 2, 0.0);
        }
        e_u = 0.0;
        for (int j = 0; j < d; ++j) {
            e_u += 0.5 * q->A(j, j) * s[j] + q->b(j) * m[j];
            for (int k = j + 1; k < d; ++k) e_u += q->A(j, k) * m[j] * m[k];
        }
    } else {
        // E_nu[U] = int Psi_0 d nu_0 for any coordinate
        PsiProfile p0 = psi_profile(model, 0, nu, opt);
        const auto& mu = nu.marginals[0];
        double dx = mu.grid.dx();
        e_u = 0.0;
        for (int j = 0; j < mu.grid.cells; ++j) e_u += p0.values[j] * mu.density[j] * dx;
    }
    double h = 0.0;
    for (const auto& mu : nu.marginals) h += entropy(mu);
    return e_u - h;
}

double objective_Ji(const PsiProfile& profile, const GridMeasure1D& nu_i) {
    if (!(profile.grid == nu_i.grid))
        throw GridMismatchError("objective_Ji: profile and marginal grids differ");
    double dx = nu_i.grid.dx();
    double e = 0.0;
    for (int j = 0; j < nu_i.grid.cells; ++j) e += profile.values[j] * nu_i.density[j] * dx;
    return e - entropy(nu_i);
}

double objective_Ji(const Model& model, int coord, const GridMeasure1D& nu_i,
                    const ProductMeasure& nu, const PsiOptions& opt) {
    PsiProfile p = psi_profile(model, coord, nu, opt);
    return objective_Ji(p, nu_i);
}

}  // namespace mfvi
