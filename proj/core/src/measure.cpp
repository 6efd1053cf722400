#include "mfvi/measure.hpp"

#include <algorithm>
#include <cmath>

namespace mfvi {

namespace {
constexpr double kDensityFloor = 1e-300;  // only inside logarithms
}

Grid1D::Grid1D(double x_min_, double x_max_, int cells_)
    : x_min(x_min_), x_max(x_max_), cells(cells_) {
    if (!(x_min < x_max)) throw ValidationError("Grid1D: x_min must be < x_max");
    if (cells < 8) throw ValidationError("Grid1D: M must be >= 8");
}

double GridMeasure1D::mass() const {
    double s = 0.0;
    for (double v : density) s += v;
    return s * grid.dx();
}

double GridMeasure1D::mean() const { return moment(*this, 1, 0.0); }

double GridMeasure1D::variance() const {
    double m = mean();
    return moment(*this, 2, m);
}

GridMeasure1D normalize(const std::vector<double>& raw, const Grid1D& grid) {
    if (static_cast<int>(raw.size()) != grid.cells)
        throw DimensionMismatchError("normalize: raw size != grid cells");
    double sum = 0.0;
    for (double v : raw) {
        if (!std::isfinite(v)) throw NonFiniteError("normalize: non-finite entry");
        if (v < 0.0) throw ValidationError("normalize: negative entry");
        sum += v;
    }
    if (sum == 0.0) throw AllZeroError("normalize: all entries zero");
    GridMeasure1D out{grid, raw};
    double scale = 1.0 / (sum * grid.dx());
    for (double& v : out.density) v *= scale;
    return out;
}

double entropy(const GridMeasure1D& mu) {
    double dx = mu.grid.dx();
    double h = 0.0;
    for (double rho : mu.density) {
        if (rho > kDensityFloor) h -= rho * std::log(rho);
    }
    return h * dx;
}

double moment(const GridMeasure1D& mu, int order, double center) {
    if (order != 1 && order != 2)
        throw ValidationError("moment: order must be 1 or 2");
    double dx = mu.grid.dx();
    double s = 0.0;
    for (int j = 0; j < mu.grid.cells; ++j) {
        double z = mu.grid.center(j) - center;
        s += (order == 1 ? z : z * z) * mu.density[j];
    }
    return s * dx;
}

QuantileMeasure1D to_quantile(const GridMeasure1D& mu, int levels) {
    if (levels < 1) throw ValidationError("to_quantile: K must be >= 1");
    const int m = mu.grid.cells;
    const double dx = mu.grid.dx();
    // CDF at cell edges, piecewise linear in between.
    std::vector<double> cdf(m + 1, 0.0);
    for (int j = 0; j < m; ++j) cdf[j + 1] = cdf[j] + mu.density[j] * dx;
    double total = cdf[m];
    if (total <= 0.0) throw AllZeroError("to_quantile: zero-mass measure");
    for (double& c : cdf) c /= total;

    QuantileMeasure1D out;
    out.q.resize(levels);
    int j = 0;
    for (int k = 0; k < levels; ++k) {
        double u = (k + 0.5) / levels;
        while (j < m - 1 && cdf[j + 1] < u) ++j;
        double lo = cdf[j], hi = cdf[j + 1];
        double x_lo = mu.grid.x_min + j * dx;
        double x;
        if (hi > lo) {
            x = x_lo + (u - lo) / (hi - lo) * dx;
        } else {
            x = x_lo;  // flat stretch: take the left edge
        }
        out.q[k] = x;
    }
    // guard against roundoff wiggles
    for (int k = 1; k < levels; ++k) out.q[k] = std::max(out.q[k], out.q[k - 1]);
    return out;
}

GridMeasure1D to_density(const QuantileMeasure1D& qm, const Grid1D& grid) {
    const int m = grid.cells;
    const double dx = grid.dx();
    const int levels = qm.levels();
    for (double q : qm.q) {
        if (q < grid.x_min || q > grid.x_max)
            throw OutOfDomainError("to_density: quantile outside grid domain");
    }
    // piecewise-linear CDF through (q_k, (k+1/2)/K), differenced at cell edges
    auto cdf = [&](double x) -> double {
        if (x <= qm.q.front()) return 0.0;
        if (x >= qm.q.back()) return 1.0;
        int lo = 0, hi = levels - 1;
        while (hi - lo > 1) {
            int mid = (lo + hi) / 2;
            (qm.q[mid] <= x ? lo : hi) = mid;
        }
        double gap = qm.q[hi] - qm.q[lo];
        double frac = gap > 0.0 ? (x - qm.q[lo]) / gap : 1.0;
        return (lo + 0.5 + frac) / levels;
    };
    std::vector<double> raw(m, 0.0);
    double f_left = cdf(grid.x_min);
    for (int j = 0; j < m; ++j) {
        double f_right = cdf(grid.x_min + (j + 1) * dx);
        raw[j] = std::max(f_right - f_left, 0.0);
        f_left = f_right;
    }
    return normalize(raw, grid);
}

double w2(const QuantileMeasure1D& a, const QuantileMeasure1D& b) {
    if (a.levels() != b.levels())
        throw DimensionMismatchError("w2: quantile resolutions differ");
    double s = 0.0;
    for (int k = 0; k < a.levels(); ++k) {
        double d = a.q[k] - b.q[k];
        s += d * d;
    }
    return std::sqrt(s / a.levels());
}

double w2(const GridMeasure1D& mu, const GridMeasure1D& nu, int levels) {
    return w2(to_quantile(mu, levels), to_quantile(nu, levels));
}

GridMeasure1D gaussian_on_grid(const Grid1D& grid, double mean, double stddev) {
    std::vector<double> raw(grid.cells);
    for (int j = 0; j < grid.cells; ++j) {
        double z = (grid.center(j) - mean) / stddev;
        raw[j] = std::exp(-0.5 * z * z);
    }
    return normalize(raw, grid);
}

}  // namespace mfvi
