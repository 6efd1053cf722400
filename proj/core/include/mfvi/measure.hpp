#pragma once

#include <cstddef>
#include <vector>

#include "mfvi/errors.hpp"

namespace mfvi {

// Uniform cell-centered grid on [x_min, x_max] with M cells.
struct Grid1D {
    double x_min;
    double x_max;
    int cells;

    Grid1D(double x_min_, double x_max_, int cells_);

    double dx() const { return (x_max - x_min) / cells; }
    double center(int j) const { return x_min + (j + 0.5) * dx(); }
    bool operator==(const Grid1D&) const = default;
};

// Probability density sampled at cell centers; dx * sum(density) == 1 after normalize().
struct GridMeasure1D {
    Grid1D grid;
    std::vector<double> density;

    double mass() const;
    double mean() const;
    double variance() const;
};

// Measure given by its quantile values at the K uniform midpoints u_k = (k+1/2)/K.
struct QuantileMeasure1D {
    std::vector<double> q;  // nondecreasing

    int levels() const { return static_cast<int>(q.size()); }
};

// Product measure: ordered marginals, possibly on different grids.
struct ProductMeasure {
    std::vector<GridMeasure1D> marginals;

    int dim() const { return static_cast<int>(marginals.size()); }
};

GridMeasure1D normalize(const std::vector<double>& raw, const Grid1D& grid);

double entropy(const GridMeasure1D& mu);

// order must be 1 or 2; returns dx * sum (x_j - center)^order rho_j.
double moment(const GridMeasure1D& mu, int order, double center);

QuantileMeasure1D to_quantile(const GridMeasure1D& mu, int levels);

GridMeasure1D to_density(const QuantileMeasure1D& q, const Grid1D& grid);

double w2(const GridMeasure1D& mu, const GridMeasure1D& nu, int levels);
double w2(const QuantileMeasure1D& a, const QuantileMeasure1D& b);

// Convenience: Gaussian density restricted to the grid (normalized on it).
GridMeasure1D gaussian_on_grid(const Grid1D& grid, double mean, double stddev);

}  // namespace mfvi
