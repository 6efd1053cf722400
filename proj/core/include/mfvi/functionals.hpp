#pragma once

#include <cstdint>
#include <vector>

#include "mfvi/measure.hpp"
#include "mfvi/model.hpp"

namespace mfvi {

// Conditional potential for one coordinate: Psi_i(x) = E over the other
// marginals of U(.., x, ..), tabulated at the cell centers of `grid`
// together with its x-derivative.
struct PsiProfile {
    int coord;
    Grid1D grid;
    std::vector<double> values;
    std::vector<double> slopes;

    double value_at(double x) const;
    double slope_at(double x) const;
};

struct PsiOptions {
    // Black-box models with d > 3 need Monte Carlo over the other marginals.
    bool monte_carlo = false;
    int mc_samples = 100000;
    std::uint64_t mc_seed = 0;
};

PsiProfile psi_profile(const Model& model, int coord, const ProductMeasure& nu,
                       const PsiOptions& opt = {});

// J(nu) = E_nu[U] - sum_i H(nu_i), up to the model's additive constant.
double objective_J(const Model& model, const ProductMeasure& nu,
                   const PsiOptions& opt = {});

// J_i(nu_i; nu_{-i}) = int Psi_i nu_i - H(nu_i); uses nu's other marginals.
double objective_Ji(const Model& model, int coord, const GridMeasure1D& nu_i,
                    const ProductMeasure& nu, const PsiOptions& opt = {});

double objective_Ji(const PsiProfile& profile, const GridMeasure1D& nu_i);

}  // namespace mfvi
