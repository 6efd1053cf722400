#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "mfvi/errors.hpp"

namespace mfvi::oracle {

// Fixed point of the Gaussian CAVI recursion m_i = -(b_i + sum_{j!=i} A_ij m_j)/A_ii
// iterated to 1e-12; variances are 1/A_ii. Means solve A m = -b.
struct GaussianFixedPoint {
    std::vector<double> means;
    std::vector<double> variances;
};
GaussianFixedPoint gaussian_cavi_fixed_point(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

// Exact W2 between uniform discrete measures on <= 6 atoms by exhaustive
// search over permutation couplings.
double discrete_ot_bruteforce(std::vector<double> atoms_mu, std::vector<double> atoms_nu);

// d=1 quadratic-potential minimizing-movement step restricted to Gaussians:
// m' = m/(1+ha); sigma' solves sigma' - sigma + h(a sigma' - 1/sigma') = 0.
std::pair<double, double> gaussian_jko_step_oracle(double a, double m, double sigma, double h);

// Ornstein-Uhlenbeck moments under unit-diffusion FP: m0 e^{-at},
// 1/a + (sigma0^2 - 1/a) e^{-2at}.
std::pair<double, double> ou_moments(double a, double m0, double var0, double t);

}  // namespace mfvi::oracle
