#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "mfvi/errors.hpp"

namespace mfvi {

// U(theta) = 1/2 theta'A theta + b'theta, standing for -log P(x,theta) up to
// an additive constant (the normalizing constant is never computed).
struct QuadraticModel {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;

    QuadraticModel(Eigen::MatrixXd A_, Eigen::VectorXd b_);
    int dim() const { return static_cast<int>(b.size()); }
};

struct BlackBoxModel {
    int dim = 0;
    std::function<double(const std::vector<double>&)> potential;
    // optional; central finite differences with step 1e-5 when absent
    std::function<std::vector<double>(const std::vector<double>&)> gradient;
    double box_lo = -8.0;
    double box_hi = 8.0;
    std::string name;
};

using Model = std::variant<QuadraticModel, BlackBoxModel>;

int dimension(const Model& model);

double neg_log_p(const Model& model, const std::vector<double>& theta);
std::vector<double> grad_neg_log_p(const Model& model, const std::vector<double>& theta);

// Exact smallest eigenvalue of A for quadratic models; minimum sampled-Hessian
// eigenvalue over 64 quasi-random probe points for black-box models (an
// estimate, not a certificate). May be <= 0; callers decide how to react.
double gamma_estimate(const Model& model);

// Built-in black-box catalog ("double_well", ...).
Model catalog_model(const std::string& name, int dim, double coupling);

}  // namespace mfvi
