#include "mfvi/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mfvi::oracle {

GaussianFixedPoint gaussian_cavi_fixed_point(const Eigen::MatrixXd& A,
                                             const Eigen::VectorXd& b) {
    const int d = static_cast<int>(b.size());
    if (A.rows() != d || A.cols() != d)
        throw DimensionMismatchError("gaussian_cavi_fixed_point: shape mismatch");
    Eigen::VectorXd m = Eigen::VectorXd::Zero(d);
    for (int it = 0; it < 100000; ++it) {
        double move = 0.0;
        for (int i = 0; i < d; ++i) {
            double s = b(i);
            for (int j = 0; j < d; ++j)
                if (j != i) s += A(i, j) * m(j);
            double next = -s / A(i, i);
            move = std::max(move, std::abs(next - m(i)));
            m(i) = next;
        }
        if (move < 1e-12) {
            GaussianFixedPoint out;
            for (int i = 0; i < d; ++i) {
                out.means.push_back(m(i));
                out.variances.push_back(1.0 / A(i, i));
            }
            return out;
        }
    }
    throw DivergenceError("gaussian_cavi_fixed_point: recursion did not converge (A not PD?)");
}

double discrete_ot_bruteforce(std::vector<double> atoms_mu, std::vector<double> atoms_nu) {
    const size_t n = atoms_mu.size();
    if (n != atoms_nu.size())
        throw DimensionMismatchError("discrete_ot_bruteforce: atom counts differ");
    if (n == 0 || n > 6) throw TooManyAtomsError("discrete_ot_bruteforce: need 1..6 atoms");
    std::vector<int> perm(n);
    for (size_t i = 0; i < n; ++i) perm[i] = static_cast<int>(i);
    std::sort(perm.begin(), perm.end());
    double best = std::numeric_limits<double>::infinity();
    do {
        double cost = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double dd = atoms_mu[i] - atoms_nu[perm[i]];
            cost += dd * dd;
        }
        best = std::min(best, cost);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::sqrt(best / n);
}

std::pair<double, double> gaussian_jko_step_oracle(double a, double m, double sigma, double h) {
    if (!(a > 0.0) || !(sigma > 0.0) || h < 0.0)
        throw ValidationError("gaussian_jko_step_oracle: need a > 0, sigma > 0, h >= 0");
    double m_next = m / (1.0 + h * a);
    // g(s) = s - sigma + h (a s - 1/s); strictly increasing on (0, inf)
    auto g = [&](double s) { return s - sigma + h * (a * s - 1.0 / s); };
    double lo = 1e-12, hi = sigma + 1.0;
    while (g(hi) < 0.0) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    return {m_next, 0.5 * (lo + hi)};
}

std::pair<double, double> ou_moments(double a, double m0, double var0, double t) {
    if (!(a > 0.0)) throw ValidationError("ou_moments: need a > 0");
    double m = m0 * std::exp(-a * t);
    double v = 1.0 / a + (var0 - 1.0 / a) * std::exp(-2.0 * a * t);
    return {m, v};
}

}  // namespace mfvi::oracle
