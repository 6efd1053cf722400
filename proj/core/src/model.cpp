#include "mfvi/model.hpp"

#include <cmath>

namespace mfvi {

QuadraticModel::QuadraticModel(Eigen::MatrixXd A_, Eigen::VectorXd b_)
    : A(std::move(A_)), b(std::move(b_)) {
    if (A.rows() != A.cols() || A.rows() != b.size())
        throw DimensionMismatchError("QuadraticModel: A must be d x d with b of length d");
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw ValidationError("QuadraticModel: A not symmetric");
}

int dimension(const Model& model) {
    return std::visit([](const auto& m) {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, QuadraticModel>)
            return m.dim();
        else
            return m.dim;
    }, model);
}

static Eigen::VectorXd to_eigen(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<long>(v.size()));
}

double neg_log_p(const Model& model, const std::vector<double>& theta) {
    for (double t : theta)
        if (!std::isfinite(t)) throw NonFiniteError("neg_log_p: non-finite theta");
    if (static_cast<int>(theta.size()) != dimension(model))
        throw DimensionMismatchError("neg_log_p: theta dimension mismatch");
    if (const auto* q = std::get_if<QuadraticModel>(&model)) {
        Eigen::VectorXd t = to_eigen(theta);
        return 0.5 * t.dot(q->A * t) + q->b.dot(t);
    }
    const auto& bb = std::get<BlackBoxModel>(model);
    double u = bb.potential(theta);
    if (!std::isfinite(u)) throw NonFiniteError("neg_log_p: black-box returned non-finite");
    return u;
}

std::vector<double> grad_neg_log_p(const Model& model, const std::vector<double>& theta) {
    if (static_cast<int>(theta.size()) != dimension(model))
        throw DimensionMismatchError("grad_neg_log_p: theta dimension mismatch");
    if (const auto* q = std::get_if<QuadraticModel>(&model)) {
        Eigen::VectorXd g = q->A * to_eigen(theta) + q->b;
        return {g.data(), g.data() + g.size()};
    }
    const auto& bb = std::get<BlackBoxModel>(model);
    if (bb.gradient) {
        auto g = bb.gradient(theta);
        for (double v : g)
            if (!std::isfinite(v)) throw NonFiniteError("grad_neg_log_p: non-finite gradient");
        return g;
    }
    const double step = 1e-5;
    std::vector<double> g(theta.size());
    std::vector<double> t = theta;
    for (size_t i = 0; i < theta.size(); ++i) {
        t[i] = theta[i] + step;
        double up = neg_log_p(model, t);
        t[i] = theta[i] - step;
        double dn = neg_log_p(model, t);
        t[i] = theta[i];
        g[i] = (up - dn) / (2.0 * step);
    }
    return g;
}

namespace {

// Halton sequence point in [0,1), base given.
double halton(int index, int base) {
    double f = 1.0, r = 0.0;
    int i = index;
    while (i > 0) {
        f /= base;
        r += f * (i % base);
        i /= base;
    }
    return r;
}

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

}  // namespace

double gamma_estimate(const Model& model) {
    if (const auto* q = std::get_if<QuadraticModel>(&model)) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q->A);
        return es.eigenvalues().minCoeff();
    }
    const auto& bb = std::get<BlackBoxModel>(model);
    const int d = bb.dim;
    if (d > 12) throw ValidationError("gamma_estimate: black-box probing supports d <= 12");
    const double fd = 1e-3;
    double gamma = std::numeric_limits<double>::infinity();
    std::vector<double> theta(d);
    for (int p = 0; p < 64; ++p) {
        for (int i = 0; i < d; ++i)
            theta[i] = bb.box_lo + (bb.box_hi - bb.box_lo) * halton(p + 1, kPrimes[i]);
        // Hessian by central differences of the gradient
        Eigen::MatrixXd H(d, d);
        std::vector<double> t = theta;
        for (int i = 0; i < d; ++i) {
            t[i] = theta[i] + fd;
            auto gp = grad_neg_log_p(model, t);
            t[i] = theta[i] - fd;
            auto gm = grad_neg_log_p(model, t);
            t[i] = theta[i];
            for (int j = 0; j < d; ++j) H(j, i) = (gp[j] - gm[j]) / (2.0 * fd);
        }
        H = 0.5 * (H + H.transpose().eval());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        gamma = std::min(gamma, es.eigenvalues().minCoeff());
    }
    return gamma;
}

Model catalog_model(const std::string& name, int dim, double coupling) {
    if (name == "double_well") {
        BlackBoxModel bb;
        bb.dim = dim;
        bb.name = name;
        bb.box_lo = -3.0;
        bb.box_hi = 3.0;
        bb.potential = [dim, coupling](const std::vector<double>& th) {
            double u = 0.0;
            for (int i = 0; i < dim; ++i) {
                double s = th[i] * th[i] - 1.0;
                u += 0.25 * s * s;
            }
            for (int i = 0; i < dim; ++i)
                for (int j = i + 1; j < dim; ++j) u += coupling * th[i] * th[j];
            return u;
        };
        bb.gradient = [dim, coupling](const std::vector<double>& th) {
            std::vector<double> g(dim, 0.0);
            double sum = 0.0;
            for (int i = 0; i < dim; ++i) sum += th[i];
            for (int i = 0; i < dim; ++i)
                g[i] = th[i] * (th[i] * th[i] - 1.0) + coupling * (sum - th[i]);
            return g;
        };
        return bb;
    }
    throw ValidationError("catalog_model: unknown model '" + name + "'");
}

}  // namespace mfvi
