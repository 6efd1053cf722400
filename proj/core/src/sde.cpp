#include "mfvi/sde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mfvi {

namespace {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t key(std::uint64_t seed, std::uint64_t step, std::uint64_t particle,
                  std::uint64_t coord) {
    return mix64(mix64(mix64(mix64(seed) ^ step) ^ particle) ^ coord);
}

double to_unit(std::uint64_t x) {  // (0,1)
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

double CounterRng::uniform(std::uint64_t step, std::uint64_t particle,
                           std::uint64_t coord) const {
    return to_unit(mix64(key(seed, step, particle, coord) ^ 0xd1b54a32d192ed03ULL));
}

double CounterRng::normal(std::uint64_t step, std::uint64_t particle,
                          std::uint64_t coord) const {
    std::uint64_t k = key(seed, step, particle, coord);
    double u1 = to_unit(mix64(k ^ 1));
    double u2 = to_unit(mix64(k ^ 2));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void SdeConfig::validate() const {
    if (particles < 100) throw ValidationError("SdeConfig.particles must be >= 100");
    if (!(dt > 0.0)) throw ValidationError("SdeConfig.dt must be > 0");
    if (bandwidth < 0) throw ValidationError("SdeConfig.bandwidth must be >= 0");
}

ProjectionResult project_marginals(const ParticleCloud& cloud, const std::vector<Grid1D>& grids,
                                   int bandwidth) {
    if (static_cast<int>(grids.size()) != cloud.dim)
        throw DimensionMismatchError("project_marginals: grid count != cloud dimension");
    ProjectionResult out;
    long oob = 0;
    for (int i = 0; i < cloud.dim; ++i) {
        const Grid1D& g = grids[i];
        const double dx = g.dx();
        std::vector<double> hist(g.cells, 0.0);
        for (int p = 0; p < cloud.count; ++p) {
            double x = cloud.at(p, i);
            int j = static_cast<int>(std::floor((x - g.x_min) / dx));
            if (j < 0 || j >= g.cells) {
                ++oob;
                j = std::clamp(j, 0, g.cells - 1);
            }
            hist[j] += 1.0;
        }
        if (bandwidth > 0) {
            // triangular kernel of half-width `bandwidth` cells
            std::vector<double> smooth(g.cells, 0.0);
            for (int j = 0; j < g.cells; ++j) {
                if (hist[j] == 0.0) continue;
                for (int o = -bandwidth; o <= bandwidth; ++o) {
                    int tgt = std::clamp(j + o, 0, g.cells - 1);
                    double w = 1.0 - std::abs(o) / (bandwidth + 1.0);
                    smooth[tgt] += hist[j] * w;
                }
            }
            hist = std::move(smooth);
        }
        out.nu.marginals.push_back(normalize(hist, g));
    }
    out.oob_fraction =
        static_cast<double>(oob) / (static_cast<double>(cloud.count) * cloud.dim);
    return out;
}

ParticleCloud mkv_step(const ParticleCloud& cloud, const Model& model,
                       const std::vector<Grid1D>& grids, const SdeConfig& cfg,
                       const PsiOptions& opt) {
    cfg.validate();
    ProjectionResult proj = project_marginals(cloud, grids, cfg.bandwidth);
    std::vector<PsiProfile> profiles;
    for (int i = 0; i < cloud.dim; ++i)
        profiles.push_back(psi_profile(model, i, proj.nu, opt));

    CounterRng rng{cfg.seed};
    ParticleCloud next = cloud;
    const double noise_scale = cfg.noise_enabled ? std::sqrt(2.0 * cfg.dt) : 0.0;
    for (int p = 0; p < cloud.count; ++p) {
        for (int i = 0; i < cloud.dim; ++i) {
            double x = cloud.at(p, i);
            double drift = -profiles[i].slope_at(x);
            double xi = noise_scale != 0.0 ? rng.normal(cloud.step_index, p, i) : 0.0;
            double y = x + drift * cfg.dt + noise_scale * xi;
            if (!std::isfinite(y))
                throw NonFiniteError("mkv_step: particle escaped to non-finite (dt too large?)");
            next.at(p, i) = y;
        }
    }
    next.t = cloud.t + cfg.dt;
    next.step_index = cloud.step_index + 1;
    return next;
}

SdeRunResult mkv_run(const Model& model, const ProductMeasure& init,
                     const std::vector<Grid1D>& grids, const SdeConfig& cfg, double horizon,
                     double burn_in, const PsiOptions& opt) {
    cfg.validate();
    if (!(horizon > burn_in) || burn_in < 0.0)
        throw EmptyWindowError("mkv_run: need horizon > burn_in >= 0");
    const int d = init.dim();
    if (static_cast<int>(grids.size()) != d)
        throw DimensionMismatchError("mkv_run: grid count != model dimension");

    // initial positions by inverse CDF of the init marginals
    ParticleCloud cloud;
    cloud.count = cfg.particles;
    cloud.dim = d;
    cloud.positions.resize(static_cast<size_t>(cfg.particles) * d);
    CounterRng rng{cfg.seed};
    constexpr std::uint64_t kInitStep = ~0ULL;
    std::vector<QuantileMeasure1D> qt;
    for (int i = 0; i < d; ++i) qt.push_back(to_quantile(init.marginals[i], 4096));
    for (int p = 0; p < cfg.particles; ++p) {
        for (int i = 0; i < d; ++i) {
            double u = rng.uniform(kInitStep, p, i);
            int k = std::min(static_cast<int>(u * 4096), 4095);
            cloud.at(p, i) = qt[i].q[k];
        }
    }

    const int steps = static_cast<int>(std::llround(horizon / cfg.dt));
    const int record_every = std::max(1, steps / 200);
    SdeRunResult out;
    std::vector<std::vector<double>> accum(d);
    for (int i = 0; i < d; ++i) accum[i].assign(grids[i].cells, 0.0);
    long n_avg = 0;

    auto record = [&](const ParticleCloud& c, double oob) {
        SdeMomentRecord r;
        r.t = c.t;
        r.oob_fraction = oob;
        for (int i = 0; i < d; ++i) {
            double m = 0.0, s = 0.0;
            for (int p = 0; p < c.count; ++p) m += c.at(p, i);
            m /= c.count;
            for (int p = 0; p < c.count; ++p) {
                double z = c.at(p, i) - m;
                s += z * z;
            }
            r.mean.push_back(m);
            r.var.push_back(s / c.count);
        }
        out.trace.push_back(std::move(r));
    };

    record(cloud, 0.0);
    for (int s = 1; s <= steps; ++s) {
        cloud = mkv_step(cloud, model, grids, cfg, opt);
        if (cloud.t > burn_in + 1e-12) {
            ProjectionResult proj = project_marginals(cloud, grids, cfg.bandwidth);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < grids[i].cells; ++j)
                    accum[i][j] += proj.nu.marginals[i].density[j];
            ++n_avg;
            if (s % record_every == 0 || s == steps) record(cloud, proj.oob_fraction);
        } else if (s % record_every == 0) {
            record(cloud, 0.0);
        }
    }
    if (n_avg == 0) throw EmptyWindowError("mkv_run: empty averaging window");
    for (int i = 0; i < d; ++i) out.averaged.marginals.push_back(normalize(accum[i], grids[i]));
    out.final_cloud = std::move(cloud);
    return out;
}

void write_sde_trace_csv(std::ostream& os, const SdeRunResult& run) {
    if (run.trace.empty()) return;
    const size_t d = run.trace.front().mean.size();
    os << "t";
    for (size_t i = 0; i < d; ++i) os << ",mean_" << i + 1;
    for (size_t i = 0; i < d; ++i) os << ",var_" << i + 1;
    os << ",oob_fraction\n";
    os.precision(17);
    for (const auto& r : run.trace) {
        os << r.t;
        for (double v : r.mean) os << "," << v;
        for (double v : r.var) os << "," << v;
        os << "," << r.oob_fraction << "\n";
    }
}

}  // namespace mfvi
