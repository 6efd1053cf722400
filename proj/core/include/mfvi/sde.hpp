#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "mfvi/functionals.hpp"

namespace mfvi {

// Counter-based normal generator keyed by (seed, step, particle, coordinate);
// output is independent of evaluation order.
struct CounterRng {
    std::uint64_t seed = 0;

    double normal(std::uint64_t step, std::uint64_t particle, std::uint64_t coord) const;
    double uniform(std::uint64_t step, std::uint64_t particle, std::uint64_t coord) const;
};

struct ParticleCloud {
    int count = 0;
    int dim = 0;
    std::vector<double> positions;  // row-major, count x dim
    double t = 0.0;
    std::uint64_t step_index = 0;

    double& at(int p, int i) { return positions[static_cast<size_t>(p) * dim + i]; }
    double at(int p, int i) const { return positions[static_cast<size_t>(p) * dim + i]; }
};

struct SdeConfig {
    int particles = 20000;
    double dt = 1e-3;
    int bandwidth = 1;  // triangular smoothing half-width, in cells
    std::uint64_t seed = 0;
    bool noise_enabled = true;  // off = drift-only diagnostic mode

    void validate() const;
};

struct ProjectionResult {
    ProductMeasure nu;
    double oob_fraction = 0.0;  // particles clamped to boundary cells
};

ProjectionResult project_marginals(const ParticleCloud& cloud, const std::vector<Grid1D>& grids,
                                   int bandwidth);

// Euler-Maruyama step of the interacting-particle system: drift from the
// slopes of Psi profiles built on the projected (product) marginals, noise
// sqrt(2 dt) per coordinate so the particle law tracks unit-diffusion FP.
ParticleCloud mkv_step(const ParticleCloud& cloud, const Model& model,
                       const std::vector<Grid1D>& grids, const SdeConfig& cfg,
                       const PsiOptions& opt = {});

struct SdeMomentRecord {
    double t;
    std::vector<double> mean;
    std::vector<double> var;
    double oob_fraction;
};

struct SdeRunResult {
    ProductMeasure averaged;  // time average of projected marginals after burn-in
    std::vector<SdeMomentRecord> trace;
    ParticleCloud final_cloud;
};

// Draw initial positions from `init` by inverse CDF, integrate to `horizon`,
// time-average the projected marginals over (burn_in, horizon].
SdeRunResult mkv_run(const Model& model, const ProductMeasure& init,
                     const std::vector<Grid1D>& grids, const SdeConfig& cfg, double horizon,
                     double burn_in, const PsiOptions& opt = {});

void write_sde_trace_csv(std::ostream& os, const SdeRunResult& run);

}  // namespace mfvi
