#include <CLI11.hpp>
#include <iostream>

#include "mfvi/config.hpp"
#include "mfvi/oracles.hpp"

namespace {

int run_oracle(const std::string& name, const std::vector<double>& args) {
    using namespace mfvi::oracle;
    std::cout.precision(17);
    if (name == "gaussian_cavi_fixed_point") {
        // args: d, then A row-major, then b
        if (args.size() < 1) return 2;
        int d = static_cast<int>(args[0]);
        if (static_cast<int>(args.size()) != 1 + d * d + d) return 2;
        Eigen::MatrixXd A(d, d);
        Eigen::VectorXd b(d);
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) A(r, c) = args[1 + r * d + c];
        for (int i = 0; i < d; ++i) b(i) = args[1 + d * d + i];
        auto fp = gaussian_cavi_fixed_point(A, b);
        for (int i = 0; i < d; ++i)
            std::cout << "mean_" << i + 1 << "=" << fp.means[i] << " var_" << i + 1 << "="
                      << fp.variances[i] << "\n";
        return 0;
    }
    if (name == "gaussian_jko_step") {
        if (args.size() != 4) return 2;
        auto [m, s] = gaussian_jko_step_oracle(args[0], args[1], args[2], args[3]);
        std::cout << "mean=" << m << " std=" << s << "\n";
        return 0;
    }
    if (name == "ou_moments") {
        if (args.size() != 4) return 2;
        auto [m, v] = ou_moments(args[0], args[1], args[2], args[3]);
        std::cout << "mean=" << m << " var=" << v << "\n";
        return 0;
    }
    if (name == "discrete_ot") {
        if (args.size() % 2 != 0 || args.empty()) return 2;
        size_t n = args.size() / 2;
        std::vector<double> mu(args.begin(), args.begin() + n);
        std::vector<double> nu(args.begin() + n, args.end());
        std::cout << "w2=" << discrete_ot_bruteforce(mu, nu) << "\n";
        return 0;
    }
    std::cerr << "unknown oracle: " << name << "\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mfvi: mean-field variational inference via CAVI, JKO, FP and SDE"};
    app.require_subcommand(1);

    std::string config_path, out_override, oracle_name;
    std::uint64_t seed_override = 0;
    bool have_seed = false, quiet = false;
    std::vector<double> oracle_args;

    const std::vector<std::string> run_cmds = {"run-cavi", "run-jko", "run-fp", "run-sde",
                                               "compare", "study-h", "dissipation"};
    for (const auto& name : run_cmds) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON run configuration")->required();
        sub->add_option("--out", out_override, "output directory override");
        sub->add_option("--seed", seed_override, "seed override")
            ->each([&](const std::string&) { have_seed = true; });
        sub->add_flag("--quiet", quiet, "suppress summary lines");
    }
    auto* oracle = app.add_subcommand("oracle", "evaluate a closed-form test oracle");
    oracle->add_option("name", oracle_name)->required();
    oracle->add_option("args", oracle_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    const std::string sub = app.get_subcommands().front()->get_name();
    if (sub == "oracle") {
        try {
            return run_oracle(oracle_name, oracle_args);
        } catch (const mfvi::Error& e) {
            std::cerr << "oracle error: " << e.what() << "\n";
            return 1;
        }
    }

    mfvi::RunConfig cfg = [&]() {
        try {
            return mfvi::parse_config_file(config_path);
        } catch (const mfvi::Error& e) {
            std::cerr << "config error: " << e.what() << "\n";
            std::exit(2);
        }
    }();
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (have_seed) {
        cfg.seed = seed_override;
        cfg.sde.seed = seed_override;
    }
    return mfvi::dispatch(cfg, sub, quiet);
}
