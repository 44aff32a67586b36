// SPDX-License-Identifier: Apache-2.0
//
// elaa_cli: single-shot estimation, Monte-Carlo campaigns and self-tests.

#include "elaa/app.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char **argv)
{
    CLI::App app{"Near-field ELAA channel estimation with blockage detection"};
    elaa::RunSpec spec;
    app.add_option("--config", spec.config_path, "Configuration file (built-in defaults if omitted)");
    app.add_option("--mode", spec.mode, "single, campaign or selftest")
        ->check(CLI::IsMember({"single", "campaign", "selftest"}));
    app.add_option("--out", spec.out_dir, "Output directory");

    std::uint64_t seed = 0;
    double snr = 0.0;
    int trials = 0;
    auto *seed_opt = app.add_option("--seed", seed, "Base random seed");
    auto *snr_opt = app.add_option("--snr", snr, "SNR in dB (campaign: single grid point)");
    auto *trials_opt = app.add_option("--trials", trials, "Trials per SNR point")->check(CLI::PositiveNumber);
    app.add_option("--override", spec.overrides, "section.key=value, repeatable");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : elaa::kExitConfig;
    }
    if (*seed_opt)
        spec.seed = seed;
    if (*snr_opt)
        spec.snr_db = snr;
    if (*trials_opt)
        spec.trials = trials;

    return elaa::run(spec, std::cout, std::cerr);
}
