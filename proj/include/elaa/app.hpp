// SPDX-License-Identifier: Apache-2.0
//
// Batch front-end shared by the command-line tool and the tests.

#pragma once

#include "elaa/config.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace elaa
{
    enum ExitCode : int
    {
        kExitOk = 0,
        kExitConfig = 2,
        kExitNumerical = 3,
        kExitSelftest = 4
    };

    struct RunSpec
    {
        std::string mode = "single"; // single, campaign or selftest
        std::string config_path;     // empty: built-in defaults
        std::string out_dir = "out";
        std::optional<std::uint64_t> seed;
        std::optional<double> snr_db; // single: the SNR; campaign: a one-point grid
        std::optional<int> trials;
        std::vector<std::string> overrides; // section.key=value
    };

    /// Loads the configuration of `spec` with all command-line overrides applied.
    RunConfig load_run_config(const RunSpec &spec);

    /// Estimator setup (Ising prior, AO settings, dictionary) for a configuration.
    EstimatorSetup make_setup(const RunConfig &config);

    /// Runs one mode and writes its artifacts to spec.out_dir. Progress goes to
    /// `log`, failures to `err`. Returns an ExitCode value.
    int run(const RunSpec &spec, std::ostream &log, std::ostream &err);
}
