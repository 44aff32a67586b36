// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration files.
//
// The format is a small TOML subset: `[section]` headers, repeated `[[path]]`
// tables, `key = value` lines and `#` comments. Values are JSON literals
// (numbers, strings, booleans, arrays), e.g. `blocked = [[75, 80]]`. Angles
// are given in degrees, everything else in SI units.

#pragma once

#include "elaa/ao.hpp"
#include "elaa/bench.hpp"
#include "elaa/path_search.hpp"
#include "elaa/synth.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace elaa
{
    /// Malformed or inconsistent configuration. `line` is 0 when the problem
    /// is not tied to one line (cross-field checks, overrides).
    class ConfigError : public std::runtime_error
    {
    public:
        ConfigError(const std::string &source, int line, const std::string &message);
        int line() const { return line_; }

    private:
        int line_;
    };

    struct IsingSpec
    {
        double beta0 = 1.0;   // chain coupling, beta = -beta0
        double gamma0 = -0.2; // uniform field

        IsingParams build(int n_antennas, int n_paths, int n_snapshots) const
        {
            return default_chain_params(n_antennas, n_paths, n_snapshots, beta0, gamma0);
        }
    };

    struct RunConfig
    {
        SceneConfig scene; // noise_variance already set from snr_db
        double snr_db = 10.0;
        bool noiseless = false; // drop the noise from the data, keep sigma_n^2 in the estimator
        double bandwidth = 2.88e6;
        double subcarrier_spacing = 0.0; // 0: bandwidth / K
        IsingSpec ising;
        AOConfig ao;
        MleGrid grid;
        CampaignSpec campaign;
        int baseline_rounds = 10;

        /// Human-readable validation notes, e.g. the Fraunhofer check.
        std::vector<std::string> log;
    };

    RunConfig parse_config(std::istream &in, const std::string &source = "<config>");
    RunConfig parse_config_file(const std::string &path);

    /// Applies `section.key=value` overrides (value as in the file) and
    /// re-validates. Path entries are addressed as `path.<index>.key`.
    void apply_overrides(RunConfig &config, const std::vector<std::string> &overrides);

    /// Serializes a configuration in the file format; parse_config reads it back.
    void write_config(std::ostream &out, const RunConfig &config);
}
