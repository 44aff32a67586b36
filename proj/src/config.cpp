// SPDX-License-Identifier: Apache-2.0

#include "elaa/config.hpp"

#include "json.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace elaa
{
    using nlohmann::json;

    ConfigError::ConfigError(const std::string &source, int line, const std::string &message)
        : std::runtime_error(line > 0 ? source + ":" + std::to_string(line) + ": " + message
                                      : source + ": " + message),
          line_(line)
    {
    }

    namespace
    {
        // Thrown by the field setters; the caller attaches source and line.
        struct FieldError
        {
            std::string message;
        };

        double as_number(const json &v)
        {
            if (!v.is_number())
                throw FieldError{"expected a number"};
            return v.get<double>();
        }

        int as_int(const json &v)
        {
            if (!v.is_number_integer())
                throw FieldError{"expected an integer"};
            return v.get<int>();
        }

        bool as_bool(const json &v)
        {
            if (!v.is_boolean())
                throw FieldError{"expected true or false"};
            return v.get<bool>();
        }

        std::string as_string(const json &v)
        {
            if (!v.is_string())
                throw FieldError{"expected a quoted string"};
            return v.get<std::string>();
        }

        std::vector<double> as_numbers(const json &v)
        {
            if (!v.is_array() || v.empty())
                throw FieldError{"expected a non-empty array of numbers"};
            std::vector<double> out;
            for (const auto &x : v)
                out.push_back(as_number(x));
            return out;
        }

        std::vector<BlockRange> as_ranges(const json &v)
        {
            if (!v.is_array())
                throw FieldError{"expected an array of [first, last] pairs"};
            std::vector<BlockRange> out;
            for (const auto &r : v)
            {
                if (!r.is_array() || r.size() != 2)
                    throw FieldError{"blocked ranges must be [first, last] pairs"};
                out.push_back({as_int(r[0]), as_int(r[1])});
            }
            return out;
        }

        const char *const kSections[] = {"array", "ofdm", "noise", "ising", "ao", "mle", "campaign"};

        std::string g17(double v)
        {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return buf;
        }

        // Shortest decimal x with `exact(x)` true, e.g. the degree value that
        // converts back to the stored radians bit for bit; %.17g otherwise.
        template <class Exact>
        std::string shortest(double v, Exact exact)
        {
            char buf[40];
            if (std::abs(v) < 1e15)
            {
                std::snprintf(buf, sizeof buf, "%.0f", v);
                if (exact(std::strtod(buf, nullptr)))
                    return buf;
            }
            for (int precision = 1; precision <= 17; ++precision)
            {
                std::snprintf(buf, sizeof buf, "%.*g", precision, v);
                if (exact(std::strtod(buf, nullptr)))
                    return buf;
            }
            return g17(v);
        }

        std::string num(double v)
        {
            return shortest(v, [&](double x) { return x == v; });
        }

        std::string degrees(double rad)
        {
            return shortest(rad2deg(rad), [&](double x) { return deg2rad(x) == rad; });
        }

        void set_path_field(SceneConfig &scene, std::size_t index, const std::string &key, const json &v)
        {
            PathParams &p = scene.paths[index];
            if (key == "distance")
                p.distance = as_number(v);
            else if (key == "aoa_deg")
                p.aoa = deg2rad(as_number(v));
            else if (key == "d_ue")
                p.d_ue = as_number(v);
            else if (key == "gain_abs")
                p.gain = std::polar(as_number(v), std::arg(p.gain));
            else if (key == "gain_phase")
                p.gain = std::polar(std::abs(p.gain), as_number(v));
            else if (key == "blocked")
                scene.blockage[index] = as_ranges(v);
            else
                throw FieldError{"unknown key"};
        }

        void set_field(RunConfig &c, const std::string &section, const std::string &key, const json &v)
        {
            auto unknown = [] { throw FieldError{"unknown key"}; };
            SceneConfig &s = c.scene;
            if (section == "array")
            {
                if (key == "n_antennas")
                    s.geom.n_antennas = as_int(v);
                else if (key == "spacing")
                    s.geom.spacing = as_number(v);
                else
                    unknown();
            }
            else if (section == "ofdm")
            {
                if (key == "carrier")
                    s.ofdm.carrier = as_number(v);
                else if (key == "n_subcarriers")
                    s.ofdm.n_subcarriers = as_int(v);
                else if (key == "bandwidth")
                    c.bandwidth = as_number(v);
                else if (key == "subcarrier_spacing")
                    c.subcarrier_spacing = as_number(v);
                else if (key == "n_snapshots")
                    s.ofdm.n_snapshots = as_int(v);
                else if (key == "speed_of_light")
                    s.ofdm.speed_of_light = as_number(v);
                else
                    unknown();
            }
            else if (section == "noise")
            {
                if (key == "snr_db")
                    c.snr_db = as_number(v);
                else if (key == "noiseless")
                    c.noiseless = as_bool(v);
                else if (key == "sigma_b2")
                    s.sigma_b2 = as_number(v);
                else if (key == "sigma_v2")
                    s.sigma_v2 = as_number(v);
                else
                    unknown();
            }
            else if (section == "ising")
            {
                if (key == "beta0")
                    c.ising.beta0 = as_number(v);
                else if (key == "gamma0")
                    c.ising.gamma0 = as_number(v);
                else
                    unknown();
            }
            else if (section == "ao")
            {
                AOConfig &a = c.ao;
                if (key == "max_iterations")
                    a.max_iterations = as_int(v);
                else if (key == "tolerance")
                    a.tolerance = as_number(v);
                else if (key == "ridge")
                    a.ridge = as_number(v);
                else if (key == "eta")
                    a.eta = as_number(v);
                else if (key == "b_evidence")
                {
                    const std::string e = as_string(v);
                    if (e == "profiled")
                        a.b_evidence = BEvidence::Profiled;
                    else if (e == "alpha")
                        a.b_evidence = BEvidence::Alpha;
                    else
                        throw FieldError{"b_evidence must be \"profiled\" or \"alpha\""};
                }
                else if (key == "h_update")
                {
                    const std::string h = as_string(v);
                    if (h == "parametric")
                        a.h_update = HUpdate::Parametric;
                    else if (h == "least-squares")
                        a.h_update = HUpdate::LeastSquares;
                    else
                        throw FieldError{"h_update must be \"parametric\" or \"least-squares\""};
                }
                else if (key == "guard_b")
                    a.guard_b = as_bool(v);
                else if (key == "warm_start_b")
                    a.warm_start_b = as_bool(v);
                else if (key == "refine_theta_deg")
                    a.refine.theta_half = deg2rad(as_number(v));
                else if (key == "refine_d_rel")
                    a.refine.d_rel = as_number(v);
                else if (key == "refine_sweeps")
                    a.refine.sweeps = as_int(v);
                else if (key == "qp_max_inner")
                    a.qp.max_inner = as_int(v);
                else if (key == "qp_max_levels")
                    a.qp.max_levels = as_int(v);
                else if (key == "qp_penalty0")
                    a.qp.penalty0 = as_number(v);
                else
                    unknown();
            }
            else if (section == "mle")
            {
                MleGrid &g = c.grid;
                if (key == "theta_min_deg")
                    g.theta_min = deg2rad(as_number(v));
                else if (key == "theta_max_deg")
                    g.theta_max = deg2rad(as_number(v));
                else if (key == "theta_step_deg")
                    g.theta_step = deg2rad(as_number(v));
                else if (key == "d_min")
                    g.d_min = as_number(v);
                else if (key == "d_max")
                    g.d_max = as_number(v);
                else if (key == "d_points")
                    g.d_points = as_int(v);
                else if (key == "d_log")
                    g.d_log = as_bool(v);
                else if (key == "due_min")
                    g.due_min = as_number(v);
                else if (key == "due_max")
                    g.due_max = as_number(v);
                else if (key == "due_step")
                    g.due_step = as_number(v);
                else if (key == "polish_sweeps")
                    g.polish_sweeps = as_int(v);
                else if (key == "polish_tol")
                    g.polish_tol = as_number(v);
                else
                    unknown();
            }
            else if (section == "campaign")
            {
                CampaignSpec &m = c.campaign;
                if (key == "snr_db")
                    m.snr_db = as_numbers(v);
                else if (key == "trials")
                    m.trials = as_int(v);
                else if (key == "seed")
                {
                    if (!v.is_number_unsigned())
                        throw FieldError{"seed must be a non-negative integer"};
                    m.seed = v.get<std::uint64_t>();
                }
                else if (key == "methods")
                {
                    if (!v.is_array() || v.empty())
                        throw FieldError{"methods must be a non-empty array of strings"};
                    m.methods.clear();
                    for (const auto &x : v)
                    {
                        try
                        {
                            m.methods.push_back(method_from_string(as_string(x)));
                        }
                        catch (const InvalidParameter &e)
                        {
                            throw FieldError{e.what()};
                        }
                    }
                }
                else if (key == "threads")
                    m.threads = as_int(v);
                else if (key == "baseline_rounds")
                    c.baseline_rounds = as_int(v);
                else
                    unknown();
            }
            else
                throw FieldError{"unknown section [" + section + "]"};
        }

        // Cross-field checks and derived values.
        void finalize(RunConfig &c, const std::string &source)
        {
            try
            {
                SceneConfig &s = c.scene;
                if (s.ofdm.n_subcarriers < 1)
                    throw InvalidParameter("ofdm.n_subcarriers must be at least 1");
                if (c.subcarrier_spacing > 0.0)
                    s.ofdm.subcarrier_spacing = c.subcarrier_spacing;
                else if (c.bandwidth > 0.0)
                    s.ofdm.subcarrier_spacing = c.bandwidth / s.ofdm.n_subcarriers;
                else
                    throw InvalidParameter("ofdm.bandwidth must be positive");
                if (!std::isfinite(c.snr_db))
                    throw InvalidParameter("noise.snr_db must be finite");
                s.seed = c.campaign.seed;
                s.noise_variance = 1.0;
                s.validate();
                s = set_snr(s, c.snr_db);
                c.ao.validate();
                c.grid.validate();
                c.campaign.validate();
                if (c.baseline_rounds < 1)
                    throw InvalidParameter("campaign.baseline_rounds must be at least 1");
            }
            catch (const InvalidParameter &e)
            {
                throw ConfigError(source, 0, e.what());
            }

            const double fraunhofer = fraunhofer_distance(c.scene.geom, c.scene.ofdm);
            char buf[160];
            std::snprintf(buf, sizeof buf, "Fraunhofer distance 2D^2/lambda = %.3f m (D = %.3f m, lambda = %.4g m)",
                          fraunhofer, c.scene.geom.aperture(), c.scene.ofdm.wavelength());
            c.log.clear();
            c.log.emplace_back(buf);
            for (std::size_t l = 0; l < c.scene.paths.size(); ++l)
            {
                const double d = c.scene.paths[l].distance;
                std::snprintf(buf, sizeof buf, "path %zu at %.3f m: %s", l, d,
                              d < fraunhofer ? "near field" : "far field");
                c.log.emplace_back(buf);
            }
        }

        std::string strip_comment(const std::string &line)
        {
            bool in_string = false;
            for (std::size_t i = 0; i < line.size(); ++i)
            {
                const char ch = line[i];
                if (ch == '"' && (i == 0 || line[i - 1] != '\\'))
                    in_string = !in_string;
                else if (ch == '#' && !in_string)
                    return line.substr(0, i);
            }
            return line;
        }

        std::string trim(const std::string &s)
        {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos)
                return {};
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        }

        bool valid_name(const std::string &s)
        {
            if (s.empty())
                return false;
            for (char ch : s)
                if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'))
                    return false;
            return true;
        }

        json parse_value(const std::string &text)
        {
            return json::parse(text);
        }
    }

    RunConfig parse_config(std::istream &in, const std::string &source)
    {
        RunConfig c;
        c.scene = reference_scene();
        bool paths_given = false;

        std::string section;
        std::vector<std::string> seen_sections;
        std::vector<std::string> seen_keys;
        std::string raw;
        int line_no = 0;
        while (std::getline(in, raw))
        {
            ++line_no;
            const std::string line = trim(strip_comment(raw));
            if (line.empty())
                continue;

            if (line.rfind("[[", 0) == 0)
            {
                if (line.size() < 5 || line.substr(line.size() - 2) != "]]")
                    throw ConfigError(source, line_no, "malformed table header");
                const std::string name = trim(line.substr(2, line.size() - 4));
                if (name != "path")
                    throw ConfigError(source, line_no, "unknown table array [[" + name + "]]");
                if (!paths_given)
                {
                    c.scene.paths.clear();
                    c.scene.blockage.clear();
                    paths_given = true;
                }
                c.scene.paths.emplace_back();
                c.scene.blockage.emplace_back();
                section = "path";
                seen_keys.clear();
                continue;
            }
            if (line.front() == '[')
            {
                if (line.back() != ']')
                    throw ConfigError(source, line_no, "malformed section header");
                section = trim(line.substr(1, line.size() - 2));
                if (!valid_name(section))
                    throw ConfigError(source, line_no, "malformed section name");
                if (std::find(std::begin(kSections), std::end(kSections), section) == std::end(kSections))
                    throw ConfigError(source, line_no, "unknown section [" + section + "]");
                for (const auto &s : seen_sections)
                    if (s == section)
                        throw ConfigError(source, line_no, "section [" + section + "] repeated");
                seen_sections.push_back(section);
                seen_keys.clear();
                continue;
            }

            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError(source, line_no, "expected 'key = value'");
            const std::string key = trim(line.substr(0, eq));
            const std::string text = trim(line.substr(eq + 1));
            if (!valid_name(key))
                throw ConfigError(source, line_no, "malformed key '" + key + "'");
            if (section.empty())
                throw ConfigError(source, line_no, "key '" + key + "' outside any section");
            for (const auto &k : seen_keys)
                if (k == key)
                    throw ConfigError(source, line_no, "key '" + key + "' repeated");
            seen_keys.push_back(key);

            json value;
            try
            {
                value = parse_value(text);
            }
            catch (const json::parse_error &)
            {
                throw ConfigError(source, line_no, "cannot parse value of '" + key + "': " + text);
            }
            try
            {
                if (section == "path")
                    set_path_field(c.scene, c.scene.paths.size() - 1, key, value);
                else
                    set_field(c, section, key, value);
            }
            catch (const FieldError &e)
            {
                throw ConfigError(source, line_no, "[" + section + "] " + key + ": " + e.message);
            }
        }
        finalize(c, source);
        return c;
    }

    RunConfig parse_config_file(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError(path, 0, "cannot open file");
        return parse_config(in, path);
    }

    void apply_overrides(RunConfig &config, const std::vector<std::string> &overrides)
    {
        for (const std::string &o : overrides)
        {
            const std::string source = "--override " + o;
            const auto eq = o.find('=');
            if (eq == std::string::npos)
                throw ConfigError(source, 0, "expected section.key=value");
            const std::string lhs = trim(o.substr(0, eq));
            json value;
            try
            {
                value = parse_value(trim(o.substr(eq + 1)));
            }
            catch (const json::parse_error &)
            {
                throw ConfigError(source, 0, "cannot parse the value");
            }

            std::vector<std::string> parts;
            std::stringstream ss(lhs);
            std::string part;
            while (std::getline(ss, part, '.'))
                parts.push_back(part);
            try
            {
                if (parts.size() == 3 && parts[0] == "path")
                {
                    std::size_t index = 0;
                    try
                    {
                        index = std::stoul(parts[1]);
                    }
                    catch (const std::logic_error &)
                    {
                        throw FieldError{"path index must be a number"};
                    }
                    if (index >= config.scene.paths.size())
                        throw FieldError{"no path with index " + parts[1]};
                    set_path_field(config.scene, index, parts[2], value);
                }
                else if (parts.size() == 2)
                    set_field(config, parts[0], parts[1], value);
                else
                    throw FieldError{"expected section.key or path.<index>.key"};
            }
            catch (const FieldError &e)
            {
                throw ConfigError(source, 0, e.message);
            }
        }
        finalize(config, "overrides");
    }

    namespace
    {
        // gain_abs and gain_phase lines whose std::polar reproduces `gain` exactly when possible.
        std::string polar_gain(Complex gain)
        {
            char abs_text[40], arg_text[40];
            for (int precision = 1; precision <= 17; ++precision)
            {
                std::snprintf(abs_text, sizeof abs_text, "%.*g", precision, std::abs(gain));
                std::snprintf(arg_text, sizeof arg_text, "%.*g", precision, std::arg(gain));
                if (std::polar(std::strtod(abs_text, nullptr), std::strtod(arg_text, nullptr)) == gain)
                    return std::string("gain_abs = ") + abs_text + "\ngain_phase = " + arg_text + "\n";
            }
            return "gain_abs = " + num(std::abs(gain)) + "\ngain_phase = " + num(std::arg(gain)) + "\n";
        }
    }

    void write_config(std::ostream &out, const RunConfig &c)
    {
        const SceneConfig &s = c.scene;
        auto method_list = [&]
        {
            std::string r = "[";
            for (std::size_t i = 0; i < c.campaign.methods.size(); ++i)
                r += std::string(i ? ", " : "") + "\"" + to_string(c.campaign.methods[i]) + "\"";
            return r + "]";
        };
        auto number_list = [](const std::vector<double> &v)
        {
            std::string r = "[";
            for (std::size_t i = 0; i < v.size(); ++i)
                r += (i ? ", " : "") + num(v[i]);
            return r + "]";
        };
        auto flag = [](bool b) { return b ? "true" : "false"; };

        out << "[array]\n"
            << "n_antennas = " << s.geom.n_antennas << "\n"
            << "spacing = " << num(s.geom.spacing) << "\n\n";
        out << "[ofdm]\n"
            << "carrier = " << num(s.ofdm.carrier) << "\n"
            << "n_subcarriers = " << s.ofdm.n_subcarriers << "\n"
            << "bandwidth = " << num(c.bandwidth) << "\n";
        if (c.subcarrier_spacing > 0.0)
            out << "subcarrier_spacing = " << num(c.subcarrier_spacing) << "\n";
        out << "n_snapshots = " << s.ofdm.n_snapshots << "\n"
            << "speed_of_light = " << num(s.ofdm.speed_of_light) << "\n\n";
        out << "[noise]\n"
            << "snr_db = " << num(c.snr_db) << "\n"
            << "noiseless = " << flag(c.noiseless) << "\n"
            << "sigma_b2 = " << num(s.sigma_b2) << "\n"
            << "sigma_v2 = " << num(s.sigma_v2) << "\n\n";
        out << "[ising]\n"
            << "beta0 = " << num(c.ising.beta0) << "\n"
            << "gamma0 = " << num(c.ising.gamma0) << "\n\n";
        const AOConfig &a = c.ao;
        out << "[ao]\n"
            << "max_iterations = " << a.max_iterations << "\n"
            << "tolerance = " << num(a.tolerance) << "\n"
            << "ridge = " << num(a.ridge) << "\n"
            << "eta = " << num(a.eta) << "\n"
            << "b_evidence = \"" << (a.b_evidence == BEvidence::Profiled ? "profiled" : "alpha") << "\"\n"
            << "h_update = \"" << (a.h_update == HUpdate::Parametric ? "parametric" : "least-squares") << "\"\n"
            << "guard_b = " << flag(a.guard_b) << "\n"
            << "warm_start_b = " << flag(a.warm_start_b) << "\n"
            << "refine_theta_deg = " << degrees(a.refine.theta_half) << "\n"
            << "refine_d_rel = " << num(a.refine.d_rel) << "\n"
            << "refine_sweeps = " << a.refine.sweeps << "\n"
            << "qp_max_inner = " << a.qp.max_inner << "\n"
            << "qp_max_levels = " << a.qp.max_levels << "\n"
            << "qp_penalty0 = " << num(a.qp.penalty0) << "\n\n";
        const MleGrid &g = c.grid;
        out << "[mle]\n"
            << "theta_min_deg = " << degrees(g.theta_min) << "\n"
            << "theta_max_deg = " << degrees(g.theta_max) << "\n"
            << "theta_step_deg = " << degrees(g.theta_step) << "\n"
            << "d_min = " << num(g.d_min) << "\n"
            << "d_max = " << num(g.d_max) << "\n"
            << "d_points = " << g.d_points << "\n"
            << "d_log = " << flag(g.d_log) << "\n"
            << "due_min = " << num(g.due_min) << "\n"
            << "due_max = " << num(g.due_max) << "\n"
            << "due_step = " << num(g.due_step) << "\n"
            << "polish_sweeps = " << g.polish_sweeps << "\n"
            << "polish_tol = " << num(g.polish_tol) << "\n\n";
        out << "[campaign]\n"
            << "snr_db = " << number_list(c.campaign.snr_db) << "\n"
            << "trials = " << c.campaign.trials << "\n"
            << "seed = " << c.campaign.seed << "\n"
            << "methods = " << method_list() << "\n"
            << "threads = " << c.campaign.threads << "\n"
            << "baseline_rounds = " << c.baseline_rounds << "\n";
        for (std::size_t l = 0; l < s.paths.size(); ++l)
        {
            const PathParams &p = s.paths[l];
            out << "\n[[path]]\n"
                << "distance = " << num(p.distance) << "\n"
                << "aoa_deg = " << degrees(p.aoa) << "\n"
                << "d_ue = " << num(p.d_ue) << "\n"
                << polar_gain(p.gain)
                << "blocked = [";
            const auto &ranges = l < s.blockage.size() ? s.blockage[l] : std::vector<BlockRange>{};
            for (std::size_t i = 0; i < ranges.size(); ++i)
                out << (i ? ", " : "") << "[" << ranges[i].first << ", " << ranges[i].last << "]";
            out << "]\n";
        }
    }
}
