// SPDX-License-Identifier: Apache-2.0

#include "elaa/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace elaa
{
    namespace
    {
        const char *kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

        std::string num(double v)
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.2f", v);
            return buf;
        }

        std::string label(double v)
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%g", v);
            return buf;
        }

        void header(std::ostream &out, int w, int h)
        {
            out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
                << "\" viewBox=\"0 0 " << w << ' ' << h << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
                << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        }

        void text(std::ostream &out, double x, double y, const std::string &s, const char *anchor = "middle")
        {
            out << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" text-anchor=\"" << anchor << "\">" << s
                << "</text>\n";
        }

        void line(std::ostream &out, double x1, double y1, double x2, double y2, const char *stroke,
                  double width = 1.0, const char *dash = nullptr)
        {
            out << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2) << "\" y2=\""
                << num(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width) << '"';
            if (dash)
                out << " stroke-dasharray=\"" << dash << '"';
            out << "/>\n";
        }

        // Linear map from [lo, hi] to [a, b].
        struct Axis
        {
            double lo, hi, a, b;
            double operator()(double v) const { return a + (v - lo) / (hi - lo) * (b - a); }
        };
    }

    void write_vr_svg(std::ostream &out, const EstimationResult &est, const VRIndicator &truth)
    {
        const auto L = static_cast<int>(est.paths.size());
        const int N = L > 0 ? static_cast<int>(est.paths.front().b.size()) : 0;
        const int w = 760, strip = 70, top = 40, left = 70, right = 20;
        const int h = top + L * (strip + 30) + 40;
        header(out, w, h);
        text(out, w / 2.0, 20, "Visibility per path (shaded: truly blocked, bars: declared blocked)");
        const Axis ax{0.5, N + 0.5, double(left), double(w - right)};
        for (int l = 0; l < L; ++l)
        {
            const double y0 = top + l * (strip + 30);
            text(out, left - 10, y0 + strip / 2.0 + 4, "path " + std::to_string(l), "end");
            out << "<rect x=\"" << left << "\" y=\"" << num(y0) << "\" width=\"" << w - left - right
                << "\" height=\"" << strip << "\" fill=\"none\" stroke=\"#999\"/>\n";
            const double cell = (w - left - right) / double(std::max(N, 1));
            for (int n = 0; n < N; ++n)
            {
                const double x = ax(n + 0.5);
                if (truth.b.rows() == N && truth.b.cols() > l && truth.b(n, l) < 0.5)
                    out << "<rect x=\"" << num(x) << "\" y=\"" << num(y0) << "\" width=\"" << num(cell)
                        << "\" height=\"" << strip << "\" fill=\"#cccccc\"/>\n";
                if (est.paths[l].b(n) < 0.5)
                    out << "<rect x=\"" << num(x + 0.15 * cell) << "\" y=\"" << num(y0 + 0.2 * strip)
                        << "\" width=\"" << num(0.7 * cell) << "\" height=\"" << num(0.6 * strip) << "\" fill=\""
                        << kColors[l % 6] << "\"/>\n";
            }
            for (int tick = 1; tick <= N; tick += std::max(1, N / 10))
                text(out, ax(tick), y0 + strip + 14, std::to_string(tick));
        }
        text(out, w / 2.0, h - 10, "antenna index n");
        out << "</svg>\n";
    }

    void write_scatter_svg(std::ostream &out, const SceneConfig &scene, const EstimationResult &est)
    {
        double x_max = 1.0, y_abs = 1.0;
        auto extend = [&](double x, double y)
        {
            x_max = std::max(x_max, x);
            y_abs = std::max(y_abs, std::abs(y));
        };
        for (const auto &p : scene.paths)
            extend(p.distance * std::cos(p.aoa), p.distance * std::sin(p.aoa));
        for (const auto &p : est.paths)
            extend(p.x, p.y);
        x_max *= 1.15;
        y_abs *= 1.15;

        const int w = 560, h = 520, left = 60, right = 20, top = 40, bottom = 50;
        const Axis ax{-0.05 * x_max, x_max, double(left), double(w - right)};
        const Axis ay{-y_abs, y_abs, double(h - bottom), double(top)};
        header(out, w, h);
        text(out, w / 2.0, 20, "Scatterer positions (circles: truth, crosses: estimate)");
        out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << w - left - right << "\" height=\""
            << h - top - bottom << "\" fill=\"none\" stroke=\"#999\"/>\n";
        line(out, ax(0), ay(-y_abs), ax(0), ay(y_abs), "#bbb", 1.0, "4 3");
        line(out, ax(ax.lo), ay(0), ax(x_max), ay(0), "#bbb", 1.0, "4 3");
        const double half = scene.geom.aperture() / 2.0;
        line(out, ax(0), ay(-half), ax(0), ay(half), "black", 4.0);

        for (std::size_t l = 0; l < scene.paths.size(); ++l)
        {
            const auto &p = scene.paths[l];
            const double x = ax(p.distance * std::cos(p.aoa));
            const double y = ay(p.distance * std::sin(p.aoa));
            out << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"7\" fill=\"none\" stroke=\""
                << kColors[l % 6] << "\" stroke-width=\"2\"/>\n";
            text(out, x + 12, y - 10, "path " + std::to_string(l), "start");
        }
        for (std::size_t l = 0; l < est.paths.size(); ++l)
        {
            const double x = ax(est.paths[l].x);
            const double y = ay(est.paths[l].y);
            line(out, x - 5, y - 5, x + 5, y + 5, kColors[l % 6], 2.0);
            line(out, x - 5, y + 5, x + 5, y - 5, kColors[l % 6], 2.0);
        }
        const double step = x_max > 20 ? 10 : (x_max > 8 ? 2 : 1);
        for (double v = 0; v <= x_max; v += step)
            text(out, ax(v), h - bottom + 16, label(v));
        for (double v = -std::floor(y_abs / step) * step; v <= y_abs; v += step)
            text(out, left - 6, ay(v) + 4, label(v), "end");
        text(out, w / 2.0, h - 10, "x [m]");
        out << "<text x=\"16\" y=\"" << num(h / 2.0) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
            << num(h / 2.0) << ")\">y [m]</text>\n";
        out << "</svg>\n";
    }

    void write_rmse_svg(std::ostream &out, const MCReport &report, const CampaignSpec &spec)
    {
        const int panel_w = 420, h = 380, top = 40, bottom = 60, left = 70, gap = 40;
        const int w = 2 * panel_w + gap;
        header(out, w, h);
        const char *metrics[] = {"location_rmse", "gain_rmse"};
        const char *titles[] = {"Location RMSE [m]", "Gain RMSE"};
        double s_lo = *std::min_element(spec.snr_db.begin(), spec.snr_db.end());
        double s_hi = *std::max_element(spec.snr_db.begin(), spec.snr_db.end());
        if (s_hi == s_lo)
        {
            s_lo -= 1.0;
            s_hi += 1.0;
        }

        for (int panel = 0; panel < 2; ++panel)
        {
            const double x0 = panel * (panel_w + gap);
            double v_lo = 1e300, v_hi = 0.0;
            for (const auto &r : report.rows)
                if (r.metric == metrics[panel] && r.value > 0.0)
                {
                    v_lo = std::min(v_lo, r.value);
                    v_hi = std::max(v_hi, r.value);
                }
            if (v_hi <= 0.0)
            {
                v_lo = 0.1;
                v_hi = 1.0;
            }
            const double e_lo = std::floor(std::log10(v_lo));
            const double e_hi = std::max(std::ceil(std::log10(v_hi)), e_lo + 1.0);
            const Axis ax{s_lo, s_hi, x0 + left, x0 + panel_w - 10};
            const Axis ay{e_lo, e_hi, double(h - bottom), double(top)};

            text(out, x0 + (left + panel_w) / 2.0, 24, titles[panel]);
            out << "<rect x=\"" << num(ax.a) << "\" y=\"" << top << "\" width=\"" << num(ax.b - ax.a)
                << "\" height=\"" << h - top - bottom << "\" fill=\"none\" stroke=\"#999\"/>\n";
            for (double e = e_lo; e <= e_hi; e += 1.0)
            {
                line(out, ax.a, ay(e), ax.b, ay(e), "#eee");
                text(out, ax.a - 6, ay(e) + 4, "1e" + label(e), "end");
            }
            for (double s : spec.snr_db)
                text(out, ax(s), h - bottom + 16, label(s));
            text(out, x0 + (left + panel_w) / 2.0, h - bottom + 34, "SNR [dB]");

            for (std::size_t mi = 0; mi < spec.methods.size(); ++mi)
            {
                const std::string name = to_string(spec.methods[mi]);
                std::string pts;
                for (double s : spec.snr_db)
                    for (const auto &r : report.rows)
                        if (r.snr_db == s && r.method == name && r.metric == metrics[panel] && r.value > 0.0)
                            pts += num(ax(s)) + "," + num(ay(std::log10(r.value))) + " ";
                out << "<polyline points=\"" << pts << "\" fill=\"none\" stroke=\"" << kColors[mi % 6]
                    << "\" stroke-width=\"2\"/>\n";
                if (panel == 1)
                {
                    const double ly = top + 14 + 16 * mi;
                    line(out, ax.b - 110, ly - 4, ax.b - 90, ly - 4, kColors[mi % 6], 2.0);
                    text(out, ax.b - 84, ly, name, "start");
                }
            }
        }
        out << "</svg>\n";
    }
}
