#include "hetsync/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hetsync {

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out << content;
        if (!out.flush()) throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string trajectory_csv(const Trajectory& traj) {
    std::string out = "t";
    for (std::size_t i = 1; i <= traj.node_count; ++i) {
        for (std::size_t k = 1; k <= traj.dimension; ++k) {
            out += ",x_" + std::to_string(i) + "_" + std::to_string(k);
        }
    }
    out += ",e_tot\n";
    for (std::size_t s = 0; s < traj.size(); ++s) {
        out += format_number(traj.times[s]);
        const auto& x = traj.states[s];
        for (Eigen::Index k = 0; k < x.size(); ++k) {
            out += ',';
            out += format_number(x(k));
        }
        out += ',';
        out += format_number(total_error(x, traj.node_count, traj.dimension));
        out += '\n';
    }
    return out;
}

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 50.0;
constexpr double kLogFloor = 1e-12;

std::string fixed(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

std::string tick_label(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace

std::string render_line_chart_svg(const std::vector<double>& x, const std::vector<double>& y,
                                  const ChartOptions& options) {
    if (x.size() != y.size() || x.empty()) {
        throw ValidationError("chart: need matching, nonempty series");
    }
    auto ty = [&](double v) { return options.log_y ? std::log10(std::max(v, kLogFloor)) : v; };

    // non-finite samples are left out of the range and the polyline
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < y.size(); ++k) {
        if (std::isfinite(x[k]) && std::isfinite(y[k])) keep.push_back(k);
    }
    if (keep.empty()) {
        throw ValidationError("chart: no finite samples");
    }
    double y0 = ty(y[keep.front()]);
    double y1 = y0;
    for (std::size_t k : keep) {
        y0 = std::min(y0, ty(y[k]));
        y1 = std::max(y1, ty(y[k]));
    }
    if (options.log_y) {
        y0 = std::floor(y0);
        y1 = std::ceil(y1);
    } else {
        y0 = std::min(y0, 0.0);
    }
    if (y1 <= y0) y1 = y0 + 1.0;
    double x0 = x[keep.front()];
    double x1 = x0;
    for (std::size_t k : keep) {
        x0 = std::min(x0, x[k]);
        x1 = std::max(x1, x[k]);
    }
    if (x1 <= x0) x1 = x0 + 1.0;

    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto px = [&](double v) { return kLeft + (v - x0) / (x1 - x0) * pw; };
    auto py = [&](double v) { return kTop + (1.0 - (ty(v) - y0) / (y1 - y0)) * ph; };
    auto py_raw = [&](double tv) { return kTop + (1.0 - (tv - y0) / (y1 - y0)) * ph; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << kWidth << " " << kHeight
        << "\" width=\"" << kWidth << "\" height=\"" << kHeight << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!options.title.empty()) {
        svg << "<text x=\"" << kWidth / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">"
            << options.title << "</text>\n";
    }
    svg << "<g stroke=\"black\" stroke-width=\"1\">\n"
        << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + ph << "\" x2=\"" << kLeft + pw << "\" y2=\""
        << kTop + ph << "\"/>\n"
        << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
        << kTop + ph << "\"/>\n</g>\n";

    svg << "<g font-size=\"11\" fill=\"black\">\n";
    for (int k = 0; k <= 5; ++k) {
        const double v = x0 + (x1 - x0) * k / 5.0;
        svg << "<text x=\"" << fixed(px(v)) << "\" y=\"" << fixed(kTop + ph + 16)
            << "\" text-anchor=\"middle\">" << tick_label(v) << "</text>\n";
    }
    if (options.log_y) {
        const double decades = std::max(1.0, std::ceil((y1 - y0) / 10.0));
        for (double d = y0; d <= y1 + 1e-9; d += decades) {
            svg << "<text x=\"" << fixed(kLeft - 6) << "\" y=\"" << fixed(py_raw(d) + 4)
                << "\" text-anchor=\"end\">1e" << static_cast<int>(d) << "</text>\n";
        }
    } else {
        for (int k = 0; k <= 5; ++k) {
            const double v = y0 + (y1 - y0) * k / 5.0;
            svg << "<text x=\"" << fixed(kLeft - 6) << "\" y=\"" << fixed(py_raw(v) + 4)
                << "\" text-anchor=\"end\">" << tick_label(v) << "</text>\n";
        }
    }
    svg << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10
        << "\" text-anchor=\"middle\">" << options.x_label << "</text>\n";
    svg << "<text x=\"16\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << kTop + ph / 2 << ")\">" << options.y_label << "</text>\n";
    svg << "</g>\n";

    svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < keep.size(); ++i) {
        svg << (i ? " " : "") << fixed(px(x[keep[i]])) << "," << fixed(py(y[keep[i]]));
    }
    svg << "\"/>\n</svg>\n";
    return svg.str();
}

nlohmann::json simulation_summary(const NetworkSystem& net, const IntegrationOptions& options,
                                  const SyncReport& sync, double tail_sup_norm) {
    nlohmann::json j;
    j["command"] = "simulate";
    j["nodes"] = net.node_count();
    j["dimension"] = net.dimension();
    j["gains"] = {{"c", net.gains().c}, {"c_d", net.gains().c_d}};
    j["integrator"] = {{"method", to_string(options.method)},
                       {"dt", options.dt},
                       {"t_end", options.t_end},
                       {"steps", step_count(options)}};
    j["terminal_e_tot"] = sync.terminal;
    j["tail_max_e_tot"] = sync.tail_max;
    j["tail_min_e_tot"] = sync.tail_min;
    j["tail_sup_norm"] = tail_sup_norm;
    j["sync"] = {{"threshold", sync.threshold},
                 {"tail_fraction", sync.tail_fraction},
                 {"pass", sync.synchronized}};
    return j;
}

void validate_summary(const nlohmann::json& s) {
    auto fail = [](const std::string& field, const std::string& what) {
        throw ValidationError("summary /" + field + ": " + what);
    };
    if (!s.is_object()) fail("", "expected an object");
    static const char* kKeys[] = {"command",        "nodes",          "dimension",
                                  "gains",          "integrator",     "terminal_e_tot",
                                  "tail_max_e_tot", "tail_min_e_tot", "tail_sup_norm",
                                  "sync",           "runtime_s"};
    for (const auto& [key, value] : s.items()) {
        if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) fail(key, "unknown key");
    }
    if (!s.contains("command") || s["command"] != "simulate") fail("command", "expected \"simulate\"");
    for (const char* k : {"nodes", "dimension"}) {
        if (!s.contains(k) || !s[k].is_number_unsigned() || s[k].get<std::size_t>() == 0) {
            fail(k, "expected a positive integer");
        }
    }
    for (const char* k : {"terminal_e_tot", "tail_max_e_tot", "tail_min_e_tot", "tail_sup_norm"}) {
        if (!s.contains(k) || !s[k].is_number() || s[k].get<double>() < 0.0) {
            fail(k, "expected a nonnegative number");
        }
    }
    if (s.contains("runtime_s") && !s["runtime_s"].is_number()) fail("runtime_s", "expected a number");

    if (!s.contains("gains") || !s["gains"].is_object() || s["gains"].size() != 2) fail("gains", "expected {c, c_d}");
    for (const char* k : {"c", "c_d"}) {
        if (!s["gains"].contains(k) || !s["gains"][k].is_number()) fail(std::string("gains/") + k, "expected a number");
    }
    const auto& it = s.contains("integrator") ? s["integrator"] : nlohmann::json();
    if (!it.is_object() || it.size() != 4) fail("integrator", "expected {method, dt, t_end, steps}");
    if (!it.contains("method") || !(it["method"] == "euler" || it["method"] == "rk4")) {
        fail("integrator/method", "expected \"euler\" or \"rk4\"");
    }
    for (const char* k : {"dt", "t_end"}) {
        if (!it.contains(k) || !it[k].is_number() || !(it[k].get<double>() > 0.0)) {
            fail(std::string("integrator/") + k, "expected a positive number");
        }
    }
    if (!it.contains("steps") || !it["steps"].is_number_unsigned()) fail("integrator/steps", "expected an integer");

    const auto& sy = s.contains("sync") ? s["sync"] : nlohmann::json();
    if (!sy.is_object() || sy.size() != 3) fail("sync", "expected {threshold, tail_fraction, pass}");
    for (const char* k : {"threshold", "tail_fraction"}) {
        if (!sy.contains(k) || !sy[k].is_number()) fail(std::string("sync/") + k, "expected a number");
    }
    if (!sy.contains("pass") || !sy["pass"].is_boolean()) fail("sync/pass", "expected a boolean");
}

}  // namespace hetsync
