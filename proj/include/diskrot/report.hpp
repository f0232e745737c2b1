#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "diskrot/ergodic.hpp"

namespace diskrot {

inline constexpr const char* kVersion = "diskrot 0.1.0";

/// Shortest text that reads back to the same double.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

/// Writes through a sibling temporary and renames it into place.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) fail(ErrorKind::InvalidArgument, "cannot open " + tmp.string() + " for writing");
        os << content;
        os.flush();
        if (!os) fail(ErrorKind::InvalidArgument, "write to " + tmp.string() + " failed");
    }
    fs::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(ErrorKind::InvalidArgument, "cannot read " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

class Csv {
public:
    explicit Csv(std::vector<std::string> header = {}) : header_(std::move(header)) {}

    void add_row(const std::vector<double>& row) {
        std::vector<std::string> cells;
        cells.reserve(row.size());
        for (double v : row) cells.push_back(format_double(v));
        add_cells(std::move(cells));
    }

    void add_cells(std::vector<std::string> cells) {
        if (cells.size() != header_.size()) fail(ErrorKind::InvalidArgument, "CSV row width differs from header");
        rows_.push_back(std::move(cells));
    }

    const std::vector<std::string>& header() const { return header_; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }

    std::size_t column(const std::string& name) const {
        const auto it = std::find(header_.begin(), header_.end(), name);
        if (it == header_.end()) fail(ErrorKind::InvalidArgument, "no CSV column '" + name + "'");
        return static_cast<std::size_t>(it - header_.begin());
    }

    std::vector<double> numeric(const std::string& name) const {
        const std::size_t c = column(name);
        std::vector<double> out;
        out.reserve(rows_.size());
        for (const auto& r : rows_) out.push_back(std::strtod(r[c].c_str(), nullptr));
        return out;
    }

    std::string str() const {
        std::string s;
        auto line = [&s](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (i) s += ',';
                s += cells[i];
            }
            s += '\n';
        };
        line(header_);
        for (const auto& r : rows_) line(r);
        return s;
    }

    static Csv parse(const std::string& text) {
        std::istringstream is(text);
        std::string line;
        auto split = [](const std::string& l) {
            std::vector<std::string> cells;
            std::string cell;
            std::istringstream ls(l);
            while (std::getline(ls, cell, ',')) {
                const auto b = cell.find_first_not_of(" \t\r");
                const auto e = cell.find_last_not_of(" \t\r");
                cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
            }
            return cells;
        };
        if (!std::getline(is, line)) fail(ErrorKind::InvalidArgument, "empty CSV");
        Csv csv(split(line));
        while (std::getline(is, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            csv.add_cells(split(line));
        }
        return csv;
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

struct ChartSpec {
    std::string title;
    std::string x;
    std::vector<std::string> ys;
    bool log_x = false;
    bool log_y = false;
};

/// Minimal line chart of CSV columns. A pure function of the CSV text.
inline std::string svg_line_chart(const Csv& csv, const ChartSpec& spec) {
    constexpr double W = 640.0;
    constexpr double H = 400.0;
    constexpr double L = 70.0;
    constexpr double R = 20.0;
    constexpr double T = 40.0;
    constexpr double B = 50.0;
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    auto tx = [&](double v) { return spec.log_x ? std::log10(std::max(std::abs(v), 1e-300)) : v; };
    auto ty = [&](double v) { return spec.log_y ? std::log10(std::max(std::abs(v), 1e-300)) : v; };

    const auto xs = csv.numeric(spec.x);
    std::vector<std::vector<double>> ys;
    for (const auto& name : spec.ys) ys.push_back(csv.numeric(name));
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
    bool first = true;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (const auto& col : ys) {
            const double a = tx(xs[i]);
            const double b = ty(col[i]);
            if (!std::isfinite(a) || !std::isfinite(b)) continue;
            if (first) {
                x0 = x1 = a;
                y0 = y1 = b;
                first = false;
            }
            x0 = std::min(x0, a);
            x1 = std::max(x1, a);
            y0 = std::min(y0, b);
            y1 = std::max(y1, b);
        }
    }
    if (x1 == x0) x1 = x0 + 1.0;
    if (y1 == y0) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    auto px = [&](double a) { return L + (W - L - R) * (a - x0) / (x1 - x0); };
    auto py = [&](double b) { return H - B - (H - T - B) * (b - y0) / (y1 - y0); };
    auto fixed = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };
    auto label = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4g", v);
        return std::string(buf);
    };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
    s += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
    s += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" + spec.title +
         "</text>\n";
    s += "<polyline fill=\"none\" stroke=\"black\" points=\"" + fixed(L) + "," + fixed(T) + " " + fixed(L) + "," +
         fixed(H - B) + " " + fixed(W - R) + "," + fixed(H - B) + "\"/>\n";
    const std::string xl = (spec.log_x ? "log10 " : "") + spec.x;
    const std::string yl = spec.log_y ? "log10 |y|" : "y";
    s += "<text x=\"" + fixed(L) + "\" y=\"" + fixed(H - B + 16) + "\" font-family=\"sans-serif\" font-size=\"11\">" +
         label(x0) + "</text>\n";
    s += "<text x=\"" + fixed(W - R) + "\" y=\"" + fixed(H - B + 16) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + label(x1) + "</text>\n";
    s += "<text x=\"" + fixed(L - 4) + "\" y=\"" + fixed(H - B) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + label(y0) + "</text>\n";
    s += "<text x=\"" + fixed(L - 4) + "\" y=\"" + fixed(T + 10) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + label(y1) + "</text>\n";
    s += "<text x=\"320\" y=\"" + fixed(H - 12) + "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
         xl + "</text>\n";
    s += "<text x=\"16\" y=\"200\" transform=\"rotate(-90 16 200)\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">" + yl + "</text>\n";
    for (std::size_t k = 0; k < ys.size(); ++k) {
        std::string pts;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double a = tx(xs[i]);
            const double b = ty(ys[k][i]);
            if (!std::isfinite(a) || !std::isfinite(b)) continue;
            if (!pts.empty()) pts += ' ';
            pts += fixed(px(a)) + "," + fixed(py(b));
        }
        const char* c = colors[k % 6];
        s += "<polyline fill=\"none\" stroke=\"" + std::string(c) + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        s += "<text x=\"" + fixed(W - R - 4) + "\" y=\"" + fixed(T + 14.0 * (k + 1)) +
             "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" + c + "\">" + spec.ys[k] +
             "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

inline nlohmann::json to_json(const ConvergenceReport& r) {
    nlohmann::json j = {{"label", r.label},
                        {"n", r.n_values},
                        {"partial_averages", r.partial_averages},
                        {"tol", r.tol},
                        {"window", r.window},
                        {"cauchy_window", r.cauchy_window()},
                        {"verdict", to_string(r.verdict())}};
    j["target"] = r.target ? nlohmann::json(*r.target) : nlohmann::json(nullptr);
    return j;
}

inline Csv to_csv(const ConvergenceReport& r) {
    Csv csv({"n", "average", "defect", "window"});
    for (std::size_t k = 0; k < r.n_values.size(); ++k) {
        const double defect = r.target ? std::abs(r.partial_averages[k] - *r.target) : 0.0;
        csv.add_row({static_cast<double>(r.n_values[k]), r.partial_averages[k], defect, r.window_at(k)});
    }
    return csv;
}

/// The artifacts of one command: a JSON report, CSV series and charts.
struct ReportBundle {
    nlohmann::json report;
    std::map<std::string, Csv> series;
    std::map<std::string, ChartSpec> charts;  // chart name -> spec over the series of the same stem
    std::string primary;                      // series written to --out when it names a .csv file
    bool passed = true;

    void add_chart(const std::string& series_name, ChartSpec spec) { charts[series_name] = std::move(spec); }

    std::string report_text() const { return report.dump(2) + "\n"; }

    /// name -> content of every file in the bundle, in a fixed order.
    std::map<std::string, std::string> files() const {
        std::map<std::string, std::string> out;
        out["report.json"] = report_text();
        for (const auto& [name, csv] : series) out[name + ".csv"] = csv.str();
        for (const auto& [name, spec] : charts) out[name + ".svg"] = svg_line_chart(Csv::parse(series.at(name).str()), spec);
        return out;
    }

    /// A path ending in .json or .csv names the main file; anything else is a directory.
    std::vector<std::filesystem::path> write(const std::filesystem::path& out) const {
        namespace fs = std::filesystem;
        std::vector<fs::path> written;
        const std::string ext = out.extension().string();
        const auto all = files();
        if (ext == ".json" || ext == ".csv") {
            const fs::path dir = out.parent_path();
            const std::string stem = out.stem().string();
            for (const auto& [name, content] : all) {
                fs::path target;
                if (ext == ".json" && name == "report.json")
                    target = out;
                else if (ext == ".csv" && !primary.empty() && name == primary + ".csv")
                    target = out;
                else if (ext == ".csv" && name == "report.json")
                    target = dir / (stem + ".json");
                else
                    target = dir / (stem + "_" + name);
                atomic_write(target, content);
                written.push_back(target);
            }
        } else {
            for (const auto& [name, content] : all) {
                atomic_write(out / name, content);
                written.push_back(out / name);
            }
        }
        return written;
    }
};

}  // namespace diskrot
