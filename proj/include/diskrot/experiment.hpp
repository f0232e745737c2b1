#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "diskrot/action.hpp"
#include "diskrot/config.hpp"
#include "diskrot/ergodic.hpp"
#include "diskrot/farey.hpp"
#include "diskrot/foliation.hpp"
#include "diskrot/report.hpp"
#include "diskrot/winding.hpp"

namespace diskrot {

namespace detail {

inline Vec2 disk_point(std::mt19937_64& rng, double r_min = 0.0) {
    for (;;) {
        const double r = std::sqrt(uniform01(rng));
        if (r <= r_min) continue;
        const double t = kTwoPi * uniform01(rng);
        return {r * std::cos(t), r * std::sin(t)};
    }
}

inline std::vector<std::pair<Vec2, Vec2>> read_pairs(const std::string& path) {
    const Csv csv = Csv::parse(read_file(path));
    const auto x1 = csv.numeric("x1");
    const auto y1 = csv.numeric("y1");
    const auto x2 = csv.numeric("x2");
    const auto y2 = csv.numeric("y2");
    std::vector<std::pair<Vec2, Vec2>> out;
    for (std::size_t i = 0; i < x1.size(); ++i) out.emplace_back(Vec2(x1[i], y1[i]), Vec2(x2[i], y2[i]));
    return out;
}

inline std::vector<std::pair<Vec2, Vec2>> random_pairs(std::size_t count, std::uint64_t seed) {
    std::vector<std::pair<Vec2, Vec2>> out;
    auto rng = shard_rng(seed, 0x9a1f);
    for (std::size_t i = 0; i < count; ++i) {
        const Vec2 x = disk_point(rng, 1e-3);
        const Vec2 y = disk_point(rng, 1e-3);
        out.emplace_back(x, y);
    }
    return out;
}

inline json vec_json(const Vec2& v) { return json::array({v.x(), v.y()}); }

inline void add_report_series(ReportBundle& b, const std::string& name, const ConvergenceReport& rep,
                              const std::string& title) {
    b.series[name] = to_csv(rep);
    b.add_chart(name, {title + ": partial averages", "n", {"average"}, true, false});
    b.series[name + "_defect"] = to_csv(rep);
    b.add_chart(name + "_defect", {title + ": defect", "n", {"defect", "window"}, true, true});
}

inline void run_winding(const ExperimentConfig& c, const Isotopy& iso, ReportBundle& b) {
    const auto pairs = c.pairs_file.empty() ? random_pairs(c.pairs, c.seed) : read_pairs(c.pairs_file);
    std::vector<double> w(pairs.size());
    std::vector<int> refinements(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t i) {
        w[i] = winding(iso, pairs[i].first, pairs[i].second, {}, &refinements[i]);
    });
    Csv csv({"x1", "y1", "x2", "y2", "W", "refinements"});
    double sup = 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& [x, y] = pairs[i];
        csv.add_row({x.x(), x.y(), y.x(), y.y(), w[i], static_cast<double>(refinements[i])});
        sup = std::max(sup, std::abs(w[i]));
        sum += w[i];
    }
    b.series["windings"] = csv;
    b.primary = "windings";
    b.report["pairs"] = pairs.size();
    b.report["mean"] = pairs.empty() ? 0.0 : sum / static_cast<double>(pairs.size());
    b.report["max_abs"] = sup;
}

inline void run_action(const ExperimentConfig& c, const Isotopy& iso, ReportBundle& b) {
    const ActionField a(iso);
    auto rng = shard_rng(c.seed, 0xac7);
    std::vector<Vec2> pts(c.samples);
    for (auto& p : pts) p = disk_point(rng);
    std::vector<double> v(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) { v[i] = a(pts[i]); });
    Csv csv({"x", "y", "a"});
    for (std::size_t i = 0; i < pts.size(); ++i) csv.add_row({pts[i].x(), pts[i].y(), v[i]});
    b.series["action"] = csv;
    b.primary = "action";
    const auto est = mean_estimate(v);
    b.report["points"] = pts.size();
    b.report["mean"] = est.value;
    b.report["stderr"] = est.stderr_;
    b.report["boundary_rotation"] = iso.boundary_rot();
}

inline void run_calabi(const ExperimentConfig& c, const Isotopy& iso, ReportBundle& b) {
    const auto est = calabi_monte_carlo(ActionField(iso), c.samples, c.seed);
    b.report["value"] = est.value;
    b.report["stderr"] = est.stderr_;
    b.report["method"] = est.method;
    b.report["seed"] = est.seed;
    b.report["samples"] = est.samples;
    b.report["boundary_rotation"] = iso.boundary_rot();
}

inline void run_mean_action(const ExperimentConfig& c, const Isotopy& iso, ReportBundle& b) {
    auto rng = shard_rng(c.seed, 0x3ea);
    const Vec2 x = disk_point(rng);
    const auto rep = mean_action(ActionField(iso), x, c.n, c.tol);
    b.report["x"] = vec_json(x);
    b.report["convergence"] = to_json(rep);
    add_report_series(b, "mean_action", rep, "mean action");
}

inline void run_linking(const ExperimentConfig& c, const Isotopy& iso, ReportBundle& b) {
    auto rng = shard_rng(c.seed, 0x11c);
    for (;;) {
        const Vec2 x = disk_point(rng, 1e-3);
        const Vec2 y = disk_point(rng, 1e-3);
        try {
            const auto rep = linking_average(iso, x, y, c.n, c.tol);
            b.report["x"] = vec_json(x);
            b.report["y"] = vec_json(y);
            b.report["convergence"] = to_json(rep);
            add_report_series(b, "linking", rep, "linking");
            b.passed = rep.verdict() == Verdict::Converged && std::abs(rep.last() - *rep.target) < c.tol;
            return;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::OrbitCollision) throw;
        }
    }
}

inline void run_righthand(const ExperimentConfig& c, const Isotopy& iso, ReportBundle& b) {
    const auto rep = right_handedness_certificate(iso, static_cast<int>(c.pairs), static_cast<int>(c.n), c.seed);
    b.report["right_handed_mode"] = rep.right_handed_mode;
    b.report["pairs"] = rep.pairs;
    b.report["n"] = rep.n;
    b.report["min_average"] = rep.min_average;
    b.report["max_average"] = rep.max_average;
    b.report["linearized_rotation"] = rep.linearized_rotation;
    b.report["linearization_iterates"] = rep.linearization_iterates;
    b.report["certified"] = rep.ok;
    b.report["violation"] = rep.violation;
    b.passed = rep.ok;
}

inline void run_foliation_check(const ExperimentConfig& c, const Isotopy& iso, ReportBundle& b) {
    const auto F = RadialFoliation::euclidean();
    const auto pairs = random_pairs(c.pairs, c.seed);
    const auto ns = doubling_schedule(c.nmax);
    const std::size_t P = pairs.size();
    std::vector<std::vector<double>> m_gap(P, std::vector<double>(ns.size()));
    std::vector<std::vector<double>> l_gap(P, std::vector<double>(ns.size()));
    parallel_for(P, [&](std::size_t p) {
        const auto& [z, zp] = pairs[p];
        const auto w0 = winding_steps(iso, Vec2(0.0, 0.0), z, static_cast<int>(c.nmax));
        const auto w = winding_steps(iso, z, zp, static_cast<int>(c.nmax));
        double s0 = 0.0;
        double s = 0.0;
        std::size_t k = 0;
        for (long i = 0; i < c.nmax; ++i) {
            s0 += w0[static_cast<std::size_t>(i)];
            s += w[static_cast<std::size_t>(i)];
            if (k < ns.size() && ns[k] == i + 1) {
                const int n = static_cast<int>(i + 1);
                m_gap[p][k] = std::abs(static_cast<double>(displacement(z, iso, F, 0.0, n)) - s0);
                l_gap[p][k] = std::abs(big_lambda(z, zp, iso, F, 0.0, n).value() - s);
                ++k;
            }
        }
    });
    Csv csv({"n", "max_m_gap", "max_lambda_gap", "m_slack", "lambda_slack"});
    double worst_m = 0.0;
    double worst_l = 0.0;
    for (std::size_t k = 0; k < ns.size(); ++k) {
        double mm = 0.0;
        double ml = 0.0;
        for (std::size_t p = 0; p < P; ++p) {
            mm = std::max(mm, m_gap[p][k]);
            ml = std::max(ml, l_gap[p][k]);
        }
        worst_m = std::max(worst_m, mm);
        worst_l = std::max(worst_l, ml);
        csv.add_row({static_cast<double>(ns[k]), mm, ml, 1.0 - mm, 2.0 - ml});
    }
    b.series["foliation"] = csv;
    b.add_chart("foliation", {"observed gaps", "n", {"max_m_gap", "max_lambda_gap"}, true, false});
    b.report["pairs"] = P;
    b.report["n"] = ns;
    b.report["displacement_winding"] = {{"bound", 1.0}, {"max_gap", worst_m}, {"slack", 1.0 - worst_m}};
    b.report["lambda_winding"] = {{"bound", 2.0}, {"max_gap", worst_l}, {"slack", 2.0 - worst_l}};
    b.passed = worst_m <= 1.0 && worst_l <= 2.0;
}

inline void run_strip_measure(const ExperimentConfig& c, const Isotopy& iso, ReportBundle& b) {
    const auto [a, den] = c.convergent();
    const Convergent conv{a, den, static_cast<double>(a) - static_cast<double>(den) * c.map.alpha, 0};
    StripOptions opt;
    const bool rigid_zone = !c.map.g.has_value();
    opt.require_lock = rigid_zone;
    const auto est = strip_measure(iso, conv, RadialFoliation::euclidean(), lebesgue_disk(), c.samples, c.seed, opt);
    b.report["value"] = est.value;
    b.report["stderr"] = est.stderr_;
    b.report["seed"] = est.seed;
    b.report["samples"] = est.samples;
    b.report["transverse"] = est.transverse;
    b.report["lock_failures"] = est.lock_failures;
    if (rigid_zone) {
        b.report["expected"] = est.expected;
        b.passed = std::abs(est.value - est.expected) < 3.0 * est.stderr_ + 1e-15;
    } else {
        b.report["expected"] = nullptr;
    }
}

inline void run_convergents(const ExperimentConfig& c, ReportBundle& b) {
    const auto cs = convergents(c.map.alpha, c.count);
    Csv csv({"a", "b", "defect", "abs_defect", "partial_quotient"});
    json list = json::array();
    for (const auto& v : cs) {
        csv.add_row({static_cast<double>(v.a), static_cast<double>(v.b), v.defect, std::abs(v.defect),
                      static_cast<double>(v.partial_quotient)});
        list.push_back({{"a", v.a}, {"b", v.b}, {"defect", v.defect}, {"partial_quotient", v.partial_quotient}});
    }
    b.series["convergents"] = csv;
    b.add_chart("convergents", {"convergent defects", "b", {"abs_defect"}, true, true});
    b.report["alpha"] = c.map.alpha;
    b.report["convergents"] = list;
}

inline void run_gap_bound(const ExperimentConfig& c, const Isotopy& iso, ReportBundle& b) {
    auto rng = shard_rng(c.seed, 0x41);
    std::vector<Vec2> xs(c.pairs);
    for (auto& x : xs) x = disk_point(rng);
    std::vector<int> ns;
    for (long n = 1; n <= c.nmax; n *= 4) ns.push_back(static_cast<int>(n));
    const auto gaps = action_winding_gaps(iso, xs, ns, c.samples, c.seed);
    Csv csv({"x", "y", "n", "action", "integral", "stderr", "gap", "bound"});
    bool ok = true;
    double worst = 0.0;
    for (const auto& g : gaps) {
        const double bound = 8.0 + 3.0 * g.n * g.stderr_;
        csv.add_row({g.x.x(), g.x.y(), static_cast<double>(g.n), g.action, g.integral, g.stderr_, g.gap, bound});
        ok = ok && g.within_bound();
        worst = std::max(worst, g.gap / g.n);
    }
    b.series["gaps"] = csv;
    b.primary = "gaps";
    b.report["points"] = xs.size();
    b.report["n"] = ns;
    b.report["samples"] = c.samples;
    b.report["max_gap_over_n"] = worst;
    b.report["violations"] = std::count_if(gaps.begin(), gaps.end(), [](const GapResult& g) { return !g.within_bound(); });
    b.passed = ok;
}

}  // namespace detail

/// Executes one command and collects its artifacts; nothing is written.
inline ReportBundle run(const ExperimentConfig& c) {
    ReportBundle b;
    b.report["version"] = kVersion;
    b.report["command"] = c.command;
    b.report["config"] = to_json(c);
    if (c.command == "convergents") {
        detail::run_convergents(c, b);
    } else {
        const Isotopy iso = c.map.build();
        b.report["warnings"] = iso.warnings();
        if (c.command == "winding") detail::run_winding(c, iso, b);
        else if (c.command == "action") detail::run_action(c, iso, b);
        else if (c.command == "calabi") detail::run_calabi(c, iso, b);
        else if (c.command == "mean-action") detail::run_mean_action(c, iso, b);
        else if (c.command == "linking") detail::run_linking(c, iso, b);
        else if (c.command == "righthand") detail::run_righthand(c, iso, b);
        else if (c.command == "foliation-check") detail::run_foliation_check(c, iso, b);
        else if (c.command == "strip-measure") detail::run_strip_measure(c, iso, b);
        else if (c.command == "thm41-bound") detail::run_gap_bound(c, iso, b);
        else throw SchemaError("/command", "unknown command '" + c.command + "'");
    }
    b.report["status"] = b.passed ? "pass" : "fail";
    return b;
}

}  // namespace diskrot
