#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "diskrot/experiment.hpp"

namespace diskrot {

struct AcceptanceOptions {
    std::uint64_t seed = 20240601;
    std::set<int> only;            // empty runs every criterion
    double tolerance_scale = 1.0;  // multiplies every numeric tolerance
    std::ostream* log = nullptr;   // one line per criterion as it finishes
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;

    std::string line() const {
        std::ostringstream os;
        os << (passed ? "PASS" : "FAIL") << " criterion " << id << " " << name << ": " << detail << " ["
           << format_double(std::round(seconds * 10.0) / 10.0) << " s]";
        return os.str();
    }
};

namespace detail {

/// Collects named checks of one criterion.
class Checks {
public:
    void expect(bool ok, const std::string& what) {
        if (!ok) failures_.push_back(what);
    }
    void note(const std::string& what) { notes_.push_back(what); }

    bool ok() const { return failures_.empty(); }

    std::string detail() const {
        std::string s;
        auto join = [&s](const std::vector<std::string>& v) {
            for (const auto& x : v) {
                if (!s.empty()) s += "; ";
                s += x;
            }
        };
        join(notes_);
        if (!failures_.empty()) {
            s += s.empty() ? "" : "; ";
            s += "violated: ";
            std::string f;
            for (const auto& x : failures_) f += (f.empty() ? "" : " | ") + x;
            s += f;
        }
        return s;
    }

private:
    std::vector<std::string> notes_;
    std::vector<std::string> failures_;
};

inline std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

inline std::vector<Isotopy> conjugated_family() {
    return {make_conjugated_rotation(kGolden, ConjugacyMap::named("vortex-pair")),
            make_conjugated_rotation(kGolden, ConjugacyMap::named("tripole")),
            make_conjugated_rotation(kGolden, ConjugacyMap::named("elliptic"))};
}

inline const char* const kFamilyNames[] = {"vortex-pair", "tripole", "elliptic"};

inline void rigid_exactness(const AcceptanceOptions& o, Checks& c) {
    const double s = o.tolerance_scale;
    const auto iso = make_rigid_rotation(kGolden);
    auto rng = shard_rng(o.seed, 1);
    double w_err = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const Vec2 x = disk_point(rng);
        const Vec2 y = disk_point(rng);
        w_err = std::max(w_err, std::abs(winding(iso, x, y) - kGolden));
    }
    c.expect(w_err <= 1e-12 * s, "max |W - alpha| = " + num(w_err));
    const ActionField a(iso);
    double a_err = 0.0;
    for (int i = 0; i < 100; ++i) a_err = std::max(a_err, std::abs(a(disk_point(rng)) - kGolden));
    c.expect(a_err <= 1e-8 * s, "max |a - alpha| = " + num(a_err));
    const auto cal = calabi_monte_carlo(a, 10000, o.seed);
    const double cal_err = std::abs(cal.value - kGolden);
    c.expect(cal_err <= 1e-6 * s, "|CAL - alpha| = " + num(cal_err));
    double s_err = 0.0;
    for (int k = 0; k < 3; ++k) {
        const auto rep = linking_average(iso, disk_point(rng, 1e-3), disk_point(rng, 1e-3), 32);
        for (double v : rep.partial_averages) s_err = std::max(s_err, std::abs(v - kGolden));
    }
    c.expect(s_err <= 1e-12 * s, "max |S_n - alpha| = " + num(s_err));
    c.note("W err " + num(w_err) + ", a err " + num(a_err) + ", CAL err " + num(cal_err) + ", S_n err " + num(s_err));
}

inline void calabi_equals_rotation(const AcceptanceOptions& o, Checks& c) {
    const auto maps = conjugated_family();
    for (std::size_t k = 0; k < maps.size(); ++k) {
        const auto est = calabi_monte_carlo(ActionField(maps[k]), 1000000, o.seed + k);
        const double err = std::abs(est.value - kGolden);
        c.note(std::string(kFamilyNames[k]) + " |CAL - alpha| = " + num(err) + " (" + num(err / est.stderr_) +
               " stderr)");
        c.expect(err < 3.0 * est.stderr_ * o.tolerance_scale, kFamilyNames[k]);
    }
}

inline void mean_action_probe(const AcceptanceOptions& o, Checks& c) {
    const auto maps = conjugated_family();
    std::vector<ActionField> fields;
    for (const auto& m : maps) fields.emplace_back(m);
    auto rng = shard_rng(o.seed, 3);
    double worst = 0.0;
    int pointwise_nonmonotone = 0;
    std::vector<double> sup_window;
    for (int k = 0; k < 25; ++k) {
        const Vec2 x = disk_point(rng);
        const auto rep = mean_action(fields[k % 3], x, 4096);
        worst = std::max(worst, std::abs(rep.last() - kGolden));
        if (!rep.windows_nonincreasing(512)) ++pointwise_nonmonotone;
        const auto w = rep.windows_from(512);
        sup_window.resize(w.size(), 0.0);
        for (std::size_t i = 0; i < w.size(); ++i) sup_window[i] = std::max(sup_window[i], w[i]);
    }
    bool monotone = true;
    std::string windows;
    for (std::size_t i = 0; i < sup_window.size(); ++i) {
        if (i > 0 && sup_window[i] > sup_window[i - 1]) monotone = false;
        windows += (i ? ", " : "") + num(sup_window[i]);
    }
    c.note("max |avg_4096 a - alpha| = " + num(worst) + ", sup windows n = 512..4096: " + windows);
    c.note("pointwise non-monotone windows " + std::to_string(pointwise_nonmonotone) + "/25 (reported only)");
    c.expect(worst < 0.02 * o.tolerance_scale, "mean action defect");
    c.expect(monotone, "Cauchy window of the uniform probe increases");
}

inline void linking_probe(const AcceptanceOptions& o, Checks& c) {
    const auto maps = conjugated_family();
    auto rng = shard_rng(o.seed, 4);
    double worst = 0.0;
    int accepted = 0;
    while (accepted < 25) {
        const Vec2 x = disk_point(rng, 1e-3);
        const Vec2 y = disk_point(rng, 1e-3);
        try {
            const auto rep = linking_average(maps[accepted % 3], x, y, 512);
            worst = std::max(worst, std::abs(rep.last() - kGolden));
            ++accepted;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::OrbitCollision) throw;
        }
    }
    int mismatches = 0;
    for (std::size_t k = 0; k < maps.size(); ++k) {
        const Vec2 x = disk_point(rng, 1e-3);
        const Vec2 y = disk_point(rng, 1e-3);
        LinkingEngine eng(maps[k], x, y);
        for (int i = 0; i < 64; ++i) eng.step();
        if (!(eng.sum() == LinkingEngine::naive(maps[k], x, y, 64))) ++mismatches;
    }
    c.note("max |S_512 - alpha| = " + num(worst) + ", incremental/naive mismatches " + std::to_string(mismatches));
    c.expect(worst < 0.05 * o.tolerance_scale, "linking defect");
    c.expect(mismatches == 0, "incremental engine differs from naive recomputation");
}

inline void right_handedness(const AcceptanceOptions& o, Checks& c) {
    const auto maps = conjugated_family();
    for (std::size_t k = 0; k < maps.size(); ++k) {
        const auto rep = right_handedness_certificate(maps[k], 12, 256, o.seed + k, 1L << 20);
        const double lin = std::abs(rep.linearized_rotation - kGolden);
        c.note(std::string(kFamilyNames[k]) + " min S_256 = " + num(rep.min_average) + ", |rho_lin - alpha| = " +
               num(lin));
        c.expect(rep.ok, std::string(kFamilyNames[k]) + " " + rep.violation);
        c.expect(lin <= 1e-6 * o.tolerance_scale, std::string(kFamilyNames[k]) + " linearized rotation");
    }
}

inline void foliation_inequalities(const AcceptanceOptions& o, Checks& c) {
    const auto maps = conjugated_family();
    const auto F = RadialFoliation::euclidean();
    const auto pairs = random_pairs(1000, o.seed);
    const std::vector<int> ns{1, 2, 4, 8, 16, 32};
    std::vector<double> m_gap(pairs.size());
    std::vector<double> l_gap(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t p) {
        const Isotopy& iso = maps[p % 3];
        const auto& [z, zp] = pairs[p];
        const auto w0 = winding_steps(iso, Vec2(0.0, 0.0), z, 32);
        const auto w = winding_steps(iso, z, zp, 32);
        double s0 = 0.0;
        double s = 0.0;
        std::size_t k = 0;
        for (int i = 0; i < 32; ++i) {
            s0 += w0[static_cast<std::size_t>(i)];
            s += w[static_cast<std::size_t>(i)];
            if (ns[k] != i + 1) continue;
            m_gap[p] = std::max(m_gap[p], std::abs(static_cast<double>(displacement(z, iso, F, 0.0, i + 1)) - s0));
            l_gap[p] = std::max(l_gap[p], std::abs(big_lambda(z, zp, iso, F, 0.0, i + 1).value() - s));
            ++k;
        }
    });
    const double mm = *std::max_element(m_gap.begin(), m_gap.end());
    const double ml = *std::max_element(l_gap.begin(), l_gap.end());
    const auto vm = std::count_if(m_gap.begin(), m_gap.end(), [&](double g) { return g > 1.0 * o.tolerance_scale; });
    const auto vl = std::count_if(l_gap.begin(), l_gap.end(), [&](double g) { return g > 2.0 * o.tolerance_scale; });
    c.note("max |m - W0| = " + num(mm) + " (" + std::to_string(vm) + " violations), max |Lambda - W| = " + num(ml) +
           " (" + std::to_string(vl) + " violations)");
    c.expect(vm == 0, "|m - W0| <= 1");
    c.expect(vl == 0, "|Lambda - W| <= 2");
}

inline void action_winding_bound(const AcceptanceOptions& o, Checks& c) {
    const auto iso = make_conjugated_rotation(kGolden, ConjugacyMap::named("tripole"));
    auto rng = shard_rng(o.seed, 7);
    std::vector<Vec2> xs(10);
    for (auto& x : xs) x = disk_point(rng);
    const auto gaps = action_winding_gaps(iso, xs, {1, 4, 16}, 100000, o.seed);
    int violations = 0;
    double worst = 0.0;
    for (const auto& g : gaps) {
        if (!g.within_bound(8.0 * o.tolerance_scale)) ++violations;
        worst = std::max(worst, g.gap);
    }
    c.note("max gap = " + num(worst) + ", violations " + std::to_string(violations) + "/" + std::to_string(gaps.size()));
    c.expect(violations == 0, "gap <= 8 + 3 n stderr");
}

inline void strip_measure_lemma(const AcceptanceOptions& o, Checks& c) {
    const double beta = 0.75;
    const auto iso = make_plane_extension(kGolden, beta);
    const auto F = RadialFoliation::euclidean();
    int applicable = 0;
    for (const auto& conv : convergents(kGolden, 3)) {
        const std::string label = std::to_string(conv.a) + "/" + std::to_string(conv.b);
        if (!(conv.value() > kGolden && conv.value() < beta)) {
            c.note(label + " outside (alpha, beta)");
            continue;
        }
        ++applicable;
        const auto est = strip_measure(iso, conv, F, lebesgue_disk(), 1000000, o.seed + conv.b);
        const double err = std::abs(est.value - est.expected);
        c.note(label + " mass " + num(est.value) + " vs " + num(est.expected) + " (" + num(err / est.stderr_) +
               " stderr)");
        c.expect(err < 3.0 * est.stderr_ * o.tolerance_scale, label);
    }
    c.expect(applicable > 0, "no applicable convergent");
}

inline void lambda_exactness(const AcceptanceOptions& o, Checks& c) {
    long long cocycle_failures = 0;
    for (long long k = -20; k <= 20; ++k)
        for (long long l = -20; l <= 20; ++l)
            for (long long m = -20; m <= 20; ++m)
                if (lambda_int(k, l) + lambda_int(l, m) != lambda_int(k, m)) ++cocycle_failures;
    c.expect(cocycle_failures == 0, std::to_string(cocycle_failures) + " cocycle failures");

    const auto F = RadialFoliation::euclidean();
    std::vector<Isotopy> maps = conjugated_family();
    maps.push_back(make_rigid_rotation(kGolden));
    maps.push_back(make_radial_twist(0.3, 2.0));
    auto rng = shard_rng(o.seed, 9);
    int identity_failures = 0;
    int checked = 0;
    for (const auto& iso : maps) {
        const Vec2 z = disk_point(rng, 0.05);
        const Vec2 zp = disk_point(rng, 0.05);
        long long m_sum = 0;
        HalfInt l_sum;
        HalfInt big_sum;
        Vec2 a = z;
        Vec2 b = zp;
        for (int n = 1; n <= 32; ++n) {
            m_sum += displacement(a, iso, F, 0.0);
            l_sum += lambda_f(a, b, iso, F);
            big_sum += big_lambda(a, b, iso, F, 0.0);
            a = iso.map(a);
            b = iso.map(b);
            if (n == 1 || n == 2 || n == 5 || n == 16 || n == 32) {
                checked += 3;
                identity_failures += m_sum != displacement(z, iso, F, 0.0, n);
                identity_failures += l_sum != lambda_f(z, zp, iso, F, n);
                identity_failures += big_sum != big_lambda(z, zp, iso, F, 0.0, n);
            }
        }
    }
    c.note("41^3 cocycle triples, " + std::to_string(checked) + " Birkhoff identities, " +
           std::to_string(identity_failures) + " failures");
    c.expect(identity_failures == 0, "Birkhoff identities");
}

inline void measure_integrals(const AcceptanceOptions& o, Checks& c) {
    const double s = o.tolerance_scale;
    const auto g = ConjugacyMap::named("vortex-pair");
    const auto iso = make_conjugated_rotation(kGolden, g);
    const auto rot = rotation_of_measure(iso, lebesgue_disk(), 50000, o.seed);
    c.note("winding-based " + num(rot.winding_based.value) + ", displacement-based " +
           num(rot.displacement_based.value) + ", difference " + num(rot.difference));
    c.expect(std::abs(rot.difference) < 3.0 * rot.difference_stderr * s, "rotation numbers of Lebesgue disagree");
    c.expect(std::abs(rot.winding_based.value - kGolden) < 3.0 * rot.winding_based.stderr_ * s,
             "winding-based rotation number");
    c.expect(std::abs(rot.displacement_based.value - kGolden) < 3.0 * rot.displacement_based.stderr_ * s,
             "displacement-based rotation number");
    const auto leb = product_integral_winding(iso, lebesgue_disk(), lebesgue_disk(), 50000, o.seed + 1);
    const auto circ = product_integral_winding(iso, invariant_circle(g, 0.5), lebesgue_disk(), 50000, o.seed + 2);
    c.note("Leb x Leb " + num(leb.value) + " +- " + num(leb.stderr_) + ", circle x Leb " + num(circ.value) + " +- " +
           num(circ.stderr_));
    c.expect(std::abs(leb.value - kGolden) < 3.0 * leb.stderr_ * s, "Leb x Leb");
    c.expect(std::abs(circ.value - kGolden) < 3.0 * circ.stderr_ * s, "circle x Leb");
}

}  // namespace detail

/// Runs the acceptance criteria in order; an exception fails its criterion only.
inline std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& o = {}) {
    if (!(o.tolerance_scale >= 0.0)) fail(ErrorKind::InvalidArgument, "tolerance scale must be >= 0");
    using Body = void (*)(const AcceptanceOptions&, detail::Checks&);
    struct Entry {
        int id;
        const char* name;
        Body body;
    };
    static const Entry entries[] = {
        {1, "rigid-rotation exactness", detail::rigid_exactness},
        {2, "calabi equals rotation number", detail::calabi_equals_rotation},
        {3, "mean action probe", detail::mean_action_probe},
        {4, "orbit linking probe", detail::linking_probe},
        {5, "right-handedness certificate", detail::right_handedness},
        {6, "foliation winding inequalities", detail::foliation_inequalities},
        {7, "action-winding bound", detail::action_winding_bound},
        {8, "strip measure", detail::strip_measure_lemma},
        {9, "lambda exactness", detail::lambda_exactness},
        {10, "measure rotation integrals", detail::measure_integrals},
    };
    std::vector<CriterionResult> out;
    for (const auto& e : entries) {
        if (!o.only.empty() && !o.only.count(e.id)) continue;
        CriterionResult r;
        r.id = e.id;
        r.name = e.name;
        const auto t0 = std::chrono::steady_clock::now();
        detail::Checks checks;
        try {
            e.body(o, checks);
            r.passed = checks.ok();
            r.detail = checks.detail();
        } catch (const std::exception& ex) {
            r.passed = false;
            r.detail = std::string("error: ") + ex.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (o.log) *o.log << r.line() << std::endl;
        out.push_back(std::move(r));
    }
    return out;
}

inline nlohmann::json to_json(const std::vector<CriterionResult>& results, const AcceptanceOptions& o) {
    nlohmann::json list = nlohmann::json::array();
    bool all = true;
    for (const auto& r : results) {
        list.push_back({{"id", r.id}, {"name", r.name}, {"status", r.passed ? "pass" : "fail"}, {"detail", r.detail}});
        all = all && r.passed;
    }
    return {{"version", kVersion},
            {"seed", o.seed},
            {"tolerance_scale", o.tolerance_scale},
            {"criteria", list},
            {"status", all ? "pass" : "fail"}};
}

}  // namespace diskrot
