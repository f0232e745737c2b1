// Command-line front end: one subcommand per experiment plus verify-all.
#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "diskrot/diskrot.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kAssertionFailure = 1;
constexpr int kUsageError = 2;

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string samples;
    std::optional<long> n;
    std::string pairs;
    std::optional<long> nmax;
    std::optional<int> count;
    std::string conv;
    std::string alpha;
    std::optional<double> beta;
    std::optional<double> tol;
};

std::size_t parse_count(const std::string& text, const char* pointer) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0' || !(v >= 1.0) || v != std::floor(v) || v > 1e15)
        throw diskrot::SchemaError(pointer, "expected a positive integer, got '" + text + "'");
    return static_cast<std::size_t>(v);
}

bool is_count(const std::string& text) {
    if (text.empty()) return false;
    char* end = nullptr;
    std::strtod(text.c_str(), &end);
    return *end == '\0';
}

diskrot::ExperimentConfig build_config(const std::string& command, const Flags& f) {
    using namespace diskrot;
    ExperimentConfig c;
    if (command == "strip-measure") {
        c.map.family = "plane-extension";
        c.map.g.reset();
    }
    if (!f.config.empty()) {
        const json doc = parse_json(read_file(f.config));
        if (doc.is_object() && doc.contains("family")) {
            c.map = map_from_json(doc);
        } else {
            c = experiment_from_json(doc);
            if (!c.command.empty() && c.command != command)
                throw SchemaError("/command", "config is for '" + c.command + "', not '" + command + "'");
        }
    }
    c.command = command;
    if (f.seed) c.seed = *f.seed;
    if (!f.out.empty()) c.out = f.out;
    if (!f.samples.empty()) c.samples = parse_count(f.samples, "/samples");
    if (f.n) c.n = *f.n;
    if (!f.pairs.empty()) {
        if (is_count(f.pairs))
            c.pairs = parse_count(f.pairs, "/pairs");
        else
            c.pairs_file = f.pairs;
    }
    if (f.nmax) c.nmax = *f.nmax;
    if (f.count) c.count = *f.count;
    if (!f.conv.empty()) c.conv = f.conv;
    if (!f.alpha.empty()) {
        if (f.alpha == "golden") {
            c.map.alpha = kGolden;
            c.map.alpha_golden = true;
        } else {
            char* end = nullptr;
            c.map.alpha = std::strtod(f.alpha.c_str(), &end);
            if (end == f.alpha.c_str() || *end != '\0')
                throw SchemaError("/map/alpha", "expected a number or \"golden\"");
            c.map.alpha_golden = false;
        }
    }
    if (f.beta) c.map.beta = *f.beta;
    if (f.tol) c.tol = *f.tol;
    if (c.n < 1) throw SchemaError("/n", "must be >= 1");
    if (c.nmax < 1) throw SchemaError("/nmax", "must be >= 1");
    if (c.count < 1) throw SchemaError("/count", "must be >= 1");
    // Re-validate the assembled document against the schema.
    return experiment_from_json(to_json(c));
}

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "map or experiment config (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--seed", f.seed, "64-bit seed");
    sub->add_option("--out", f.out, "output directory, or a .json/.csv file");
    sub->add_option("--samples", f.samples, "Monte Carlo samples (1e6 accepted)");
    sub->add_option("--n", f.n, "iterates");
    sub->add_option("--pairs", f.pairs, "pair count, or a CSV file with x1,y1,x2,y2");
    sub->add_option("--nmax", f.nmax, "largest iterate for foliation-check and thm41-bound");
    sub->add_option("--count", f.count, "number of convergents");
    sub->add_option("--conv", f.conv, "convergent a/b");
    sub->add_option("--alpha", f.alpha, "rotation number, or 'golden'");
    sub->add_option("--beta", f.beta, "outer rotation of the plane extension");
    sub->add_option("--tol", f.tol, "convergence tolerance");
}

int run_command(const std::string& command, const Flags& f) {
    const auto cfg = build_config(command, f);
    const auto bundle = diskrot::run(cfg);
    if (!f.out.empty()) {
        for (const auto& p : bundle.write(cfg.out)) std::cerr << "wrote " << p.string() << "\n";
    }
    std::cout << bundle.report_text();
    return bundle.passed ? kPass : kAssertionFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical experiments on area-preserving disk maps"};
    app.set_version_flag("--version", std::string(diskrot::kVersion));
    app.require_subcommand(1);

    Flags flags;
    std::string chosen;
    for (const auto& name : diskrot::ExperimentConfig::commands()) {
        auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
        add_common(sub, flags);
        sub->callback([&chosen, name] { chosen = name; });
    }

    diskrot::AcceptanceOptions acc;
    std::vector<int> only;
    std::string summary_out;
    auto* verify = app.add_subcommand("verify-all", "run every acceptance criterion");
    verify->add_option("--seed", acc.seed, "64-bit seed");
    verify->add_option("--only", only, "criterion ids to run")->check(CLI::Range(1, 10));
    verify->add_option("--tolerance-scale", acc.tolerance_scale, "multiplies every tolerance")
        ->check(CLI::NonNegativeNumber);
    verify->add_option("--out", summary_out, "summary JSON file");
    verify->callback([&chosen] { chosen = "verify-all"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kPass : kUsageError;
    }

    try {
        if (chosen == "verify-all") {
            acc.only.insert(only.begin(), only.end());
            acc.log = &std::cout;
            const auto results = diskrot::run_acceptance(acc);
            const auto summary = diskrot::to_json(results, acc);
            if (!summary_out.empty()) diskrot::atomic_write(summary_out, summary.dump(2) + "\n");
            std::cout << "summary: " << summary["status"].get<std::string>() << "\n";
            return summary["status"] == "pass" ? kPass : kAssertionFailure;
        }
        return run_command(chosen, flags);
    } catch (const diskrot::Error& e) {
        std::cerr << "diskrot " << chosen << ": " << e.what() << "\n";
        const bool usage = e.kind() == diskrot::ErrorKind::SchemaError || e.kind() == diskrot::ErrorKind::InvalidArgument ||
                           e.kind() == diskrot::ErrorKind::BadInterval || e.kind() == diskrot::ErrorKind::RationalInput;
        return usage ? kUsageError : kAssertionFailure;
    } catch (const std::exception& e) {
        std::cerr << "diskrot " << chosen << ": " << e.what() << "\n";
        return kAssertionFailure;
    }
}
