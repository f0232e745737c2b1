#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "diskrot/farey.hpp"
#include "diskrot/isotopy.hpp"

namespace diskrot {

using json = nlohmann::json;

/// Configuration error located by a JSON pointer into the offending document.
class SchemaError : public Error {
public:
    SchemaError(std::string pointer, const std::string& what)
        : Error(ErrorKind::SchemaError, (pointer.empty() ? "/" : pointer) + ": " + what), pointer_(std::move(pointer)) {}

    const std::string& pointer() const noexcept { return pointer_; }

private:
    std::string pointer_;
};

namespace detail {

inline void check_keys(const json& j, const std::string& at, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw SchemaError(at, "expected an object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw SchemaError(at + "/" + key, "unknown field");
    }
}

inline double get_real(const json& j, const std::string& key, const std::string& at) {
    const json& v = j.at(key);
    if (!v.is_number()) throw SchemaError(at + "/" + key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw SchemaError(at + "/" + key, "expected a finite number");
    return x;
}

inline long long get_int(const json& j, const std::string& key, const std::string& at, long long lo) {
    const json& v = j.at(key);
    if (!v.is_number_integer()) throw SchemaError(at + "/" + key, "expected an integer");
    const auto x = v.get<long long>();
    if (x < lo) throw SchemaError(at + "/" + key, "must be >= " + std::to_string(lo));
    return x;
}

inline std::string get_string(const json& j, const std::string& key, const std::string& at) {
    const json& v = j.at(key);
    if (!v.is_string()) throw SchemaError(at + "/" + key, "expected a string");
    return v.get<std::string>();
}

}  // namespace detail

/// Parameters of the conjugating diffeomorphism g.
struct HamiltonianConfig {
    std::string hamiltonian = "vortex-pair";
    int steps = 8;
    double support_radius = 0.9;

    friend bool operator==(const HamiltonianConfig&, const HamiltonianConfig&) = default;
};

/// A map family and its parameters.
struct MapConfig {
    std::string family = "conjugated";
    double alpha = kGolden;
    bool alpha_golden = true;
    double twist = 0.0;
    double beta = 0.75;
    std::optional<HamiltonianConfig> g = HamiltonianConfig{};

    friend bool operator==(const MapConfig&, const MapConfig&) = default;

    static std::vector<std::string> families() { return {"rigid", "radial", "conjugated", "plane-extension"}; }

    ConjugacyMap conjugacy() const {
        if (!g) return ConjugacyMap::identity();
        return ConjugacyMap::named(g->hamiltonian, g->steps, g->support_radius);
    }

    Isotopy build() const {
        if (family == "rigid") return make_rigid_rotation(alpha);
        if (family == "radial") return make_radial_twist(alpha, twist);
        if (family == "conjugated") return make_conjugated_rotation(alpha, conjugacy());
        if (family == "plane-extension") return make_plane_extension(alpha, beta, conjugacy());
        throw SchemaError("/family", "unknown family '" + family + "'");
    }
};

/// "golden" or a real number.
inline std::pair<double, bool> parse_alpha(const json& v, const std::string& at) {
    if (v.is_string()) {
        if (v.get<std::string>() != "golden") throw SchemaError(at, "expected a number or \"golden\"");
        return {kGolden, true};
    }
    if (!v.is_number()) throw SchemaError(at, "expected a number or \"golden\"");
    return {v.get<double>(), false};
}

inline json to_json(const MapConfig& m) {
    json j;
    j["family"] = m.family;
    j["alpha"] = m.alpha_golden ? json("golden") : json(m.alpha);
    if (m.family == "radial") j["twist"] = m.twist;
    if (m.family == "plane-extension") j["beta"] = m.beta;
    if (m.g && (m.family == "conjugated" || m.family == "plane-extension"))
        j["g"] = {{"hamiltonian", m.g->hamiltonian}, {"steps", m.g->steps}, {"support_radius", m.g->support_radius}};
    return j;
}

inline MapConfig map_from_json(const json& j, const std::string& at = "") {
    using namespace detail;
    check_keys(j, at, {"family", "alpha", "twist", "beta", "g"});
    MapConfig m;
    if (!j.contains("family")) throw SchemaError(at + "/family", "missing required field");
    m.family = get_string(j, "family", at);
    bool known = false;
    for (const auto& f : MapConfig::families()) known = known || f == m.family;
    if (!known) throw SchemaError(at + "/family", "unknown family '" + m.family + "'");
    if (j.contains("alpha")) std::tie(m.alpha, m.alpha_golden) = parse_alpha(j.at("alpha"), at + "/alpha");
    if (j.contains("twist")) {
        if (m.family != "radial") throw SchemaError(at + "/twist", "only valid for the radial family");
        m.twist = get_real(j, "twist", at);
    }
    if (j.contains("beta")) {
        if (m.family != "plane-extension") throw SchemaError(at + "/beta", "only valid for plane-extension");
        m.beta = get_real(j, "beta", at);
    }
    if (m.family == "conjugated" || m.family == "plane-extension") {
        if (m.family == "plane-extension") m.g.reset();
        if (j.contains("g")) {
            const std::string gat = at + "/g";
            const json& g = j.at("g");
            check_keys(g, gat, {"hamiltonian", "steps", "support_radius"});
            HamiltonianConfig h;
            if (g.contains("hamiltonian")) h.hamiltonian = get_string(g, "hamiltonian", gat);
            bool named = false;
            for (const auto& n : ConjugacyMap::hamiltonian_names()) named = named || n == h.hamiltonian;
            if (!named) throw SchemaError(gat + "/hamiltonian", "unknown hamiltonian '" + h.hamiltonian + "'");
            if (g.contains("steps")) h.steps = static_cast<int>(get_int(g, "steps", gat, 1));
            if (g.contains("support_radius")) {
                h.support_radius = get_real(g, "support_radius", gat);
                if (!(h.support_radius > 0.0 && h.support_radius < 1.0))
                    throw SchemaError(gat + "/support_radius", "must lie in (0, 1)");
            }
            m.g = h;
        }
    } else {
        if (j.contains("g")) throw SchemaError(at + "/g", "only valid for conjugated and plane-extension");
        m.g.reset();
    }
    if (m.family == "plane-extension" && !(m.beta > m.alpha))
        throw SchemaError(at + "/beta", "must exceed alpha");
    return m;
}

/// A command, its map and its parameters.
struct ExperimentConfig {
    std::string command;
    MapConfig map;
    std::uint64_t seed = 1;
    std::size_t samples = 100000;
    long n = 256;
    std::size_t pairs = 100;
    long nmax = 32;
    int count = 10;
    std::string conv = "2/3";
    double tol = 0.05;
    std::string pairs_file;
    std::string out = "out";

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;

    static std::vector<std::string> commands() {
        return {"winding",       "action",          "calabi",        "mean-action", "linking",
                "righthand",     "foliation-check", "strip-measure", "convergents", "thm41-bound"};
    }

    std::pair<long long, long long> convergent() const {
        const auto slash = conv.find('/');
        try {
            if (slash == std::string::npos) throw std::invalid_argument(conv);
            std::size_t pa = 0;
            std::size_t pb = 0;
            const long long a = std::stoll(conv.substr(0, slash), &pa);
            const long long b = std::stoll(conv.substr(slash + 1), &pb);
            if (pa != slash || pb != conv.size() - slash - 1 || b < 1) throw std::invalid_argument(conv);
            return {a, b};
        } catch (const std::logic_error&) {
            throw SchemaError("/conv", "expected a/b with b >= 1, got '" + conv + "'");
        }
    }
};

inline json to_json(const ExperimentConfig& c) {
    return {{"command", c.command}, {"map", to_json(c.map)}, {"seed", c.seed},   {"samples", c.samples},
            {"n", c.n},             {"pairs", c.pairs},      {"nmax", c.nmax},   {"count", c.count},
            {"conv", c.conv},       {"tol", c.tol},          {"pairs_file", c.pairs_file}, {"out", c.out}};
}

inline ExperimentConfig experiment_from_json(const json& j) {
    using namespace detail;
    check_keys(j, "", {"command", "map", "seed", "samples", "n", "pairs", "nmax", "count", "conv", "tol",
                       "pairs_file", "out"});
    ExperimentConfig c;
    if (j.contains("command")) {
        c.command = get_string(j, "command", "");
        bool known = false;
        for (const auto& k : ExperimentConfig::commands()) known = known || k == c.command;
        if (!known) throw SchemaError("/command", "unknown command '" + c.command + "'");
    }
    if (j.contains("map")) c.map = map_from_json(j.at("map"), "/map");
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) throw SchemaError("/seed", "expected a non-negative integer");
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("samples")) c.samples = static_cast<std::size_t>(get_int(j, "samples", "", 1));
    if (j.contains("n")) c.n = static_cast<long>(get_int(j, "n", "", 1));
    if (j.contains("pairs")) c.pairs = static_cast<std::size_t>(get_int(j, "pairs", "", 1));
    if (j.contains("nmax")) c.nmax = static_cast<long>(get_int(j, "nmax", "", 1));
    if (j.contains("count")) c.count = static_cast<int>(get_int(j, "count", "", 1));
    if (j.contains("conv")) c.conv = get_string(j, "conv", "");
    if (j.contains("tol")) c.tol = get_real(j, "tol", "");
    if (j.contains("pairs_file")) c.pairs_file = get_string(j, "pairs_file", "");
    if (j.contains("out")) c.out = get_string(j, "out", "");
    return c;
}

/// Parses text as JSON, mapping syntax errors to SchemaError at the root.
inline json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError("", std::string("malformed JSON: ") + e.what());
    }
}

}  // namespace diskrot
