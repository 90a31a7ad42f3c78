// config.hpp
// key=value experiment files: one key per line, '#' starts a comment. Angles accept
// "pi" expressions such as pi, -pi/2, 2pi/3, 0.25*pi.

#pragma once

#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rotorlab/error.hpp"
#include "rotorlab/experiments/preset.hpp"

namespace rotorlab::experiments {

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline bool parse_plain_number(std::string_view s, double& out) {
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end && std::isfinite(out);
}

// number | [number[*]]pi[/number]
inline double parse_real(const std::string& text, int line, const std::string& key) {
    double v = 0.0;
    if (parse_plain_number(text, v)) return v;
    const auto pos = text.find("pi");
    if (pos != std::string::npos) {
        std::string pre = text.substr(0, pos);
        std::string post = text.substr(pos + 2);
        if (!pre.empty() && pre.back() == '*') pre.pop_back();
        double factor = 1.0;
        if (pre == "-") factor = -1.0;
        else if (!pre.empty() && !parse_plain_number(pre, factor)) factor = NAN;
        double divisor = 1.0;
        if (!post.empty()) {
            if (post.front() != '/' || !parse_plain_number(std::string_view(post).substr(1), divisor) || divisor == 0.0)
                divisor = NAN;
        }
        if (std::isfinite(factor) && std::isfinite(divisor)) return factor * pi / divisor;
    }
    throw ConfigError("key '" + key + "': cannot parse '" + text + "' as a number", line);
}

inline int parse_int(const std::string& text, int line, const std::string& key) {
    int v = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end || text.empty())
        throw ConfigError("key '" + key + "': cannot parse '" + text + "' as an integer", line);
    return v;
}

inline std::vector<int> parse_int_list(const std::string& text, int line, const std::string& key) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_int(item, line, key));
    }
    return out;
}

}  // namespace detail

inline const std::set<std::string>& config_keys() {
    static const std::set<std::string> keys{
        "name",      "mode",        "tau",           "k",       "m",        "n",       "alpha",
        "beta",      "basis_kind",  "kicks",         "basis",   "r",        "realizations",
        "seed",      "entropy_every", "samples_per_line", "markers", "snapshots", "tails",
        "rmt_seeds", "rmt_bandwidth"};
    return keys;
}

inline ExperimentPreset parse_config(const std::string& text) {
    std::map<std::string, std::pair<std::string, int>> values;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + line + "'", line_no);
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (!config_keys().contains(key)) throw ConfigError("unknown key '" + key + "'", line_no);
        if (values.contains(key)) throw ConfigError("duplicate key '" + key + "'", line_no);
        if (value.empty()) throw ConfigError("key '" + key + "' has no value", line_no);
        values[key] = {value, line_no};
    }

    std::vector<std::string> missing;
    for (const char* req : {"tau", "k", "m", "n"})
        if (!values.contains(req)) missing.emplace_back(req);
    if (!missing.empty()) {
        std::string msg = "missing required keys";
        for (std::size_t i = 0; i < missing.size(); ++i) msg += (i ? ", " : " ") + missing[i];
        throw ConfigError(msg);
    }

    auto real = [&](const std::string& key, double fallback) {
        auto it = values.find(key);
        return it == values.end() ? fallback : detail::parse_real(it->second.first, it->second.second, key);
    };
    auto integer = [&](const std::string& key, int fallback) {
        auto it = values.find(key);
        return it == values.end() ? fallback : detail::parse_int(it->second.first, it->second.second, key);
    };
    auto line_of = [&](const std::string& key) {
        auto it = values.find(key);
        return it == values.end() ? 0 : it->second.second;
    };
    auto range_check = [&](bool ok, const std::string& key, const std::string& range) {
        if (!ok) throw ConfigError(key + " must satisfy " + range, line_of(key));
    };

    ExperimentPreset p;
    p.name = values.contains("name") ? values["name"].first : "custom";
    if (values.contains("mode")) {
        try {
            p.mode = parse_mode(values["mode"].first);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what(), line_of("mode"));
        }
    }

    const double tau = real("tau", 0.0);
    const double k = real("k", 0.0);
    range_check(tau > 0.0, "tau", "tau > 0");
    range_check(k >= 0.0, "k", "k >= 0");
    const int kicks = integer("kicks", 60);
    range_check(kicks >= 0, "kicks", "kicks >= 0");
    const int basis = integer("basis", 0);
    range_check(basis == 0 || (basis >= 2 && basis % 2 == 0), "basis", "basis = 0 (auto) or an even integer >= 2");
    p.auto_basis = basis == 0;
    p.params = SimulationParams(tau, k, basis == 0 ? 256 : basis, kicks);

    p.spec.m = integer("m", 0);
    p.spec.n = integer("n", 0);
    p.spec.alpha = real("alpha", pi / 4);
    p.spec.beta = real("beta", 0.0);
    range_check(p.spec.alpha >= 0.0 && p.spec.alpha <= pi / 2 + 1e-15, "alpha", "alpha in [0, pi/2]");
    p.spec.alpha = std::min(p.spec.alpha, pi / 2);
    range_check(p.spec.beta >= 0.0 && p.spec.beta < two_pi, "beta", "beta in [0, 2pi)");
    if (values.contains("basis_kind")) {
        const auto& v = values["basis_kind"].first;
        if (v == "momentum") p.spec.basis_kind = BasisKind::momentum;
        else if (v == "sine") p.spec.basis_kind = BasisKind::sine_parity;
        else if (v == "cosine") p.spec.basis_kind = BasisKind::cosine_parity;
        else throw ConfigError("basis_kind must be one of momentum, sine, cosine", line_of("basis_kind"));
    }
    if (p.spec.m == p.spec.n) throw ConfigError("m and n must differ", line_of("n"));
    if (p.spec.basis_kind != BasisKind::momentum)
        range_check(p.spec.m >= 1 && p.spec.n >= 1, "m", "m, n >= 1 for parity bases");

    const bool has_decoherence_keys =
        values.contains("r") || values.contains("realizations") || values.contains("entropy_every");
    if (p.mode == Mode::decoherence || has_decoherence_keys) {
        DecoherenceConfig dc;
        dc.r = real("r", 0.0);
        range_check(dc.r >= 0.0 && dc.r <= 1.0, "r", "r in [0, 1]");
        dc.n_realizations = integer("realizations", 100);
        range_check(dc.n_realizations >= 2, "realizations", "realizations >= 2");
        dc.entropy_every = integer("entropy_every", 1);
        range_check(dc.entropy_every >= 0, "entropy_every", "entropy_every >= 0");
        dc.seed = static_cast<std::uint64_t>(integer("seed", 0));
        p.decoherence = dc;
    }
    p.samples_per_line = integer("samples_per_line", p.samples_per_line);
    range_check(p.samples_per_line >= 1, "samples_per_line", "samples_per_line >= 1");
    p.rmt_seeds = integer("rmt_seeds", p.rmt_seeds);
    range_check(p.rmt_seeds >= 1, "rmt_seeds", "rmt_seeds >= 1");
    p.rmt_bandwidth = integer("rmt_bandwidth", p.rmt_bandwidth);
    if (values.contains("markers")) p.markers = detail::parse_int_list(values["markers"].first, line_of("markers"), "markers");
    if (values.contains("snapshots"))
        p.snapshots = detail::parse_int_list(values["snapshots"].first, line_of("snapshots"), "snapshots");
    if (values.contains("tails")) p.tail_thresholds = detail::parse_int_list(values["tails"].first, line_of("tails"), "tails");
    return p;
}

}  // namespace rotorlab::experiments
