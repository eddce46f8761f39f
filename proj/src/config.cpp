#include "bsphere/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "bsphere/errors.hpp"
#include "bsphere/experiments.hpp"
#include "bsphere/io.hpp"

namespace bsphere {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

double parse_real(std::string_view key, std::string_view text) {
    const std::string s = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
        throw ParameterError("malformed real for " + std::string(key) + ": '" + s + "'");
    return v;
}

template <class T>
T parse_integer(std::string_view key, std::string_view text) {
    const std::string s = trim(text);
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        throw ParameterError("malformed integer for " + std::string(key) + ": '" + s + "'");
    return v;
}

template <class T, class F>
std::vector<T> parse_list(std::string_view text, F&& one) {
    std::vector<T> out;
    const std::string s = trim(text);
    if (s.empty()) return out;
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        out.push_back(one(std::string_view(s).substr(start, comma == std::string::npos ? std::string::npos
                                                                                       : comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::string out;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) out += ',';
        if constexpr (std::is_floating_point_v<T>)
            out += format_real(v[k]);
        else
            out += std::to_string(v[k]);
    }
    return out;
}

std::string join_text(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t k = 0; k < v.size(); ++k) out += (k ? "," : "") + v[k];
    return out;
}

std::string normalize_key(std::string_view key) {
    std::string k = trim(key);
    std::replace(k.begin(), k.end(), '-', '_');
    return k;
}

} // namespace

std::vector<double> parse_real_list(std::string_view text) {
    return parse_list<double>(text, [](std::string_view s) { return parse_real("list", s); });
}

std::vector<std::size_t> parse_size_list(std::string_view text) {
    return parse_list<std::size_t>(text, [](std::string_view s) { return parse_integer<std::size_t>("list", s); });
}

std::vector<int> parse_int_list(std::string_view text) {
    return parse_list<int>(text, [](std::string_view s) { return parse_integer<int>("list", s); });
}

std::string canonical_text(const RunConfig& c) {
    std::map<std::string, std::string> kv{
        {"command", c.command},
        {"profile", c.profile},
        {"root_seed", std::to_string(c.root_seed)},
        {"replicas", std::to_string(c.replicas)},
        {"grid_n", std::to_string(c.grid_n)},
        {"x", format_real(c.x)},
        {"eps_list", join(c.eps_list)},
        {"p_list", join(c.p_list)},
        {"lambda", format_real(c.lambda)},
        {"window_a", format_real(c.window_a)},
        {"window_b", format_real(c.window_b)},
        {"strata", std::to_string(c.strata)},
        {"sigma_cut", format_real(c.sigma_cut)},
        {"ident_tol", format_real(c.ident_tol)},
        {"anchors", std::to_string(c.anchors)},
        {"m_ladder", join(c.m_ladder)},
        {"n_ladder", join(c.n_ladder)},
        {"dt", format_real(c.dt)},
        {"t", format_real(c.t)},
        {"s_fixed", format_real(c.s_fixed)},
        {"functional", c.functional},
        {"level", format_real(c.level)},
        {"input", join_text(c.input)},
    };
    std::string out;
    for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
    return out;
}

std::string config_hash(const RunConfig& c) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical_text(c))));
    return buf;
}

void apply_setting(RunConfig& c, std::string_view key_in, std::string_view value) {
    const std::string key = normalize_key(key_in);
    if (key == "command") c.command = trim(value);
    else if (key == "profile") c.profile = trim(value);
    else if (key == "root_seed") c.root_seed = parse_integer<std::uint64_t>(key, value);
    else if (key == "replicas") c.replicas = parse_integer<std::size_t>(key, value);
    else if (key == "grid_n") c.grid_n = parse_integer<std::size_t>(key, value);
    else if (key == "x") c.x = parse_real(key, value);
    else if (key == "eps_list") c.eps_list = parse_real_list(value);
    else if (key == "p_list") c.p_list = parse_int_list(value);
    else if (key == "lambda") c.lambda = parse_real(key, value);
    else if (key == "window_a") c.window_a = parse_real(key, value);
    else if (key == "window_b") c.window_b = parse_real(key, value);
    else if (key == "strata") c.strata = parse_integer<std::size_t>(key, value);
    else if (key == "sigma_cut") c.sigma_cut = parse_real(key, value);
    else if (key == "ident_tol") c.ident_tol = parse_real(key, value);
    else if (key == "anchors") c.anchors = parse_integer<std::size_t>(key, value);
    else if (key == "m_ladder") c.m_ladder = parse_size_list(value);
    else if (key == "n_ladder") c.n_ladder = parse_size_list(value);
    else if (key == "dt") c.dt = parse_real(key, value);
    else if (key == "t") c.t = parse_real(key, value);
    else if (key == "s_fixed" || key == "s") c.s_fixed = parse_real(key, value);
    else if (key == "functional") c.functional = trim(value);
    else if (key == "level") c.level = parse_real(key, value);
    else if (key == "input") c.input = parse_list<std::string>(value, [](std::string_view s) { return trim(s); });
    else if (key == "workers") c.workers = parse_integer<unsigned>(key, value);
    else if (key == "output_dir") c.output_dir = trim(value);
    else throw ParameterError("unknown configuration key '" + key + "'");
}

void apply_config_text(RunConfig& c, std::string_view text) {
    std::istringstream is{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ParameterError("config line " + std::to_string(lineno) + ": expected key=value");
        apply_setting(c, std::string_view(s).substr(0, eq), std::string_view(s).substr(eq + 1));
    }
}

} // namespace bsphere
