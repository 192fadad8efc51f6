#include "optomech/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "optomech/csv.hpp"
#include "optomech/errors.hpp"

namespace optomech {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Removes a trailing '#' comment that is not inside double quotes.
std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') quoted = !quoted;
        if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

const std::vector<std::string> kRateKeys = {"omega", "Omega", "kappa", "Gamma", "g0", "g1",
                                            "g2",    "g3",    "g4",    "detuning"};
const std::vector<std::string> kRunFrequencyKeys = {"w_min", "w_max"};
const std::vector<std::string> kPathKeys = {"output", "psd_output"};

bool contains(const std::vector<std::string>& v, const std::string& k) {
    return std::find(v.begin(), v.end(), k) != v.end();
}

}  // namespace

const std::vector<std::string>& param_keys() {
    static const std::vector<std::string> keys = {
        "units", "omega", "Omega", "kappa", "Gamma", "g0", "g1", "g2", "g3", "g4", "alpha", "alpha_im",
        "detuning", "detuning_reference", "m_th", "x_zp", "cavity_length"};
    return keys;
}

const std::vector<std::string>& run_keys() {
    static const std::vector<std::string> keys = {
        "model", "convention", "branch", "phonon_noise", "noise_ordering", "basis", "grid", "w_min", "w_max",
        "points", "dense_points", "seed", "T", "dt", "trajectories", "segment", "overlap", "burn_in", "stride",
        "alpha_min", "alpha_max", "alpha_points", "sweep_key", "sweep_from", "sweep_to", "sweep_points",
        "sweep_scale", "truncation", "margin", "tolerance", "check", "source", "engine", "output", "psd_output"};
    return keys;
}

double parse_number(const std::string& text, const std::string& what) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto* first = t.data();
    const auto* last = t.data() + t.size();
    const auto res = std::from_chars(first, last, v);
    if (t.empty() || res.ec != std::errc() || res.ptr != last || !std::isfinite(v)) {
        throw ValidationError(what + ": expected a finite number, got '" + t + "'");
    }
    return v;
}

std::string to_string(DetuningReference r) { return r == DetuningReference::bare ? "bare" : "shifted"; }

std::optional<std::string> RunConfig::get(const std::string& key) const {
    const auto it = run.find(key);
    if (it == run.end()) return std::nullopt;
    return it->second;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
    const auto v = get(key);
    return v ? parse_number(*v, "run." + key) : fallback;
}

long long RunConfig::get_int(const std::string& key, long long fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    long long out = 0;
    const std::string t = trim(*v);
    const auto res = std::from_chars(t.data(), t.data() + t.size(), out);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
        throw ValidationError("run." + key + ": expected an integer, got '" + t + "'");
    }
    return out;
}

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
    const auto v = get(key);
    return v ? *v : fallback;
}

void set_param(SystemParams& p, const std::string& key, double value) {
    if (key == "omega") p.omega = value;
    else if (key == "Omega") p.Omega = value;
    else if (key == "kappa") p.kappa = value;
    else if (key == "Gamma") p.Gamma = value;
    else if (key == "g0") p.g0 = value;
    else if (key == "g1") p.g1 = value;
    else if (key == "g2") p.g2 = value;
    else if (key == "g3") p.g3 = value;
    else if (key == "g4") p.g4 = value;
    else if (key == "alpha") p.alpha = cplx(value, p.alpha.imag());
    else if (key == "alpha_im") p.alpha = cplx(p.alpha.real(), value);
    else if (key == "detuning") p.detuning = value;
    else if (key == "m_th") p.m_th = value;
    else if (key == "x_zp") p.x_zp = value;
    else if (key == "cavity_length") p.cavity_length = value;
    else throw ValidationError("unknown numeric parameter '" + key + "'");
}

double get_param(const SystemParams& p, const std::string& key) {
    if (key == "omega") return p.omega;
    if (key == "Omega") return p.Omega;
    if (key == "kappa") return p.kappa;
    if (key == "Gamma") return p.Gamma;
    if (key == "g0") return p.g0;
    if (key == "g1") return p.g1;
    if (key == "g2") return p.g2;
    if (key == "g3") return p.g3;
    if (key == "g4") return p.g4;
    if (key == "alpha") return p.alpha.real();
    if (key == "alpha_im") return p.alpha.imag();
    if (key == "detuning") return p.detuning;
    if (key == "m_th") return p.m_th;
    if (key == "x_zp" && p.x_zp) return *p.x_zp;
    if (key == "cavity_length" && p.cavity_length) return *p.cavity_length;
    throw ValidationError("unknown or unset numeric parameter '" + key + "'");
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::map<std::string, std::pair<std::string, int>> params;  // key -> (value, line)
    std::set<std::string> run_seen;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("malformed section header '" + line + "'", line_no);
            section = trim(line.substr(1, line.size() - 2));
            if (section != "params" && section != "run") {
                throw ConfigError("unknown section [" + section + "]", line_no);
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line_no);
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key", line_no);
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        } else if (value.empty()) {
            throw ConfigError("empty value for '" + key + "'", line_no);
        }
        if (section.empty()) throw ConfigError("key '" + key + "' outside of a section", line_no);
        if (section == "params") {
            if (!contains(param_keys(), key)) throw ConfigError("unknown key '" + key + "' in [params]", line_no);
            if (params.count(key)) throw ConfigError("duplicate key '" + key + "'", line_no);
            params[key] = {value, line_no};
        } else {
            if (!contains(run_keys(), key)) throw ConfigError("unknown key '" + key + "' in [run]", line_no);
            if (run_seen.count(key)) throw ConfigError("duplicate key '" + key + "'", line_no);
            run_seen.insert(key);
            cfg.run[key] = value;
        }
    }

    double rate_scale = 1.0;
    if (auto it = params.find("units"); it != params.end()) {
        std::string u = it->second.first;
        std::transform(u.begin(), u.end(), u.begin(), [](unsigned char c) { return std::tolower(c); });
        if (u == "hz") rate_scale = 2.0 * std::numbers::pi;
        else if (u != "rad" && u != "rad/s") throw ConfigError("units must be 'rad' or 'hz'", it->second.second);
    }

    SystemParams& p = cfg.params;
    for (const auto& [key, entry] : params) {
        const auto& [value, line] = entry;
        if (key == "units") continue;
        try {
            if (key == "detuning_reference") {
                if (value == "bare") p.detuning_reference = DetuningReference::bare;
                else if (value == "shifted") p.detuning_reference = DetuningReference::shifted;
                else throw ValidationError("detuning_reference must be 'bare' or 'shifted'");
                continue;
            }
            double v = parse_number(value, key);
            if (contains(kRateKeys, key)) v *= rate_scale;
            if (key == "alpha" || key == "alpha_im") v *= std::sqrt(rate_scale);
            set_param(p, key, v);
        } catch (const ConfigError&) {
            throw;
        } catch (const ValidationError& e) {
            throw ConfigError(e.what(), line);
        }
    }
    for (const auto& key : kRunFrequencyKeys) {
        if (auto it = cfg.run.find(key); it != cfg.run.end() && rate_scale != 1.0) {
            it->second = format_double(parse_number(it->second, "run." + key) * rate_scale);
        }
    }
    for (const auto& key : kPathKeys) {
        if (auto it = cfg.run.find(key); it != cfg.run.end() && it->second != "-") {
            it->second = std::filesystem::absolute(it->second).lexically_normal().string();
        }
    }

    const bool any_rate = params.count("g1") || params.count("g2") || params.count("g3") || params.count("g4");
    if (!any_rate && params.count("g0") && params.count("x_zp") && params.count("cavity_length")) {
        try {
            const auto r = derive_rates(p.g0, p.omega, p.Omega, *p.x_zp, *p.cavity_length);
            p.g1 = r.g1;
            p.g2 = r.g2;
            p.g3 = r.g3;
            p.g4 = r.g4;
            cfg.rates_derived = true;
        } catch (const ValidationError& e) {
            throw ConfigError(e.what(), params.at("g0").second);
        }
    }
    try {
        p.validate();
    } catch (const ValidationError& e) {
        throw ConfigError(std::string("invalid parameters: ") + e.what(), 0);
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what(), 0);
    }
}

std::string RunConfig::resolved_text() const {
    std::ostringstream out;
    const SystemParams& p = params;
    out << "[params]\n";
    out << "units = rad\n";
    for (const auto& key : std::vector<std::string>{"omega", "Omega", "kappa", "Gamma", "g0", "g1", "g2", "g3",
                                                    "g4", "alpha", "alpha_im", "detuning", "m_th"}) {
        out << key << " = " << format_double(get_param(p, key)) << "\n";
    }
    out << "detuning_reference = " << to_string(p.detuning_reference) << "\n";
    if (p.x_zp) out << "x_zp = " << format_double(*p.x_zp) << "\n";
    if (p.cavity_length) out << "cavity_length = " << format_double(*p.cavity_length) << "\n";
    out << "[run]\n";
    for (const auto& [k, v] : run) out << k << " = " << v << "\n";
    return out.str();
}

}  // namespace optomech
