#include "spme/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "spme/error.hpp"

namespace spme {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
    return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
        throw ConfigError(key + ": expected a nonnegative integer, got '" + v + "'");
    }
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no") {
        return false;
    }
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

template <typename T, typename F>
std::vector<T> to_list(const std::string& key, const std::string& v, F convert) {
    std::vector<T> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) {
            throw ConfigError(key + ": empty list entry");
        }
        out.push_back(static_cast<T>(convert(key, item)));
    }
    if (out.empty()) {
        throw ConfigError(key + ": empty list");
    }
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"seed", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.sde.seed = to_uint(k, v);
             c.plan.seed = c.sde.seed;
         }},
        {"n", [](RunConfig& c, const std::string& k, const std::string& v) { c.n = to_uint(k, v); }},
        {"out", [](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = v; }},
        {"alpha", [](RunConfig& c, const std::string& k, const std::string& v) { c.sde.alpha = to_double(k, v); }},
        {"kappa", [](RunConfig& c, const std::string& k, const std::string& v) { c.sde.kappa = to_double(k, v); }},
        {"dt_max", [](RunConfig& c, const std::string& k, const std::string& v) { c.sde.dt_max = to_double(k, v); }},
        {"c_cfl", [](RunConfig& c, const std::string& k, const std::string& v) { c.sde.c_cfl = to_double(k, v); }},
        {"T", [](RunConfig& c, const std::string& k, const std::string& v) { c.sde.T = to_double(k, v); }},
        {"n_out", [](RunConfig& c, const std::string& k, const std::string& v) { c.sde.n_out = to_uint(k, v); }},
        {"substeps",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.sde.substeps = to_uint(k, v); }},
        {"noise_stride",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.sde.noise_stride = to_uint(k, v); }},
        {"max_steps",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.sde.max_steps = to_uint(k, v); }},
        {"policy",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             if (v == "adaptive") {
                 c.sde.policy = StepPolicy::adaptive;
             } else if (v == "fixed_dt") {
                 c.sde.policy = StepPolicy::fixed_dt;
             } else {
                 throw ConfigError(k + ": expected adaptive or fixed_dt, got '" + v + "'");
             }
         }},
        {"truncation",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             if (v == "hard_stop") {
                 c.sde.truncation = Truncation::hard_stop;
             } else if (v == "smooth_sigma") {
                 c.sde.truncation = Truncation::smooth_sigma;
             } else {
                 throw ConfigError(k + ": expected hard_stop or smooth_sigma, got '" + v + "'");
             }
         }},
        {"b0", [](RunConfig& c, const std::string& k, const std::string& v) { c.model.b.c0 = to_double(k, v); }},
        {"b1", [](RunConfig& c, const std::string& k, const std::string& v) { c.model.b.c1 = to_double(k, v); }},
        {"b_mod_amp",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.model.b.profile.amplitude = to_double(k, v); }},
        {"b_mod_freq",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.model.b.profile.frequency = to_double(k, v); }},
        {"r0", [](RunConfig& c, const std::string& k, const std::string& v) { c.model.r.c0 = to_double(k, v); }},
        {"r1", [](RunConfig& c, const std::string& k, const std::string& v) { c.model.r.c1 = to_double(k, v); }},
        {"r_mod_amp",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.model.r.profile.amplitude = to_double(k, v); }},
        {"r_mod_freq",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.model.r.profile.frequency = to_double(k, v); }},
        {"noise_c",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.model.coloring.c = to_double(k, v); }},
        {"noise_q",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.model.coloring.q = to_double(k, v); }},
        {"noise_modes",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.model.coloring.n_modes = to_uint(k, v); }},
        {"u0_kind",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             if (v == "zero") {
                 c.u0.kind = InitialKind::zero;
             } else if (v == "sine_bump") {
                 c.u0.kind = InitialKind::sine_bump;
             } else if (v == "hat") {
                 c.u0.kind = InitialKind::hat;
             } else if (v == "two_bumps") {
                 c.u0.kind = InitialKind::two_bumps;
             } else {
                 throw ConfigError(k + ": expected zero, sine_bump, hat or two_bumps, got '" + v + "'");
             }
         }},
        {"u0_amplitude",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.u0.amplitude = to_double(k, v); }},
        {"u0_power", [](RunConfig& c, const std::string& k, const std::string& v) { c.u0.power = to_double(k, v); }},
        {"levels",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.plan.levels = to_list<std::size_t>(k, v, to_uint);
         }},
        {"paths", [](RunConfig& c, const std::string& k, const std::string& v) { c.plan.paths = to_uint(k, v); }},
        {"coupling",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.plan.coupling = to_bool(k, v); }},
        {"p_list",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.plan.p_list = to_list<double>(k, v, to_double);
         }},
        {"holder_gamma1",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.plan.holder.gamma1 = to_double(k, v); }},
        {"holder_gamma2",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.plan.holder.gamma2 = to_double(k, v); }},
        {"epsilons",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.plan.epsilons = to_list<double>(k, v, to_double);
         }},
        {"stick_quantile",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.plan.stick_quantile = to_double(k, v); }},
        {"threads", [](RunConfig& c, const std::string& k, const std::string& v) { c.plan.threads = to_uint(k, v); }},
    };
    return table;
}

void revalidate(const RunConfig& c) {
    c.sde.validate();
    c.model.b.validate("b");
    c.model.r.validate("r");
    c.model.coloring.validate();
    c.u0.validate();
    if (c.has("n") && c.n == 0) {
        throw ConfigError("n: must be positive");
    }
    if (c.has("levels") || c.has("paths") || c.has("coupling")) {
        c.plan.validate();
    }
}

}  // namespace

void RunConfig::require(const std::string& key) const {
    if (!has(key)) {
        throw ConfigError(key + ": required key missing");
    }
}

RunConfig parse_config(const std::string& text) {
    RunConfig config;
    std::stringstream ss(text);
    std::string line;
    std::size_t number = 0;
    while (std::getline(ss, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(number) + ": expected key=value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) {
            throw ConfigError(key + ": unknown key (line " + std::to_string(number) + ")");
        }
        if (!config.keys.insert(key).second) {
            throw ConfigError(key + ": repeated key (line " + std::to_string(number) + ")");
        }
        if (value.empty()) {
            throw ConfigError(key + ": empty value");
        }
        it->second(config, key, value);
    }
    config.require("seed");
    revalidate(config);
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("config: cannot read " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace spme
