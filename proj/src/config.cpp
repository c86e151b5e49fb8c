#include "ocp/config.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <vector>

namespace ocp {

bool RunConfig::operator==(const RunConfig& other) const {
    return algorithm == other.algorithm && env.kind == other.env.kind &&
           env.label_count == other.env.label_count && env.beta_a == other.env.beta_a &&
           env.beta_b == other.env.beta_b && env.exponents == other.env.exponents &&
           env.phase_ends == other.env.phase_ends && env.shift_fraction == other.env.shift_fraction &&
           env.sigma_pre == other.env.sigma_pre && env.sigma_post == other.env.sigma_post &&
           env.bin_count == other.env.bin_count && env.window == other.env.window &&
           env.margin == other.env.margin && env.replay_path == other.env.replay_path && k == other.k &&
           horizon == other.horizon && alpha == other.alpha && c == other.c && rho == other.rho &&
           delta == other.delta && seed == other.seed && seed_count == other.seed_count &&
           out_dir == other.out_dir && gamma_override == other.gamma_override &&
           eta_override == other.eta_override && beta_override == other.beta_override;
}

namespace {

// Shortest decimal form that reparses to the same double. 9 significant
// digits cover every value a config normally holds; arbitrary doubles fall
// back to 17.
std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    if (std::strtod(buf, nullptr) != v) std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string num_list(const std::vector<double>& vs) {
    std::string out;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i) out += ',';
        out += num(vs[i]);
    }
    return out;
}

std::string int_list(const std::vector<long long>& vs) {
    std::string out;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(vs[i]);
    }
    return out;
}

double parse_num(const std::string& field, const std::string& s) {
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (s.empty() || errno != 0 || end != s.c_str() + s.size())
        throw ConfigError(field, "expected a number, got '" + s + "'");
    return v;
}

long long parse_int(const std::string& field, const std::string& s) {
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || errno != 0 || end != s.c_str() + s.size())
        throw ConfigError(field, "expected an integer, got '" + s + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& field, const std::string& s) {
    errno = 0;
    char* end = nullptr;
    unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || errno != 0 || end != s.c_str() + s.size())
        throw ConfigError(field, "expected an unsigned integer, got '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        std::size_t next = s.find(sep, pos);
        out.push_back(s.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

}  // namespace

void validate_config(const RunConfig& cfg) {
    if (cfg.k < 2) throw ConfigError("K", "must be >= 2");
    if (cfg.horizon < 1) throw ConfigError("T", "must be >= 1");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 0.5)) throw ConfigError("alpha", "must lie in (0, 0.5)");
    if (!(cfg.c > 0.0)) throw ConfigError("c", "must be > 0");
    if (cfg.rho < 0.0) throw ConfigError("rho", "must be >= 0");
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw ConfigError("delta", "must lie in (0, 1)");
    if (cfg.seed_count < 1) throw ConfigError("seeds", "must be >= 1");
    if (cfg.out_dir.empty()) throw ConfigError("out", "must be nonempty");
    if (cfg.gamma_override && !(*cfg.gamma_override >= 0.0 && *cfg.gamma_override < 1.0))
        throw ConfigError("gamma_override", "must lie in [0, 1)");
    if (cfg.eta_override && !(*cfg.eta_override > 0.0)) throw ConfigError("eta_override", "must be > 0");
    if (cfg.beta_override && !(*cfg.beta_override > 0.0 && *cfg.beta_override <= 1.0))
        throw ConfigError("beta_override", "must lie in (0, 1]");
    // Environment parameter ranges that do not need the grid.
    if (cfg.env.label_count < 1) throw ConfigError("env.L", "must be >= 1");
    if (!(cfg.env.beta_a > 0.0)) throw ConfigError("env.beta_a", "must be > 0");
    if (!(cfg.env.beta_b > 0.0)) throw ConfigError("env.beta_b", "must be > 0");
    if (!(cfg.env.shift_fraction > 0.0 && cfg.env.shift_fraction < 1.0))
        throw ConfigError("env.shift_fraction", "must lie in (0, 1)");
    if (!(cfg.env.sigma_pre > 0.0)) throw ConfigError("env.sigma_pre", "must be > 0");
    if (!(cfg.env.sigma_post > 0.0)) throw ConfigError("env.sigma_post", "must be > 0");
    if (cfg.env.bin_count < 2) throw ConfigError("env.bins", "must be >= 2");
    if (cfg.env.window < 1) throw ConfigError("env.window", "must be >= 1");
    if (!(cfg.env.margin > 0.0 && cfg.env.margin < 1.0)) throw ConfigError("env.epsilon", "must lie in (0, 1)");
    if (cfg.env.kind == EnvKind::replay && cfg.env.replay_path.empty())
        throw ConfigError("env.path", "replay environment needs a file path");
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    long long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));

        if (key == "algorithm") {
            auto v = variant_from_name(value);
            if (!v) throw ConfigError(key, "must be one of exp3p, bandit, unlock, unlock-plus");
            cfg.algorithm = *v;
        } else if (key == "K") {
            cfg.k = static_cast<int>(parse_int(key, value));
        } else if (key == "T") {
            cfg.horizon = parse_int(key, value);
        } else if (key == "alpha") {
            cfg.alpha = parse_num(key, value);
        } else if (key == "c") {
            cfg.c = parse_num(key, value);
        } else if (key == "rho") {
            cfg.rho = parse_num(key, value);
        } else if (key == "delta") {
            cfg.delta = parse_num(key, value);
        } else if (key == "seed") {
            cfg.seed = parse_u64(key, value);
        } else if (key == "seeds") {
            cfg.seed_count = static_cast<int>(parse_int(key, value));
        } else if (key == "out") {
            cfg.out_dir = value;
        } else if (key == "gamma_override") {
            if (!value.empty()) cfg.gamma_override = parse_num(key, value);
        } else if (key == "eta_override") {
            if (!value.empty()) cfg.eta_override = parse_num(key, value);
        } else if (key == "beta_override") {
            if (!value.empty()) cfg.beta_override = parse_num(key, value);
        } else if (key == "env.kind") {
            if (value == "iid") cfg.env.kind = EnvKind::iid;
            else if (value == "exponent") cfg.env.kind = EnvKind::exponent_schedule;
            else if (value == "shift") cfg.env.kind = EnvKind::covariate_shift;
            else if (value == "adaptive") cfg.env.kind = EnvKind::adaptive;
            else if (value == "replay") cfg.env.kind = EnvKind::replay;
            else throw ConfigError(key, "must be one of iid, exponent, shift, adaptive, replay");
        } else if (key == "env.L") {
            cfg.env.label_count = static_cast<int>(parse_int(key, value));
        } else if (key == "env.beta_a") {
            cfg.env.beta_a = parse_num(key, value);
        } else if (key == "env.beta_b") {
            cfg.env.beta_b = parse_num(key, value);
        } else if (key == "env.exponents") {
            cfg.env.exponents.clear();
            for (const auto& tok : split(value, ',')) cfg.env.exponents.push_back(parse_num(key, trim(tok)));
        } else if (key == "env.phase_ends") {
            cfg.env.phase_ends.clear();
            if (!value.empty())
                for (const auto& tok : split(value, ',')) cfg.env.phase_ends.push_back(parse_int(key, trim(tok)));
        } else if (key == "env.shift_fraction") {
            cfg.env.shift_fraction = parse_num(key, value);
        } else if (key == "env.sigma_pre") {
            cfg.env.sigma_pre = parse_num(key, value);
        } else if (key == "env.sigma_post") {
            cfg.env.sigma_post = parse_num(key, value);
        } else if (key == "env.bins") {
            cfg.env.bin_count = static_cast<int>(parse_int(key, value));
        } else if (key == "env.window") {
            cfg.env.window = static_cast<int>(parse_int(key, value));
        } else if (key == "env.epsilon") {
            cfg.env.margin = parse_num(key, value);
        } else if (key == "env.path") {
            cfg.env.replay_path = value;
        } else {
            throw ConfigError(key, "unknown key");
        }
    }
    validate_config(cfg);
    return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
    std::string kind;
    switch (cfg.env.kind) {
        case EnvKind::iid: kind = "iid"; break;
        case EnvKind::exponent_schedule: kind = "exponent"; break;
        case EnvKind::covariate_shift: kind = "shift"; break;
        case EnvKind::adaptive: kind = "adaptive"; break;
        case EnvKind::replay: kind = "replay"; break;
    }
    std::ostringstream out;
    out << "algorithm = " << variant_name(cfg.algorithm) << '\n'
        << "K = " << cfg.k << '\n'
        << "T = " << cfg.horizon << '\n'
        << "alpha = " << num(cfg.alpha) << '\n'
        << "c = " << num(cfg.c) << '\n'
        << "rho = " << num(cfg.rho) << '\n'
        << "delta = " << num(cfg.delta) << '\n'
        << "seed = " << cfg.seed << '\n'
        << "seeds = " << cfg.seed_count << '\n'
        << "out = " << cfg.out_dir << '\n'
        << "gamma_override = " << (cfg.gamma_override ? num(*cfg.gamma_override) : "") << '\n'
        << "eta_override = " << (cfg.eta_override ? num(*cfg.eta_override) : "") << '\n'
        << "beta_override = " << (cfg.beta_override ? num(*cfg.beta_override) : "") << '\n'
        << "env.kind = " << kind << '\n'
        << "env.L = " << cfg.env.label_count << '\n'
        << "env.beta_a = " << num(cfg.env.beta_a) << '\n'
        << "env.beta_b = " << num(cfg.env.beta_b) << '\n'
        << "env.exponents = " << num_list(cfg.env.exponents) << '\n'
        << "env.phase_ends = " << int_list(cfg.env.phase_ends) << '\n'
        << "env.shift_fraction = " << num(cfg.env.shift_fraction) << '\n'
        << "env.sigma_pre = " << num(cfg.env.sigma_pre) << '\n'
        << "env.sigma_post = " << num(cfg.env.sigma_post) << '\n'
        << "env.bins = " << cfg.env.bin_count << '\n'
        << "env.window = " << cfg.env.window << '\n'
        << "env.epsilon = " << num(cfg.env.margin) << '\n'
        << "env.path = " << cfg.env.replay_path << '\n';
    return out.str();
}

std::string config_digest(const RunConfig& cfg) {
    const std::string doc = serialize_config(cfg);
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char ch : doc) {
        h ^= ch;
        h *= 0x100000001B3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace ocp
