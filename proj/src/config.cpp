#include "gcs/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace gcs::cli {

InitialData RunConfig::initial_data() const {
    if (initial == "constant") return ConstantInit{initial_value};
    if (initial == "random") return RandomInit{random_seed, random_lower, random_upper};
    if (initial == "dirac") return DiracInit{dirac_z};
    throw ConfigError("initial must be constant, random or dirac (got '" + initial + "')");
}

fem::FemConfig RunConfig::fem_config() const {
    fem::FemConfig cfg;
    cfg.grid = Grid(n_cells, params.eps);
    cfg.dt = dt;
    cfg.t_max = t_max;
    cfg.snapshot_times = snapshot_times;
    cfg.stop_at_threshold = stop_at_threshold;
    return cfg;
}

std::vector<double> RunConfig::sweep_values() const {
    if (sweep_count < 2) throw ConfigError("sweep_count must be >= 2");
    std::vector<double> vals(sweep_count);
    if (sweep_spacing == "lin") {
        for (int i = 0; i < sweep_count; ++i)
            vals[i] = sweep_start + (sweep_stop - sweep_start) * i / (sweep_count - 1);
    } else if (sweep_spacing == "log") {
        if (!(sweep_start > 0.0 && sweep_stop > 0.0))
            throw ConfigError("log spacing needs positive sweep bounds");
        double l0 = std::log(sweep_start), l1 = std::log(sweep_stop);
        for (int i = 0; i < sweep_count; ++i)
            vals[i] = std::exp(l0 + (l1 - l0) * i / (sweep_count - 1));
    } else {
        throw ConfigError("sweep_spacing must be lin or log (got '" + sweep_spacing + "')");
    }
    return vals;
}

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    auto e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
    }
}

int parse_int(const std::string& key, const std::string& v) {
    double x = parse_double(key, v);
    int n = static_cast<int>(std::lround(x));
    if (std::abs(x - n) > 1e-9) throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
    return n;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ConfigError("key '" + key + "': expected a boolean, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(key, item));
    }
    return out;
}

} // namespace

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "q0", "q1", "d", "mu", "eps", "rho0", "s0",
        "n_cells", "dt", "t_max", "stop_at_threshold", "snapshot_times",
        "initial", "initial_value", "random_seed", "random_lower", "random_upper", "dirac_z",
        "modes",
        "sweep_axis", "sweep_start", "sweep_stop", "sweep_count", "sweep_spacing",
    };
    return keys;
}

KeyValues parse_config_text(const std::string& text) {
    KeyValues pairs;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        pairs.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return pairs;
}

KeyValues parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

RunConfig build_config(const KeyValues& file_pairs, const KeyValues& overrides) {
    RunConfig cfg;
    auto apply = [&](const std::string& key, const std::string& value) {
        if (key == "q0") cfg.params.q0 = parse_double(key, value);
        else if (key == "q1") cfg.params.q1 = parse_double(key, value);
        else if (key == "d") cfg.params.d = parse_double(key, value);
        else if (key == "mu") cfg.params.mu = parse_double(key, value);
        else if (key == "eps") cfg.params.eps = parse_double(key, value);
        else if (key == "rho0") cfg.params.rho0 = parse_double(key, value);
        else if (key == "s0") cfg.params.s0 = parse_double(key, value);
        else if (key == "n_cells") cfg.n_cells = parse_int(key, value);
        else if (key == "dt") cfg.dt = parse_double(key, value);
        else if (key == "t_max") cfg.t_max = parse_double(key, value);
        else if (key == "stop_at_threshold") cfg.stop_at_threshold = parse_bool(key, value);
        else if (key == "snapshot_times") cfg.snapshot_times = parse_list(key, value);
        else if (key == "initial") cfg.initial = value;
        else if (key == "initial_value") cfg.initial_value = parse_double(key, value);
        else if (key == "random_seed") cfg.random_seed = static_cast<std::uint64_t>(parse_double(key, value));
        else if (key == "random_lower") cfg.random_lower = parse_double(key, value);
        else if (key == "random_upper") cfg.random_upper = parse_double(key, value);
        else if (key == "dirac_z") cfg.dirac_z = parse_double(key, value);
        else if (key == "modes") cfg.modes = parse_int(key, value);
        else if (key == "sweep_axis") cfg.sweep_axis = value;
        else if (key == "sweep_start") cfg.sweep_start = parse_double(key, value);
        else if (key == "sweep_stop") cfg.sweep_stop = parse_double(key, value);
        else if (key == "sweep_count") cfg.sweep_count = parse_int(key, value);
        else if (key == "sweep_spacing") cfg.sweep_spacing = value;
        else throw ConfigError("unknown config key '" + key + "'");
        cfg.keys_set.push_back(key);
    };
    for (const auto& [k, v] : file_pairs) apply(k, v);
    for (const auto& [k, v] : overrides) apply(k, v);
    cfg.params.validate();
    (void)cfg.initial_data();  // validates the initial-data choice early
    return cfg;
}

} // namespace gcs::cli
