#include "dcal/run_config.hpp"

#include <charconv>
#include <fstream>

namespace dcal {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : value) {
        if (c == ',') {
            parts.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(trim(cur));
    return parts;
}

double parse_real(const std::string& key, const std::string& s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ConfigError("key '" + key + "': cannot parse '" + s + "' as a number");
    }
    return v;
}

std::uint64_t parse_count(const std::string& key, const std::string& s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ConfigError("key '" + key + "': cannot parse '" + s +
                          "' as a nonnegative integer");
    }
    return v;
}

bool parse_bool(const std::string& key, const std::string& s) {
    if (s == "1" || s == "true") return true;
    if (s == "0" || s == "false") return false;
    throw ConfigError("key '" + key + "': expected 0/1/true/false, got '" + s + "'");
}

std::vector<double> parse_real_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    for (const auto& p : split_list(value)) out.push_back(parse_real(key, p));
    return out;
}

std::vector<std::size_t> parse_count_list(const std::string& key, const std::string& value) {
    std::vector<std::size_t> out;
    for (const auto& p : split_list(value)) {
        out.push_back(static_cast<std::size_t>(parse_count(key, p)));
    }
    return out;
}

} // namespace

void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
    if (key == "input") config.input = value;
    else if (key == "out") config.out = value;
    else if (key == "format") {
        if (value != "table" && value != "csv") {
            throw ConfigError("key 'format': expected 'table' or 'csv', got '" + value + "'");
        }
        config.format = value;
    }
    else if (key == "id_col") config.columns.id = value;
    else if (key == "y_col") config.columns.y = value;
    else if (key == "r_col") config.columns.r = value;
    else if (key == "in_b_col") config.columns.in_b = value;
    else if (key == "x_cols") config.columns.x = split_list(value);
    else if (key == "z_cols") config.columns.z = split_list(value);
    else if (key == "missing_token") config.columns.missing_token = value;
    else if (key == "add_intercept") config.add_intercept = parse_bool(key, value);
    else if (key == "design") {
        if (value != "srswor" && value != "census") {
            throw ConfigError("key 'design': expected 'srswor' or 'census', got '" + value +
                              "'");
        }
        config.design = value;
    }
    else if (key == "n_b") {
        config.n_b = static_cast<std::size_t>(parse_count(key, value));
        config.grid.n_b = config.n_b;
    }
    else if (key == "t_x_b") config.t_x_b = parse_real_list(key, value);
    else if (key == "t_z") config.t_z = parse_real_list(key, value);
    else if (key == "n_total") config.grid.n_total = static_cast<std::size_t>(parse_count(key, value));
    else if (key == "rho_xy") config.grid.rho_xy_values = parse_real_list(key, value);
    else if (key == "rho_zy") config.grid.rho_zy_values = parse_real_list(key, value);
    else if (key == "n_resp") config.grid.n_resp_values = parse_count_list(key, value);
    else if (key == "sample_sizes") config.grid.sample_sizes = parse_count_list(key, value);
    else if (key == "replicates") {
        const auto v = parse_count(key, value);
        if (v == 0) throw ConfigError("key 'replicates': must be positive");
        config.grid.replicates = static_cast<std::size_t>(v);
    }
    else if (key == "seed") config.grid.master_seed = parse_count(key, value);
    else if (key == "threads") config.grid.threads = static_cast<unsigned>(parse_count(key, value));
    else if (key == "rho_xz_policy") {
        if (value == "grid") config.grid.rho_xz_policy = RhoXzPolicy::GridFeasible;
        else if (value == "minimal") config.grid.rho_xz_policy = RhoXzPolicy::MinimalFeasible;
        else if (value == "explicit") config.grid.rho_xz_policy = RhoXzPolicy::Explicit;
        else {
            throw ConfigError("key 'rho_xz_policy': expected grid|minimal|explicit, got '" +
                              value + "'");
        }
    }
    else if (key == "rho_xz") config.grid.rho_xz_value = parse_real(key, value);
    else if (key == "epsilon") config.grid.epsilon = parse_real(key, value);
    else if (key == "grid_step") config.grid.grid_step = parse_real(key, value);
    else if (key == "mean_x") config.grid.moments.mean_x = parse_real(key, value);
    else if (key == "mean_z") config.grid.moments.mean_z = parse_real(key, value);
    else if (key == "mean_y") config.grid.moments.mean_y = parse_real(key, value);
    else if (key == "var_x") config.grid.moments.var_x = parse_real(key, value);
    else if (key == "var_z") config.grid.moments.var_z = parse_real(key, value);
    else if (key == "var_y") config.grid.moments.var_y = parse_real(key, value);
    else throw ConfigError("unknown config key '" + key + "'");
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    RunConfig config;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected key=value, got '" + line + "'");
        }
        apply_setting(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return config;
}

} // namespace dcal
