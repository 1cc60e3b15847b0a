#include "fluxlim/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace fluxlim {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw config_error("");
        return x;
    } catch (const std::exception&) {
        throw config_error("config: bad numeric value for " + key + ": '" + v + "'");
    }
}

long to_long(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw config_error("");
        return x;
    } catch (const std::exception&) {
        throw config_error("config: bad integer value for " + key + ": '" + v + "'");
    }
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_double(key, item));
    }
    if (out.empty()) throw config_error("config: empty list for " + key);
    return out;
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::ostringstream os;
            os << "config: line " << lineno << " is not key = value: '" << line << "'";
            throw config_error(os.str());
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty()) {
            std::ostringstream os;
            os << "config: line " << lineno << " has an empty key or value";
            throw config_error(os.str());
        }

        if (key == "N") cfg.model.N = static_cast<int>(to_long(key, val));
        else if (key == "p") cfg.model.p = to_double(key, val);
        else if (key == "M") cfg.model.M = to_double(key, val);
        else if (key == "chi") cfg.model.chi = to_double(key, val);
        else if (key == "gamma") cfg.gamma = to_double(key, val);
        else if (key == "grid_n") cfg.grid_n = static_cast<int>(to_long(key, val));
        else if (key == "clustering_exponent") cfg.clustering_exponent = to_double(key, val);
        else if (key == "dt_init") cfg.solver.dt_init = to_double(key, val);
        else if (key == "dt_min") cfg.solver.dt_min = to_double(key, val);
        else if (key == "dt_max") cfg.solver.dt_max = to_double(key, val);
        else if (key == "u_cap") cfg.solver.u_cap = to_double(key, val);
        else if (key == "tol_step") cfg.solver.tol_step = to_double(key, val);
        else if (key == "dt_growth") cfg.solver.dt_growth = to_double(key, val);
        else if (key == "dt_shrink") cfg.solver.dt_shrink = to_double(key, val);
        else if (key == "scheme") {
            if (val == "imex") cfg.solver.scheme = Scheme::imex;
            else if (val == "fully_implicit") cfg.solver.scheme = Scheme::fully_implicit;
            else throw config_error("config: scheme must be imex or fully_implicit");
        } else if (key == "newton_tol") cfg.solver.newton_tol = to_double(key, val);
        else if (key == "newton_max_iter") cfg.solver.newton_max_iter = static_cast<int>(to_long(key, val));
        else if (key == "jacobian_floor") cfg.solver.jacobian_floor = to_double(key, val);
        else if (key == "horizon") cfg.horizon = to_double(key, val);
        else if (key == "initial_mode") {
            if (val == "exact") cfg.initial_mode = InitialMode::exact;
            else if (val == "mollified") cfg.initial_mode = InitialMode::mollified;
            else if (val == "inflated") cfg.initial_mode = InitialMode::inflated;
            else throw config_error("config: initial_mode must be exact, mollified or inflated");
        } else if (key == "initial_scale") cfg.initial_scale = to_double(key, val);
        else if (key == "initial_inflation") cfg.initial_inflation = to_double(key, val);
        else if (key == "snapshot_every") cfg.snapshot_every = static_cast<int>(to_long(key, val));
        else if (key == "output_dir") cfg.output_dir = val;
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_long(key, val));
        else if (key == "workers") cfg.workers = static_cast<int>(to_long(key, val));
        else if (key == "cert_rho_samples") cfg.cert_rho_samples = static_cast<int>(to_long(key, val));
        else if (key == "cert_t_samples") cfg.cert_t_samples = static_cast<int>(to_long(key, val));
        else if (key == "cert_tol") cfg.cert_tol = to_double(key, val);
        else if (key == "hardy_cases") cfg.hardy_cases = static_cast<int>(to_long(key, val));
        else if (key == "hardy_deltas") cfg.hardy_deltas = to_list(key, val);
        else if (key == "hardy_grid_n") cfg.hardy_grid_n = static_cast<int>(to_long(key, val));
        else if (key == "mvt_cases") cfg.mvt_cases = static_cast<int>(to_long(key, val));
        else {
            std::ostringstream os;
            os << "config: unknown key '" << key << "' (line " << lineno << ")";
            throw config_error(os.str());
        }
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

} // namespace fluxlim
