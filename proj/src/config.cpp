#include "flowlab/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "flowlab/errors.hpp"
#include "flowlab/io.hpp"

namespace flowlab {

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
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw InvalidArgument("config key '" + key + "': '" + v + "' is not a number");
    }
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
    KeyValueConfig c;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        // strip comments outside quotes
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            if (line[i] == '#' && !quoted) {
                line.resize(i);
                break;
            }
        }
        line = trim(line);
        if (line.empty() || line.front() == '[') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw InvalidArgument("config line " + std::to_string(lineno) + ": empty key");
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        c.set(key, value);
    }
    return c;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InvalidArgument("cannot read config " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
    if (!values_.count(key)) order_.push_back(key);
    values_[key] = value;
}

std::string KeyValueConfig::get(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::get(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : to_double(key, it->second);
}

int KeyValueConfig::get(const std::string& key, int fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const double d = to_double(key, it->second);
    if (d != static_cast<int>(d)) throw InvalidArgument("config key '" + key + "' must be an integer");
    return static_cast<int>(d);
}

bool KeyValueConfig::get(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw InvalidArgument("config key '" + key + "' must be true or false");
}

std::string KeyValueConfig::echo() const {
    std::ostringstream os;
    for (const auto& k : order_) os << k << " = " << values_.at(k) << '\n';
    return os.str();
}

BenchmarkConfig BenchmarkConfig::defaults(const std::string& benchmark) {
    BenchmarkConfig c;
    c.benchmark = benchmark;
    if (benchmark == "static_drop") {
        c.method = "tracking";
        c.rho1 = c.rho2 = 1;
        c.mu1 = c.mu2 = 1;
        c.gamma = 1;
        c.g = 0;
        c.diameter = 1.0;
        c.width = c.height = 2.0;
        c.center = Vec2(0, 0);
        c.nx = c.ny = 128;
        c.dt = 0;
        c.t_end = 0;
    } else if (benchmark == "rising_bubble") {
        // the full resolution is 80 x 160 with dt = 0.002; the desk-scale default is half of that
    } else if (benchmark == "sloshing_tank") {
        c.method = "tracking";
        c.rho1 = c.rho2 = 1000;
        c.mu1 = c.mu2 = 0.1;
        c.gamma = 0;
        c.nx = 20;
        c.ny = 30;
        c.dt = 0.05;
        c.t_end = 13.5;
        c.width = c.height = 10;
    } else if (benchmark == "verification") {
        c.method = "all";
    } else {
        throw InvalidArgument("unknown benchmark '" + benchmark + "'");
    }
    return c;
}

BenchmarkConfig BenchmarkConfig::from(const KeyValueConfig& kv) {
    BenchmarkConfig c = defaults(kv.get("benchmark", std::string("rising_bubble")));
    c.method = kv.get("method", c.method);
    c.nx = kv.get("nx", c.nx);
    c.ny = kv.get("ny", c.ny);
    c.dt = kv.get("dt", c.dt);
    c.t_end = kv.get("t_end", c.t_end);
    c.rho1 = kv.get("rho1", c.rho1);
    c.rho2 = kv.get("rho2", c.rho2);
    c.mu1 = kv.get("mu1", c.mu1);
    c.mu2 = kv.get("mu2", c.mu2);
    c.gamma = kv.get("gamma", c.gamma);
    c.g = kv.get("g", c.g);
    c.diameter = kv.get("diameter", c.diameter);
    c.width = kv.get("width", c.width);
    c.height = kv.get("height", c.height);
    c.center = Vec2(kv.get("center_x", c.center.x()), kv.get("center_y", c.center.y()));
    c.output_dir = kv.get("output_dir", c.output_dir);
    c.seed = static_cast<unsigned>(kv.get("seed", static_cast<int>(c.seed)));
    c.curvature = kv.get("curvature", c.curvature);
    c.interface_nodes = kv.get("interface_nodes", c.interface_nodes);
    c.eps_factor = kv.get("eps_factor", c.eps_factor);
    c.reinit_interval = kv.get("reinit_interval", c.reinit_interval);
    c.mass_correction = kv.get("mass_correction", c.mass_correction);
    c.wall_file = kv.get("wall_file", c.wall_file);
    c.fill_height = kv.get("fill_height", c.fill_height);
    c.forcing_amplitude = kv.get("forcing_amplitude", c.forcing_amplitude);
    c.forcing_frequency = kv.get("forcing_frequency", c.forcing_frequency);
    c.quality_floor = kv.get("quality_floor", c.quality_floor);
    c.vtk_interval = kv.get("vtk_interval", c.vtk_interval);
    c.csv_interval = kv.get("csv_interval", c.csv_interval);
    c.source = kv;
    c.validate();
    return c;
}

void BenchmarkConfig::validate() const {
    auto positive = [](const char* name, double v) {
        if (!(v > 0)) throw InvalidArgument(std::string("config: ") + name + " must be positive");
    };
    positive("rho1", rho1);
    positive("rho2", rho2);
    positive("mu1", mu1);
    positive("mu2", mu2);
    positive("diameter", diameter);
    positive("width", width);
    positive("height", height);
    if (gamma < 0) throw InvalidArgument("config: gamma must be non-negative");
    if (g < 0) throw InvalidArgument("config: g must be non-negative");
    if (nx < 1 || ny < 1) throw InvalidArgument("config: nx, ny must be at least 1");
    if (benchmark != "static_drop" && benchmark != "verification") {
        positive("dt", dt);
        positive("t_end", t_end);
    }
    if (eps_factor < 1.0) throw InvalidArgument("config: eps_factor must be at least one cell");
    if (reinit_interval < 1 || csv_interval < 1 || vtk_interval < 0) throw InvalidArgument("config: bad intervals");
    if (interface_nodes < 8 || interface_nodes % 4) throw InvalidArgument("config: interface_nodes must be a multiple of 4");
}

std::string BenchmarkConfig::echo() const {
    std::ostringstream os;
    os << "benchmark = " << benchmark << "\nmethod = " << method << "\nnx = " << nx << "\nny = " << ny
       << "\ndt = " << format_double(dt) << "\nt_end = " << format_double(t_end) << "\nrho1 = " << format_double(rho1)
       << "\nrho2 = " << format_double(rho2) << "\nmu1 = " << format_double(mu1) << "\nmu2 = " << format_double(mu2)
       << "\ngamma = " << format_double(gamma) << "\ng = " << format_double(g) << "\ndiameter = " << format_double(diameter)
       << "\nwidth = " << format_double(width) << "\nheight = " << format_double(height)
       << "\ncenter_x = " << format_double(center.x()) << "\ncenter_y = " << format_double(center.y())
       << "\nseed = " << seed << "\ncurvature = " << curvature << "\ninterface_nodes = " << interface_nodes
       << "\neps_factor = " << format_double(eps_factor) << "\nreinit_interval = " << reinit_interval
       << "\nmass_correction = " << (mass_correction ? "true" : "false") << "\nwall_file = \"" << wall_file << "\""
       << "\nfill_height = " << format_double(fill_height) << "\nforcing_amplitude = " << format_double(forcing_amplitude)
       << "\nforcing_frequency = " << format_double(forcing_frequency) << "\nquality_floor = " << format_double(quality_floor)
       << "\nvtk_interval = " << vtk_interval << "\ncsv_interval = " << csv_interval << "\noutput_dir = \"" << output_dir
       << "\"\n";
    return os.str();
}

}  // namespace flowlab
