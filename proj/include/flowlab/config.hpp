#pragma once

#include <map>
#include <string>
#include <vector>

#include "flowlab/types.hpp"

namespace flowlab {

// Flat key = value configuration (TOML-compatible subset: comments with #, optional quotes,
// true/false, numbers). Keys keep their file order for the echo.
class KeyValueConfig {
public:
    static KeyValueConfig parse(const std::string& text);
    static KeyValueConfig load(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    void set(const std::string& key, const std::string& value);
    std::string get(const std::string& key, const std::string& fallback) const;
    double get(const std::string& key, double fallback) const;
    int get(const std::string& key, int fallback) const;
    bool get(const std::string& key, bool fallback) const;
    const std::vector<std::string>& keys() const { return order_; }
    std::string echo() const;

private:
    std::map<std::string, std::string> values_;
    std::vector<std::string> order_;
};

struct BenchmarkConfig {
    std::string benchmark = "rising_bubble";  // static_drop | rising_bubble | sloshing_tank | verification
    std::string method = "levelset";          // levelset | vof | tracking | mac | phasefield
    int nx = 40, ny = 80;
    double dt = 0.004;
    double t_end = 3.0;
    double rho1 = 100, rho2 = 1000;  // phase 1 is the drop or bubble
    double mu1 = 1, mu2 = 10;
    double gamma = 24.5;
    double g = 0.98;        // gravity magnitude, acting in -y
    double diameter = 0.5;  // bubble or drop diameter
    double width = 1.0, height = 2.0;
    Vec2 center = Vec2(0.5, 0.5);
    std::string output_dir = "out";
    unsigned seed = 1;
    // static drop
    std::string curvature = "analytic";  // analytic | osculating | laplace_beltrami
    int interface_nodes = 64;
    // level set
    double eps_factor = 1.5;  // smoothing half-width in cells
    int reinit_interval = 5;
    bool mass_correction = true;
    // sloshing tank
    std::string wall_file;  // NURBS wall; empty uses the built-in tank wall
    double fill_height = 6.0;
    double forcing_amplitude = 0.2;
    double forcing_frequency = 1.0;
    double quality_floor = 0.05;
    // output
    int vtk_interval = 0;  // 0 disables snapshots
    int csv_interval = 1;

    KeyValueConfig source;  // everything that was read, for the echo

    static BenchmarkConfig defaults(const std::string& benchmark);
    // Defaults for the benchmark named in the file, overridden by its keys.
    static BenchmarkConfig from(const KeyValueConfig& kv);
    void validate() const;
    std::string echo() const;
};

}  // namespace flowlab
