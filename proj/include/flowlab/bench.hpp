#pragma once

#include <functional>
#include <string>

#include "flowlab/config.hpp"
#include "flowlab/report.hpp"

namespace flowlab {

struct DimensionlessNumbers {
    double Re = 0, Eo = 0, Mo = 0;
    bool tension_defined = true;  // false for gamma = 0: Eo and Mo are reported as infinite
};

// Re = rho2 sqrt(g d) d / mu2, Eo = rho2 d^2 g / gamma, Mo = g mu2^4 / (rho2 gamma^3); fluid 2 surrounds the bubble.
DimensionlessNumbers dimensionless_numbers(const BenchmarkConfig& cfg);

// method tracking: conforming drop mesh, doubled pressure, curvature from cfg.curvature.
// method levelset: structured nx x ny mesh, single pressure, CSF volume force.
Report run_static_drop(const BenchmarkConfig& cfg);

// method levelset or vof on [0, width] x [0, height], no-slip top and bottom, slip side walls.
Report run_rising_bubble(const BenchmarkConfig& cfg);

// Interface tracking in the NURBS-walled tank under gravity and horizontal forcing -A sin(w t).
Report run_sloshing_tank(const BenchmarkConfig& cfg);

// Property suites: level-set rotation, VOF translation, phase-field spinodal run, MAC hydrostatic column.
Report run_method_verification(const BenchmarkConfig& cfg);

Report run_benchmark(const BenchmarkConfig& cfg);

// Called once per accepted step with (time, step) by the time-dependent drivers; may be empty.
using ProgressFn = std::function<void(double, int)>;
void set_progress_callback(ProgressFn fn);

}  // namespace flowlab
