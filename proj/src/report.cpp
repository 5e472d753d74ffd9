#include "flowlab/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "flowlab/errors.hpp"

#ifndef FLOWLAB_GIT
#define FLOWLAB_GIT "unknown"
#endif

namespace flowlab {

void Report::check_below(const std::string& name, double value, double limit) {
    checks.push_back({name, value <= limit, value, limit});
}

void Report::check_above(const std::string& name, double value, double limit) {
    checks.push_back({name, value >= limit, value, limit});
}

void Report::check_true(const std::string& name, bool ok) { checks.push_back({name, ok, ok ? 1.0 : 0.0, 1.0}); }

bool Report::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

double Report::summary_value(const std::string& key) const {
    for (const auto& [k, v] : summary)
        if (k == key) return v;
    throw InvalidArgument("report has no summary value '" + key + "'");
}

std::string artifact_version() { return std::string("flowlab ") + FLOWLAB_VERSION + " (" + FLOWLAB_GIT + ")"; }

std::string Report::format() const {
    std::ostringstream os;
    os << "# " << artifact_version() << "\n# benchmark " << benchmark << ", method " << method << "\n\n[config]\n"
       << config_echo << "\n[summary]\n";
    for (const auto& [k, v] : summary) os << k << " = " << format_double(v) << '\n';
    os << "\n[checks]\n";
    for (const auto& c : checks)
        os << (c.pass ? "PASS " : "FAIL ") << c.name << "  value=" << format_double(c.value)
           << " limit=" << format_double(c.limit) << '\n';
    for (const auto& n : notes) os << "# " << n << '\n';
    return os.str();
}

void Report::write(const std::string& dir) const {
    std::filesystem::create_directories(dir);
    const std::string stem = dir + "/" + benchmark + "_" + method;
    if (!timeseries.header.empty()) timeseries.write(stem + ".csv");
    std::ofstream f(stem + "_report.txt");
    if (!f) throw Error("cannot write " + stem + "_report.txt");
    f << format();
}

}  // namespace flowlab
