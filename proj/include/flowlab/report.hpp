#pragma once

#include <string>
#include <utility>
#include <vector>

#include "flowlab/io.hpp"

namespace flowlab {

struct Check {
    std::string name;
    bool pass = false;
    double value = 0;
    double limit = 0;
};

struct Report {
    std::string benchmark;
    std::string method;
    std::string config_echo;
    CsvTable timeseries;
    std::vector<std::pair<std::string, double>> summary;
    std::vector<Check> checks;
    std::vector<std::string> notes;

    void add_summary(const std::string& key, double value) { summary.emplace_back(key, value); }
    // pass = value <= limit
    void check_below(const std::string& name, double value, double limit);
    void check_above(const std::string& name, double value, double limit);
    void check_true(const std::string& name, bool ok);
    bool all_pass() const;
    double summary_value(const std::string& key) const;

    std::string format() const;
    // <dir>/<benchmark>_<method>.csv and <dir>/<benchmark>_<method>_report.txt
    void write(const std::string& dir) const;
};

std::string artifact_version();

}  // namespace flowlab
