#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace flowlab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidArgument : Error {
    using Error::Error;
};

struct SingularElement : Error {
    int element;
    SingularElement(int e, const std::string& what) : Error(what), element(e) {}
};

struct CflViolation : Error {
    double cfl;
    double suggested_dt;
    CflViolation(double c, double dt, const std::string& what) : Error(what), cfl(c), suggested_dt(dt) {}
};

struct SolverFailure : Error {
    double residual;
    SolverFailure(double r, const std::string& what) : Error(what), residual(r) {}
};

struct InvertedElements : Error {
    std::vector<int> elements;
    InvertedElements(std::vector<int> e, const std::string& what) : Error(what), elements(std::move(e)) {}
};

// Interface representations that disagree cell by cell.
struct InconsistentTopology : Error {
    std::vector<int> cells;
    InconsistentTopology(std::vector<int> c, const std::string& what) : Error(what), cells(std::move(c)) {}
};

}  // namespace flowlab
