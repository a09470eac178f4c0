#pragma once

#include <stdexcept>
#include <string>

namespace p2gle {

// An iteration (Newton or certified series truncation) failed to meet its
// tolerance within the configured cap.
class convergence_error : public std::runtime_error {
public:
    convergence_error(const std::string& what, double residual = 0.0, long iterations = 0)
        : std::runtime_error(what), residual(residual), iterations(iterations) {}
    double residual;
    long iterations;
};

// A digit fell outside a distribution's truncated support.
class support_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}
