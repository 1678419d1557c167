#pragma once

#include <stdexcept>
#include <array>
#include <string>

namespace arbo {

class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string field, const std::string& msg)
        : std::runtime_error(msg), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Standard incidence evaluated with N_h at or below the floor.
class DegeneratePopulation : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NoVectorError : public NumericalError {
public:
    NoVectorError() : NumericalError("net reproductive number <= 1: no disease-free equilibrium with vectors") {}
};

// Step size fell below the resolvable limit; carries the last accepted state.
class StiffnessError : public NumericalError {
public:
    StiffnessError(const std::string& msg, double t, std::array<double, 11> last)
        : NumericalError(msg), t_(t), last_(last) {}
    double time() const { return t_; }
    const std::array<double, 11>& last_state() const { return last_; }

private:
    double t_;
    std::array<double, 11> last_;
};

class PositivityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace arbo
