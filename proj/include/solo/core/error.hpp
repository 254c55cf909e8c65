#pragma once

#include <stdexcept>
#include <string>

namespace solo {

/// Precondition of an operation was not met by the caller.
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A volume target that no design in [0,1]^N can reach.
class InfeasibleConstraint : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// FEM analysis failure (singular stiffness, mechanism, bad mesh).
class AnalysisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Objective returned a non-finite value during a heuristic search.
class SearchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dataset or surrogate input rejected (non-finite or nonpositive objective).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Interpolation system could not be fitted or thresholded.
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Point outside an interpolation domain.
class DomainError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

inline void require(bool ok, const std::string& what)
{
    if (!ok) throw ContractViolation(what);
}

} // namespace solo
