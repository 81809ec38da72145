#pragma once

#include <stdexcept>
#include <string>

namespace ruinlab {

/// Input outside the mathematical domain of an operation (bad probability,
/// loss level outside (0,1), horizon shorter than the distance, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A closed-form approximation was evaluated outside the region where it is
/// defined, e.g. q*p*d >= 1 for the arithmetic-geometric surrogate.
class ValidityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Requested target legs cannot reproduce the original per-trial mean.
class InfeasibleError : public DomainError {
public:
    using DomainError::DomainError;
};

}  // namespace ruinlab
