#pragma once

#include <stdexcept>
#include <string>

namespace superres {

/// Iterative scheme hit its iteration cap before reaching the requested
/// tolerances. Carries the residuals at the point of failure so the caller
/// can decide whether to relax tolerances or rescale the data.
class NonConvergence : public std::runtime_error {
public:
    NonConvergence(std::size_t iterations, double primal_residual, double dual_residual)
        : std::runtime_error("solver did not converge after " + std::to_string(iterations) +
                             " iterations (primal residual " + std::to_string(primal_residual) +
                             ", dual residual " + std::to_string(dual_residual) + ")"),
          iterations(iterations),
          primal_residual(primal_residual),
          dual_residual(dual_residual) {}

    std::size_t iterations;
    double primal_residual;
    double dual_residual;
};

/// The Vandermonde-type system built on a candidate support is numerically
/// rank deficient, which almost always means two support points collided.
class IllConditioned : public std::runtime_error {
public:
    explicit IllConditioned(double condition_estimate)
        : std::runtime_error("amplitude system condition estimate " +
                             std::to_string(condition_estimate) + " exceeds limit"),
          condition_estimate(condition_estimate) {}

    double condition_estimate;
};

/// Support violates the minimum-separation hypothesis while strict mode is on.
class SeparationViolation : public std::runtime_error {
public:
    SeparationViolation(double separation, double required)
        : std::runtime_error("minimum separation " + std::to_string(separation) +
                             " below required " + std::to_string(required)),
          separation(separation),
          required(required) {}

    double separation;
    double required;
};

/// The interpolation system (D0 or its Schur complement) is numerically singular.
class SingularSystem : public std::runtime_error {
public:
    explicit SingularSystem(const std::string& what) : std::runtime_error(what) {}
};

/// Scaling fit asked for with fewer than three distinct SRF values.
class InsufficientSpread : public std::runtime_error {
public:
    explicit InsufficientSpread(std::size_t distinct)
        : std::runtime_error("scaling fit needs >= 3 distinct SRF values, got " +
                             std::to_string(distinct)),
          distinct(distinct) {}

    std::size_t distinct;
};

}  // namespace superres
