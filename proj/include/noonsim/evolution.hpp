#pragma once

// Unitary propagation, hbar = 1.

#include <cstddef>
#include <functional>

#include "noonsim/hilbert.hpp"

namespace noonsim {

enum class ExpmMethod {
    series,  // scaling and squaring
    eigen,   // Hermitian eigendecomposition; cross-check route
};

struct PropagatorConfig {
    ExpmMethod method = ExpmMethod::series;
    double dt = 1e-2;
    double tol = 1e-14;
    double unitarity_check_threshold = 1e-10;

    void validate() const;
};

// Hermiticity tolerance applied to every generator before exponentiation.
inline constexpr double kGeneratorHermitianTol = 1e-10;

// exp(-i H t) as a dense matrix.
Matrix unitary(const Matrix& h, double t, ExpmMethod method = ExpmMethod::series);
Operator propagator(const Operator& h, double t, ExpmMethod method = ExpmMethod::series);

// exp(-i H t) psi without forming the exponential: Taylor series of the
// action on psi, split into substeps with ||H|| dt <= 1.
StateVector expm_apply(const Operator& h, double t, const StateVector& psi, const PropagatorConfig& config = {});

using HamiltonianSource = std::function<Operator(double)>;

// Exponential midpoint rule: psi <- exp(-i H(t + dt/2) dt) psi, with the last
// step shortened to land on t1. Second order in dt.
StateVector propagate_td(const HamiltonianSource& h_of_t, double t0, double t1, const PropagatorConfig& config,
                         const StateVector& psi);

// Same rule for an H(t) of period T, starting at t = 0: one-period
// propagator built from `steps_per_period` midpoint steps, raised to the
// number of whole periods in t, then finished with midpoint steps of the same
// size. Equivalent to propagate_td with dt = T/steps_per_period up to
// rounding, but costs one period of exponentials instead of t/dt.
StateVector propagate_periodic(const HamiltonianSource& h_of_t, double period, std::size_t steps_per_period, double t,
                               const StateVector& psi, const PropagatorConfig& config = {});

// Throws NumericalError if | ||psi|| - 1 | exceeds the threshold.
void check_norm(const StateVector& psi, double threshold, const char* what);

}  // namespace noonsim
