#pragma once

// Circuit engine: qubit gates, projective measurement, beamsplitters and the
// composed state-generation protocols.
//
// Qubit levels: |0> = |g>, |1> = |e>, sigma_z|e> = +|e>. Protocol layouts put
// the qubit in slot 0 followed by the modes.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "noonsim/hilbert.hpp"

namespace noonsim {

inline constexpr double kLeakageThreshold = 1e-10;
inline constexpr double kImpossibleBranchProbability = 1e-14;

struct ProtocolTiming {
    double omega = 1.0;
    double dt1 = 0.0;
    double dt_final_outcome0 = 0.0;
    double dt_final_outcome1 = 0.0;

    static ProtocolTiming from_omega(double omega);
};

struct MeasurementPolicy {
    enum class Mode { forced, sampled };

    Mode mode = Mode::forced;
    int outcome = 0;         // forced mode
    std::uint64_t seed = 0;  // sampled mode

    static MeasurementPolicy forced(int outcome);
    static MeasurementPolicy sampled(std::uint64_t seed);
    void validate() const;
};

// Uniform double in [0, 1) from the first draw of mt19937_64(seed), using
// the top 53 bits. Spelled out so the value does not depend on the standard
// library's distribution implementation.
double first_uniform(std::uint64_t seed);

struct ProtocolStep {
    std::string label;
    std::string kind;  // prepare, evolve, gate, beamsplitter, measure
    std::optional<double> duration;
    std::optional<int> outcome;
    std::optional<double> probability;
    double norm = 1.0;
    double leakage = 0.0;
    StateVector state;
};

struct ProtocolRecord {
    std::vector<ProtocolStep> steps;
    int outcome = 0;
    double outcome_probability = 0.0;
    StateVector final_state;  // full layout, qubit included
    StateVector final_modes;  // modes only, qubit projected out
    std::optional<StateVector> reference;
    double fidelity = 0.0;
    // max over theta of the fidelity with (|N,0..> + e^{i theta}|0,N..>)/sqrt(2)
    // where that family applies; otherwise equal to `fidelity`.
    double phase_insensitive_fidelity = 0.0;
    std::vector<std::pair<std::string, double>> diagnostics;

    double diagnostic(const std::string& name) const;
};

// --- primitives --------------------------------------------------------------

StateVector hadamard(const StateVector& psi, std::size_t qubit_slot);

struct MeasurementResult {
    int outcome = 0;
    double probability = 0.0;
    double probability_other = 0.0;
    StateVector collapsed;  // full layout, renormalized
};

// Projective measurement of sigma_z on the qubit. Sampled policies pick
// outcome 0 iff first_uniform(seed) < p(0).
MeasurementResult measure_qubit(const StateVector& psi, std::size_t qubit_slot, const MeasurementPolicy& policy);

// exp[-theta (a_i^dag a_j - a_j^dag a_i)]; theta = pi/4 is the 50/50 point.
StateVector beamsplitter(const StateVector& psi, std::size_t slot_i, std::size_t slot_j, double theta);

// --- protocols ---------------------------------------------------------------

// (|0> + |1>)/sqrt(2) (x) |0, N>, evolve pi/(4 Omega) under the effective
// exchange Hamiltonian, Hadamard, measure, then evolve pi/(4 Omega)
// (outcome 0) or 3 pi/(4 Omega) (outcome 1). Outcome 0 ends in
// (|N,0> + |0,N>)/sqrt(2), outcome 1 in (|N,0> - |0,N>)/sqrt(2).
ProtocolRecord run_noon_protocol(std::size_t N, double omega, const MeasurementPolicy& policy, std::size_t truncation);

// |psi1>|psi2> (x) (|g> + |e>)/sqrt(2), evolve to kappa t = pi/4, 50/50
// beamsplitter, Hadamard, measure. The modes end in
//   |psi1, psi2> + (-1)^{outcome} |P psi2, psi1>   (normalized)
// with P the photon-number parity, i.e. (|psi1 psi2> +- |psi2 psi1>)/norm
// whenever psi2 has definite even parity: ground gives +, excited gives -.
ProtocolRecord run_conditional_map(const StateVector& psi1, const StateVector& psi2, double omega,
                                   const MeasurementPolicy& policy);

// M pairs prepared in |N,0>, each interacting in turn with the shared qubit
// for kappa t = pi/4 and then beamsplit; final Hadamard and measurement give
// (|N,0,...,N,0> +- |0,N,...,0,N>)/sqrt(2), + for ground.
ProtocolRecord run_multi_noon(std::size_t M, std::size_t N, double omega, const MeasurementPolicy& policy,
                              std::size_t truncation);

// Upper bound on the full state dimension accepted by run_multi_noon.
inline constexpr std::size_t kMultiNoonDimensionBudget = std::size_t{1} << 20;

}  // namespace noonsim
