#include "noonsim/protocol.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "noonsim/evolution.hpp"
#include "noonsim/hamiltonians.hpp"
#include "noonsim/metrics.hpp"
#include "noonsim/states.hpp"

namespace noonsim {

namespace {

using Pairs = std::vector<std::pair<std::size_t, std::size_t>>;

void require_qubit(const StateVector& psi, std::size_t slot, const char* what) {
    if (slot >= psi.layout().size() || !psi.layout().factor(slot).is_qubit()) {
        throw ValidationError(std::string(what) + ": slot " + std::to_string(slot) + " is not a qubit in " +
                              psi.layout().describe());
    }
}

StateVector qubit_plus() {
    const double s = 1.0 / std::sqrt(2.0);
    Vector v(2);
    v << s, s;
    return {HilbertLayout{Factor::qubit()}, std::move(v)};
}

// Photon exchange generator a_i^dag a_j - a_j^dag a_i on [Mode(d), Mode(d)].
Matrix exchange_generator(std::size_t d) {
    const Matrix a = annihilation(d);
    const Matrix ad = creation(d);
    const Matrix id = Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    return kron(ad, id) * kron(id, a) - kron(id, ad) * kron(a, id);
}

// Bookkeeping shared by the protocol runners: every step records norm and
// leakage, and a leaking state aborts the run.
class Recorder {
public:
    explicit Recorder(Pairs pairs) : pairs_(std::move(pairs)) {}

    void add(std::string label, std::string kind, const StateVector& psi, std::optional<double> duration = {},
             std::optional<int> outcome = {}, std::optional<double> probability = {}) {
        ProtocolStep step;
        step.label = std::move(label);
        step.kind = std::move(kind);
        step.duration = duration;
        step.outcome = outcome;
        step.probability = probability;
        step.norm = psi.norm();
        step.leakage = exchange_leakage(psi, pairs_);
        step.state = psi;
        check_norm(psi, 1e-10, step.label.c_str());
        if (step.leakage > kLeakageThreshold) {
            throw TruncationError("step '" + step.label + "': population " + std::to_string(step.leakage) +
                                  " reached the Fock cutoff; raise the truncation");
        }
        record_.steps.push_back(std::move(step));
    }

    ProtocolRecord& record() { return record_; }

private:
    Pairs pairs_;
    ProtocolRecord record_;
};

// Weight of |N,0,...> and |0,N,...> in a modes-only state; fidelity against
// the best relative phase.
double best_phase_fidelity(const StateVector& modes, std::size_t N, std::size_t pairs) {
    std::vector<std::size_t> first(2 * pairs, 0);
    std::vector<std::size_t> second(2 * pairs, 0);
    for (std::size_t p = 0; p < pairs; ++p) {
        first[2 * p] = N;
        second[2 * p + 1] = N;
    }
    const double a = std::abs(modes[modes.layout().flatten(first)]);
    const double b = std::abs(modes[modes.layout().flatten(second)]);
    return 0.5 * (a + b) * (a + b);
}

StateVector modes_of(const MeasurementResult& m) {
    StateVector modes = slice(m.collapsed, 0, static_cast<std::size_t>(m.outcome));
    modes.normalize();
    return modes;
}

}  // namespace

ProtocolTiming ProtocolTiming::from_omega(double omega) {
    if (!(omega > 0.0) || !std::isfinite(omega)) throw ValidationError("protocol: omega must be > 0");
    const double q = std::numbers::pi / (4.0 * omega);
    return {omega, q, q, 3.0 * q};
}

MeasurementPolicy MeasurementPolicy::forced(int outcome) {
    MeasurementPolicy p;
    p.mode = Mode::forced;
    p.outcome = outcome;
    p.validate();
    return p;
}

MeasurementPolicy MeasurementPolicy::sampled(std::uint64_t seed) {
    MeasurementPolicy p;
    p.mode = Mode::sampled;
    p.seed = seed;
    return p;
}

void MeasurementPolicy::validate() const {
    if (mode == Mode::forced && outcome != 0 && outcome != 1) {
        throw ValidationError("policy: forced outcome must be 0 or 1");
    }
}

double first_uniform(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double ProtocolRecord::diagnostic(const std::string& name) const {
    for (const auto& [key, value] : diagnostics) {
        if (key == name) return value;
    }
    throw ValidationError("no diagnostic named '" + name + "'");
}

// --- primitives --------------------------------------------------------------

StateVector hadamard(const StateVector& psi, std::size_t qubit_slot) {
    require_qubit(psi, qubit_slot, "hadamard");
    const std::size_t slots[] = {qubit_slot};
    return apply_local(hadamard_matrix(), slots, psi);
}

MeasurementResult measure_qubit(const StateVector& psi, std::size_t qubit_slot, const MeasurementPolicy& policy) {
    require_qubit(psi, qubit_slot, "measure_qubit");
    policy.validate();
    const auto& layout = psi.layout();
    double p[2] = {0.0, 0.0};
    for (std::size_t k = 0; k < layout.dimension(); ++k) p[layout.digit(k, qubit_slot)] += std::norm(psi[k]);
    const double total = p[0] + p[1];
    p[0] /= total;
    p[1] /= total;

    int outcome = policy.outcome;
    if (policy.mode == MeasurementPolicy::Mode::sampled) outcome = first_uniform(policy.seed) < p[0] ? 0 : 1;
    if (p[outcome] < kImpossibleBranchProbability) {
        throw ImpossibleBranchError("measurement outcome " + std::to_string(outcome) + " has probability " +
                                    std::to_string(p[outcome]));
    }

    Vector v = psi.amplitudes();
    for (std::size_t k = 0; k < layout.dimension(); ++k) {
        if (static_cast<int>(layout.digit(k, qubit_slot)) != outcome) v(static_cast<Eigen::Index>(k)) = 0.0;
    }
    return {outcome, p[outcome], p[1 - outcome], StateVector::normalized(layout, std::move(v))};
}

StateVector beamsplitter(const StateVector& psi, std::size_t slot_i, std::size_t slot_j, double theta) {
    const auto& layout = psi.layout();
    if (slot_i == slot_j || !layout.factor(slot_i).is_mode() || !layout.factor(slot_j).is_mode()) {
        throw ValidationError("beamsplitter: needs two distinct mode slots");
    }
    const std::size_t d = layout.factor(slot_i).dim;
    if (layout.factor(slot_j).dim != d) throw ValidationError("beamsplitter: modes must share a truncation");

    const std::pair<std::size_t, std::size_t> pair[] = {{slot_i, slot_j}};
    const double leak = exchange_leakage(psi, pair);
    if (leak > kLeakageThreshold) {
        throw TruncationError("beamsplitter: population " + std::to_string(leak) + " at the Fock cutoff");
    }
    // exp(-theta G) = exp(-i H theta) with H = -i G Hermitian.
    const Matrix u = unitary(-kI * exchange_generator(d), theta);
    const std::size_t slots[] = {slot_i, slot_j};
    return apply_local(u, slots, psi);
}

// --- protocols ---------------------------------------------------------------

ProtocolRecord run_noon_protocol(std::size_t N, double omega, const MeasurementPolicy& policy,
                                 std::size_t truncation) {
    if (N < 1) throw ValidationError("noon protocol: N must be >= 1");
    if (truncation < N + 1) {
        throw ValidationError("noon protocol: truncation " + std::to_string(truncation) + " must be >= N+1 = " +
                              std::to_string(N + 1));
    }
    policy.validate();
    const ProtocolTiming timing = ProtocolTiming::from_omega(omega);
    const HilbertLayout modes{Factor::mode(truncation), Factor::mode(truncation)};
    const Operator h = build_effective(omega, HilbertLayout{Factor::qubit(), modes.factor(0), modes.factor(1)});

    Recorder rec({{1, 2}});
    StateVector psi = product(qubit_plus(), fock(modes, {0, N}));
    rec.add("prepare", "prepare", psi);

    psi = expm_apply(h, timing.dt1, psi);
    rec.add("evolve dt1", "evolve", psi, timing.dt1);

    psi = hadamard(psi, 0);
    rec.add("hadamard", "gate", psi);

    const MeasurementResult m = measure_qubit(psi, 0, policy);
    psi = m.collapsed;
    rec.add("measure", "measure", psi, std::nullopt, m.outcome, m.probability);

    const double dt_final = m.outcome == 0 ? timing.dt_final_outcome0 : timing.dt_final_outcome1;
    psi = expm_apply(h, dt_final, psi);
    rec.add("evolve final", "evolve", psi, dt_final);

    ProtocolRecord& out = rec.record();
    out.outcome = m.outcome;
    out.outcome_probability = m.probability;
    out.final_state = psi;
    out.final_modes = slice(psi, 0, static_cast<std::size_t>(m.outcome));
    out.final_modes.normalize();
    out.reference = noon(N, truncation, m.outcome == 0 ? 0.0 : std::numbers::pi);
    out.fidelity = fidelity(out.final_modes, *out.reference);
    out.phase_insensitive_fidelity = best_phase_fidelity(out.final_modes, N, 1);
    // Fidelity with ((-1)^N |N,0> + |0,N>)/sqrt(2) for the ground outcome.
    const double literal_phase = (m.outcome == 1 || N % 2) ? std::numbers::pi : 0.0;
    out.diagnostics.emplace_back("literal_reference_fidelity",
                                 fidelity(out.final_modes, noon(N, truncation, literal_phase)));
    out.diagnostics.emplace_back("probability_other", m.probability_other);
    return out;
}

ProtocolRecord run_conditional_map(const StateVector& psi1, const StateVector& psi2, double omega,
                                   const MeasurementPolicy& policy) {
    if (psi1.layout().size() != 1 || psi2.layout().size() != 1 || !psi1.layout().factor(0).is_mode() ||
        !(psi1.layout() == psi2.layout())) {
        throw ValidationError("conditional map: inputs must be single-mode states on equal truncations");
    }
    policy.validate();
    const ProtocolTiming timing = ProtocolTiming::from_omega(omega);
    const std::size_t d = psi1.layout().factor(0).dim;
    const HilbertLayout layout{Factor::qubit(), Factor::mode(d), Factor::mode(d)};
    const Operator h = build_effective(omega, layout);

    Recorder rec({{1, 2}});
    StateVector psi = product(qubit_plus(), product(psi1, psi2));
    rec.add("prepare", "prepare", psi);

    psi = expm_apply(h, timing.dt1, psi);
    rec.add("evolve kappa t = pi/4", "evolve", psi, timing.dt1);

    psi = beamsplitter(psi, 1, 2, 0.25 * std::numbers::pi);
    rec.add("beamsplitter", "beamsplitter", psi);

    psi = hadamard(psi, 0);
    rec.add("pi/2 pulse", "gate", psi);

    const MeasurementResult m = measure_qubit(psi, 0, policy);
    psi = m.collapsed;
    rec.add("measure", "measure", psi, std::nullopt, m.outcome, m.probability);

    ProtocolRecord& out = rec.record();
    out.outcome = m.outcome;
    out.outcome_probability = m.probability;
    out.final_state = psi;
    out.final_modes = modes_of(m);

    const double sign = m.outcome == 0 ? 1.0 : -1.0;
    const StateVector direct = product(psi1, psi2);
    const StateVector swapped = product(psi2, psi1);
    const Vector printed = direct.amplitudes() + sign * swapped.amplitudes();
    if (printed.norm() > 1e-7) {
        out.reference = StateVector::normalized(direct.layout(), printed);
        out.fidelity = fidelity(out.final_modes, *out.reference);
    } else {
        out.fidelity = 0.0;
    }
    out.phase_insensitive_fidelity = out.fidelity;

    // Exact form including the parity of psi2.
    Vector parity_psi2 = psi2.amplitudes();
    for (Eigen::Index n = 1; n < parity_psi2.size(); n += 2) parity_psi2(n) = -parity_psi2(n);
    const StateVector p_swapped = product(StateVector(psi2.layout(), parity_psi2), psi1);
    const Vector exact = direct.amplitudes() + sign * p_swapped.amplitudes();
    out.diagnostics.emplace_back(
        "parity_exact_fidelity",
        exact.norm() > 1e-7 ? fidelity(out.final_modes, StateVector::normalized(direct.layout(), exact)) : 0.0);
    out.diagnostics.emplace_back("probability_other", m.probability_other);
    out.diagnostics.emplace_back("concurrence", concurrence_in_span(out.final_modes, psi1, psi2));
    return out;
}

ProtocolRecord run_multi_noon(std::size_t M, std::size_t N, double omega, const MeasurementPolicy& policy,
                              std::size_t truncation) {
    if (M < 1) throw ValidationError("multi-noon: M must be >= 1");
    if (N < 1) throw ValidationError("multi-noon: N must be >= 1");
    if (truncation < N + 1) {
        throw ValidationError("multi-noon: truncation " + std::to_string(truncation) + " must be >= N+1 = " +
                              std::to_string(N + 1));
    }
    double dim = 2.0;
    for (std::size_t k = 0; k < 2 * M; ++k) dim *= static_cast<double>(truncation);
    if (dim > static_cast<double>(kMultiNoonDimensionBudget)) {
        throw ValidationError("multi-noon: state dimension " + std::to_string(dim) + " exceeds the budget of " +
                              std::to_string(kMultiNoonDimensionBudget));
    }
    policy.validate();
    const ProtocolTiming timing = ProtocolTiming::from_omega(omega);

    std::vector<Factor> mode_factors(2 * M, Factor::mode(truncation));
    const HilbertLayout modes(mode_factors);
    std::vector<std::size_t> start(2 * M, 0);
    for (std::size_t p = 0; p < M; ++p) start[2 * p] = N;

    Pairs pairs;
    for (std::size_t p = 0; p < M; ++p) pairs.emplace_back(2 * p + 1, 2 * p + 2);

    const HilbertLayout local{Factor::qubit(), Factor::mode(truncation), Factor::mode(truncation)};
    const Matrix u_pair = unitary(build_effective(omega, local).matrix(), timing.dt1);

    Recorder rec(pairs);
    StateVector psi = product(qubit_plus(), fock(modes, start));
    rec.add("prepare", "prepare", psi);

    for (std::size_t p = 0; p < M; ++p) {
        const std::size_t slots[] = {0, 2 * p + 1, 2 * p + 2};
        psi = apply_local(u_pair, slots, psi);
        rec.add("pair " + std::to_string(p) + " interaction", "evolve", psi, timing.dt1);
        psi = beamsplitter(psi, 2 * p + 1, 2 * p + 2, 0.25 * std::numbers::pi);
        rec.add("pair " + std::to_string(p) + " beamsplitter", "beamsplitter", psi);
    }

    psi = hadamard(psi, 0);
    rec.add("pi/2 pulse", "gate", psi);

    const MeasurementResult m = measure_qubit(psi, 0, policy);
    psi = m.collapsed;
    rec.add("measure", "measure", psi, std::nullopt, m.outcome, m.probability);

    ProtocolRecord& out = rec.record();
    out.outcome = m.outcome;
    out.outcome_probability = m.probability;
    out.final_state = psi;
    out.final_modes = modes_of(m);

    std::vector<std::size_t> other(2 * M, 0);
    for (std::size_t p = 0; p < M; ++p) other[2 * p + 1] = N;
    Vector ref = Vector::Zero(static_cast<Eigen::Index>(modes.dimension()));
    ref(static_cast<Eigen::Index>(modes.flatten(start))) = 1.0 / std::sqrt(2.0);
    ref(static_cast<Eigen::Index>(modes.flatten(other))) = (m.outcome == 0 ? 1.0 : -1.0) / std::sqrt(2.0);
    out.reference = StateVector(modes, std::move(ref));
    out.fidelity = fidelity(out.final_modes, *out.reference);
    out.phase_insensitive_fidelity = best_phase_fidelity(out.final_modes, N, M);
    out.diagnostics.emplace_back("probability_other", m.probability_other);
    return out;
}

}  // namespace noonsim
