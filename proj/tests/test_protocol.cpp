#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "noonsim/hamiltonians.hpp"
#include "noonsim/metrics.hpp"
#include "noonsim/protocol.hpp"
#include "noonsim/states.hpp"
#include "support.hpp"

using namespace noonsim;
using std::numbers::pi;
using testsupport::max_abs;

namespace {

double binom(int n, int k) {
    return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

const ProtocolStep& step(const ProtocolRecord& r, const std::string& label) {
    for (const auto& s : r.steps)
        if (s.label == label) return s;
    FAIL("missing step " << label);
    return r.steps.front();
}

}  // namespace

TEST_CASE("hadamard gate") {
    const HilbertLayout l{Factor::qubit(), Factor::mode(3)};
    const StateVector h0 = hadamard(fock(l, {0, 1}), 0);
    CHECK(std::abs(h0[l.flatten({0, 1})] - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(h0[l.flatten({1, 1})] - 1.0 / std::sqrt(2.0)) < 1e-15);
    const StateVector h1 = hadamard(fock(l, {1, 1}), 0);
    CHECK(std::abs(h1[l.flatten({1, 1})] + 1.0 / std::sqrt(2.0)) < 1e-15);

    std::mt19937_64 rng(81);
    const StateVector psi = testsupport::random_state(rng, l);
    CHECK(max_abs(hadamard(hadamard(psi, 0), 0).amplitudes() - psi.amplitudes()) < 1e-15);
    const Operator n = embed(number(3), l, 1);
    CHECK(std::abs(expectation(n, hadamard(psi, 0)) - expectation(n, psi)) < 1e-14);
    CHECK_THROWS_AS(hadamard(psi, 1), ValidationError);
}

TEST_CASE("qubit measurement") {
    std::mt19937_64 rng(82);
    const HilbertLayout modes{Factor::mode(3)};
    const StateVector m = testsupport::random_state(rng, modes);
    Vector q(2);
    q << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    const StateVector psi = product(StateVector(HilbertLayout{Factor::qubit()}, q), m);
    for (int o : {0, 1}) {
        const MeasurementResult r = measure_qubit(psi, 0, MeasurementPolicy::forced(o));
        CHECK(r.outcome == o);
        CHECK(std::abs(r.probability - 0.5) < 1e-15);
        CHECK(std::abs(r.collapsed.norm() - 1.0) < 1e-15);
        CHECK(max_abs(slice(r.collapsed, 0, o).amplitudes() - m.amplitudes()) < 1e-15);
    }

    const StateVector one = product(fock(HilbertLayout{Factor::qubit()}, {1}), m);
    CHECK_THROWS_AS(measure_qubit(one, 0, MeasurementPolicy::forced(0)), ImpossibleBranchError);
    CHECK_THROWS_AS(MeasurementPolicy::forced(2), ValidationError);

    // Sampled outcomes are a pure function of the seed.
    int zeros = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const MeasurementResult a = measure_qubit(psi, 0, MeasurementPolicy::sampled(seed));
        const MeasurementResult b = measure_qubit(psi, 0, MeasurementPolicy::sampled(seed));
        CHECK(a.outcome == b.outcome);
        zeros += a.outcome == 0;
    }
    CHECK(zeros > 70);
    CHECK(zeros < 130);
    CHECK(first_uniform(5) >= 0.0);
    CHECK(first_uniform(5) < 1.0);
}

TEST_CASE("beamsplitter") {
    const HilbertLayout l{Factor::mode(3), Factor::mode(3)};
    const StateVector out = beamsplitter(fock(l, {1, 0}), 0, 1, pi / 4);
    CHECK(std::abs(out[l.flatten({1, 0})] - 1.0 / std::sqrt(2.0)) < 1e-14);
    CHECK(std::abs(out[l.flatten({0, 1})] - 1.0 / std::sqrt(2.0)) < 1e-14);

    std::mt19937_64 rng(83);
    Vector v = Vector::Zero(9);
    for (std::size_t n1 = 0; n1 < 3; ++n1)
        for (std::size_t n2 = 0; n1 + n2 < 3; ++n2) v(l.flatten({n1, n2})) = cplx(double(n1 + 1), double(n2));
    const StateVector psi = StateVector::normalized(l, v);
    CHECK(max_abs(beamsplitter(psi, 0, 1, 0.0).amplitudes() - psi.amplitudes()) < 1e-15);
    const Operator n = embed(number(3), l, 0) + embed(number(3), l, 1);
    CHECK(std::abs(expectation(n, beamsplitter(psi, 0, 1, 0.6)) - expectation(n, psi)) < 1e-13);

    CHECK_THROWS_AS(beamsplitter(fock(l, {2, 1}), 0, 1, pi / 4), TruncationError);
    CHECK_THROWS_AS(beamsplitter(psi, 0, 0, pi / 4), ValidationError);
}

TEST_CASE("N00N protocol reaches the N00N state on both outcomes") {
    for (std::size_t N = 1; N <= 6; ++N) {
        for (int o : {0, 1}) {
            const ProtocolRecord r = run_noon_protocol(N, 1.0, MeasurementPolicy::forced(o), N + 1);
            CHECK(r.outcome == o);
            CHECK(r.fidelity >= 1.0 - 1e-10);
            CHECK(r.phase_insensitive_fidelity >= 1.0 - 1e-10);
            CHECK(std::abs(r.outcome_probability - 0.5) < 1e-12);
            for (const auto& s : r.steps) {
                CHECK(std::abs(s.norm - 1.0) < 1e-10);
                CHECK(s.leakage < 1e-10);
            }
            // The literal ((-1)^N|N,0> + |0,N>) form differs from the outcome-0
            // state for odd N.
            if (o == 0) CHECK(r.diagnostic("literal_reference_fidelity") == doctest::Approx(N % 2 ? 0.0 : 1.0));
        }
    }
}

TEST_CASE("N00N protocol intermediate state is the binomial superposition") {
    for (int N : {1, 2, 4, 5}) {
        const ProtocolRecord r = run_noon_protocol(std::size_t(N), 0.8, MeasurementPolicy::forced(0), std::size_t(N) + 1);
        const StateVector& psi1 = step(r, "evolve dt1").state;
        const HilbertLayout& l = psi1.layout();
        Vector expected = Vector::Zero(static_cast<Eigen::Index>(l.dimension()));
        for (int k = 0; k <= N; ++k) {
            const double c = std::sqrt(binom(N, k)) / std::pow(2.0, 0.5 * N) / std::sqrt(2.0);
            expected(l.flatten({0, std::size_t(k), std::size_t(N - k)})) = c;
            expected(l.flatten({1, std::size_t(k), std::size_t(N - k)})) = (k % 2 ? -c : c);
        }
        CHECK(std::abs(std::abs(expected.dot(psi1.amplitudes())) - 1.0) < 1e-10);

        const ProtocolStep& m = step(r, "measure");
        REQUIRE(m.probability.has_value());
        CHECK(std::abs(*m.probability - 0.5) < 1e-12);
        CHECK(std::abs(r.diagnostic("probability_other") - 0.5) < 1e-12);
    }
}

TEST_CASE("N00N protocol validation") {
    CHECK_THROWS_AS(run_noon_protocol(3, 1.0, MeasurementPolicy::forced(0), 3), ValidationError);
    CHECK_THROWS_AS(run_noon_protocol(0, 1.0, MeasurementPolicy::forced(0), 3), ValidationError);
    CHECK_THROWS_AS(run_noon_protocol(2, -1.0, MeasurementPolicy::forced(0), 3), ValidationError);
    const ProtocolRecord a = run_noon_protocol(3, 1.0, MeasurementPolicy::sampled(9), 4);
    const ProtocolRecord b = run_noon_protocol(3, 1.0, MeasurementPolicy::sampled(9), 4);
    CHECK(a.outcome == b.outcome);
    CHECK(a.fidelity >= 1.0 - 1e-10);
    const ProtocolTiming t = ProtocolTiming::from_omega(2.0);
    CHECK(t.dt1 == pi / 8.0);
    CHECK(t.dt_final_outcome1 == 3.0 * pi / 8.0);
}

TEST_CASE("conditional map on Fock inputs gives N00N states") {
    for (std::size_t N : {1u, 2u, 3u}) {
        const HilbertLayout m{Factor::mode(N + 1)};
        for (int o : {0, 1}) {
            const ProtocolRecord r = run_conditional_map(fock(m, {N}), fock(m, {0}), 1.0, MeasurementPolicy::forced(o));
            CHECK(r.fidelity >= 1.0 - 1e-10);
            CHECK(fidelity(r.final_modes, noon(N, N + 1, o == 0 ? 0.0 : pi)) >= 1.0 - 1e-10);
            CHECK(std::abs(r.outcome_probability - 0.5) < 1e-12);
        }
    }
}

TEST_CASE("conditional map on a coherent input gives entangled coherent states") {
    const std::size_t d = 20;
    const StateVector alpha = coherent(1.0, d).state;
    const StateVector vac = fock(HilbertLayout{Factor::mode(d)}, {0});
    for (int o : {0, 1}) {
        const double sign = o == 0 ? 1.0 : -1.0;
        const ProtocolRecord r = run_conditional_map(alpha, vac, 1.0, MeasurementPolicy::forced(o));
        // (|alpha,0> +- |0,alpha>)/sqrt(2 +- 2 e^{-|alpha|^2}) built independently.
        const Vector a0 = product(alpha, vac).amplitudes();
        const Vector b0 = product(vac, alpha).amplitudes();
        const Vector phi = (a0 + sign * b0) / std::sqrt(2.0 + sign * 2.0 * std::exp(-1.0));
        CHECK(std::abs(phi.norm() - 1.0) < 1e-9);
        CHECK(std::norm(phi.dot(r.final_modes.amplitudes())) >= 1.0 - 1e-9);
        CHECK(r.fidelity >= 1.0 - 1e-9);
        // p(ground) = (1 + e^{-|alpha|^2})/2
        CHECK(std::abs(r.outcome_probability - 0.5 * (1.0 + sign * std::exp(-1.0))) < 1e-9);
        CHECK(std::abs(r.diagnostic("concurrence") - concurrence_superposition(alpha, vac, int(sign))) < 1e-9);
    }
}

TEST_CASE("conditional map carries the parity of the second input") {
    const std::size_t d = 20;
    const StateVector a = coherent(cplx(0.6, 0.2), d).state;
    const StateVector b = fock(HilbertLayout{Factor::mode(d)}, {1});
    const ProtocolRecord r = run_conditional_map(a, b, 1.3, MeasurementPolicy::forced(0));
    CHECK(r.diagnostic("parity_exact_fidelity") >= 1.0 - 1e-10);
    const StateVector sq = squeezed_vacuum(0.3, 0.4, d).state;
    const ProtocolRecord s = run_conditional_map(a, sq, 1.3, MeasurementPolicy::forced(1));
    CHECK(s.fidelity >= 1.0 - 1e-10);
}

TEST_CASE("conditional map with identical inputs") {
    const HilbertLayout m{Factor::mode(5)};
    const StateVector two = fock(m, {2});
    const ProtocolRecord g = run_conditional_map(two, two, 1.0, MeasurementPolicy::forced(0));
    CHECK(std::abs(g.outcome_probability - 1.0) < 1e-12);
    CHECK(fidelity(g.final_modes, product(two, two)) >= 1.0 - 1e-12);
    CHECK_THROWS_AS(run_conditional_map(two, two, 1.0, MeasurementPolicy::forced(1)), ImpossibleBranchError);
    CHECK_THROWS_AS(run_conditional_map(two, fock(HilbertLayout{Factor::mode(4)}, {0}), 1.0,
                                        MeasurementPolicy::forced(0)),
                    ValidationError);
}

TEST_CASE("multi-pair N00N chain") {
    const HilbertLayout m{Factor::mode(4)};
    for (int o : {0, 1}) {
        const ProtocolRecord single = run_multi_noon(1, 3, 1.0, MeasurementPolicy::forced(o), 4);
        const ProtocolRecord cmap = run_conditional_map(fock(m, {3}), fock(m, {0}), 1.0, MeasurementPolicy::forced(o));
        CHECK(max_abs(single.final_modes.amplitudes() - cmap.final_modes.amplitudes()) < 1e-12);
    }

    for (int o : {0, 1}) {
        const ProtocolRecord r = run_multi_noon(2, 1, 1.0, MeasurementPolicy::forced(o), 2);
        CHECK(r.final_modes.dimension() == 16);
        const HilbertLayout& l = r.final_modes.layout();
        Vector ref = Vector::Zero(16);
        ref(l.flatten({1, 0, 1, 0})) = 1.0 / std::sqrt(2.0);
        ref(l.flatten({0, 1, 0, 1})) = (o == 0 ? 1.0 : -1.0) / std::sqrt(2.0);
        CHECK(std::norm(ref.dot(r.final_modes.amplitudes())) >= 1.0 - 1e-9);
        CHECK(r.fidelity >= 1.0 - 1e-9);
    }

    const ProtocolRecord r = run_multi_noon(3, 2, 0.5, MeasurementPolicy::forced(1), 3);
    CHECK(r.fidelity >= 1.0 - 1e-9);
    CHECK_THROWS_AS(run_multi_noon(8, 3, 1.0, MeasurementPolicy::forced(0), 4), ValidationError);
    CHECK_THROWS_AS(run_multi_noon(0, 3, 1.0, MeasurementPolicy::forced(0), 4), ValidationError);
}
