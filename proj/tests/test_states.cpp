#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "noonsim/states.hpp"
#include "support.hpp"

using namespace noonsim;
using std::numbers::pi;

namespace {

// C(n,k) via the multiplicative formula in long double.
long double binom(int n, int k) {
    long double r = 1.0L;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

cplx closed_form_spin_overlap(int two_j, cplx delta, cplx gamma) {
    const double j = 0.5 * two_j;
    return std::pow(1.0 + std::conj(delta) * gamma, two_j) /
           (std::pow(1.0 + std::norm(delta), j) * std::pow(1.0 + std::norm(gamma), j));
}

}  // namespace

TEST_CASE("fock states") {
    const HilbertLayout l{Factor::qubit(), Factor::mode(3)};
    const StateVector s = fock(l, {0, 2});
    CHECK(s[2] == cplx(1.0));
    CHECK(s.norm() == 1.0);
    CHECK(inner(fock(l, {0, 2}), fock(l, {1, 0})) == cplx{});
    CHECK_THROWS_AS(fock(l, {0, 3}), TruncationError);
}

TEST_CASE("product states concatenate layouts") {
    const StateVector a = fock(HilbertLayout{Factor::qubit()}, {1});
    const StateVector b = fock(HilbertLayout{Factor::mode(3)}, {2});
    const StateVector ab = product(a, b);
    CHECK(ab.layout() == HilbertLayout{Factor::qubit(), Factor::mode(3)});
    CHECK(ab[ab.layout().flatten({1, 2})] == cplx(1.0));
}

TEST_CASE("coherent states") {
    const StateVector vac = coherent(0.0, 5).state;
    CHECK(vac[0] == cplx(1.0));
    CHECK(vac.norm() == doctest::Approx(1.0).epsilon(1e-15));

    const StateVector c1 = coherent(1.0, 25).state;
    const StateVector c0 = coherent(0.0, 25).state;
    CHECK(std::abs(std::norm(inner(c1, c0)) - std::exp(-1.0)) < 1e-9);

    const StateVector c15 = coherent(1.5, 40).state;
    const double mean = expectation(embed(number(40), c15.layout(), 0), c15).real();
    CHECK(std::abs(mean - 2.25) < 1e-9);
}

TEST_CASE("coherent overlaps match the closed form") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1.4, 1.4);
    for (int i = 0; i < 30; ++i) {
        const cplx a(u(rng), u(rng));
        const cplx b(u(rng), u(rng));
        const cplx expected = std::exp(-0.5 * (std::norm(a) + std::norm(b)) + std::conj(a) * b);
        const cplx got = inner(coherent(a, 40).state, coherent(b, 40).state);
        CHECK(std::abs(got - expected) < 1e-9);
    }
}

TEST_CASE("coherent truncation tail is reported and enforced") {
    // Tail of a Poisson(1) distribution beyond n = 9, summed independently.
    long double tail = 0.0L, term = std::exp(-1.0L);
    for (int n = 1; n < 200; ++n) {
        term /= n;
        if (n >= 10) tail += term;
    }
    const TruncatedState t = coherent(1.0, 10, 1.0);
    CHECK(std::abs(t.tail_mass - static_cast<double>(tail)) < 1e-20);
    CHECK(std::abs(t.state.norm() - 1.0) < 1e-12);
    CHECK_THROWS_AS(coherent(1.0, 10), TruncationError);
    CHECK_THROWS_AS(coherent(1.0, 0), ValidationError);
    CHECK(coherent(1.0, 25).tail_mass < 1e-20);
}

TEST_CASE("squeezed vacuum") {
    const StateVector r0 = squeezed_vacuum(0.0, 0.0, 8).state;
    CHECK(r0[0] == cplx(1.0));
    CHECK(r0.norm() == doctest::Approx(1.0));

    const double r = 0.5, phi = 0.7;
    const StateVector s = squeezed_vacuum(r, phi, 40).state;
    for (std::size_t n = 1; n < 40; n += 2) CHECK(s[n] == cplx{});
    const HilbertLayout& l = s.layout();
    const Operator a = embed(annihilation(40), l, 0);
    const double mean = expectation(a.adjoint() * a, s).real();
    CHECK(std::abs(mean - std::sinh(r) * std::sinh(r)) < 1e-8);
    // <a^2> = -e^{i phi} sinh r cosh r
    const cplx aa = expectation(a * a, s);
    CHECK(std::abs(aa + std::exp(kI * phi) * std::sinh(r) * std::cosh(r)) < 1e-8);
    CHECK(s[0].real() > 0.0);

    // Independent amplitude check at level 4 (m = 2).
    const double t = std::tanh(r);
    const cplx c4 = std::pow(-std::exp(kI * phi) * t, 2) * std::sqrt(24.0) / (4.0 * 2.0) / std::sqrt(std::cosh(r));
    CHECK(std::abs(s[4] - c4) < 1e-12);

    CHECK_THROWS_AS(squeezed_vacuum(1.5, 0.0, 10), TruncationError);
}

TEST_CASE("noon states") {
    const StateVector n1 = noon(1, 2);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(n1[n1.layout().flatten({1, 0})] - s) < 1e-16);
    CHECK(std::abs(n1[n1.layout().flatten({0, 1})] - s) < 1e-16);
    for (std::size_t N = 1; N <= 6; ++N) {
        CHECK(std::abs(inner(noon(N, N + 1, 0.0), noon(N, N + 1, pi))) < 1e-15);
        CHECK(std::abs(noon(N, N + 3, 0.3).norm() - 1.0) < 1e-15);
    }
    CHECK_THROWS_AS(noon(3, 3), TruncationError);
    CHECK_THROWS_AS(noon(0, 3), ValidationError);
}

TEST_CASE("Dicke and two-mode labels") {
    CHECK(dicke_from_two_mode(4, 0) == DickeLabel{4, 4});
    CHECK(dicke_from_two_mode(0, 4) == DickeLabel{4, -4});
    CHECK(dicke_from_two_mode(3, 0).j() == 1.5);
    CHECK(dicke_from_two_mode(3, 0).m() == 1.5);
    for (std::size_t n = 0; n <= 20; ++n) {
        for (std::size_t na = 0; na <= n; ++na) {
            const FockPair p{na, n - na};
            CHECK(two_mode_from_dicke(dicke_from_two_mode(p.n_a, p.n_b)) == p);
            const DickeLabel d = dicke_from_two_mode(p.n_a, p.n_b);
            CHECK(two_mode_from_dicke(d.j(), d.m()) == p);
        }
    }
    CHECK_THROWS_AS(two_mode_from_dicke(1.0, 1.5), ValidationError);
    CHECK_THROWS_AS(two_mode_from_dicke(1.0, 2.0), ValidationError);
    CHECK_THROWS_AS(two_mode_from_dicke(0.3, 0.3), ValidationError);
}

TEST_CASE("spin coherent states") {
    for (auto rep : {SpinRepresentation::dicke_ladder, SpinRepresentation::two_mode_fock}) {
        const StateVector s = spin_coherent({4, 0.0, 0.3}, rep);
        const std::size_t south = rep == SpinRepresentation::dicke_ladder ? 0 : s.layout().flatten({0, 4});
        CHECK(std::abs(s[south] - cplx(1.0)) < 1e-15);
    }

    const SpinParams p{10, 0.7, 1.1};
    const StateVector a = spin_coherent(p, SpinRepresentation::dicke_ladder);
    const StateVector b = spin_coherent(p.antipode(), SpinRepresentation::dicke_ladder);
    CHECK(std::abs(inner(a, b)) < 1e-12);

    // |j, +-j>_x amplitudes (+-1)^{j+m} C(2j, j+m)^{1/2} / 2^j.
    for (int two_j : {1, 4, 7}) {
        const StateVector plus_x = spin_coherent({two_j, pi / 2, 0.0}, SpinRepresentation::dicke_ladder);
        const StateVector minus_x = spin_coherent({two_j, pi / 2, pi}, SpinRepresentation::dicke_ladder);
        for (int k = 0; k <= two_j; ++k) {
            const double mag = std::sqrt(static_cast<double>(binom(two_j, k))) / std::pow(2.0, 0.5 * two_j);
            CHECK(std::abs(plus_x[k] - mag) < 1e-13);
            CHECK(std::abs(minus_x[k] - (k % 2 ? -mag : mag)) < 1e-13);
        }
    }
}

TEST_CASE("spin coherent overlaps match the closed form") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> th(0.0, pi);
    std::uniform_real_distribution<double> ph(-pi, pi);
    for (int two_j = 0; two_j <= 20; ++two_j) {
        for (int i = 0; i < 5; ++i) {
            const SpinParams a{two_j, th(rng), ph(rng)};
            const SpinParams b{two_j, th(rng), ph(rng)};
            const cplx got = inner(spin_coherent(a, SpinRepresentation::two_mode_fock),
                                   spin_coherent(b, SpinRepresentation::two_mode_fock));
            CHECK(std::abs(got - closed_form_spin_overlap(two_j, a.gamma(), b.gamma())) < 1e-10);
        }
    }
}

TEST_CASE("gamma parametrization round trip") {
    const SpinParams p{3, 1.2, -0.4};
    const SpinParams q = SpinParams::from_gamma(3, p.gamma());
    CHECK(q.theta == doctest::Approx(p.theta).epsilon(1e-14));
    CHECK(q.phi == doctest::Approx(p.phi).epsilon(1e-14));
    CHECK(std::abs(p.gamma() - std::exp(cplx(0.0, 0.4)) * std::tan(0.6)) < 1e-14);
}

TEST_CASE("spin cat states") {
    for (int two_j = 1; two_j <= 10; ++two_j) {
        const StateVector cat = spin_cat({two_j, 0.0, 0.0});
        CHECK(std::abs(cat.norm() - 1.0) < 1e-15);
        // The z-axis cat is the N00N state; for odd 2j the north pole carries
        // the (-1)^{2j} of the antipode convention, so the relative phase is pi.
        const StateVector ref = noon(static_cast<std::size_t>(two_j), static_cast<std::size_t>(two_j) + 1,
                                     two_j % 2 ? pi : 0.0);
        CHECK(std::abs(std::abs(inner(cat, ref)) - 1.0) < 1e-15);
    }
    for (int two_j : {2, 4, 6}) {
        const StateVector cat = spin_cat({two_j, 0.0, 0.0});
        CHECK(testsupport::max_abs(cat.amplitudes() -
                                   noon(static_cast<std::size_t>(two_j), static_cast<std::size_t>(two_j) + 1).amplitudes()) ==
              0.0);
    }

    // x-axis cat: (|j,j>_x + |j,-j>_x)/sqrt(2) has weight only on even k.
    const int two_j = 6;
    const StateVector xcat = spin_cat({two_j, pi / 2, 0.0}, SpinRepresentation::dicke_ladder);
    for (int k = 0; k <= two_j; ++k) {
        const double mag = std::sqrt(static_cast<double>(binom(two_j, k))) / std::pow(2.0, 0.5 * two_j);
        const double expected = (k % 2 ? 0.0 : 2.0 * mag) / std::sqrt(2.0);
        CHECK(std::abs(xcat[k] - expected) < 1e-13);
    }

    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> th(0.0, pi);
    for (int i = 0; i < 20; ++i) {
        const StateVector c = spin_cat({1 + i % 9, th(rng), th(rng)});
        CHECK(std::abs(c.norm() - 1.0) < 1e-12);
    }
}
