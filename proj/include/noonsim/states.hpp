#pragma once

// State constructors: Fock, coherent, squeezed vacuum, N00N and spin states.
//
// Spin states come in two representations. The Dicke ladder stores |j,m> at
// level k = j+m of a single Mode(2j+1) factor. The two-mode Fock picture
// uses the Schwinger mapping n_a = j+m, n_b = j-m on [Mode(2j+1), Mode(2j+1)].

#include <cstddef>
#include <initializer_list>
#include <span>

#include "noonsim/hilbert.hpp"

namespace noonsim {

inline constexpr double kDefaultTruncationTolerance = 1e-10;

StateVector fock(const HilbertLayout& layout, std::span<const std::size_t> occupation);
inline StateVector fock(const HilbertLayout& layout, std::initializer_list<std::size_t> occupation) {
    return fock(layout, std::span<const std::size_t>(occupation.begin(), occupation.size()));
}

// Tensor product; the layout of `a` comes first.
StateVector product(const StateVector& a, const StateVector& b);

// A truncated single-mode state together with the probability mass that the
// truncation discarded before renormalization.
struct TruncatedState {
    StateVector state;
    double tail_mass = 0.0;
};

// e^{-|alpha|^2/2} sum alpha^n / sqrt(n!) |n>, n < d.
TruncatedState coherent(cplx alpha, std::size_t d, double eps_trunc = kDefaultTruncationTolerance);

// Even-Fock squeezed vacuum with amplitudes proportional to
// (-e^{i phi_s} tanh r)^m sqrt((2m)!) / (2^m m!) on level 2m.
TruncatedState squeezed_vacuum(double r, double phi_s, std::size_t d,
                               double eps_trunc = kDefaultTruncationTolerance);

// (|N,0> + e^{i phase}|0,N>)/sqrt(2) on [Mode(d), Mode(d)].
StateVector noon(std::size_t N, std::size_t d, double phase = 0.0);

// Schwinger labels, stored doubled so half-integer spins stay exact.
struct DickeLabel {
    int two_j = 0;
    int two_m = 0;

    double j() const { return 0.5 * two_j; }
    double m() const { return 0.5 * two_m; }
    friend bool operator==(const DickeLabel&, const DickeLabel&) = default;
};

struct FockPair {
    std::size_t n_a = 0;
    std::size_t n_b = 0;
    friend bool operator==(const FockPair&, const FockPair&) = default;
};

DickeLabel dicke_from_two_mode(std::size_t n_a, std::size_t n_b);
FockPair two_mode_from_dicke(DickeLabel label);
// Accepts (j, m) as reals; throws ValidationError unless 2j, j-m are
// non-negative integers and |m| <= j.
FockPair two_mode_from_dicke(double j, double m);

struct SpinParams {
    int two_j = 0;
    double theta = 0.0;
    double phi = 0.0;

    // gamma = e^{-i phi} tan(theta/2). Infinite at theta = pi.
    cplx gamma() const;
    static SpinParams from_gamma(int two_j, cplx gamma);
    // The diametrically opposite point (pi - theta, pi + phi).
    SpinParams antipode() const;
};

enum class SpinRepresentation { dicke_ladder, two_mode_fock };

HilbertLayout spin_layout(int two_j, SpinRepresentation rep);

// Amplitude of |j,m> (k = j+m) is C(2j,k)^{1/2} cos(theta/2)^{2j-k}
// sin(theta/2)^k e^{-ik phi}, i.e. gamma^k/(1+|gamma|^2)^j without the pole
// at theta = pi.
StateVector spin_coherent(const SpinParams& params, SpinRepresentation rep);

// (|theta,phi> + |pi-theta,pi+phi>)/sqrt(2).
StateVector spin_cat(const SpinParams& params, SpinRepresentation rep = SpinRepresentation::two_mode_fock);

}  // namespace noonsim
