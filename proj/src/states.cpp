#include "noonsim/states.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace noonsim {

namespace {

// Safety cap on explicit tail summation; generous enough for |alpha| ~ 30
// and tanh r ~ 0.999.
constexpr std::size_t kTailTermLimit = 200000;

void check_tail(const char* what, double tail, double eps) {
    if (tail > eps) {
        throw TruncationError(std::string(what) + ": truncation discards probability " + std::to_string(tail) +
                              " (limit " + std::to_string(eps) + "); raise the Fock cutoff");
    }
}

double binomial_sqrt(int n, int k) {
    return std::exp(0.5 * (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

}  // namespace

StateVector fock(const HilbertLayout& layout, std::span<const std::size_t> occupation) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(layout.dimension()));
    v(static_cast<Eigen::Index>(layout.flatten(occupation))) = 1.0;
    return {layout, std::move(v)};
}

StateVector product(const StateVector& a, const StateVector& b) {
    std::vector<Factor> f = a.layout().factors();
    f.insert(f.end(), b.layout().factors().begin(), b.layout().factors().end());
    Vector v(a.amplitudes().size() * b.amplitudes().size());
    for (Eigen::Index i = 0; i < a.amplitudes().size(); ++i) {
        v.segment(i * b.amplitudes().size(), b.amplitudes().size()) = a.amplitudes()(i) * b.amplitudes();
    }
    return {HilbertLayout(std::move(f)), std::move(v)};
}

TruncatedState coherent(cplx alpha, std::size_t d, double eps_trunc) {
    if (d == 0) throw ValidationError("coherent: truncation dimension must be >= 1");
    const double mean = std::norm(alpha);
    const auto n = static_cast<Eigen::Index>(d);
    Vector v(n);
    cplx c = std::exp(-0.5 * mean);
    v(0) = c;
    for (Eigen::Index k = 1; k < n; ++k) {
        c *= alpha / std::sqrt(static_cast<double>(k));
        v(k) = c;
    }
    // Sum the discarded tail directly rather than as 1 - kept, which would
    // lose everything below ~1e-16.
    double tail = 0.0;
    double term = std::norm(c);
    for (std::size_t k = d; k < d + kTailTermLimit; ++k) {
        term *= mean / static_cast<double>(k);
        tail += term;
        if (term == 0.0 || (static_cast<double>(k) > mean && term <= 1e-20 * tail)) break;
    }
    check_tail("coherent", tail, eps_trunc);
    return {StateVector::normalized(HilbertLayout{Factor::mode(d)}, std::move(v)), tail};
}

TruncatedState squeezed_vacuum(double r, double phi_s, std::size_t d, double eps_trunc) {
    if (d == 0) throw ValidationError("squeezed_vacuum: truncation dimension must be >= 1");
    if (!(r >= 0.0) || !std::isfinite(r)) throw ValidationError("squeezed_vacuum: r must be finite and >= 0");
    const double t = std::tanh(r);
    const cplx ratio = -std::exp(kI * phi_s) * t;
    Vector v = Vector::Zero(static_cast<Eigen::Index>(d));
    cplx c = 1.0 / std::sqrt(std::cosh(r));
    v(0) = c;
    std::size_t m = 0;
    for (m = 1; 2 * m < d; ++m) {
        c *= ratio * std::sqrt((2.0 * m - 1.0) / (2.0 * m));
        v(static_cast<Eigen::Index>(2 * m)) = c;
    }
    double tail = 0.0;
    double term = std::norm(c);
    for (std::size_t k = 0; k < kTailTermLimit && t > 0.0; ++k, ++m) {
        term *= t * t * (2.0 * m - 1.0) / (2.0 * m);
        tail += term;
        if (term <= 1e-20 * tail) break;
    }
    check_tail("squeezed_vacuum", tail, eps_trunc);
    return {StateVector::normalized(HilbertLayout{Factor::mode(d)}, std::move(v)), tail};
}

StateVector noon(std::size_t N, std::size_t d, double phase) {
    if (N == 0) throw ValidationError("noon: N must be >= 1");
    if (d < N + 1) {
        throw TruncationError("noon: truncation " + std::to_string(d) + " cannot hold N = " + std::to_string(N) +
                              " (needs >= N+1)");
    }
    HilbertLayout layout{Factor::mode(d), Factor::mode(d)};
    Vector v = Vector::Zero(static_cast<Eigen::Index>(layout.dimension()));
    const double s = 1.0 / std::sqrt(2.0);
    v(static_cast<Eigen::Index>(layout.flatten({N, 0}))) = s;
    v(static_cast<Eigen::Index>(layout.flatten({0, N}))) = s * std::exp(kI * phase);
    return {std::move(layout), std::move(v)};
}

DickeLabel dicke_from_two_mode(std::size_t n_a, std::size_t n_b) {
    return {static_cast<int>(n_a + n_b), static_cast<int>(n_a) - static_cast<int>(n_b)};
}

FockPair two_mode_from_dicke(DickeLabel label) {
    const int tj = label.two_j;
    const int tm = label.two_m;
    if (tj < 0 || tm > tj || tm < -tj || (tj - tm) % 2 != 0) {
        throw ValidationError("inconsistent Dicke label (2j=" + std::to_string(tj) + ", 2m=" + std::to_string(tm) +
                              ")");
    }
    return {static_cast<std::size_t>((tj + tm) / 2), static_cast<std::size_t>((tj - tm) / 2)};
}

FockPair two_mode_from_dicke(double j, double m) {
    const double tj = 2.0 * j;
    const double tm = 2.0 * m;
    if (!std::isfinite(tj) || !std::isfinite(tm) || std::abs(tj - std::round(tj)) > 1e-12 ||
        std::abs(tm - std::round(tm)) > 1e-12) {
        throw ValidationError("Dicke label must use half-integer j and m");
    }
    return two_mode_from_dicke(DickeLabel{static_cast<int>(std::lround(tj)), static_cast<int>(std::lround(tm))});
}

cplx SpinParams::gamma() const { return std::exp(-kI * phi) * std::tan(0.5 * theta); }

SpinParams SpinParams::from_gamma(int two_j, cplx gamma) {
    return {two_j, 2.0 * std::atan(std::abs(gamma)), -std::arg(gamma)};
}

SpinParams SpinParams::antipode() const { return {two_j, std::numbers::pi - theta, std::numbers::pi + phi}; }

HilbertLayout spin_layout(int two_j, SpinRepresentation rep) {
    if (two_j < 0) throw ValidationError("spin: 2j must be non-negative");
    const auto d = static_cast<std::size_t>(two_j) + 1;
    if (rep == SpinRepresentation::dicke_ladder) return HilbertLayout{Factor::mode(d)};
    return HilbertLayout{Factor::mode(d), Factor::mode(d)};
}

namespace {

// Ladder amplitudes with explicit cos/sin so that poles and exact zeros
// (theta = 0 or pi) are reproduced exactly.
Vector spin_ladder_amplitudes(int two_j, double c, double s, double phi, bool alternate) {
    Vector v(two_j + 1);
    for (int k = 0; k <= two_j; ++k) {
        double mag = binomial_sqrt(two_j, k);
        mag *= (two_j - k == 0) ? 1.0 : std::pow(c, two_j - k);
        mag *= (k == 0) ? 1.0 : std::pow(s, k);
        if (alternate && (k % 2)) mag = -mag;
        v(k) = mag * std::exp(-kI * (static_cast<double>(k) * phi));
    }
    return v;
}

StateVector place(const Vector& ladder, int two_j, SpinRepresentation rep) {
    HilbertLayout layout = spin_layout(two_j, rep);
    if (rep == SpinRepresentation::dicke_ladder) return StateVector::normalized(std::move(layout), ladder);
    Vector v = Vector::Zero(static_cast<Eigen::Index>(layout.dimension()));
    for (int k = 0; k <= two_j; ++k) {
        const auto n_a = static_cast<std::size_t>(k);
        const auto n_b = static_cast<std::size_t>(two_j - k);
        v(static_cast<Eigen::Index>(layout.flatten({n_a, n_b}))) = ladder(k);
    }
    return StateVector::normalized(std::move(layout), std::move(v));
}

}  // namespace

StateVector spin_coherent(const SpinParams& params, SpinRepresentation rep) {
    spin_layout(params.two_j, rep);
    const Vector ladder = spin_ladder_amplitudes(params.two_j, std::cos(0.5 * params.theta),
                                                 std::sin(0.5 * params.theta), params.phi, false);
    return place(ladder, params.two_j, rep);
}

StateVector spin_cat(const SpinParams& params, SpinRepresentation rep) {
    spin_layout(params.two_j, rep);
    const double c = std::cos(0.5 * params.theta);
    const double s = std::sin(0.5 * params.theta);
    // |pi-theta, pi+phi> swaps cos and sin and picks up (-1)^k from the pi
    // shift of phi.
    const Vector here = spin_ladder_amplitudes(params.two_j, c, s, params.phi, false);
    const Vector there = spin_ladder_amplitudes(params.two_j, s, c, params.phi, true);
    return place((here + there) / std::sqrt(2.0), params.two_j, rep);
}

}  // namespace noonsim
