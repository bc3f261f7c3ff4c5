#include "noonsim/metrics.hpp"

#include <cmath>
#include <limits>

#include "noonsim/evolution.hpp"
#include "noonsim/states.hpp"

namespace noonsim {

namespace {

void require_single_mode_pair(const StateVector& a, const StateVector& b, const char* what) {
    if (a.layout().size() != 1 || !(a.layout() == b.layout())) {
        throw ValidationError(std::string(what) + ": inputs must be single-mode states on one layout");
    }
}

void require_sign(int sign) {
    if (sign != 1 && sign != -1) throw ValidationError("concurrence: sign must be +1 or -1");
}

// 2 |c00 c11 - c01 c10| / sum |c|^2, which is |<psi| sigma_y sigma_y |psi^*>|
// for the normalized two-qubit state.
double two_qubit_concurrence(const Eigen::Vector4cd& c) {
    Matrix sy = pauli(Pauli::y);
    const Matrix yy = kron(sy, sy);
    const Eigen::Vector4cd n = c / c.norm();
    return std::abs(n.dot(yy * n.conjugate()));
}

}  // namespace

double fidelity(const StateVector& psi, const StateVector& phi) { return std::norm(inner(psi, phi)); }

double concurrence_superposition(const StateVector& psi1, const StateVector& psi2, int sign) {
    require_single_mode_pair(psi1, psi2, "concurrence_superposition");
    require_sign(sign);
    const double s2 = std::norm(inner(psi1, psi2));
    const double den = 1.0 + sign * s2;
    if (den < 1e-14) throw ValidationError("concurrence_superposition: antisymmetric state of identical inputs vanishes");
    return (1.0 - s2) / den;
}

double concurrence_spin_flip(const StateVector& psi1, const StateVector& psi2, int sign) {
    require_single_mode_pair(psi1, psi2, "concurrence_spin_flip");
    require_sign(sign);
    const cplx s = inner(psi1, psi2);
    const double t = std::sqrt(std::max(0.0, 1.0 - std::norm(s)));
    // psi2 = s e0 + t e1, so psi1 psi2 + sign psi2 psi1 has coefficients
    // (c00, c01, c10, c11) = ((1 + sign) s, t, sign t, 0).
    Eigen::Vector4cd c;
    c << (1.0 + sign) * s, t, static_cast<double>(sign) * t, 0.0;
    if (c.norm() < 1e-14) throw ValidationError("concurrence_spin_flip: antisymmetric state of identical inputs vanishes");
    return two_qubit_concurrence(c);
}

double concurrence_in_span(const StateVector& psi, const StateVector& psi1, const StateVector& psi2) {
    require_single_mode_pair(psi1, psi2, "concurrence_in_span");
    const StateVector& e0 = psi1;
    Vector r = psi2.amplitudes() - inner(psi1, psi2) * psi1.amplitudes();
    if (r.norm() < 1e-12) {
        return 0.0;  // one-dimensional span: every state in it is a product
    }
    const StateVector e1 = StateVector::normalized(psi1.layout(), std::move(r));
    const StateVector* basis[] = {&e0, &e1};
    Eigen::Vector4cd c;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) c(2 * a + b) = inner(product(*basis[a], *basis[b]), psi);
    }
    if (c.norm() < 1e-12) throw ValidationError("concurrence_in_span: state has no weight in the span");
    return two_qubit_concurrence(c);
}

double qfi(const StateVector& psi, const Operator& generator) {
    if (!generator.is_hermitian(1e-10)) throw ValidationError("qfi: generator is not Hermitian");
    if (!(generator.layout() == psi.layout())) throw ValidationError("qfi: layout mismatch");
    const Vector gpsi = generator.matrix() * psi.amplitudes();
    const double mean = psi.amplitudes().dot(gpsi).real();
    const double second = gpsi.squaredNorm();
    return std::max(0.0, 4.0 * (second - mean * mean));
}

double phase_uncertainty(const StateVector& psi, const Operator& generator) {
    const double q = qfi(psi, generator);
    if (q < 1e-14) return std::numeric_limits<double>::infinity();
    return 1.0 / std::sqrt(q);
}

// --- su(2) -------------------------------------------------------------------

Operator SpinGenerators::jx() const { return 0.5 * (jp + jm); }

Operator SpinGenerators::jy() const { return cplx(0.0, -0.5) * (jp - jm); }

SpinGenerators schwinger_generators(const HilbertLayout& layout) {
    if (layout.size() != 2 || !layout.factor(0).is_mode() || layout.factor(0) != layout.factor(1)) {
        throw ValidationError("schwinger_generators: needs two modes of equal truncation, got " + layout.describe());
    }
    const std::size_t d = layout.factor(0).dim;
    const Operator a = embed(annihilation(d), layout, 0);
    const Operator b = embed(annihilation(d), layout, 1);
    const Operator jp = a.adjoint() * b;
    return {jp, jp.adjoint(), 0.5 * (a.adjoint() * a - b.adjoint() * b)};
}

SpinGenerators dicke_generators(int two_j) {
    if (two_j < 0) throw ValidationError("dicke_generators: 2j must be non-negative");
    const HilbertLayout layout{Factor::mode(static_cast<std::size_t>(two_j) + 1)};
    const Eigen::Index d = two_j + 1;
    Matrix jp = Matrix::Zero(d, d);
    Matrix jz = Matrix::Zero(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        jz(k, k) = static_cast<double>(k) - 0.5 * two_j;
        if (k + 1 < d) jp(k + 1, k) = std::sqrt(static_cast<double>((two_j - k) * (k + 1)));
    }
    Operator p(layout, jp);
    return {p, p.adjoint(), Operator(layout, jz)};
}

Operator spin_generator_along(const SpinGenerators& g, double theta, double phi) {
    const cplx e = std::exp(-kI * phi);
    return std::cos(theta) * g.jz - (0.5 * std::sin(theta)) * (e * g.jp + std::conj(e) * g.jm);
}

Operator spin_rotation(const SpinGenerators& g, cplx gamma) {
    const double theta = 2.0 * std::atan(std::abs(gamma));
    const double phi = -std::arg(gamma);
    const cplx e = std::exp(-kI * phi);
    // exp(A) with A anti-Hermitian equals exp(-i H) for H = i A.
    const Operator a = (0.5 * theta) * (e * g.jp - std::conj(e) * g.jm);
    return propagator(kI * a, 1.0);
}

Operator rotation_y(const SpinGenerators& g, double angle) { return propagator(g.jy(), angle); }

RotationComposition rotation_compose(cplx gamma1, cplx gamma2) {
    const cplx den = 1.0 - std::conj(gamma1) * gamma2;
    if (std::abs(den) < 1e-14) throw ValidationError("rotation_compose: pole at conj(gamma1) gamma2 = 1");
    // 2 arg(den) rather than the principal log of den/conj(den): the two differ
    // by 2 pi, which flips the sign of exp(-i Phi J_z) for half-integer j.
    return {(gamma1 + gamma2) / den, 2.0 * std::arg(den)};
}

}  // namespace noonsim
