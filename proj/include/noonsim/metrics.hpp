#pragma once

// Entanglement and metrology diagnostics, plus the su(2) machinery used to
// probe spin states.

#include "noonsim/hilbert.hpp"

namespace noonsim {

// |<psi|phi>|^2
double fidelity(const StateVector& psi, const StateVector& phi);

// Closed form for (|psi1 psi2> + sign |psi2 psi1>)/norm:
//   C = (1 - |s|^2) / (1 + sign |s|^2),  s = <psi1|psi2>.
// sign = -1 with |s| = 1 has no state and throws.
double concurrence_superposition(const StateVector& psi1, const StateVector& psi2, int sign);

// Same quantity from C = |<psi| sigma_y (x) sigma_y |psi^*>|, after writing the
// superposition in the orthonormal basis {e0 = psi1, e1 ~ psi2 - s psi1}.
double concurrence_spin_flip(const StateVector& psi1, const StateVector& psi2, int sign);

// Concurrence of an arbitrary two-mode state restricted to span{psi1, psi2}
// on each mode. Amplitude outside that span is ignored (the result is
// computed on the renormalized projection).
double concurrence_in_span(const StateVector& psi, const StateVector& psi1, const StateVector& psi2);

// Pure-state quantum Fisher information 4 Var(G) for exp(-i theta G).
double qfi(const StateVector& psi, const Operator& generator);

// 1/sqrt(QFI); +infinity when the QFI vanishes (below 1e-14).
double phase_uncertainty(const StateVector& psi, const Operator& generator);

// --- su(2) -------------------------------------------------------------------

struct SpinGenerators {
    Operator jp;
    Operator jm;
    Operator jz;

    Operator jx() const;
    Operator jy() const;
};

// J_+ = a^dag b, J_- = b^dag a, J_z = (a^dag a - b^dag b)/2 on two equal modes.
SpinGenerators schwinger_generators(const HilbertLayout& layout);

// Spin-j matrices on the Dicke ladder Mode(2j+1), level k = j + m.
SpinGenerators dicke_generators(int two_j);

// J_z cos(theta) - (J_+ e^{-i phi} + J_- e^{i phi}) sin(theta) / 2. The spin
// coherent state |theta, phi> is its eigenvector with eigenvalue -j.
Operator spin_generator_along(const SpinGenerators& g, double theta, double phi);

// R(gamma) = exp((theta/2)(e^{-i phi} J_+ - e^{i phi} J_-)) with
// gamma = e^{-i phi} tan(theta/2). Maps |j,-j> to |theta, phi>.
Operator spin_rotation(const SpinGenerators& g, cplx gamma);

// exp(-i angle J_y)
Operator rotation_y(const SpinGenerators& g, double angle);

struct RotationComposition {
    cplx gamma3;
    double Phi = 0.0;
};

// gamma3 = (gamma1 + gamma2)/(1 - conj(gamma1) gamma2),
// Phi = 2 arg(1 - conj(gamma1) gamma2) in (-2 pi, 2 pi],
// such that R(gamma1) R(gamma2) = R(gamma3) exp(-i Phi J_z).
RotationComposition rotation_compose(cplx gamma1, cplx gamma2);

}  // namespace noonsim
