#pragma once

// Hamiltonian builders. Units: hbar = 1, all frequencies in rad/time.
//
// Unless stated otherwise a builder acts on [Qubit, Mode(d1), Mode(d2)].

#include <cstddef>
#include <span>
#include <vector>

#include "noonsim/hilbert.hpp"

namespace noonsim {

// --- Bessel functions --------------------------------------------------------

inline constexpr int kBesselMaxOrder = 60;
inline constexpr double kBesselMaxArgument = 30.0;

// J_n(x) for |n| <= 60, |x| <= 30. Negative orders and arguments via
// J_{-n}(x) = (-1)^n J_n(x) = J_n(-x).
double bessel_j(int n, double x);

struct ChiResult {
    double value = 0.0;
    // |2 J_{n_max}^2 sin(n_max dphi) / n_max|, the size of the last term kept.
    double last_term = 0.0;
};

// sum_{n=1}^{n_max} 2 J_n(zeta)^2 sin(n dphi) / n
ChiResult chi(double zeta, double dphi, int n_max);

// --- two-mode exchange forms -------------------------------------------------

// i kappa (a1 a2^dag - a2 a1^dag) sigma_z. For qubit eigenvalue s the
// propagator is exp(s kappa t (a1 a2^dag - a1^dag a2)): photons rotate between
// the modes at rate kappa, in a direction set by the qubit.
Operator build_effective(double kappa, const HilbertLayout& layout);

// i Omega (e^{-i varphi} a1^dag a2 - e^{i varphi} a1 a2^dag) sigma_z
Operator build_effective_phased(double omega, double varphi, const HilbertLayout& layout);

// --- periodically driven couplings -------------------------------------------

struct DriveSpec {
    double g0 = 1.0;
    double nu = 10.0;
    double phi1 = 0.0;
    double phi2 = 0.0;
    double zeta = 0.0;   // frequency-modulated scheme only
    double delta = 0.0;  // coupling-modulated scheme only
    int n_max = 40;

    void validate() const;
};

// delta sigma_z/2 + sum_j 2 g0 cos(nu t + phi_j)(sigma_+ a_j + a_j^dag sigma_-)
Operator build_coupling_modulated(const DriveSpec& drive, const HilbertLayout& layout, double t);

// g0 sigma_+ (a1 e^{i zeta cos(nu t - phi1)} + a2 e^{i zeta cos(nu t - phi2)}) + h.c.
Operator build_frequency_modulated(const DriveSpec& drive, const HilbertLayout& layout, double t);

// H(t) = H_0 + sum_{n>=1} (H_n e^{i n nu t} + H_{-n} e^{-i n nu t})
struct Harmonic {
    int n = 1;
    Operator plus;   // H_n
    Operator minus;  // H_{-n}
};

struct FourierHamiltonian {
    Operator h0;
    std::vector<Harmonic> harmonics;
};

// H_1 = sum_j g0 e^{i phi_j} X_j with X_j = sigma_+ a_j + a_j^dag sigma_-.
FourierHamiltonian coupling_modulated_harmonics(const DriveSpec& drive, const HilbertLayout& layout);

// H_n = g0 i^n J_n(zeta) sum_j (sigma_+ a_j + (-1)^n a_j^dag sigma_-) e^{-i n phi_j},
// for n = 1..n_max.
FourierHamiltonian frequency_modulated_harmonics(const DriveSpec& drive, const HilbertLayout& layout);

// H_0 + sum_n [H_n, H_{-n}] / (n nu)
Operator floquet_reduce(const Operator& h0, std::span<const Harmonic> harmonics, double nu);

// --- trapped ion -------------------------------------------------------------

struct TrappedIonParams {
    double g0 = 1.0;
    double eta = 0.05;
    // epsilon_L = |epsilon_L| e^{-i phi_L}
    cplx epsilon_L{1.0, 0.0};

    double phi_L() const { return -std::arg(epsilon_L); }
    // Ratio g0 eta / |epsilon_L|; the reduction needs it small. Recorded, not
    // enforced.
    double rwa_ratio() const { return g0 * eta / std::abs(epsilon_L); }
    void validate() const;
};

enum class TrappedIonStage { full, rwa_reduced, effective };

// Layout [Qubit, cavity a, vibration b].
//  full:        eps_L sigma_+ + eps_L^* sigma_- + g0 eta (b a^dag sigma_- + b^dag a sigma_+)
//  rwa_reduced: (g0 eta / 2)(e^{-i phi_L} a^dag b + e^{i phi_L} a b^dag) Z', Z' = D/|eps_L|
//               with D the drive part of the full stage
//  effective:   i Omega (e^{-i varphi} a^dag b - e^{i varphi} a b^dag) sigma_z,
//               Omega = g0 eta / 2, varphi = phi_L + pi/2
// The effective stage lives in the frame where Z' becomes sigma_z; see
// trapped_ion_frame.
Operator build_trapped_ion(const TrappedIonParams& params, const HilbertLayout& layout, TrappedIonStage stage);

// Qubit unitary W = |1><+'| + |0><-'|, |+-'> = (|0> +- e^{-i phi_L}|1>)/sqrt(2),
// taking Z' to sigma_z.
Matrix trapped_ion_frame(const TrappedIonParams& params);

// --- ensembles (Holstein-Primakoff) ------------------------------------------

struct EnsembleParams {
    std::size_t N0 = 100;
    std::size_t excitation_cutoff = 4;

    void validate() const;
};

// Collective raising operator on Dicke levels 0..cutoff (k excitations):
// <k+1|S_+|k> = sqrt((N0-k)(k+1)).
Matrix collective_raising(const EnsembleParams& params);
// Its Holstein-Primakoff replacement sqrt(N0) c^dag on the same levels.
Matrix hp_raising(const EnsembleParams& params);

struct HpModels {
    HilbertLayout layout;
    Operator exact;
    Operator bosonic;
};

// Qubit coupled to one ensemble, layout [Qubit, Mode(cutoff+1)]:
//   exact   g (S_+ sigma_- + S_- sigma_+)
//   bosonic g sqrt(N0)(c^dag sigma_- + c sigma_+)
HpModels hp_reference_dynamics(const EnsembleParams& params, double g);

// Two ensembles exchanging excitations through the qubit, layout
// [Qubit, Mode(cutoff+1), Mode(cutoff+1)]:
//   exact   i (Omega/N0)(S_+^1 S_-^2 - S_+^2 S_-^1) sigma_z
//   bosonic i Omega (c1^dag c2 - c2^dag c1) sigma_z
HpModels hp_exchange_models(const EnsembleParams& params, double omega);

}  // namespace noonsim
