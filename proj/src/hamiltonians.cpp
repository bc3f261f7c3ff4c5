#include "noonsim/hamiltonians.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <string>

namespace noonsim {

namespace {

constexpr double kHermitianTol = 1e-12;

void require_exchange_layout(const HilbertLayout& layout, const char* what) {
    if (layout.size() != 3 || !layout.factor(0).is_qubit() || !layout.factor(1).is_mode() ||
        !layout.factor(2).is_mode()) {
        throw ValidationError(std::string(what) + ": layout must be [Qubit, Mode, Mode], got " + layout.describe());
    }
}

Operator checked_hermitian(Operator h, const char* what) {
    const double defect = h.hermiticity_defect();
    if (defect > kHermitianTol * std::max(1.0, h.matrix().cwiseAbs().maxCoeff())) {
        throw NumericalError(std::string(what) + ": result not Hermitian (defect " + std::to_string(defect) + ")");
    }
    return h;
}

struct ModeOps {
    Operator sz, sp, sm, a1, a1d, a2, a2d;
};

ModeOps mode_ops(const HilbertLayout& layout) {
    const std::size_t d1 = layout.factor(1).dim;
    const std::size_t d2 = layout.factor(2).dim;
    return {embed(pauli(Pauli::z), layout, 0),        embed(pauli(Pauli::plus), layout, 0),
            embed(pauli(Pauli::minus), layout, 0),    embed(annihilation(d1), layout, 1),
            embed(creation(d1), layout, 1),           embed(annihilation(d2), layout, 2),
            embed(creation(d2), layout, 2)};
}

// sigma_+ a_j + a_j^dag sigma_-
Operator exchange(const ModeOps& ops, int j) {
    const Operator& a = j == 1 ? ops.a1 : ops.a2;
    const Operator& ad = j == 1 ? ops.a1d : ops.a2d;
    return ops.sp * a + ad * ops.sm;
}

}  // namespace

// --- Bessel functions --------------------------------------------------------

double bessel_j(int n, double x) {
    if (std::abs(n) > kBesselMaxOrder || !(std::abs(x) <= kBesselMaxArgument)) {
        throw ValidationError("bessel_j: (n=" + std::to_string(n) + ", x=" + std::to_string(x) +
                              ") outside validated range |n| <= 60, |x| <= 30");
    }
    double sign = 1.0;
    if (n < 0) {
        n = -n;
        if (n % 2) sign = -sign;
    }
    if (x < 0.0) {
        x = -x;
        if (n % 2) sign = -sign;
    }
    return sign * std::cyl_bessel_j(static_cast<double>(n), x);
}

ChiResult chi(double zeta, double dphi, int n_max) {
    if (n_max < 1) throw ValidationError("chi: n_max must be >= 1");
    ChiResult out;
    for (int n = 1; n <= n_max; ++n) {
        const double jn = bessel_j(n, zeta);
        const double term = 2.0 * jn * jn * std::sin(n * dphi) / n;
        out.value += term;
        out.last_term = std::abs(term);
    }
    return out;
}

// --- two-mode exchange forms -------------------------------------------------

Operator build_effective(double kappa, const HilbertLayout& layout) {
    require_exchange_layout(layout, "build_effective");
    if (!std::isfinite(kappa)) throw ValidationError("build_effective: kappa must be finite");
    // Assembled from the local factors; products of embedded operators would
    // cost O(dim^3) on large truncations.
    const std::size_t d1 = layout.factor(1).dim, d2 = layout.factor(2).dim;
    const Matrix hop = kron(annihilation(d1), creation(d2)) - kron(creation(d1), annihilation(d2));
    return checked_hermitian(Operator(layout, (kI * kappa) * kron(pauli(Pauli::z), hop)), "build_effective");
}

Operator build_effective_phased(double omega, double varphi, const HilbertLayout& layout) {
    require_exchange_layout(layout, "build_effective_phased");
    const std::size_t d1 = layout.factor(1).dim, d2 = layout.factor(2).dim;
    const cplx e = std::exp(-kI * varphi);
    const Matrix hop = e * kron(creation(d1), annihilation(d2)) - std::conj(e) * kron(annihilation(d1), creation(d2));
    return checked_hermitian(Operator(layout, (kI * omega) * kron(pauli(Pauli::z), hop)), "build_effective_phased");
}

// --- periodically driven couplings -------------------------------------------

void DriveSpec::validate() const {
    if (!(nu > 0.0) || !std::isfinite(nu)) throw ValidationError("drive: nu must be > 0");
    if (n_max < 1) throw ValidationError("drive: n_max must be >= 1");
    if (!(zeta >= 0.0)) throw ValidationError("drive: zeta must be >= 0");
    if (!std::isfinite(g0) || !std::isfinite(phi1) || !std::isfinite(phi2) || !std::isfinite(delta)) {
        throw ValidationError("drive: parameters must be finite");
    }
}

Operator build_coupling_modulated(const DriveSpec& drive, const HilbertLayout& layout, double t) {
    drive.validate();
    require_exchange_layout(layout, "build_coupling_modulated");
    const ModeOps ops = mode_ops(layout);
    Operator h = (0.5 * drive.delta) * ops.sz;
    h += (2.0 * drive.g0 * std::cos(drive.nu * t + drive.phi1)) * exchange(ops, 1);
    h += (2.0 * drive.g0 * std::cos(drive.nu * t + drive.phi2)) * exchange(ops, 2);
    return h;
}

Operator build_frequency_modulated(const DriveSpec& drive, const HilbertLayout& layout, double t) {
    drive.validate();
    require_exchange_layout(layout, "build_frequency_modulated");
    const ModeOps ops = mode_ops(layout);
    const cplx e1 = std::exp(kI * (drive.zeta * std::cos(drive.nu * t - drive.phi1)));
    const cplx e2 = std::exp(kI * (drive.zeta * std::cos(drive.nu * t - drive.phi2)));
    const Operator up = drive.g0 * (ops.sp * (e1 * ops.a1 + e2 * ops.a2));
    return up + up.adjoint();
}

FourierHamiltonian coupling_modulated_harmonics(const DriveSpec& drive, const HilbertLayout& layout) {
    drive.validate();
    require_exchange_layout(layout, "coupling_modulated_harmonics");
    const ModeOps ops = mode_ops(layout);
    Operator h1 = (drive.g0 * std::exp(kI * drive.phi1)) * exchange(ops, 1) +
                  (drive.g0 * std::exp(kI * drive.phi2)) * exchange(ops, 2);
    FourierHamiltonian out{(0.5 * drive.delta) * ops.sz, {}};
    Operator h1_dag = h1.adjoint();
    out.harmonics.push_back({1, std::move(h1), std::move(h1_dag)});
    return out;
}

FourierHamiltonian frequency_modulated_harmonics(const DriveSpec& drive, const HilbertLayout& layout) {
    drive.validate();
    require_exchange_layout(layout, "frequency_modulated_harmonics");
    const ModeOps ops = mode_ops(layout);

    const Operator up0 = ops.sp * (ops.a1 + ops.a2);
    FourierHamiltonian out{(drive.g0 * bessel_j(0, drive.zeta)) * (up0 + up0.adjoint()), {}};

    cplx in = 1.0;
    for (int n = 1; n <= drive.n_max; ++n) {
        in *= kI;
        const double sgn = (n % 2) ? -1.0 : 1.0;
        const cplx c = drive.g0 * in * bessel_j(n, drive.zeta);
        Operator hn = (c * std::exp(-kI * (n * drive.phi1))) * (ops.sp * ops.a1 + sgn * (ops.a1d * ops.sm)) +
                      (c * std::exp(-kI * (n * drive.phi2))) * (ops.sp * ops.a2 + sgn * (ops.a2d * ops.sm));
        Operator hn_dag = hn.adjoint();
        out.harmonics.push_back({n, std::move(hn), std::move(hn_dag)});
    }
    return out;
}

Operator floquet_reduce(const Operator& h0, std::span<const Harmonic> harmonics, double nu) {
    if (!(nu > 0.0)) throw ValidationError("floquet_reduce: nu must be > 0");
    std::set<int> seen;
    Operator h = h0;
    bool adjoint_pairs = h0.is_hermitian(kHermitianTol);
    for (const auto& term : harmonics) {
        if (term.n < 1) throw ValidationError("floquet_reduce: harmonic index must be >= 1");
        if (!seen.insert(term.n).second) {
            throw ValidationError("floquet_reduce: harmonic n=" + std::to_string(term.n) + " listed twice");
        }
        h += commutator(term.plus, term.minus) * (1.0 / (term.n * nu));
        if (adjoint_pairs) {
            adjoint_pairs = (term.plus.matrix() - term.minus.matrix().adjoint()).cwiseAbs().maxCoeff() <= kHermitianTol;
        }
    }
    if (adjoint_pairs) return checked_hermitian(std::move(h), "floquet_reduce");
    return h;
}

// --- trapped ion -------------------------------------------------------------

void TrappedIonParams::validate() const {
    if (!(eta >= 0.0)) throw ValidationError("trapped ion: eta must be >= 0");
    if (!(std::abs(epsilon_L) > 0.0)) throw ValidationError("trapped ion: epsilon_L must be nonzero");
    if (!std::isfinite(g0)) throw ValidationError("trapped ion: g0 must be finite");
}

Operator build_trapped_ion(const TrappedIonParams& params, const HilbertLayout& layout, TrappedIonStage stage) {
    params.validate();
    require_exchange_layout(layout, "build_trapped_ion");
    const ModeOps ops = mode_ops(layout);
    const Operator& a = ops.a1;
    const Operator& ad = ops.a1d;
    const Operator& b = ops.a2;
    const Operator& bd = ops.a2d;
    const double g = params.g0 * params.eta;
    const double phi_L = params.phi_L();

    switch (stage) {
        case TrappedIonStage::full: {
            Operator h = params.epsilon_L * ops.sp + std::conj(params.epsilon_L) * ops.sm;
            h += g * (b * ad * ops.sm + bd * a * ops.sp);
            return checked_hermitian(std::move(h), "build_trapped_ion(full)");
        }
        case TrappedIonStage::rwa_reduced: {
            const Operator zp = (params.epsilon_L * ops.sp + std::conj(params.epsilon_L) * ops.sm) *
                                (1.0 / std::abs(params.epsilon_L));
            const cplx e = std::exp(-kI * phi_L);
            Operator h = (0.5 * g) * ((e * (ad * b) + std::conj(e) * (a * bd)) * zp);
            return checked_hermitian(std::move(h), "build_trapped_ion(rwa_reduced)");
        }
        case TrappedIonStage::effective:
            return build_effective_phased(0.5 * g, phi_L + 0.5 * std::numbers::pi, layout);
    }
    throw ValidationError("build_trapped_ion: unknown stage");
}

Matrix trapped_ion_frame(const TrappedIonParams& params) {
    const double s = 1.0 / std::sqrt(2.0);
    const cplx e = std::exp(-kI * params.phi_L());
    // Rows: <0|, <1|. |1><+'| + |0><-'| with <+-'| = (<0| +- e^{+i phi_L}<1|)/sqrt(2).
    Matrix w(2, 2);
    w(1, 0) = s;
    w(1, 1) = s * std::conj(e);
    w(0, 0) = s;
    w(0, 1) = -s * std::conj(e);
    return w;
}

// --- ensembles (Holstein-Primakoff) ------------------------------------------

void EnsembleParams::validate() const {
    if (N0 < 1) throw ValidationError("ensemble: N0 must be >= 1");
    if (excitation_cutoff > N0) {
        throw ValidationError("ensemble: excitation_cutoff " + std::to_string(excitation_cutoff) + " exceeds N0 = " +
                              std::to_string(N0));
    }
}

Matrix collective_raising(const EnsembleParams& params) {
    params.validate();
    const auto d = static_cast<Eigen::Index>(params.excitation_cutoff + 1);
    const double n0 = static_cast<double>(params.N0);
    Matrix s = Matrix::Zero(d, d);
    for (Eigen::Index k = 0; k + 1 < d; ++k) {
        s(k + 1, k) = std::sqrt((n0 - static_cast<double>(k)) * static_cast<double>(k + 1));
    }
    return s;
}

Matrix hp_raising(const EnsembleParams& params) {
    params.validate();
    return std::sqrt(static_cast<double>(params.N0)) * creation(params.excitation_cutoff + 1);
}

HpModels hp_reference_dynamics(const EnsembleParams& params, double g) {
    params.validate();
    HilbertLayout layout{Factor::qubit(), Factor::mode(params.excitation_cutoff + 1)};
    const Operator sp = embed(pauli(Pauli::plus), layout, 0);
    const Operator sm = embed(pauli(Pauli::minus), layout, 0);
    const Operator S = embed(collective_raising(params), layout, 1);
    const Operator C = embed(hp_raising(params), layout, 1);
    Operator exact = g * (S * sm + S.adjoint() * sp);
    Operator bosonic = g * (C * sm + C.adjoint() * sp);
    return {layout, checked_hermitian(std::move(exact), "hp exact"), checked_hermitian(std::move(bosonic), "hp bosonic")};
}

HpModels hp_exchange_models(const EnsembleParams& params, double omega) {
    params.validate();
    const std::size_t d = params.excitation_cutoff + 1;
    HilbertLayout layout{Factor::qubit(), Factor::mode(d), Factor::mode(d)};
    const Operator sz = embed(pauli(Pauli::z), layout, 0);
    const Operator S1 = embed(collective_raising(params), layout, 1);
    const Operator S2 = embed(collective_raising(params), layout, 2);
    const Operator c1d = embed(creation(d), layout, 1);
    const Operator c2d = embed(creation(d), layout, 2);
    const double n0 = static_cast<double>(params.N0);
    Operator exact = (kI * (omega / n0)) * ((S1 * S2.adjoint() - S2 * S1.adjoint()) * sz);
    Operator bosonic = (kI * omega) * ((c1d * c2d.adjoint() - c2d * c1d.adjoint()) * sz);
    return {layout, checked_hermitian(std::move(exact), "hp exchange exact"),
            checked_hermitian(std::move(bosonic), "hp exchange bosonic")};
}

}  // namespace noonsim
