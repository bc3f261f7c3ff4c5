#include "noonsim/evolution.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

namespace noonsim {

namespace {

void require_hermitian(const Matrix& h, const char* what) {
    const double defect = (h - h.adjoint()).cwiseAbs().maxCoeff();
    if (defect > kGeneratorHermitianTol) {
        throw ValidationError(std::string(what) + ": generator is not Hermitian (defect " + std::to_string(defect) +
                              ")");
    }
}

// Induced 1-norm; cheap upper bound for the spectral norm of H.
double one_norm(const Matrix& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

}  // namespace

void PropagatorConfig::validate() const {
    if (!(dt > 0.0)) throw ValidationError("propagator: dt must be > 0");
    if (!(tol > 0.0)) throw ValidationError("propagator: tol must be > 0");
    if (!(unitarity_check_threshold > 0.0)) throw ValidationError("propagator: unitarity threshold must be > 0");
}

void check_norm(const StateVector& psi, double threshold, const char* what) {
    const double drift = std::abs(psi.norm() - 1.0);
    if (!(drift <= threshold)) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3e", drift);
        throw NumericalError(std::string(what) + ": norm drifted by " + buf);
    }
}

Matrix unitary(const Matrix& h, double t, ExpmMethod method) {
    require_hermitian(h, "unitary");
    if (method == ExpmMethod::eigen) {
        // Symmetrize so the solver sees an exactly Hermitian input.
        const Matrix hs = 0.5 * (h + h.adjoint());
        Eigen::SelfAdjointEigenSolver<Matrix> es(hs);
        if (es.info() != Eigen::Success) throw NumericalError("unitary: eigendecomposition failed");
        const Vector phases = (-kI * t * es.eigenvalues().cast<cplx>()).array().exp();
        return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    }
    const Matrix a = (-kI * t) * h;
    return a.exp();
}

Operator propagator(const Operator& h, double t, ExpmMethod method) {
    return {h.layout(), unitary(h.matrix(), t, method)};
}

StateVector expm_apply(const Operator& h, double t, const StateVector& psi, const PropagatorConfig& config) {
    config.validate();
    require_hermitian(h.matrix(), "expm_apply");
    if (!(h.layout() == psi.layout())) throw ValidationError("expm_apply: layout mismatch");
    if (config.method == ExpmMethod::eigen) {
        StateVector out(psi.layout(), unitary(h.matrix(), t, ExpmMethod::eigen) * psi.amplitudes());
        check_norm(out, config.unitarity_check_threshold, "expm_apply");
        return out;
    }

    const double scale = one_norm(h.matrix()) * std::abs(t);
    const auto substeps = static_cast<long>(std::max(1.0, std::ceil(scale)));
    const cplx step = -kI * (t / static_cast<double>(substeps));

    Vector v = psi.amplitudes();
    for (long s = 0; s < substeps; ++s) {
        Vector term = v;
        Vector acc = v;
        const double ref = v.norm();
        for (int k = 1; k < 200; ++k) {
            term = (step / static_cast<double>(k)) * (h.matrix() * term);
            acc += term;
            if (term.norm() <= config.tol * 1e-2 * ref) break;
        }
        v = std::move(acc);
    }
    StateVector out(psi.layout(), std::move(v));
    check_norm(out, config.unitarity_check_threshold, "expm_apply");
    return out;
}

StateVector propagate_td(const HamiltonianSource& h_of_t, double t0, double t1, const PropagatorConfig& config,
                         const StateVector& psi) {
    config.validate();
    if (!(t1 > t0)) throw ValidationError("propagate_td: t1 must exceed t0");
    const auto steps = static_cast<long>(std::ceil((t1 - t0) / config.dt - 1e-9));
    const double dt = (t1 - t0) / static_cast<double>(steps);
    Vector v = psi.amplitudes();
    for (long s = 0; s < steps; ++s) {
        const double mid = t0 + (static_cast<double>(s) + 0.5) * dt;
        const Operator h = h_of_t(mid);
        if (!(h.layout() == psi.layout())) throw ValidationError("propagate_td: layout mismatch");
        v = unitary(h.matrix(), dt, config.method) * v;
    }
    StateVector out(psi.layout(), std::move(v));
    check_norm(out, config.unitarity_check_threshold, "propagate_td");
    return out;
}

StateVector propagate_periodic(const HamiltonianSource& h_of_t, double period, std::size_t steps_per_period, double t,
                               const StateVector& psi, const PropagatorConfig& config) {
    if (!(period > 0.0)) throw ValidationError("propagate_periodic: period must be > 0");
    if (steps_per_period == 0) throw ValidationError("propagate_periodic: steps_per_period must be >= 1");
    if (!(t >= 0.0)) throw ValidationError("propagate_periodic: t must be >= 0");
    const double dt = period / static_cast<double>(steps_per_period);
    const auto d = static_cast<Eigen::Index>(psi.dimension());

    Matrix u_period = Matrix::Identity(d, d);
    for (std::size_t s = 0; s < steps_per_period; ++s) {
        const Operator h = h_of_t((static_cast<double>(s) + 0.5) * dt);
        if (!(h.layout() == psi.layout())) throw ValidationError("propagate_periodic: layout mismatch");
        u_period = unitary(h.matrix(), dt, config.method) * u_period;
    }
    // Rounding in the product of many step unitaries would otherwise be
    // amplified by the repeated application below; replace the product by the
    // nearest unitary (polar factor).
    const Eigen::JacobiSVD<Matrix> svd(u_period, Eigen::ComputeFullU | Eigen::ComputeFullV);
    u_period = svd.matrixU() * svd.matrixV().adjoint();

    const double whole = std::floor(t / period);
    Vector v = psi.amplitudes();
    for (long k = 0; k < static_cast<long>(whole); ++k) v = u_period * v;

    const double rest = t - whole * period;
    if (rest > 0.0) {
        const auto n = static_cast<long>(std::ceil(rest / dt - 1e-9));
        const double h_step = rest / static_cast<double>(std::max(1L, n));
        for (long s = 0; s < n; ++s) {
            const Operator h = h_of_t((static_cast<double>(s) + 0.5) * h_step);
            v = unitary(h.matrix(), h_step, config.method) * v;
        }
    }
    StateVector out(psi.layout(), std::move(v));
    check_norm(out, config.unitarity_check_threshold, "propagate_periodic");
    return out;
}

}  // namespace noonsim
