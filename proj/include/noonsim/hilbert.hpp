#pragma once

// Truncated Fock-space and qubit linear algebra.
//
// A HilbertLayout is an ordered list of tensor factors. Basis states are
// flattened row-major over that list, so the leftmost factor varies slowest:
// for [Qubit, Mode(3)] the index of |q, n> is 3*q + n.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "noonsim/errors.hpp"

namespace noonsim {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr cplx kI{0.0, 1.0};

enum class FactorKind { qubit, mode };

struct Factor {
    FactorKind kind = FactorKind::mode;
    std::size_t dim = 1;

    static Factor qubit() { return {FactorKind::qubit, 2}; }
    static Factor mode(std::size_t truncation) { return {FactorKind::mode, truncation}; }

    bool is_qubit() const { return kind == FactorKind::qubit; }
    bool is_mode() const { return kind == FactorKind::mode; }

    friend bool operator==(const Factor&, const Factor&) = default;
};

class HilbertLayout {
public:
    HilbertLayout() = default;
    HilbertLayout(std::initializer_list<Factor> factors);
    explicit HilbertLayout(std::vector<Factor> factors);

    std::size_t dimension() const { return dimension_; }
    std::size_t size() const { return factors_.size(); }
    const Factor& factor(std::size_t slot) const;
    const std::vector<Factor>& factors() const { return factors_; }

    // Distance in the flattened index between neighbouring levels of `slot`.
    std::size_t stride(std::size_t slot) const;

    std::size_t flatten(std::span<const std::size_t> digits) const;
    std::size_t flatten(std::initializer_list<std::size_t> digits) const {
        return flatten(std::span<const std::size_t>(digits.begin(), digits.size()));
    }
    std::vector<std::size_t> unflatten(std::size_t index) const;

    // Level of factor `slot` in basis state `index`.
    std::size_t digit(std::size_t index, std::size_t slot) const {
        return (index / strides_[slot]) % factors_[slot].dim;
    }

    std::string describe() const;

    friend bool operator==(const HilbertLayout& a, const HilbertLayout& b) {
        return a.factors_ == b.factors_;
    }

private:
    void init();

    std::vector<Factor> factors_;
    std::vector<std::size_t> strides_;
    std::size_t dimension_ = 1;
};

// Dense complex matrix acting on a layout.
class Operator {
public:
    Operator() = default;
    Operator(HilbertLayout layout, Matrix matrix);

    static Operator zero(const HilbertLayout& layout);
    static Operator identity(const HilbertLayout& layout);

    const HilbertLayout& layout() const { return layout_; }
    const Matrix& matrix() const { return matrix_; }
    std::size_t dimension() const { return layout_.dimension(); }

    Operator adjoint() const { return {layout_, matrix_.adjoint()}; }

    // max_ij |A_ij - conj(A_ji)|
    double hermiticity_defect() const;
    bool is_hermitian(double tol = 1e-12) const { return hermiticity_defect() <= tol; }

    Operator& operator+=(const Operator& other);
    Operator& operator-=(const Operator& other);
    Operator& operator*=(cplx s);

    friend Operator operator+(Operator a, const Operator& b) { return a += b; }
    friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
    friend Operator operator*(Operator a, cplx s) { return a *= s; }
    friend Operator operator*(cplx s, Operator a) { return a *= s; }
    friend Operator operator*(Operator a, double s) { return a *= cplx(s); }
    friend Operator operator*(double s, Operator a) { return a *= cplx(s); }
    friend Operator operator-(Operator a) { return a *= cplx(-1.0); }
    friend Operator operator*(const Operator& a, const Operator& b);

private:
    HilbertLayout layout_;
    Matrix matrix_;
};

// Complex amplitudes over a layout. Factory functions in states.hpp return
// unit-norm vectors; arithmetic here does not renormalize implicitly.
class StateVector {
public:
    StateVector() = default;
    StateVector(HilbertLayout layout, Vector amplitudes);

    // Rescales `amplitudes` to unit norm. Throws ImpossibleBranchError on a
    // zero vector.
    static StateVector normalized(HilbertLayout layout, Vector amplitudes);

    const HilbertLayout& layout() const { return layout_; }
    const Vector& amplitudes() const { return amplitudes_; }
    Vector& amplitudes() { return amplitudes_; }
    std::size_t dimension() const { return layout_.dimension(); }

    cplx operator[](std::size_t i) const { return amplitudes_(static_cast<Eigen::Index>(i)); }
    double norm() const { return amplitudes_.norm(); }
    void normalize();

    friend StateVector operator*(const Operator& op, const StateVector& psi);

private:
    HilbertLayout layout_;
    Vector amplitudes_;
};

// <a|b>
cplx inner(const StateVector& a, const StateVector& b);
// <psi|A|psi>
cplx expectation(const Operator& a, const StateVector& psi);

// --- single-factor operators -------------------------------------------------

// a on Fock levels 0..d-1: <n-1|a|n> = sqrt(n).
Matrix annihilation(std::size_t d);
Matrix creation(std::size_t d);
Matrix number(std::size_t d);

enum class Pauli { x, y, z, plus, minus };

// Basis order (|0>, |1>) with sigma_z = |1><1| - |0><0|, sigma_+ = |1><0|.
// sigma_y = -i(sigma_+ - sigma_-) so that sigma_+- = (sigma_x +- i sigma_y)/2.
Matrix pauli(Pauli which);
Matrix hadamard_matrix();

Matrix kron(const Matrix& a, const Matrix& b);

// Lifts `op` (acting on factor `slot` alone) to the full layout.
Operator embed(const Matrix& op, const HilbertLayout& layout, std::size_t slot);

// Lifts an operator acting on the listed factors (row-major over `slots`
// in the order given) to the full layout.
Operator embed(const Matrix& op, const HilbertLayout& layout, std::span<const std::size_t> slots);

// Applies `op` (acting on the listed factors) to `psi` without forming the
// full-space matrix.
StateVector apply_local(const Matrix& op, std::span<const std::size_t> slots, const StateVector& psi);

Operator commutator(const Operator& a, const Operator& b);

// Relabels factors i and j (which must have equal dimension).
Operator swap_factors(const Operator& op, std::size_t i, std::size_t j);

// Layout of the listed factors only, e.g. the two modes of [Q, M, M].
HilbertLayout sub_layout(const HilbertLayout& layout, std::span<const std::size_t> slots);

// Amplitudes of `psi` conditioned on factor `slot` being at `level`, as a
// vector over the remaining factors (unnormalized).
StateVector slice(const StateVector& psi, std::size_t slot, std::size_t level);

// Population of basis states in which some mode of a coupled pair sits at its
// top Fock level while its partner still holds a photon. For generators that
// only exchange photons within the listed pairs, this is exactly the weight
// that the truncation would misrepresent on the next application.
double exchange_leakage(const StateVector& psi,
                        std::span<const std::pair<std::size_t, std::size_t>> coupled_pairs);

// Largest population at the top Fock level over all mode factors.
double top_level_population(const StateVector& psi);

}  // namespace noonsim
