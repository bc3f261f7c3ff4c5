#include "noonsim/hilbert.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace noonsim {

namespace {

constexpr std::size_t kMaxDimension = std::size_t{1} << 26;

void require_same_layout(const HilbertLayout& a, const HilbertLayout& b, const char* what) {
    if (!(a == b)) {
        throw ValidationError(std::string(what) + ": layout mismatch (" + a.describe() + " vs " +
                              b.describe() + ")");
    }
}

// Offsets (in the full flattened index) of every local basis state of `slots`,
// row-major over the slots as listed, and of every basis state of the
// complementary factors.
struct LocalIndexing {
    std::vector<std::size_t> local_offsets;
    std::vector<std::size_t> outer_offsets;
};

LocalIndexing local_indexing(const HilbertLayout& layout, std::span<const std::size_t> slots) {
    std::vector<bool> used(layout.size(), false);
    for (std::size_t s : slots) {
        if (s >= layout.size()) {
            throw ValidationError("slot " + std::to_string(s) + " out of range for layout " +
                                  layout.describe());
        }
        if (used[s]) throw ValidationError("slot " + std::to_string(s) + " listed twice");
        used[s] = true;
    }

    auto offsets_for = [&](const std::vector<std::size_t>& which) {
        std::vector<std::size_t> out{0};
        for (std::size_t s : which) {
            std::vector<std::size_t> next;
            next.reserve(out.size() * layout.factor(s).dim);
            for (std::size_t base : out) {
                for (std::size_t lvl = 0; lvl < layout.factor(s).dim; ++lvl) {
                    next.push_back(base + lvl * layout.stride(s));
                }
            }
            out = std::move(next);
        }
        return out;
    };

    std::vector<std::size_t> local(slots.begin(), slots.end());
    std::vector<std::size_t> outer;
    for (std::size_t s = 0; s < layout.size(); ++s) {
        if (!used[s]) outer.push_back(s);
    }
    return {offsets_for(local), offsets_for(outer)};
}

}  // namespace

// --- HilbertLayout -----------------------------------------------------------

HilbertLayout::HilbertLayout(std::initializer_list<Factor> factors) : factors_(factors) { init(); }

HilbertLayout::HilbertLayout(std::vector<Factor> factors) : factors_(std::move(factors)) { init(); }

void HilbertLayout::init() {
    dimension_ = 1;
    for (const auto& f : factors_) {
        if (f.dim == 0) throw ValidationError("empty factor: truncation dimension must be >= 1");
        if (f.is_qubit() && f.dim != 2) throw ValidationError("qubit factor must have dimension 2");
        if (dimension_ > kMaxDimension / f.dim) {
            throw ValidationError("layout dimension exceeds the dense-representation budget");
        }
        dimension_ *= f.dim;
    }
    strides_.assign(factors_.size(), 1);
    for (std::size_t i = factors_.size(); i-- > 1;) {
        strides_[i - 1] = strides_[i] * factors_[i].dim;
    }
}

const Factor& HilbertLayout::factor(std::size_t slot) const {
    if (slot >= factors_.size()) {
        throw ValidationError("slot " + std::to_string(slot) + " out of range for layout " + describe());
    }
    return factors_[slot];
}

std::size_t HilbertLayout::stride(std::size_t slot) const {
    factor(slot);
    return strides_[slot];
}

std::size_t HilbertLayout::flatten(std::span<const std::size_t> digits) const {
    if (digits.size() != factors_.size()) {
        throw ValidationError("multi-index has " + std::to_string(digits.size()) + " entries, layout has " +
                              std::to_string(factors_.size()) + " factors");
    }
    std::size_t index = 0;
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (digits[i] >= factors_[i].dim) {
            throw TruncationError("level " + std::to_string(digits[i]) + " exceeds factor " +
                                  std::to_string(i) + " of dimension " + std::to_string(factors_[i].dim));
        }
        index += digits[i] * strides_[i];
    }
    return index;
}

std::vector<std::size_t> HilbertLayout::unflatten(std::size_t index) const {
    if (index >= dimension_) throw ValidationError("flat index out of range");
    std::vector<std::size_t> digits(factors_.size());
    for (std::size_t i = 0; i < factors_.size(); ++i) digits[i] = digit(index, i);
    return digits;
}

std::string HilbertLayout::describe() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (i) os << ", ";
        if (factors_[i].is_qubit()) {
            os << "Qubit";
        } else {
            os << "Mode(" << factors_[i].dim << ')';
        }
    }
    os << ']';
    return os.str();
}

// --- Operator ----------------------------------------------------------------

Operator::Operator(HilbertLayout layout, Matrix matrix) : layout_(std::move(layout)), matrix_(std::move(matrix)) {
    const auto d = static_cast<Eigen::Index>(layout_.dimension());
    if (matrix_.rows() != d || matrix_.cols() != d) {
        throw ValidationError("operator matrix is " + std::to_string(matrix_.rows()) + "x" +
                              std::to_string(matrix_.cols()) + ", layout " + layout_.describe() +
                              " needs side " + std::to_string(d));
    }
}

Operator Operator::zero(const HilbertLayout& layout) {
    const auto d = static_cast<Eigen::Index>(layout.dimension());
    return {layout, Matrix::Zero(d, d)};
}

Operator Operator::identity(const HilbertLayout& layout) {
    const auto d = static_cast<Eigen::Index>(layout.dimension());
    return {layout, Matrix::Identity(d, d)};
}

double Operator::hermiticity_defect() const {
    return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

Operator& Operator::operator+=(const Operator& other) {
    require_same_layout(layout_, other.layout_, "operator sum");
    matrix_ += other.matrix_;
    return *this;
}

Operator& Operator::operator-=(const Operator& other) {
    require_same_layout(layout_, other.layout_, "operator difference");
    matrix_ -= other.matrix_;
    return *this;
}

Operator& Operator::operator*=(cplx s) {
    matrix_ *= s;
    return *this;
}

Operator operator*(const Operator& a, const Operator& b) {
    require_same_layout(a.layout_, b.layout_, "operator product");
    return {a.layout_, a.matrix_ * b.matrix_};
}

// --- StateVector -------------------------------------------------------------

StateVector::StateVector(HilbertLayout layout, Vector amplitudes)
    : layout_(std::move(layout)), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != static_cast<Eigen::Index>(layout_.dimension())) {
        throw ValidationError("state has " + std::to_string(amplitudes_.size()) + " amplitudes, layout " +
                              layout_.describe() + " needs " + std::to_string(layout_.dimension()));
    }
}

StateVector StateVector::normalized(HilbertLayout layout, Vector amplitudes) {
    StateVector psi(std::move(layout), std::move(amplitudes));
    psi.normalize();
    return psi;
}

void StateVector::normalize() {
    const double n = amplitudes_.norm();
    if (!(n > std::numeric_limits<double>::min()) || !std::isfinite(n)) {
        throw ImpossibleBranchError("cannot normalize a state of norm " + std::to_string(n));
    }
    amplitudes_ /= n;
}

StateVector operator*(const Operator& op, const StateVector& psi) {
    require_same_layout(op.layout(), psi.layout_, "operator application");
    return {psi.layout_, op.matrix() * psi.amplitudes_};
}

cplx inner(const StateVector& a, const StateVector& b) {
    require_same_layout(a.layout(), b.layout(), "inner product");
    return a.amplitudes().dot(b.amplitudes());
}

cplx expectation(const Operator& a, const StateVector& psi) {
    require_same_layout(a.layout(), psi.layout(), "expectation value");
    return psi.amplitudes().dot(a.matrix() * psi.amplitudes());
}

// --- single-factor operators -------------------------------------------------

Matrix annihilation(std::size_t d) {
    if (d == 0) throw ValidationError("annihilation operator on an empty space (d = 0)");
    const auto n = static_cast<Eigen::Index>(d);
    Matrix a = Matrix::Zero(n, n);
    for (Eigen::Index k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    return a;
}

Matrix creation(std::size_t d) { return annihilation(d).adjoint(); }

Matrix number(std::size_t d) {
    if (d == 0) throw ValidationError("number operator on an empty space (d = 0)");
    const auto n = static_cast<Eigen::Index>(d);
    Matrix m = Matrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) m(k, k) = static_cast<double>(k);
    return m;
}

Matrix pauli(Pauli which) {
    Matrix m = Matrix::Zero(2, 2);
    switch (which) {
        case Pauli::x:
            m(0, 1) = 1.0;
            m(1, 0) = 1.0;
            break;
        case Pauli::y:
            m(0, 1) = kI;
            m(1, 0) = -kI;
            break;
        case Pauli::z:
            m(0, 0) = -1.0;
            m(1, 1) = 1.0;
            break;
        case Pauli::plus:
            m(1, 0) = 1.0;
            break;
        case Pauli::minus:
            m(0, 1) = 1.0;
            break;
    }
    return m;
}

Matrix hadamard_matrix() {
    Matrix h(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    h << s, s, s, -s;
    return h;
}

Matrix kron(const Matrix& a, const Matrix& b) { return Eigen::kroneckerProduct(a, b).eval(); }

Operator embed(const Matrix& op, const HilbertLayout& layout, std::size_t slot) {
    const std::size_t slots[] = {slot};
    return embed(op, layout, std::span<const std::size_t>(slots));
}

Operator embed(const Matrix& op, const HilbertLayout& layout, std::span<const std::size_t> slots) {
    const auto idx = local_indexing(layout, slots);
    const auto local_dim = static_cast<Eigen::Index>(idx.local_offsets.size());
    if (op.rows() != local_dim || op.cols() != local_dim) {
        throw ValidationError("embedded operator is " + std::to_string(op.rows()) + "x" +
                              std::to_string(op.cols()) + " but the selected factors have dimension " +
                              std::to_string(local_dim));
    }
    const auto d = static_cast<Eigen::Index>(layout.dimension());
    Matrix m = Matrix::Zero(d, d);
    for (std::size_t base : idx.outer_offsets) {
        for (Eigen::Index c = 0; c < local_dim; ++c) {
            for (Eigen::Index r = 0; r < local_dim; ++r) {
                const cplx v = op(r, c);
                if (v != cplx{}) {
                    m(static_cast<Eigen::Index>(base + idx.local_offsets[r]),
                      static_cast<Eigen::Index>(base + idx.local_offsets[c])) = v;
                }
            }
        }
    }
    return {layout, std::move(m)};
}

StateVector apply_local(const Matrix& op, std::span<const std::size_t> slots, const StateVector& psi) {
    const auto idx = local_indexing(psi.layout(), slots);
    const auto local_dim = static_cast<Eigen::Index>(idx.local_offsets.size());
    if (op.rows() != local_dim || op.cols() != local_dim) {
        throw ValidationError("local operator dimension does not match the selected factors");
    }
    Vector out(psi.amplitudes().size());
    Vector block(local_dim);
    for (std::size_t base : idx.outer_offsets) {
        for (Eigen::Index k = 0; k < local_dim; ++k) {
            block(k) = psi.amplitudes()(static_cast<Eigen::Index>(base + idx.local_offsets[k]));
        }
        const Vector mapped = op * block;
        for (Eigen::Index k = 0; k < local_dim; ++k) {
            out(static_cast<Eigen::Index>(base + idx.local_offsets[k])) = mapped(k);
        }
    }
    return {psi.layout(), std::move(out)};
}

Operator commutator(const Operator& a, const Operator& b) {
    require_same_layout(a.layout(), b.layout(), "commutator");
    return {a.layout(), a.matrix() * b.matrix() - b.matrix() * a.matrix()};
}

Operator swap_factors(const Operator& op, std::size_t i, std::size_t j) {
    const auto& layout = op.layout();
    if (layout.factor(i) != layout.factor(j)) {
        throw ValidationError("swap_factors: factors " + std::to_string(i) + " and " + std::to_string(j) +
                              " differ");
    }
    const std::size_t d = layout.dimension();
    std::vector<Eigen::Index> perm(d);
    for (std::size_t k = 0; k < d; ++k) {
        auto digits = layout.unflatten(k);
        std::swap(digits[i], digits[j]);
        perm[k] = static_cast<Eigen::Index>(layout.flatten(digits));
    }
    Matrix m(op.matrix().rows(), op.matrix().cols());
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            m(perm[r], perm[c]) = op.matrix()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        }
    }
    return {layout, std::move(m)};
}

HilbertLayout sub_layout(const HilbertLayout& layout, std::span<const std::size_t> slots) {
    std::vector<Factor> f;
    f.reserve(slots.size());
    for (std::size_t s : slots) f.push_back(layout.factor(s));
    return HilbertLayout(std::move(f));
}

StateVector slice(const StateVector& psi, std::size_t slot, std::size_t level) {
    const auto& layout = psi.layout();
    if (level >= layout.factor(slot).dim) throw ValidationError("slice level out of range");
    std::vector<std::size_t> rest;
    for (std::size_t s = 0; s < layout.size(); ++s) {
        if (s != slot) rest.push_back(s);
    }
    const auto idx = local_indexing(layout, rest);
    Vector out(static_cast<Eigen::Index>(idx.local_offsets.size()));
    const std::size_t shift = level * layout.stride(slot);
    for (std::size_t k = 0; k < idx.local_offsets.size(); ++k) {
        out(static_cast<Eigen::Index>(k)) = psi.amplitudes()(static_cast<Eigen::Index>(idx.local_offsets[k] + shift));
    }
    return {sub_layout(layout, rest), std::move(out)};
}

double exchange_leakage(const StateVector& psi,
                        std::span<const std::pair<std::size_t, std::size_t>> coupled_pairs) {
    const auto& layout = psi.layout();
    for (const auto& [i, j] : coupled_pairs) {
        if (!layout.factor(i).is_mode() || !layout.factor(j).is_mode()) {
            throw ValidationError("exchange_leakage: coupled slots must be modes");
        }
    }
    double leak = 0.0;
    for (std::size_t k = 0; k < layout.dimension(); ++k) {
        bool at_risk = false;
        for (const auto& [i, j] : coupled_pairs) {
            const std::size_t ni = layout.digit(k, i);
            const std::size_t nj = layout.digit(k, j);
            const std::size_t top_i = layout.factor(i).dim - 1;
            const std::size_t top_j = layout.factor(j).dim - 1;
            if ((ni == top_i && nj > 0) || (nj == top_j && ni > 0)) {
                at_risk = true;
                break;
            }
        }
        if (at_risk) leak += std::norm(psi[k]);
    }
    return leak;
}

double top_level_population(const StateVector& psi) {
    const auto& layout = psi.layout();
    double worst = 0.0;
    for (std::size_t s = 0; s < layout.size(); ++s) {
        if (!layout.factor(s).is_mode()) continue;
        const std::size_t top = layout.factor(s).dim - 1;
        double p = 0.0;
        for (std::size_t k = 0; k < layout.dimension(); ++k) {
            if (layout.digit(k, s) == top) p += std::norm(psi[k]);
        }
        worst = std::max(worst, p);
    }
    return worst;
}

}  // namespace noonsim
