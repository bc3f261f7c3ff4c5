#pragma once

#include <cstdint>
#include <random>

#include "noonsim/hilbert.hpp"

namespace testsupport {

using noonsim::cplx;
using noonsim::Matrix;
using noonsim::Vector;

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = cplx(n(rng), n(rng));
    return m;
}

inline Matrix random_hermitian(std::mt19937_64& rng, Eigen::Index d) {
    const Matrix m = random_matrix(rng, d, d);
    return 0.5 * (m + m.adjoint());
}

inline noonsim::StateVector random_state(std::mt19937_64& rng, const noonsim::HilbertLayout& layout) {
    const auto d = static_cast<Eigen::Index>(layout.dimension());
    return noonsim::StateVector::normalized(layout, random_matrix(rng, d, 1).col(0));
}

inline double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace testsupport
