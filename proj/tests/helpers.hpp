#pragma once

#include <algorithm>
#include <random>

#include "corrstress/spdcore.hpp"

namespace test_util {

using corrstress::Matrix;
using corrstress::SpdMatrix;
using corrstress::SymMatrix;
using corrstress::TangentDirection;
using corrstress::Vector;

inline Matrix random_symmetric(int n, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> gauss(0.0, scale);
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            m(i, j) = gauss(rng);
            m(j, i) = m(i, j);
        }
    }
    return m;
}

inline SpdMatrix random_spd(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    Matrix a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a(i, j) = gauss(rng);
    }
    Matrix m = a * a.transpose() + 0.5 * n * Matrix::Identity(n, n);
    return SpdMatrix::validate(m);
}

// SPD with pairwise well separated eigenvalues, for perturbation formulas.
inline SpdMatrix random_spd_spread(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    Matrix a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a(i, j) = gauss(rng);
    }
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ();
    Vector eigs(n);
    std::uniform_real_distribution<double> jitter(0.0, 0.3);
    for (int k = 0; k < n; ++k) eigs(k) = std::pow(1.8, n - k) + jitter(rng);
    Matrix m = q * eigs.asDiagonal() * q.transpose();
    return SpdMatrix::validate(0.5 * (m + m.transpose()));
}

inline TangentDirection random_traceless(int n, std::mt19937_64& rng, double scale = 1.0) {
    Matrix m = random_symmetric(n, rng, scale);
    const double shift = m.trace() / n;
    for (int i = 0; i < n; ++i) m(i, i) -= shift;
    return TangentDirection::make(SymMatrix(m));
}

inline double rel_err(const Matrix& a, const Matrix& b) {
    const double denom = b.norm();
    return (a - b).norm() / (denom > 0.0 ? denom : 1.0);
}

}  // namespace test_util
