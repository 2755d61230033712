#include "corrstress/spdcore.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <utility>

namespace corrstress {

SymMatrix::SymMatrix(Matrix m) {
    if (m.rows() != m.cols()) {
        throw NotSquare("matrix is " + std::to_string(m.rows()) + "x" +
                        std::to_string(m.cols()));
    }
    m_ = 0.5 * (m + m.transpose()).eval();
}

SymMatrix SymMatrix::zero(int n) { return SymMatrix(Matrix::Zero(n, n)); }
SymMatrix SymMatrix::identity(int n) { return SymMatrix(Matrix::Identity(n, n)); }

SpectralData spectral_decompose(const Matrix& symmetric) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric);
    if (solver.info() != Eigen::Success) {
        throw Error("eigendecomposition failed");
    }
    const int n = static_cast<int>(symmetric.rows());
    // Solver returns ascending order; flip to descending.
    Vector eigs(n);
    Matrix basis(n, n);
    for (int k = 0; k < n; ++k) {
        eigs(k) = solver.eigenvalues()(n - 1 - k);
        basis.col(k) = solver.eigenvectors().col(n - 1 - k);
    }
    // Deterministic sign: largest-magnitude component of each vector positive.
    for (int k = 0; k < n; ++k) {
        int arg = 0;
        basis.col(k).cwiseAbs().maxCoeff(&arg);
        if (basis(arg, k) < 0.0) basis.col(k) = -basis.col(k);
    }
    return {std::move(eigs), std::move(basis)};
}

SpdMatrix SpdMatrix::validate(const Matrix& raw, double rel_tol) {
    if (raw.rows() != raw.cols()) {
        throw NotSquare("matrix is " + std::to_string(raw.rows()) + "x" +
                        std::to_string(raw.cols()));
    }
    const double scale = raw.cwiseAbs().maxCoeff();
    const double asym = (raw - raw.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-8 * (scale > 0.0 ? scale : 1.0)) {
        throw NotSymmetric("relative asymmetry " + std::to_string(asym / scale));
    }
    Matrix sym = 0.5 * (raw + raw.transpose());
    SpectralData sd = spectral_decompose(sym);
    const double max_eig = sd.eigenvalues(0);
    const double min_eig = sd.eigenvalues(sd.eigenvalues.size() - 1);
    if (!(max_eig > 0.0) || min_eig <= rel_tol * max_eig) {
        throw NotPositiveDefinite("min eigenvalue " + std::to_string(min_eig) +
                                  ", max " + std::to_string(max_eig));
    }
    const double log_det = sd.eigenvalues.array().log().sum();
    return SpdMatrix(std::move(sym), std::move(sd.basis), std::move(sd.eigenvalues), log_det);
}

SpdMatrix SpdMatrix::from_spectral(Matrix entries, Matrix basis, Vector spectrum_desc,
                                   double log_det) {
    Matrix sym = 0.5 * (entries + entries.transpose()).eval();
    return SpdMatrix(std::move(sym), std::move(basis), std::move(spectrum_desc), log_det);
}

TangentDirection TangentDirection::make(const SymMatrix& x, bool allow_trace) {
    const double tol = 1e-12 * (x.frobenius() + 1.0);
    const bool traceless = std::abs(x.trace()) <= tol;
    if (!traceless && !allow_trace) {
        throw NotTraceless("trace " + std::to_string(x.trace()) +
                           " exceeds tolerance " + std::to_string(tol));
    }
    SpectralData sd = spectral_decompose(x.mat());
    return TangentDirection(x, std::move(sd.eigenvalues), std::move(sd.basis), traceless);
}

TangentDirection TangentDirection::zero(int n) {
    return TangentDirection::make(SymMatrix::zero(n));
}

SpdMatrix validate_spd(const Matrix& raw, double rel_tol) {
    return SpdMatrix::validate(raw, rel_tol);
}

namespace {

SpdMatrix spectral_function(const SpdMatrix& s, double (*f)(double)) {
    const int n = s.n();
    Vector mapped(n);
    for (int k = 0; k < n; ++k) mapped(k) = f(s.spectrum()(k));
    Matrix entries = s.basis() * mapped.asDiagonal() * s.basis().transpose();
    // f here is monotone increasing on (0, inf), so order is preserved.
    const double log_det = mapped.array().log().sum();
    return SpdMatrix::from_spectral(std::move(entries), s.basis(), std::move(mapped), log_det);
}

}  // namespace

SpdMatrix spd_sqrt(const SpdMatrix& s) {
    return spectral_function(s, [](double v) { return std::sqrt(v); });
}

SpdMatrix spd_inv_sqrt(const SpdMatrix& s) {
    const int n = s.n();
    Vector mapped(n);
    Matrix basis(n, n);
    // 1/sqrt reverses the order; rebuild descending.
    for (int k = 0; k < n; ++k) {
        mapped(k) = 1.0 / std::sqrt(s.spectrum()(n - 1 - k));
        basis.col(k) = s.basis().col(n - 1 - k);
    }
    Matrix entries = basis * mapped.asDiagonal() * basis.transpose();
    return SpdMatrix::from_spectral(std::move(entries), std::move(basis), std::move(mapped),
                                    -0.5 * s.log_det());
}

SpdMatrix sym_exp(const SymMatrix& x) {
    SpectralData sd = spectral_decompose(x.mat());
    const int n = x.n();
    Vector mapped(n);
    for (int k = 0; k < n; ++k) mapped(k) = std::exp(sd.eigenvalues(k));
    Matrix entries = sd.basis * mapped.asDiagonal() * sd.basis.transpose();
    // det(exp X) = exp(tr X); the trace is the numerically exact exponent.
    return SpdMatrix::from_spectral(std::move(entries), std::move(sd.basis),
                                    std::move(mapped), x.trace());
}

SymMatrix spd_log(const SpdMatrix& s) {
    Vector mapped = s.spectrum().array().log();
    return SymMatrix(s.basis() * mapped.asDiagonal() * s.basis().transpose());
}

SpdMatrix congruence(const SpdMatrix& s, const Matrix& v) {
    if (v.rows() != s.n() || v.cols() != s.n()) {
        throw DimensionMismatch("basis is " + std::to_string(v.rows()) + "x" +
                                std::to_string(v.cols()) + " for n=" + std::to_string(s.n()));
    }
    Eigen::FullPivLU<Matrix> lu(v);
    if (!lu.isInvertible()) {
        throw SingularBasis("change-of-basis matrix is singular");
    }
    Matrix out = v.transpose() * s.mat() * v;
    return SpdMatrix::validate(0.5 * (out + out.transpose()), kDefaultSpdTol);
}

Matrix equalizing_basis(const SpdMatrix& s1, const SpdMatrix& s2) {
    if (s1.n() != s2.n()) {
        throw DimensionMismatch("dimensions " + std::to_string(s1.n()) + " vs " +
                                std::to_string(s2.n()));
    }
    return spd_inv_sqrt(s2).mat() * spd_sqrt(s1).mat();
}

CorrDecomposition cov_to_corr(const SpdMatrix& s) {
    const int n = s.n();
    Vector vols(n);
    for (int i = 0; i < n; ++i) vols(i) = std::sqrt(s(i, i));
    Matrix corr(n, n);
    for (int i = 0; i < n; ++i) {
        corr(i, i) = 1.0;
        for (int j = i + 1; j < n; ++j) {
            corr(i, j) = corr(j, i) = s(i, j) / (vols(i) * vols(j));
        }
    }
    return {std::move(corr), std::move(vols)};
}

}  // namespace corrstress
