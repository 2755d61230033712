#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace corrstress {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kDefaultSpdTol = 1e-12;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotSquare : Error { using Error::Error; };
struct NotSymmetric : Error { using Error::Error; };
struct NotPositiveDefinite : Error { using Error::Error; };
struct NotTraceless : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct DeterminantMismatch : Error { using Error::Error; };
struct SingularBasis : Error { using Error::Error; };
struct BadIndices : Error { using Error::Error; };
struct NonPositiveVol : Error { using Error::Error; };
struct DegenerateSpectrum : Error { using Error::Error; };
struct StressTooLarge : Error { using Error::Error; };
struct NotAntisymmetric : Error { using Error::Error; };
struct NonSpdAlongPath : Error { using Error::Error; };
struct Infeasible : Error { using Error::Error; };
struct BadGeneratorSpec : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct BadSpec : Error { using Error::Error; };

// Symmetric matrix; input is symmetrized (M + M^T)/2 on construction so the
// stored entries satisfy m(i,j) == m(j,i) exactly.
class SymMatrix {
public:
    explicit SymMatrix(Matrix m);
    static SymMatrix zero(int n);
    static SymMatrix identity(int n);

    int n() const { return static_cast<int>(m_.rows()); }
    const Matrix& mat() const { return m_; }
    double operator()(int i, int j) const { return m_(i, j); }
    double trace() const { return m_.trace(); }
    double frobenius() const { return m_.norm(); }

private:
    Matrix m_;
};

// Validated SPD matrix with cached spectral data. Spectrum is descending and
// eigenvector signs are fixed (largest-magnitude component positive) so
// outputs are deterministic across runs.
class SpdMatrix {
public:
    // Checked path: symmetry and positive-definiteness enforced.
    static SpdMatrix validate(const Matrix& raw, double rel_tol = kDefaultSpdTol);

    // Trusted path for results that are SPD by construction (exponentials,
    // orthogonal congruences): caller supplies the spectral cache and the
    // stable log-determinant; no PD rejection is applied, so extreme
    // conditioning cannot spuriously fail.
    static SpdMatrix from_spectral(Matrix entries, Matrix basis, Vector spectrum_desc,
                                   double log_det);

    int n() const { return static_cast<int>(m_.rows()); }
    const Matrix& mat() const { return m_; }
    double operator()(int i, int j) const { return m_(i, j); }
    const Vector& spectrum() const { return spectrum_; }   // descending
    const Matrix& basis() const { return basis_; }         // orthonormal columns
    double log_det() const { return log_det_; }
    double det() const { return std::exp(log_det_); }
    double min_eig() const { return spectrum_(spectrum_.size() - 1); }
    double max_eig() const { return spectrum_(0); }

private:
    SpdMatrix(Matrix m, Matrix basis, Vector spectrum, double log_det)
        : m_(std::move(m)), basis_(std::move(basis)), spectrum_(std::move(spectrum)),
          log_det_(log_det) {}

    Matrix m_;
    Matrix basis_;
    Vector spectrum_;
    double log_det_;
};

// Traceless symmetric generator of a stress path, with cached spectrum
// (descending) and eigenbasis. A nonzero trace is rejected unless
// allow_trace is set; the override exists because covariance
// (non-correlation) stresses carry their determinant change in the trace.
class TangentDirection {
public:
    static TangentDirection make(const SymMatrix& x, bool allow_trace = false);
    static TangentDirection zero(int n);

    int n() const { return sym_.n(); }
    const SymMatrix& sym() const { return sym_; }
    const Matrix& mat() const { return sym_.mat(); }
    const Vector& eigenvalues() const { return eigs_; }    // descending
    const Matrix& basis() const { return basis_; }
    double trace() const { return sym_.trace(); }
    bool traceless() const { return traceless_; }

private:
    TangentDirection(SymMatrix s, Vector eigs, Matrix basis, bool traceless)
        : sym_(std::move(s)), eigs_(std::move(eigs)), basis_(std::move(basis)),
          traceless_(traceless) {}

    SymMatrix sym_;
    Vector eigs_;
    Matrix basis_;
    bool traceless_;
};

// Shared spectral decomposition helper: descending eigenvalues, sign-fixed
// orthonormal basis.
struct SpectralData {
    Vector eigenvalues;
    Matrix basis;
};
SpectralData spectral_decompose(const Matrix& symmetric);

}  // namespace corrstress
