#include "corrstress/isospectral.hpp"

#include <cmath>
#include <complex>
#include <utility>

#include <Eigen/Eigenvalues>

#include "corrstress/generators.hpp"
#include "corrstress/spdcore.hpp"

namespace corrstress {

IsospectralPath::IsospectralPath(SpdMatrix base_in, Matrix rotation_generator_in)
    : base(std::move(base_in)), rotation_generator(std::move(rotation_generator_in)) {
    if (rotation_generator.rows() != base.n() || rotation_generator.cols() != base.n()) {
        throw DimensionMismatch("rotation generator does not match base dimension");
    }
    const double tol = 1e-12 * (rotation_generator.norm() + 1.0);
    if ((rotation_generator + rotation_generator.transpose()).norm() > tol) {
        throw NotAntisymmetric("A + A^T has norm above tolerance");
    }
}

namespace {

// exp(tA) for antisymmetric A via the Hermitian matrix iA: if iA = U L U^H
// with real L, then exp(tA) = U exp(-itL) U^H, which is real orthogonal.
Matrix rotation_exponential(const Matrix& a, double t) {
    using Complex = std::complex<double>;
    const int n = static_cast<int>(a.rows());
    Eigen::MatrixXcd h = Complex(0.0, 1.0) * a.cast<Complex>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
    if (solver.info() != Eigen::Success) throw Error("rotation eigendecomposition failed");
    Eigen::VectorXcd phase(n);
    for (int k = 0; k < n; ++k) {
        phase(k) = std::exp(Complex(0.0, -t * solver.eigenvalues()(k)));
    }
    Eigen::MatrixXcd r = solver.eigenvectors() * phase.asDiagonal() *
                         solver.eigenvectors().adjoint();
    return r.real();
}

}  // namespace

SpdMatrix isospectral_evaluate(const IsospectralPath& path, double t) {
    Matrix r = rotation_exponential(path.rotation_generator, t);
    Matrix out = r * path.base.mat() * r.transpose();
    out = 0.5 * (out + out.transpose()).eval();
    // The congruence is orthogonal, so the base spectrum carries over exactly;
    // only the eigenbasis rotates.
    Matrix basis = r * path.base.basis();
    for (int k = 0; k < basis.cols(); ++k) {
        int arg = 0;
        basis.col(k).cwiseAbs().maxCoeff(&arg);
        if (basis(arg, k) < 0.0) basis.col(k) = -basis.col(k);
    }
    return SpdMatrix::from_spectral(std::move(out), std::move(basis),
                                    path.base.spectrum(), path.base.log_det());
}

double path_length(const std::function<SpdMatrix(double)>& evaluator, double t0,
                   double t1, int steps) {
    if (steps < 2) throw Error("path_length needs at least 2 steps");
    const double h = (t1 - t0) / steps;
    if (h == 0.0) return 0.0;
    double total = 0.0;
    for (int k = 0; k < steps; ++k) {
        const double tm = t0 + (k + 0.5) * h;
        try {
            SpdMatrix mid = evaluator(tm);
            SpdMatrix plus = evaluator(tm + 0.5 * h);
            SpdMatrix minus = evaluator(tm - 0.5 * h);
            Matrix deriv = (plus.mat() - minus.mat()) / h;
            Matrix w = mid.mat().ldlt().solve(deriv);
            total += std::sqrt(0.5 * (w * w).trace()) * std::abs(h);
        } catch (const NotPositiveDefinite& e) {
            throw NonSpdAlongPath(std::string("path leaves the SPD cone: ") + e.what());
        }
    }
    return total;
}

Vector geodesic_isospectral_obstruction(const SpdMatrix& base, const TangentDirection& x) {
    if (base.n() != x.n()) {
        throw DimensionMismatch("direction does not match base dimension");
    }
    // Along Sigma(t) = R exp(tX) R with R = base^{1/2}:
    // Adot = R X R, Addot = R X^2 R; then apply the perturbation formulas.
    const Matrix r = spd_sqrt(base).mat();
    SymMatrix adot(r * x.mat() * r);
    SymMatrix addot(r * x.mat() * x.mat() * r);
    return eig_derivatives(base, adot, addot).second;
}

}  // namespace corrstress
