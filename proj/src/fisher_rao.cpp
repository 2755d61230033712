#include "corrstress/fisher_rao.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "corrstress/spdcore.hpp"

namespace corrstress {

namespace {

void require_same_dim(int a, int b) {
    if (a != b) {
        throw DimensionMismatch("dimensions " + std::to_string(a) + " vs " +
                                std::to_string(b));
    }
}

// Whitened matrix W = S1^{-1/2} S2 S1^{-1/2}; its eigenvalues are those of
// S1^{-1} S2, real and positive.
Matrix whitened(const SpdMatrix& s1, const SpdMatrix& s2) {
    const Matrix r = spd_inv_sqrt(s1).mat();
    Matrix w = r * s2.mat() * r;
    return 0.5 * (w + w.transpose());
}

// exp(tX) from the direction's cached spectral data.
Matrix direction_exponential(const TangentDirection& x, double t) {
    Vector mapped = (t * x.eigenvalues().array()).exp();
    Matrix e = x.basis() * mapped.asDiagonal() * x.basis().transpose();
    return 0.5 * (e + e.transpose()).eval();
}

// Sigma(t) = R exp(tX) R for a precomputed square root R of the base; the
// log-determinant follows the exact identity det = det(base) exp(t tr X).
SpdMatrix push_exponential(const SpdMatrix& sqrt_base, double base_log_det,
                           const TangentDirection& x, double t) {
    Matrix out = sqrt_base.mat() * direction_exponential(x, t) * sqrt_base.mat();
    out = 0.5 * (out + out.transpose()).eval();
    SpectralData sd = spectral_decompose(out);
    return SpdMatrix::from_spectral(std::move(out), std::move(sd.basis),
                                    std::move(sd.eigenvalues),
                                    base_log_det + t * x.trace());
}

}  // namespace

double rao_distance(const SpdMatrix& s1, const SpdMatrix& s2) {
    require_same_dim(s1.n(), s2.n());
    SpectralData sd = spectral_decompose(whitened(s1, s2));
    double sum = 0.0;
    for (int k = 0; k < s1.n(); ++k) {
        const double l = std::log(sd.eigenvalues(k));
        sum += l * l;
    }
    return std::sqrt(0.5 * sum);
}

GeodesicCurve::GeodesicCurve(SpdMatrix start, SpdMatrix end)
    : start_(std::move(start)),
      end_(std::move(end)),
      log_term_(SymMatrix::zero(start_.n())),
      direction_(TangentDirection::zero(start_.n())),
      sqrt_start_(spd_sqrt(start_)) {
    require_same_dim(start_.n(), end_.n());
    SpectralData sd = spectral_decompose(whitened(start_, end_));
    Vector logged = sd.eigenvalues.array().log();
    log_term_ = SymMatrix(sd.basis * logged.asDiagonal() * sd.basis.transpose());
    direction_ = TangentDirection::make(log_term_, true);
}

SpdMatrix GeodesicCurve::evaluate(double t) const {
    return push_exponential(sqrt_start_, start_.log_det(), direction_, t);
}

GeodesicCurve geodesic(const SpdMatrix& s1, const SpdMatrix& s2) {
    return GeodesicCurve(s1, s2);
}

SpdMatrix exp_map(const SpdMatrix& base, const TangentDirection& x, double t) {
    require_same_dim(base.n(), x.n());
    return push_exponential(spd_sqrt(base), base.log_det(), x, t);
}

TangentDirection log_map(const SpdMatrix& s1, const SpdMatrix& s2,
                         bool allow_determinant_mismatch) {
    require_same_dim(s1.n(), s2.n());
    const double log_ratio = s2.log_det() - s1.log_det();
    if (!allow_determinant_mismatch && std::abs(log_ratio) > 1e-8) {
        throw DeterminantMismatch(
            "determinants differ by relative " + std::to_string(std::expm1(log_ratio)) +
            "; not a pure correlation stress (pass the override to proceed)");
    }
    SpectralData sd = spectral_decompose(whitened(s1, s2));
    Vector logged = sd.eigenvalues.array().log();
    SymMatrix x(sd.basis * logged.asDiagonal() * sd.basis.transpose());
    return TangentDirection::make(x, allow_determinant_mismatch);
}

double tangent_inner(const TangentDirection& x, const TangentDirection& y) {
    require_same_dim(x.n(), y.n());
    return 0.5 * (x.mat() * y.mat()).trace();
}

double stress_distance(const TangentDirection& x, double t) {
    return std::abs(t) * std::sqrt(0.5 * x.eigenvalues().squaredNorm());
}

double plausibility(const TangentDirection& x, double t) {
    return std::exp(-stress_distance(x, t));
}

double entropy(const SpdMatrix& s) {
    const double n = static_cast<double>(s.n());
    return 0.5 * n + 0.5 * n * std::log(2.0 * std::numbers::pi) + 0.5 * s.log_det();
}

double mahalanobis(const Vector& x, const SpdMatrix& s) {
    if (x.size() != s.n()) {
        throw DimensionMismatch("vector length " + std::to_string(x.size()) +
                                " vs matrix dimension " + std::to_string(s.n()));
    }
    Vector y = s.basis().transpose() * x;
    double sum = 0.0;
    for (int k = 0; k < s.n(); ++k) sum += y(k) * y(k) / s.spectrum()(k);
    return std::sqrt(sum);
}

StressPath::StressPath(SpdMatrix base, TangentDirection direction)
    : base_(std::move(base)), direction_(std::move(direction)), sqrt_base_(spd_sqrt(base_)) {
    require_same_dim(base_.n(), direction_.n());
}

SpdMatrix StressPath::evaluate(double t) const {
    return push_exponential(sqrt_base_, base_.log_det(), direction_, t);
}

std::vector<PathSample> sample_path(const SpdMatrix& base, const TangentDirection& x,
                                    double t_max, int steps) {
    if (steps < 0) throw Error("negative step count");
    const SpdMatrix r = spd_sqrt(base);
    const double rate = std::sqrt(0.5 * x.eigenvalues().squaredNorm());
    std::vector<PathSample> rows;
    rows.reserve(static_cast<size_t>(steps) + 1);
    for (int k = 0; k <= steps; ++k) {
        const double t = steps == 0 ? t_max : t_max * static_cast<double>(k) / steps;
        Matrix m = r.mat() * direction_exponential(x, t) * r.mat();
        m = 0.5 * (m + m.transpose()).eval();
        SpectralData sd = spectral_decompose(m);
        const double d = std::abs(t) * rate;
        rows.push_back(PathSample{t, std::move(m), d, std::exp(-d),
                                  sd.eigenvalues, sd.eigenvalues.prod()});
    }
    return rows;
}

}  // namespace corrstress
