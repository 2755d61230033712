#pragma once

#include <vector>

#include "corrstress/types.hpp"

namespace corrstress {

// d(S1,S2) = sqrt(0.5 * sum_i log^2 lambda_i), lambda_i the eigenvalues of
// S1^{-1} S2, computed through the symmetric form S1^{-1/2} S2 S1^{-1/2}.
double rao_distance(const SpdMatrix& s1, const SpdMatrix& s2);

class GeodesicCurve {
public:
    GeodesicCurve(SpdMatrix start, SpdMatrix end);
    SpdMatrix evaluate(double t) const;
    const SpdMatrix& start() const { return start_; }
    const SpdMatrix& end() const { return end_; }
    const SymMatrix& log_term() const { return log_term_; }

private:
    SpdMatrix start_;
    SpdMatrix end_;
    SymMatrix log_term_;   // log(S1^{-1/2} S2 S1^{-1/2})
    TangentDirection direction_;
    SpdMatrix sqrt_start_;
};

GeodesicCurve geodesic(const SpdMatrix& s1, const SpdMatrix& s2);

// Sigma(t) = S^{1/2} exp(tX) S^{1/2}
SpdMatrix exp_map(const SpdMatrix& base, const TangentDirection& x, double t);

// X with exp_map(s1, X, 1) == s2. Requires det(s1) == det(s2) to 1e-8
// relative unless allow_determinant_mismatch; the override returns a
// direction whose trace carries the determinant change.
TangentDirection log_map(const SpdMatrix& s1, const SpdMatrix& s2,
                         bool allow_determinant_mismatch = false);

double tangent_inner(const TangentDirection& x, const TangentDirection& y);

// |t| * sqrt(0.5 * sum x_i^2); base-independent.
double stress_distance(const TangentDirection& x, double t);

// exp(-stress_distance)
double plausibility(const TangentDirection& x, double t);

// n/2 + (n/2) ln(2 pi) + (1/2) ln det S, in nats.
double entropy(const SpdMatrix& s);

double mahalanobis(const Vector& x, const SpdMatrix& s);

class StressPath {
public:
    StressPath(SpdMatrix base, TangentDirection direction);
    SpdMatrix evaluate(double t) const;
    const SpdMatrix& base() const { return base_; }
    const TangentDirection& direction() const { return direction_; }

private:
    SpdMatrix base_;
    TangentDirection direction_;
    SpdMatrix sqrt_base_;
};

// One sweep row. Entries and eigenvalues come straight from the evaluated
// matrix and its eigensolver without SPD validation, so rows remain
// well-defined at stress sizes where the smallest eigenvalue is below the
// solver's absolute noise; distance uses the exact closed form along the
// path and stays reliable there.
struct PathSample {
    double t;
    Matrix entries;
    double distance;
    double plausibility;
    Vector eigenvalues;   // descending
    double det;           // product of the eigenvalues above
};

std::vector<PathSample> sample_path(const SpdMatrix& base, const TangentDirection& x,
                                    double t_max, int steps);

}  // namespace corrstress
