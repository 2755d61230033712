#pragma once

#include <functional>

#include "corrstress/types.hpp"

namespace corrstress {

// Constant-generator Lax path Sigma(t) = exp(tA) base exp(tA)^T with A
// antisymmetric; eigenvalues are preserved for all t.
struct IsospectralPath {
    IsospectralPath(SpdMatrix base_in, Matrix rotation_generator_in);
    SpdMatrix base;
    Matrix rotation_generator;
};

SpdMatrix isospectral_evaluate(const IsospectralPath& path, double t);

// Numeric Rao length: composite midpoint rule over sqrt(0.5 tr((S^-1 S')^2))
// with central-difference S'; O(h^2) in the step size.
double path_length(const std::function<SpdMatrix(double)>& evaluator, double t0,
                   double t1, int steps);

// lambda_ddot_i at t=0 along exp_map(base, X, t); all-zero output only for
// X == 0, so no nontrivial stress path keeps every eigenvalue fixed.
Vector geodesic_isospectral_obstruction(const SpdMatrix& base, const TangentDirection& x);

}  // namespace corrstress
