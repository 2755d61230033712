#pragma once

#include <string>

#include "corrstress/types.hpp"

namespace corrstress {

enum class GeneratorFamily { Pair, Diag, Row, AllEqual };

struct GeneratorKind {
    GeneratorFamily family;
    int n;
    int i = -1;
    int j = -1;
};

TangentDirection make_generator(const GeneratorKind& kind);

// Closed-form exp(t X) per family; matches sym_exp(t * make_generator(kind)).
SpdMatrix closed_form_exp(const GeneratorKind& kind, double t);

// Stressed covariance for a pair stress on a diagonal base: block
// [sigma_i^2 cosh t, sigma_i sigma_j sinh t; ., sigma_j^2 cosh t], rest
// diagonal. Implied correlation between i and j is tanh(t).
SpdMatrix pair_stress_diagonal_base(const Vector& vols, int i, int j, double t);

// lambda_r = l_r (1 - s * sum_{i != r} l_i / (l_r - l_i)); trace-preserving.
Vector lawley_stress(const Vector& eigs, double s);

struct EigDerivatives {
    Vector first;    // lambda_dot_i, aligned with base spectrum (descending)
    Vector second;   // lambda_ddot_i
};

// First and second derivatives at t=0 of the eigenvalues of a matrix path
// A(t) with A(0)=base, given Adot(0) and Addot(0). Requires distinct base
// eigenvalues.
EigDerivatives eig_derivatives(const SpdMatrix& base, const SymMatrix& path_first,
                               const SymMatrix& path_second);

// CLI mini-language: "pair:i,j" | "diag:i,j" | "row:i" | "all" | "file:<path>".
// For the file form, the path is returned and the caller loads it.
struct GeneratorSpec {
    bool from_file = false;
    std::string file;
    GeneratorKind kind{GeneratorFamily::Pair, 0};
};
GeneratorSpec parse_generator_spec(const std::string& text, int n);

}  // namespace corrstress
