#pragma once

#include "corrstress/types.hpp"

namespace corrstress {

SpdMatrix validate_spd(const Matrix& raw, double rel_tol = kDefaultSpdTol);

SpdMatrix spd_sqrt(const SpdMatrix& s);
SpdMatrix spd_inv_sqrt(const SpdMatrix& s);

// exp computed spectrally; result is SPD for any symmetric input.
SpdMatrix sym_exp(const SymMatrix& x);

SymMatrix spd_log(const SpdMatrix& s);

// V^T S V for invertible V.
SpdMatrix congruence(const SpdMatrix& s, const Matrix& v);

// V with congruence(s2, V) == s1, i.e. V = s2^{-1/2} s1^{1/2}.
Matrix equalizing_basis(const SpdMatrix& s1, const SpdMatrix& s2);

struct CorrDecomposition {
    Matrix corr;
    Vector vols;
};
CorrDecomposition cov_to_corr(const SpdMatrix& s);

}  // namespace corrstress
