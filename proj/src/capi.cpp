#include "corrstress.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "corrstress/completion.hpp"
#include "corrstress/fisher_rao.hpp"
#include "corrstress/generators.hpp"
#include "corrstress/isospectral.hpp"
#include "corrstress/matrix_io.hpp"
#include "corrstress/spdcore.hpp"

using namespace corrstress;

struct cst_matrix {
    SpdMatrix value;
};

struct cst_direction {
    TangentDirection value;
};

struct cst_completion {
    CompletionResult value;
};

namespace {

thread_local std::string g_last_error;

cst_status fail(cst_status code, const std::string& message) {
    g_last_error = message;
    return code;
}

cst_status translate(const std::exception_ptr& ep) {
    try {
        std::rethrow_exception(ep);
    } catch (const ParseError& e) {
        return fail(CST_ERR_PARSE, e.what());
    } catch (const NotSquare& e) {
        return fail(CST_ERR_NOT_SQUARE, e.what());
    } catch (const NotSymmetric& e) {
        return fail(CST_ERR_NOT_SYMMETRIC, e.what());
    } catch (const NotPositiveDefinite& e) {
        return fail(CST_ERR_NOT_SPD, e.what());
    } catch (const NotTraceless& e) {
        return fail(CST_ERR_NOT_TRACELESS, e.what());
    } catch (const DimensionMismatch& e) {
        return fail(CST_ERR_DIM_MISMATCH, e.what());
    } catch (const DeterminantMismatch& e) {
        return fail(CST_ERR_DET_MISMATCH, e.what());
    } catch (const SingularBasis& e) {
        return fail(CST_ERR_SINGULAR, e.what());
    } catch (const BadIndices& e) {
        return fail(CST_ERR_BAD_INDICES, e.what());
    } catch (const BadGeneratorSpec& e) {
        return fail(CST_ERR_BAD_GENERATOR, e.what());
    } catch (const NonPositiveVol& e) {
        return fail(CST_ERR_NONPOS_VOL, e.what());
    } catch (const DegenerateSpectrum& e) {
        return fail(CST_ERR_DEGENERATE, e.what());
    } catch (const StressTooLarge& e) {
        return fail(CST_ERR_STRESS_TOO_LARGE, e.what());
    } catch (const NotAntisymmetric& e) {
        return fail(CST_ERR_NOT_ANTISYMMETRIC, e.what());
    } catch (const NonSpdAlongPath& e) {
        return fail(CST_ERR_NON_SPD_PATH, e.what());
    } catch (const Infeasible& e) {
        return fail(CST_ERR_INFEASIBLE, e.what());
    } catch (const BadSpec& e) {
        return fail(CST_ERR_BAD_SPEC, e.what());
    } catch (const std::bad_alloc& e) {
        return fail(CST_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(CST_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(CST_ERR_INTERNAL, "unknown error");
    }
}

template <typename F>
cst_status guarded(F&& body) {
    try {
        return body();
    } catch (...) {
        return translate(std::current_exception());
    }
}

Matrix from_buffer(int n, const double* entries) {
    if (n <= 0 || entries == nullptr) throw Error("null or empty input buffer");
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m(i, j) = entries[i * n + j];
    }
    return m;
}

void to_buffer(const Matrix& m, double* out) {
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) out[i * m.cols() + j] = m(i, j);
    }
}

cst_status require(bool ok, const char* what) {
    if (!ok) return fail(CST_ERR_INVALID_ARG, what);
    return CST_OK;
}

}  // namespace

extern "C" {

const char* cst_version(void) { return "1.0.0"; }

const char* cst_last_error(void) { return g_last_error.c_str(); }

cst_status cst_matrix_create(int n, const double* entries, double rel_tol,
                             cst_matrix** out) {
    if (cst_status s = require(out && entries && n > 0, "cst_matrix_create: bad args"))
        return s;
    return guarded([&] {
        const double tol = rel_tol > 0.0 ? rel_tol : kDefaultSpdTol;
        *out = new cst_matrix{SpdMatrix::validate(from_buffer(n, entries), tol)};
        return CST_OK;
    });
}

cst_status cst_matrix_load(const char* path, double rel_tol, cst_matrix** out) {
    if (cst_status s = require(out && path, "cst_matrix_load: bad args")) return s;
    return guarded([&] {
        const double tol = rel_tol > 0.0 ? rel_tol : kDefaultSpdTol;
        *out = new cst_matrix{SpdMatrix::validate(load_matrix_file(path), tol)};
        return CST_OK;
    });
}

cst_status cst_matrix_save(const cst_matrix* m, const char* path, double display_scale,
                           int as_csv) {
    if (cst_status s = require(m && path && display_scale != 0.0,
                               "cst_matrix_save: bad args"))
        return s;
    return guarded([&] {
        if (as_csv) {
            save_matrix_csv(path, m->value.mat(), display_scale);
        } else {
            save_matrix_json(path, m->value.mat(), display_scale);
        }
        return CST_OK;
    });
}

void cst_matrix_free(cst_matrix* m) { delete m; }

int cst_matrix_dim(const cst_matrix* m) { return m ? m->value.n() : 0; }

cst_status cst_matrix_entries(const cst_matrix* m, double* out) {
    if (cst_status s = require(m && out, "cst_matrix_entries: bad args")) return s;
    to_buffer(m->value.mat(), out);
    return CST_OK;
}

cst_status cst_matrix_eigenvalues(const cst_matrix* m, double* out) {
    if (cst_status s = require(m && out, "cst_matrix_eigenvalues: bad args")) return s;
    for (int k = 0; k < m->value.n(); ++k) out[k] = m->value.spectrum()(k);
    return CST_OK;
}

cst_status cst_matrix_det(const cst_matrix* m, double* out) {
    if (cst_status s = require(m && out, "cst_matrix_det: bad args")) return s;
    *out = m->value.det();
    return CST_OK;
}

cst_status cst_matrix_entropy(const cst_matrix* m, double* out) {
    if (cst_status s = require(m && out, "cst_matrix_entropy: bad args")) return s;
    *out = entropy(m->value);
    return CST_OK;
}

cst_status cst_matrix_cov_to_corr(const cst_matrix* m, double* corr, double* vols) {
    if (cst_status s = require(m != nullptr, "cst_matrix_cov_to_corr: bad args")) return s;
    return guarded([&] {
        CorrDecomposition d = cov_to_corr(m->value);
        if (corr != nullptr) to_buffer(d.corr, corr);
        if (vols != nullptr) {
            for (int k = 0; k < m->value.n(); ++k) vols[k] = d.vols(k);
        }
        return CST_OK;
    });
}

cst_status cst_spd_sqrt(const cst_matrix* m, cst_matrix** out) {
    if (cst_status s = require(m && out, "cst_spd_sqrt: bad args")) return s;
    return guarded([&] {
        *out = new cst_matrix{spd_sqrt(m->value)};
        return CST_OK;
    });
}

cst_status cst_spd_inv_sqrt(const cst_matrix* m, cst_matrix** out) {
    if (cst_status s = require(m && out, "cst_spd_inv_sqrt: bad args")) return s;
    return guarded([&] {
        *out = new cst_matrix{spd_inv_sqrt(m->value)};
        return CST_OK;
    });
}

cst_status cst_spd_log(const cst_matrix* m, cst_direction** out) {
    if (cst_status s = require(m && out, "cst_spd_log: bad args")) return s;
    return guarded([&] {
        *out = new cst_direction{TangentDirection::make(spd_log(m->value), true)};
        return CST_OK;
    });
}

cst_status cst_congruence(const cst_matrix* m, const double* v, cst_matrix** out) {
    if (cst_status s = require(m && v && out, "cst_congruence: bad args")) return s;
    return guarded([&] {
        *out = new cst_matrix{congruence(m->value, from_buffer(m->value.n(), v))};
        return CST_OK;
    });
}

cst_status cst_equalizing_basis(const cst_matrix* s1, const cst_matrix* s2, double* out) {
    if (cst_status s = require(s1 && s2 && out, "cst_equalizing_basis: bad args")) return s;
    return guarded([&] {
        to_buffer(equalizing_basis(s1->value, s2->value), out);
        return CST_OK;
    });
}

cst_status cst_direction_create(int n, const double* entries, int allow_trace,
                                cst_direction** out) {
    if (cst_status s = require(out && entries && n > 0, "cst_direction_create: bad args"))
        return s;
    return guarded([&] {
        *out = new cst_direction{
            TangentDirection::make(SymMatrix(from_buffer(n, entries)), allow_trace != 0)};
        return CST_OK;
    });
}

cst_status cst_direction_load(const char* path, int allow_trace, cst_direction** out) {
    if (cst_status s = require(out && path, "cst_direction_load: bad args")) return s;
    return guarded([&] {
        *out = new cst_direction{
            TangentDirection::make(SymMatrix(load_matrix_file(path)), allow_trace != 0)};
        return CST_OK;
    });
}

cst_status cst_direction_generator(const char* spec, int n, cst_direction** out) {
    if (cst_status s = require(out && spec && n > 0, "cst_direction_generator: bad args"))
        return s;
    return guarded([&] {
        GeneratorSpec g = parse_generator_spec(spec, n);
        if (g.from_file) {
            *out = new cst_direction{
                TangentDirection::make(SymMatrix(load_matrix_file(g.file)), false)};
        } else {
            *out = new cst_direction{make_generator(g.kind)};
        }
        return CST_OK;
    });
}

void cst_direction_free(cst_direction* d) { delete d; }

int cst_direction_dim(const cst_direction* d) { return d ? d->value.n() : 0; }

cst_status cst_direction_entries(const cst_direction* d, double* out) {
    if (cst_status s = require(d && out, "cst_direction_entries: bad args")) return s;
    to_buffer(d->value.mat(), out);
    return CST_OK;
}

cst_status cst_direction_eigenvalues(const cst_direction* d, double* out) {
    if (cst_status s = require(d && out, "cst_direction_eigenvalues: bad args")) return s;
    for (int k = 0; k < d->value.n(); ++k) out[k] = d->value.eigenvalues()(k);
    return CST_OK;
}

cst_status cst_direction_trace(const cst_direction* d, double* out) {
    if (cst_status s = require(d && out, "cst_direction_trace: bad args")) return s;
    *out = d->value.trace();
    return CST_OK;
}

cst_status cst_direction_exp(const cst_direction* d, double t, cst_matrix** out) {
    if (cst_status s = require(d && out, "cst_direction_exp: bad args")) return s;
    return guarded([&] {
        *out = new cst_matrix{sym_exp(SymMatrix(t * d->value.mat()))};
        return CST_OK;
    });
}

cst_status cst_rao_distance(const cst_matrix* a, const cst_matrix* b, double* out) {
    if (cst_status s = require(a && b && out, "cst_rao_distance: bad args")) return s;
    return guarded([&] {
        *out = rao_distance(a->value, b->value);
        return CST_OK;
    });
}

cst_status cst_geodesic_point(const cst_matrix* a, const cst_matrix* b, double t,
                              cst_matrix** out) {
    if (cst_status s = require(a && b && out, "cst_geodesic_point: bad args")) return s;
    return guarded([&] {
        *out = new cst_matrix{geodesic(a->value, b->value).evaluate(t)};
        return CST_OK;
    });
}

cst_status cst_exp_map(const cst_matrix* base, const cst_direction* x, double t,
                       cst_matrix** out) {
    if (cst_status s = require(base && x && out, "cst_exp_map: bad args")) return s;
    return guarded([&] {
        *out = new cst_matrix{exp_map(base->value, x->value, t)};
        return CST_OK;
    });
}

cst_status cst_log_map(const cst_matrix* a, const cst_matrix* b, int allow_det_mismatch,
                       cst_direction** out) {
    if (cst_status s = require(a && b && out, "cst_log_map: bad args")) return s;
    return guarded([&] {
        *out = new cst_direction{log_map(a->value, b->value, allow_det_mismatch != 0)};
        return CST_OK;
    });
}

cst_status cst_tangent_inner(const cst_direction* x, const cst_direction* y, double* out) {
    if (cst_status s = require(x && y && out, "cst_tangent_inner: bad args")) return s;
    return guarded([&] {
        *out = tangent_inner(x->value, y->value);
        return CST_OK;
    });
}

cst_status cst_stress_distance(const cst_direction* x, double t, double* out) {
    if (cst_status s = require(x && out, "cst_stress_distance: bad args")) return s;
    *out = stress_distance(x->value, t);
    return CST_OK;
}

cst_status cst_plausibility(const cst_direction* x, double t, double* out) {
    if (cst_status s = require(x && out, "cst_plausibility: bad args")) return s;
    *out = plausibility(x->value, t);
    return CST_OK;
}

cst_status cst_mahalanobis(const cst_matrix* m, const double* x, double* out) {
    if (cst_status s = require(m && x && out, "cst_mahalanobis: bad args")) return s;
    return guarded([&] {
        Vector v(m->value.n());
        for (int k = 0; k < m->value.n(); ++k) v(k) = x[k];
        *out = mahalanobis(v, m->value);
        return CST_OK;
    });
}

cst_status cst_path_samples(const cst_matrix* base, const cst_direction* x, double t_max,
                            int steps, double* out) {
    if (cst_status s = require(base && x && out && steps >= 0,
                               "cst_path_samples: bad args"))
        return s;
    return guarded([&] {
        const int n = base->value.n();
        auto rows = sample_path(base->value, x->value, t_max, steps);
        double* cursor = out;
        for (const auto& row : rows) {
            *cursor++ = row.t;
            *cursor++ = row.distance;
            *cursor++ = row.plausibility;
            for (int k = 0; k < n; ++k) *cursor++ = row.eigenvalues(k);
            *cursor++ = row.det;
        }
        return CST_OK;
    });
}

cst_status cst_path_point(const cst_matrix* base, const cst_direction* x, double t,
                          double* out) {
    if (cst_status s = require(base && x && out, "cst_path_point: bad args")) return s;
    return guarded([&] {
        auto rows = sample_path(base->value, x->value, t, 0);
        to_buffer(rows.front().entries, out);
        return CST_OK;
    });
}

cst_status cst_closed_form_exp(const char* spec, int n, double t, cst_matrix** out) {
    if (cst_status s = require(spec && out && n > 0, "cst_closed_form_exp: bad args"))
        return s;
    return guarded([&] {
        GeneratorSpec g = parse_generator_spec(spec, n);
        if (g.from_file) {
            throw BadGeneratorSpec("closed forms exist only for the named families");
        }
        *out = new cst_matrix{closed_form_exp(g.kind, t)};
        return CST_OK;
    });
}

cst_status cst_pair_stress(const double* vols, int n, int i, int j, double t,
                           cst_matrix** out) {
    if (cst_status s = require(vols && out && n > 0, "cst_pair_stress: bad args")) return s;
    return guarded([&] {
        Vector v(n);
        for (int k = 0; k < n; ++k) v(k) = vols[k];
        *out = new cst_matrix{pair_stress_diagonal_base(v, i, j, t)};
        return CST_OK;
    });
}

cst_status cst_lawley_stress(const double* eigs, int n, double s, double* out) {
    if (cst_status st = require(eigs && out && n > 0, "cst_lawley_stress: bad args"))
        return st;
    return guarded([&] {
        Vector v(n);
        for (int k = 0; k < n; ++k) v(k) = eigs[k];
        Vector stressed = lawley_stress(v, s);
        for (int k = 0; k < n; ++k) out[k] = stressed(k);
        return CST_OK;
    });
}

cst_status cst_eig_derivatives(const cst_matrix* base, const double* adot,
                               const double* addot, double* first, double* second) {
    if (cst_status s = require(base && adot && addot, "cst_eig_derivatives: bad args"))
        return s;
    return guarded([&] {
        const int n = base->value.n();
        EigDerivatives d = eig_derivatives(base->value, SymMatrix(from_buffer(n, adot)),
                                           SymMatrix(from_buffer(n, addot)));
        for (int k = 0; k < n; ++k) {
            if (first != nullptr) first[k] = d.first(k);
            if (second != nullptr) second[k] = d.second(k);
        }
        return CST_OK;
    });
}

cst_status cst_isospectral_point(const cst_matrix* base, const double* a, double t,
                                 cst_matrix** out) {
    if (cst_status s = require(base && a && out, "cst_isospectral_point: bad args"))
        return s;
    return guarded([&] {
        IsospectralPath path(base->value, from_buffer(base->value.n(), a));
        *out = new cst_matrix{isospectral_evaluate(path, t)};
        return CST_OK;
    });
}

cst_status cst_isospectral_length(const cst_matrix* base, const double* a, double t0,
                                  double t1, int steps, double* out) {
    if (cst_status s = require(base && a && out, "cst_isospectral_length: bad args"))
        return s;
    return guarded([&] {
        IsospectralPath path(base->value, from_buffer(base->value.n(), a));
        *out = path_length([&](double t) { return isospectral_evaluate(path, t); }, t0,
                           t1, steps);
        return CST_OK;
    });
}

cst_status cst_path_length(int n, cst_path_fn evaluator, void* user, double t0, double t1,
                           int steps, double* out) {
    if (cst_status s = require(evaluator && out && n > 0, "cst_path_length: bad args"))
        return s;
    return guarded([&] {
        std::vector<double> buf(static_cast<size_t>(n) * n);
        auto eval = [&](double t) {
            if (evaluator(t, buf.data(), user) != 0) {
                throw NonSpdAlongPath("path callback failed at t=" + std::to_string(t));
            }
            return SpdMatrix::validate(from_buffer(n, buf.data()));
        };
        *out = path_length(eval, t0, t1, steps);
        return CST_OK;
    });
}

cst_status cst_isospectral_obstruction(const cst_matrix* base, const cst_direction* x,
                                       double* out) {
    if (cst_status s = require(base && x && out, "cst_isospectral_obstruction: bad args"))
        return s;
    return guarded([&] {
        Vector v = geodesic_isospectral_obstruction(base->value, x->value);
        for (int k = 0; k < base->value.n(); ++k) out[k] = v(k);
        return CST_OK;
    });
}

cst_status cst_complete(const char* spec_json, const char* base_dir, cst_completion** out) {
    if (cst_status s = require(spec_json && out, "cst_complete: bad args")) return s;
    return guarded([&] {
        CompletionSpec spec =
            parse_completion_spec(spec_json, base_dir == nullptr ? "" : base_dir);
        CompletionResult result = complete(spec);
        const bool converged = result.converged;
        *out = new cst_completion{std::move(result)};
        if (!converged) {
            return fail(CST_ERR_NOT_CONVERGED,
                        "optimizer hit its evaluation budget; result is the best found");
        }
        return CST_OK;
    });
}

void cst_completion_free(cst_completion* c) { delete c; }

cst_status cst_completion_target(const cst_completion* c, cst_matrix** out) {
    if (cst_status s = require(c && out, "cst_completion_target: bad args")) return s;
    *out = new cst_matrix{c->value.target};
    return CST_OK;
}

cst_status cst_completion_direction(const cst_completion* c, cst_direction** out) {
    if (cst_status s = require(c && out, "cst_completion_direction: bad args")) return s;
    *out = new cst_direction{c->value.direction};
    return CST_OK;
}

cst_status cst_completion_distance(const cst_completion* c, double* out) {
    if (cst_status s = require(c && out, "cst_completion_distance: bad args")) return s;
    *out = c->value.distance;
    return CST_OK;
}

cst_status cst_completion_plausibility(const cst_completion* c, double* out) {
    if (cst_status s = require(c && out, "cst_completion_plausibility: bad args")) return s;
    *out = c->value.plausibility;
    return CST_OK;
}

long cst_completion_iterations(const cst_completion* c) {
    return c ? c->value.iterations : 0;
}

int cst_completion_converged(const cst_completion* c) {
    return (c && c->value.converged) ? 1 : 0;
}

int cst_completion_multiple_minima(const cst_completion* c) {
    return (c && c->value.multiple_minima) ? 1 : 0;
}

}  // extern "C"
