#include "corrstress/completion.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <utility>

#include <nlohmann/json.hpp>

#include "corrstress/fisher_rao.hpp"
#include "corrstress/matrix_io.hpp"
#include "corrstress/spdcore.hpp"

namespace corrstress {

namespace {

constexpr double kPenaltyBase = 1e6;

void validate_spec(const CompletionSpec& spec) {
    const int n = spec.base.n();
    std::vector<std::vector<bool>> seen(n, std::vector<bool>(n, false));
    for (const auto& p : spec.pinned) {
        if (p.i < 0 || p.j < 0 || p.i >= n || p.j >= n) {
            throw BadSpec("pinned entry (" + std::to_string(p.i) + "," +
                          std::to_string(p.j) + ") out of bounds for n=" + std::to_string(n));
        }
        if (p.i > p.j) {
            throw BadSpec("pinned entries use i <= j; got (" + std::to_string(p.i) + "," +
                          std::to_string(p.j) + ")");
        }
        if (seen[p.i][p.j]) {
            throw BadSpec("pinned entry (" + std::to_string(p.i) + "," +
                          std::to_string(p.j) + ") repeated");
        }
        seen[p.i][p.j] = true;
        if (p.i == p.j && !(p.value > 0.0)) {
            throw BadSpec("pinned diagonal (" + std::to_string(p.i) + "," +
                          std::to_string(p.i) + ") must be positive");
        }
    }
}

struct Workspace {
    const CompletionSpec& spec;
    std::vector<std::pair<int, int>> free_pos;   // all free, row-major upper triangle
    Matrix pinned_template;                      // pins filled, frees zero
    Matrix base_inv_sqrt;
    int designated = -1;                         // index into free_pos, or -1

    explicit Workspace(const CompletionSpec& s)
        : spec(s), free_pos(free_positions(s)), pinned_template(Matrix::Zero(s.base.n(), s.base.n())),
          base_inv_sqrt(spd_inv_sqrt(s.base).mat()) {
        for (const auto& p : s.pinned) {
            pinned_template(p.i, p.j) = p.value;
            pinned_template(p.j, p.i) = p.value;
        }
        if (spec.preserve_determinant) {
            double best = -1.0;
            for (size_t k = 0; k < free_pos.size(); ++k) {
                const auto& [i, j] = free_pos[k];
                if (i == j && spec.base(i, i) > best) {
                    best = spec.base(i, i);
                    designated = static_cast<int>(k);
                }
            }
        }
    }

    Matrix assemble(const std::vector<double>& free_values) const {
        Matrix m = pinned_template;
        for (size_t k = 0; k < free_pos.size(); ++k) {
            const auto& [i, j] = free_pos[k];
            m(i, j) = free_values[k];
            m(j, i) = free_values[k];
        }
        return m;
    }

    double d2_or_penalty(const Matrix& candidate) const {
        Eigen::SelfAdjointEigenSolver<Matrix> probe(candidate, Eigen::EigenvaluesOnly);
        const double min_eig = probe.eigenvalues()(0);
        if (!(min_eig > 0.0)) {
            return kPenaltyBase + std::abs(min_eig) * 1e6;
        }
        Matrix w = base_inv_sqrt * candidate * base_inv_sqrt;
        Eigen::SelfAdjointEigenSolver<Matrix> ws(0.5 * (w + w.transpose()),
                                                 Eigen::EigenvaluesOnly);
        double sum = 0.0;
        for (int k = 0; k < candidate.rows(); ++k) {
            const double l = std::log(ws.eigenvalues()(k));
            sum += l * l;
        }
        return 0.5 * sum;
    }

    // det(M) is affine in the designated diagonal entry; solve it from two
    // determinant evaluations so the candidate matches det(base) exactly.
    // Returns false when no solution can give an SPD matrix (non-positive
    // cofactor or non-positive diagonal value).
    bool eliminate(Matrix& m, double* out_value) const {
        const int d = free_pos[static_cast<size_t>(designated)].first;
        m(d, d) = 0.0;
        const double b = m.determinant();
        m(d, d) = 1.0;
        const double a = m.determinant() - b;
        if (!(a > 0.0)) return false;
        const double value = (spec.base.det() - b) / a;
        if (!(value > 0.0)) return false;
        m(d, d) = value;
        if (out_value != nullptr) *out_value = value;
        return true;
    }
};

// Standard Nelder-Mead with reflection 1, expansion 2, contraction 0.5,
// shrink 0.5, over one restart. Returns best point, value, whether the
// tolerance (rather than the evaluation budget) stopped it, and appends the
// running best to trace.
struct SimplexOutcome {
    std::vector<double> x;
    double f = 0.0;
    bool converged = false;
    long iterations = 0;
};

SimplexOutcome nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                           const std::vector<double>& start,
                           const std::vector<double>& scales,
                           const CompletionOptions& opt, long* evals_used,
                           std::vector<double>* trace, double* global_best) {
    const size_t dim = start.size();
    struct Vertex {
        std::vector<double> x;
        double f;
    };
    std::vector<Vertex> simplex;
    simplex.reserve(dim + 1);
    long evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        const double v = f(x);
        if (v < *global_best) *global_best = v;
        return v;
    };
    simplex.push_back({start, eval(start)});
    for (size_t k = 0; k < dim; ++k) {
        std::vector<double> v = start;
        v[k] += 0.1 * scales[k];
        simplex.push_back({v, eval(v)});
    }
    auto order = [&] {
        std::sort(simplex.begin(), simplex.end(),
                  [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    };
    order();

    SimplexOutcome out;
    while (true) {
        ++out.iterations;
        if (trace != nullptr) trace->push_back(*global_best);

        const double f_spread = simplex.back().f - simplex.front().f;
        double x_spread = 0.0;
        for (size_t k = 0; k < dim; ++k) {
            double lo = simplex[0].x[k], hi = simplex[0].x[k];
            for (const auto& v : simplex) {
                lo = std::min(lo, v.x[k]);
                hi = std::max(hi, v.x[k]);
            }
            x_spread = std::max(
                x_spread, (hi - lo) / (std::abs(simplex[0].x[k]) + scales[k]));
        }
        if (f_spread <= opt.f_tol || x_spread <= opt.x_tol_rel) {
            out.converged = true;
            break;
        }
        if (evals + *evals_used >= opt.max_evals) break;

        std::vector<double> centroid(dim, 0.0);
        for (size_t v = 0; v < dim; ++v) {
            for (size_t k = 0; k < dim; ++k) centroid[k] += simplex[v].x[k];
        }
        for (auto& c : centroid) c /= static_cast<double>(dim);

        auto blend = [&](double coeff) {
            std::vector<double> x(dim);
            for (size_t k = 0; k < dim; ++k) {
                x[k] = centroid[k] + coeff * (centroid[k] - simplex.back().x[k]);
            }
            return x;
        };

        std::vector<double> reflected = blend(1.0);
        const double fr = eval(reflected);
        if (fr < simplex.front().f) {
            std::vector<double> expanded = blend(2.0);
            const double fe = eval(expanded);
            if (fe < fr) {
                simplex.back() = {std::move(expanded), fe};
            } else {
                simplex.back() = {std::move(reflected), fr};
            }
        } else if (fr < simplex[dim - 1].f) {
            simplex.back() = {std::move(reflected), fr};
        } else {
            const bool outside = fr < simplex.back().f;
            std::vector<double> contracted(dim);
            for (size_t k = 0; k < dim; ++k) {
                const double& worst = outside ? reflected[k] : simplex.back().x[k];
                contracted[k] = centroid[k] + 0.5 * (worst - centroid[k]);
            }
            const double fc = eval(contracted);
            if (fc < (outside ? fr : simplex.back().f)) {
                simplex.back() = {std::move(contracted), fc};
            } else {
                for (size_t v = 1; v <= dim; ++v) {
                    for (size_t k = 0; k < dim; ++k) {
                        simplex[v].x[k] =
                            simplex[0].x[k] + 0.5 * (simplex[v].x[k] - simplex[0].x[k]);
                    }
                    simplex[v].f = eval(simplex[v].x);
                }
            }
        }
        order();
    }
    *evals_used += evals;
    out.x = simplex.front().x;
    out.f = simplex.front().f;
    return out;
}

}  // namespace

std::vector<std::pair<int, int>> free_positions(const CompletionSpec& spec) {
    validate_spec(spec);
    const int n = spec.base.n();
    std::vector<std::vector<bool>> pinned(n, std::vector<bool>(n, false));
    for (const auto& p : spec.pinned) pinned[p.i][p.j] = true;
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            if (!pinned[i][j]) out.emplace_back(i, j);
        }
    }
    return out;
}

double objective(const CompletionSpec& spec, const std::vector<double>& free_values) {
    Workspace ws(spec);
    if (free_values.size() != ws.free_pos.size()) {
        throw BadSpec("expected " + std::to_string(ws.free_pos.size()) +
                      " free values, got " + std::to_string(free_values.size()));
    }
    return ws.d2_or_penalty(ws.assemble(free_values));
}

CompletionResult complete(const CompletionSpec& spec) {
    Workspace ws(spec);
    const CompletionOptions& opt = spec.options;

    auto finish = [&](Matrix target_entries, long iterations, bool converged,
                      bool multiple_minima, double spread,
                      std::vector<double> trace) -> CompletionResult {
        SpdMatrix target = [&] {
            try {
                return SpdMatrix::validate(target_entries);
            } catch (const NotPositiveDefinite& e) {
                throw Infeasible(std::string("completion is not positive definite: ") +
                                 e.what());
            }
        }();
        if (spec.preserve_determinant) {
            const double mismatch = std::abs(target.log_det() - spec.base.log_det());
            if (mismatch > 1e-8) {
                throw Infeasible("no determinant-preserving completion found "
                                 "(closest relative mismatch " +
                                 std::to_string(std::expm1(mismatch)) + ")");
            }
        }
        // Elimination-mode targets match the determinant to machine precision
        // and yield a strictly traceless direction. Penalty-mode optima can
        // retain an O(1/mu) residual below the gate above; carry it in the
        // direction's trace instead of failing.
        TangentDirection direction = [&] {
            if (!spec.preserve_determinant) return log_map(spec.base, target, true);
            try {
                return log_map(spec.base, target, false);
            } catch (const NotTraceless&) {
                return log_map(spec.base, target, true);
            }
        }();
        const double d = rao_distance(spec.base, target);
        return CompletionResult{std::move(target), std::move(direction), d, std::exp(-d),
                                iterations, converged, multiple_minima, spread,
                                std::move(trace)};
    };

    // Fully pinned: only feasibility to check.
    if (ws.free_pos.empty()) {
        Matrix m = ws.pinned_template;
        Eigen::SelfAdjointEigenSolver<Matrix> probe(m, Eigen::EigenvaluesOnly);
        if (!(probe.eigenvalues()(0) > 0.0)) {
            throw Infeasible("pinned matrix is not positive definite");
        }
        return finish(std::move(m), 0, true, false, 0.0, {});
    }

    // Reduced coordinates: all free entries except the designated one.
    std::vector<size_t> reduced;
    for (size_t k = 0; k < ws.free_pos.size(); ++k) {
        if (static_cast<int>(k) != ws.designated) reduced.push_back(k);
    }

    const bool eliminate_det = spec.preserve_determinant && ws.designated >= 0;
    const bool penalty_mode = spec.preserve_determinant && ws.designated < 0;

    // Lift reduced coordinates to the full free vector; in elimination mode
    // the designated entry is solved so det matches exactly.
    auto lift = [&](const std::vector<double>& y, bool* feasible) -> Matrix {
        Matrix m = ws.pinned_template;
        for (size_t k = 0; k < reduced.size(); ++k) {
            const auto& [i, j] = ws.free_pos[reduced[k]];
            m(i, j) = y[k];
            m(j, i) = y[k];
        }
        *feasible = true;
        if (eliminate_det) *feasible = ws.eliminate(m, nullptr);
        return m;
    };

    double mu = 0.0;   // penalty weight, only used in penalty mode
    auto reduced_objective = [&](const std::vector<double>& y) {
        bool feasible = true;
        Matrix m = lift(y, &feasible);
        if (!feasible) return kPenaltyBase * 2.0;
        double v = ws.d2_or_penalty(m);
        if (penalty_mode && v < kPenaltyBase) {
            Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
            double log_det = 0.0;
            for (int k = 0; k < m.rows(); ++k) log_det += std::log(es.eigenvalues()(k));
            const double gap = log_det - spec.base.log_det();
            v += mu * gap * gap;
        }
        return v;
    };

    // Only the designated entry is free: solve it directly.
    if (reduced.empty()) {
        Matrix m = ws.pinned_template;
        if (eliminate_det) {
            if (!ws.eliminate(m, nullptr)) {
                throw Infeasible("determinant constraint has no positive solution");
            }
        }
        Eigen::SelfAdjointEigenSolver<Matrix> probe(m, Eigen::EigenvaluesOnly);
        if (!(probe.eigenvalues()(0) > 0.0)) {
            throw Infeasible("completed matrix is not positive definite");
        }
        return finish(std::move(m), 0, true, false, 0.0, {});
    }

    std::vector<double> start0(reduced.size()), scales(reduced.size());
    for (size_t k = 0; k < reduced.size(); ++k) {
        const auto& [i, j] = ws.free_pos[reduced[k]];
        start0[k] = spec.base(i, j);
        scales[k] = std::sqrt(spec.base(i, i) * spec.base(j, j));
    }

    long evals_used = 0;
    long iterations = 0;
    std::vector<double> trace;
    double global_best = std::numeric_limits<double>::infinity();
    std::vector<SimplexOutcome> outcomes;

    // The ladder must push the stationary log-det gap (which scales like
    // 1/mu) well below the 1e-8 feasibility gate in finish().
    const int rounds = penalty_mode ? 9 : 1;
    for (int r = 0; r < std::max(1, opt.restarts); ++r) {
        std::mt19937_64 rng(opt.seed + static_cast<std::uint64_t>(r));
        std::normal_distribution<double> jitter(0.0, 0.25);
        std::vector<double> start = start0;
        if (r > 0) {
            for (size_t k = 0; k < start.size(); ++k) start[k] += jitter(rng) * scales[k];
        }
        SimplexOutcome best_round{{}, std::numeric_limits<double>::infinity(), false, 0};
        for (int round = 0; round < rounds; ++round) {
            if (penalty_mode) mu = 1e2 * std::pow(10.0, round);
            SimplexOutcome o = nelder_mead(reduced_objective, start, scales, opt,
                                           &evals_used, &trace, &global_best);
            iterations += o.iterations;
            start = o.x;
            best_round = std::move(o);
            if (evals_used >= opt.max_evals) break;
        }
        outcomes.push_back(std::move(best_round));
        if (evals_used >= opt.max_evals) break;
    }

    size_t winner = 0;
    for (size_t k = 1; k < outcomes.size(); ++k) {
        if (outcomes[k].f < outcomes[winner].f) winner = k;
    }
    if (!(outcomes[winner].f < kPenaltyBase)) {
        throw Infeasible("no restart reached a positive-definite completion");
    }

    double spread = 0.0;
    for (const auto& o : outcomes) {
        if (!(o.f < kPenaltyBase)) continue;
        for (size_t k = 0; k < reduced.size(); ++k) {
            const double floor = 0.01 * scales[k];
            spread = std::max(spread,
                              std::abs(o.x[k] - outcomes[winner].x[k]) /
                                  std::max(std::abs(outcomes[winner].x[k]), floor));
        }
    }

    bool feasible = true;
    Matrix m = lift(outcomes[winner].x, &feasible);
    if (!feasible) throw Infeasible("winning restart lost feasibility");
    return finish(std::move(m), iterations, outcomes[winner].converged, spread > 1e-3,
                  spread, std::move(trace));
}

CompletionSpec parse_completion_spec(const std::string& json_text,
                                     const std::string& base_dir) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad completion spec JSON: ") + e.what());
    }
    try {
        if (!j.contains("base")) throw BadSpec("completion spec needs 'base'");
        Matrix base_entries;
        if (j.at("base").is_string()) {
            std::filesystem::path p(j.at("base").get<std::string>());
            if (p.is_relative() && !base_dir.empty()) {
                p = std::filesystem::path(base_dir) / p;
            }
            base_entries = load_matrix_file(p.string());
        } else {
            base_entries = parse_matrix_json(j.at("base").dump());
        }
        CompletionSpec spec{SpdMatrix::validate(base_entries), {}, true, {}};
        for (const auto& p : j.value("pinned", json::array())) {
            PinnedEntry e{p.at("i").get<int>(), p.at("j").get<int>(),
                          p.at("value").get<double>()};
            if (e.i > e.j) std::swap(e.i, e.j);
            spec.pinned.push_back(e);
        }
        spec.preserve_determinant = j.value("preserve_determinant", true);
        spec.options.restarts = j.value("restarts", spec.options.restarts);
        spec.options.seed = j.value("seed", spec.options.seed);
        spec.options.max_evals = j.value("max_evals", spec.options.max_evals);
        validate_spec(spec);
        return spec;
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad completion spec: ") + e.what());
    }
}

}  // namespace corrstress
