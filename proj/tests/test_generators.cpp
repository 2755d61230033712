#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "corrstress/fisher_rao.hpp"
#include "corrstress/generators.hpp"
#include "corrstress/spdcore.hpp"
#include "helpers.hpp"

using namespace corrstress;
using test_util::rel_err;

namespace {

GeneratorKind pair_kind(int n, int i, int j) { return {GeneratorFamily::Pair, n, i, j}; }
GeneratorKind diag_kind(int n, int i, int j) { return {GeneratorFamily::Diag, n, i, j}; }
GeneratorKind row_kind(int n, int i) { return {GeneratorFamily::Row, n, i}; }
GeneratorKind all_kind(int n) { return {GeneratorFamily::AllEqual, n}; }

}  // namespace

TEST_CASE("generator entries") {
    Matrix pair = make_generator(pair_kind(4, 1, 3)).mat();
    REQUIRE(pair(1, 3) == 1.0);
    REQUIRE(pair(3, 1) == 1.0);
    REQUIRE(pair.cwiseAbs().sum() == 2.0);

    Matrix diag = make_generator(diag_kind(3, 0, 2)).mat();
    REQUIRE(diag(0, 0) == 1.0);
    REQUIRE(diag(2, 2) == -1.0);
    REQUIRE(diag.trace() == 0.0);
    REQUIRE(diag.cwiseAbs().sum() == 2.0);

    Matrix row = make_generator(row_kind(5, 2)).mat();
    for (int k = 0; k < 5; ++k) {
        REQUIRE(row(2, k) == (k == 2 ? 0.0 : 1.0));
        REQUIRE(row(k, 2) == row(2, k));
    }
    REQUIRE(row.cwiseAbs().sum() == 8.0);

    Matrix all = make_generator(all_kind(4)).mat();
    REQUIRE(all.diagonal().isZero(0.0));
    REQUIRE(all.sum() == 12.0);
    REQUIRE(all.maxCoeff() == 1.0);
}

TEST_CASE("generator index validation") {
    REQUIRE_THROWS_AS(make_generator(pair_kind(1, 0, 0)), BadIndices);
    REQUIRE_THROWS_AS(make_generator(pair_kind(3, 1, 1)), BadIndices);
    REQUIRE_THROWS_AS(make_generator(pair_kind(3, 0, 3)), BadIndices);
    REQUIRE_THROWS_AS(make_generator(diag_kind(3, -1, 1)), BadIndices);
    REQUIRE_THROWS_AS(make_generator(row_kind(4, 4)), BadIndices);
    REQUIRE_THROWS_AS(closed_form_exp(row_kind(4, -1), 0.5), BadIndices);
}

TEST_CASE("generator spectra and stress rates") {
    TangentDirection row = make_generator(row_kind(5, 0));
    Vector se = row.eigenvalues();
    REQUIRE_THAT(se(0), Catch::Matchers::WithinAbs(2.0, 1e-12));
    REQUIRE_THAT(se(4), Catch::Matchers::WithinAbs(-2.0, 1e-12));
    for (int k = 1; k < 4; ++k) REQUIRE_THAT(se(k), Catch::Matchers::WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(stress_distance(row, 1.0),
                 Catch::Matchers::WithinRel(2.0, 1e-12));  // sqrt(n-1) at n=5

    TangentDirection all = make_generator(all_kind(5));
    Vector ae = all.eigenvalues();
    REQUIRE_THAT(ae(0), Catch::Matchers::WithinAbs(4.0, 1e-12));
    for (int k = 1; k < 5; ++k) REQUIRE_THAT(ae(k), Catch::Matchers::WithinAbs(-1.0, 1e-12));
    REQUIRE_THAT(stress_distance(all, 1.0),
                 Catch::Matchers::WithinRel(std::sqrt(10.0), 1e-12));

    REQUIRE_THAT(stress_distance(make_generator(pair_kind(6, 2, 4)), -3.0),
                 Catch::Matchers::WithinRel(3.0, 1e-12));
    REQUIRE_THAT(stress_distance(make_generator(diag_kind(6, 0, 5)), 0.25),
                 Catch::Matchers::WithinRel(0.25, 1e-12));
}

TEST_CASE("closed form exponentials agree with the spectral exponential") {
    for (int n : {2, 3, 5}) {
        std::vector<GeneratorKind> kinds = {pair_kind(n, 0, n - 1), diag_kind(n, 0, 1),
                                            row_kind(n, n - 1), all_kind(n)};
        for (const auto& kind : kinds) {
            TangentDirection x = make_generator(kind);
            for (double t : {-1.0, -0.1, 0.1, 1.0}) {
                SpdMatrix closed = closed_form_exp(kind, t);
                SpdMatrix spectral = sym_exp(SymMatrix(t * x.mat()));
                REQUIRE(rel_err(closed.mat(), spectral.mat()) < 1e-12);
                REQUIRE_THAT(closed.mat().determinant(),
                             Catch::Matchers::WithinRel(1.0, 1e-12));
                REQUIRE(closed.log_det() == 0.0);
            }
        }
    }
}

TEST_CASE("small-n closed forms collapse to the cosh/sinh block") {
    const double t = 0.37;
    Matrix block(2, 2);
    block << std::cosh(t), std::sinh(t), std::sinh(t), std::cosh(t);
    REQUIRE(rel_err(closed_form_exp(row_kind(2, 0), t).mat(), block) < 1e-14);
    REQUIRE(rel_err(closed_form_exp(all_kind(2), t).mat(), block) < 1e-14);
    REQUIRE(rel_err(closed_form_exp(pair_kind(2, 0, 1), t).mat(), block) < 1e-14);
}

TEST_CASE("pair stress of a diagonal base") {
    Vector vols(2);
    vols << 0.12, 0.06;
    SpdMatrix rest = pair_stress_diagonal_base(vols, 0, 1, 0.0);
    REQUIRE(rest.mat()(0, 0) == 0.0144);
    REQUIRE(rest.mat()(1, 1) == 0.0036);
    REQUIRE(rest.mat()(0, 1) == 0.0);

    const double t = std::atanh(0.1);
    SpdMatrix stressed = pair_stress_diagonal_base(vols, 0, 1, t);
    REQUIRE_THAT(cov_to_corr(stressed).corr(0, 1), Catch::Matchers::WithinRel(0.1, 1e-13));
    REQUIRE_THAT(stressed.mat()(0, 0),
                 Catch::Matchers::WithinRel(0.0144 * std::cosh(t), 1e-13));
    REQUIRE_THAT(stressed.mat().determinant(),
                 Catch::Matchers::WithinRel(0.0144 * 0.0036, 1e-12));

    // same motion as the exponential map along the pair generator
    Matrix base = Matrix::Zero(2, 2);
    base.diagonal() << 0.0144, 0.0036;
    SpdMatrix via_exp = exp_map(SpdMatrix::validate(base),
                                make_generator(pair_kind(2, 0, 1)), t);
    REQUIRE(rel_err(stressed.mat(), via_exp.mat()) < 1e-12);

    Vector vols3(3);
    vols3 << 1.0, 2.0, 3.0;
    SpdMatrix three = pair_stress_diagonal_base(vols3, 0, 2, 0.5);
    REQUIRE(three.mat()(1, 1) == 4.0);
    REQUIRE(three.mat()(0, 1) == 0.0);
    REQUIRE(three.mat()(1, 2) == 0.0);

    Vector bad(2);
    bad << 1.0, 0.0;
    REQUIRE_THROWS_AS(pair_stress_diagonal_base(bad, 0, 1, 0.1), NonPositiveVol);
    REQUIRE_THROWS_AS(pair_stress_diagonal_base(vols, 1, 1, 0.1), BadIndices);
}

TEST_CASE("lawley eigenvalue stress") {
    Vector eigs(2);
    eigs << 2.0, 1.0;
    Vector same = lawley_stress(eigs, 0.0);
    REQUIRE(same(0) == 2.0);
    REQUIRE(same(1) == 1.0);

    Vector moved = lawley_stress(eigs, 0.1);
    REQUIRE_THAT(moved(0), Catch::Matchers::WithinRel(1.8, 1e-14));
    REQUIRE_THAT(moved(1), Catch::Matchers::WithinRel(1.2, 1e-14));
    REQUIRE_THAT(moved.sum(), Catch::Matchers::WithinRel(3.0, 1e-14));

    REQUIRE_THROWS_AS(lawley_stress(eigs, 2.0), StressTooLarge);

    Vector degen(3);
    degen << 2.0, 2.0, 1.0;
    REQUIRE_THROWS_AS(lawley_stress(degen, 0.1), DegenerateSpectrum);
    Vector nonpos(2);
    nonpos << 1.0, -0.5;
    REQUIRE_THROWS_AS(lawley_stress(nonpos, 0.1), Error);
}

TEST_CASE("lawley stress preserves the trace") {
    std::mt19937_64 rng(73);
    std::uniform_real_distribution<double> jitter(0.0, 0.4);
    for (int n = 2; n <= 10; ++n) {
        Vector eigs(n);
        for (int k = 0; k < n; ++k) eigs(k) = std::pow(1.6, n - k) + jitter(rng);
        Vector stressed = lawley_stress(eigs, 0.03);
        REQUIRE_THAT(stressed.sum(), Catch::Matchers::WithinRel(eigs.sum(), 1e-12));
        REQUIRE((stressed - eigs).cwiseAbs().maxCoeff() > 0.0);
    }
}

TEST_CASE("eigenvalue path derivatives") {
    Matrix b = Matrix::Zero(2, 2);
    b.diagonal() << 2.0, 1.0;
    SpdMatrix base = SpdMatrix::validate(b);
    SymMatrix zero2(Matrix::Zero(2, 2));
    SymMatrix pair((Matrix(2, 2) << 0.0, 1.0, 1.0, 0.0).finished());

    EigDerivatives still = eig_derivatives(base, zero2, zero2);
    REQUIRE(still.first.isZero(0.0));
    REQUIRE(still.second.isZero(0.0));

    // off-diagonal motion: no first-order change, repulsion at second order
    EigDerivatives d = eig_derivatives(base, pair, zero2);
    REQUIRE_THAT(d.first(0), Catch::Matchers::WithinAbs(0.0, 1e-14));
    REQUIRE_THAT(d.first(1), Catch::Matchers::WithinAbs(0.0, 1e-14));
    REQUIRE_THAT(d.second(0), Catch::Matchers::WithinRel(2.0, 1e-12));
    REQUIRE_THAT(d.second(1), Catch::Matchers::WithinRel(-2.0, 1e-12));

    // scaling the coupling by sqrt(2) doubles the second-order response
    SymMatrix scaled(std::sqrt(2.0) * pair.mat());
    EigDerivatives d2 = eig_derivatives(base, scaled, zero2);
    REQUIRE_THAT(d2.second(0), Catch::Matchers::WithinRel(4.0, 1e-12));
    REQUIRE_THAT(d2.second(1), Catch::Matchers::WithinRel(-4.0, 1e-12));

    // diagonal motion shows up at first order only
    SymMatrix diag35((Matrix(2, 2) << 3.0, 0.0, 0.0, 5.0).finished());
    EigDerivatives d3 = eig_derivatives(base, diag35, zero2);
    REQUIRE_THAT(d3.first(0), Catch::Matchers::WithinRel(3.0, 1e-13));
    REQUIRE_THAT(d3.first(1), Catch::Matchers::WithinRel(5.0, 1e-13));
    REQUIRE(d3.second.isZero(1e-13));

    // explicit second-derivative input adds through unchanged
    SymMatrix ident(Matrix::Identity(2, 2));
    EigDerivatives d4 = eig_derivatives(base, pair, ident);
    REQUIRE_THAT(d4.second(0), Catch::Matchers::WithinRel(3.0, 1e-12));
    REQUIRE_THAT(d4.second(1), Catch::Matchers::WithinRel(-1.0, 1e-12));

    REQUIRE_THROWS_AS(eig_derivatives(SpdMatrix::validate(Matrix::Identity(2, 2)), pair,
                                      zero2),
                      DegenerateSpectrum);
    REQUIRE_THROWS_AS(eig_derivatives(base, SymMatrix(Matrix::Zero(3, 3)), zero2),
                      DimensionMismatch);
}

TEST_CASE("linearized all-equal motion matches the repulsion formula") {
    Vector l(3);
    l << 3.1, 2.0, 1.2;
    Matrix s = Matrix::Zero(3, 3);
    s.diagonal() = l;
    SpdMatrix base = SpdMatrix::validate(s);
    Matrix r = Matrix::Zero(3, 3);
    r.diagonal() = l.cwiseSqrt();
    Matrix x = make_generator(all_kind(3)).mat();
    SymMatrix path_first(r * x * r);

    EigDerivatives d = eig_derivatives(base, path_first, SymMatrix(Matrix::Zero(3, 3)));
    for (int i = 0; i < 3; ++i) {
        REQUIRE_THAT(d.first(i), Catch::Matchers::WithinAbs(0.0, 1e-13));
        double expected = 0.0;
        for (int j = 0; j < 3; ++j) {
            if (j != i) expected += 2.0 * l(i) * l(j) / (l(i) - l(j));
        }
        REQUIRE_THAT(d.second(i), Catch::Matchers::WithinRel(expected, 1e-12));
    }
}

TEST_CASE("derivatives agree with finite differences of the eigenvalues") {
    std::mt19937_64 rng(79);
    SpdMatrix base = test_util::random_spd_spread(4, rng);
    SymMatrix first(test_util::random_symmetric(4, rng, 0.5));
    SymMatrix second(test_util::random_symmetric(4, rng, 0.5));
    EigDerivatives d = eig_derivatives(base, first, second);

    const double h = 1e-3;
    auto eigs_at = [&](double t) {
        Matrix a = base.mat() + t * first.mat() + 0.5 * t * t * second.mat();
        Eigen::SelfAdjointEigenSolver<Matrix> es(a);
        Vector v = es.eigenvalues();
        return Vector(v.reverse());  // descending, matching the base spectrum order
    };
    Vector lp = eigs_at(h), lm = eigs_at(-h), l0 = eigs_at(0.0);
    for (int i = 0; i < 4; ++i) {
        const double fd1 = (lp(i) - lm(i)) / (2.0 * h);
        const double fd2 = (lp(i) - 2.0 * l0(i) + lm(i)) / (h * h);
        REQUIRE_THAT(d.first(i),
                     Catch::Matchers::WithinAbs(fd1, 1e-4 * (1.0 + std::abs(fd1))));
        REQUIRE_THAT(d.second(i),
                     Catch::Matchers::WithinAbs(fd2, 1e-3 * (1.0 + std::abs(fd2))));
    }
}

TEST_CASE("lawley matches the linearized all-equal stress at second order") {
    Vector l(3);
    l << 3.1, 2.0, 1.2;
    Matrix s = Matrix::Zero(3, 3);
    s.diagonal() = l;
    Matrix r = Matrix::Zero(3, 3);
    r.diagonal() = l.cwiseSqrt();
    Matrix b = r * make_generator(all_kind(3)).mat() * r;

    auto discrepancy = [&](double t) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(s + t * b));
        Vector path_eigs = es.eigenvalues().reverse();
        Vector law = lawley_stress(l, -t * t);
        std::sort(law.data(), law.data() + law.size(), std::greater<double>());
        return (path_eigs - law).cwiseAbs().maxCoeff();
    };

    // s = -t^2 reproduces the second-order expansion, so the residual is cubic
    // and halving t shrinks it by about 8
    const double ratio = discrepancy(0.02) / discrepancy(0.01);
    REQUIRE(ratio > 7.0);
    REQUIRE(ratio < 9.0);
    REQUIRE_THAT(ratio, Catch::Matchers::WithinAbs(7.80504264, 1e-5));

    // and the lawley output is exactly the quadratic model lambda + t^2/2 * ddot
    SpdMatrix base = SpdMatrix::validate(s);
    EigDerivatives d =
        eig_derivatives(base, SymMatrix(b), SymMatrix(Matrix::Zero(3, 3)));
    const double t = 0.02;
    Vector law = lawley_stress(l, -t * t);
    for (int i = 0; i < 3; ++i) {
        REQUIRE_THAT(law(i), Catch::Matchers::WithinRel(
                                 l(i) + 0.5 * t * t * d.second(i), 1e-13));
    }
}

TEST_CASE("generator spec mini-language") {
    GeneratorSpec p = parse_generator_spec("pair:0,2", 4);
    REQUIRE_FALSE(p.from_file);
    REQUIRE(p.kind.family == GeneratorFamily::Pair);
    REQUIRE(p.kind.n == 4);
    REQUIRE(p.kind.i == 0);
    REQUIRE(p.kind.j == 2);

    GeneratorSpec d = parse_generator_spec("diag:3,1", 5);
    REQUIRE(d.kind.family == GeneratorFamily::Diag);
    REQUIRE(d.kind.i == 3);
    REQUIRE(d.kind.j == 1);

    GeneratorSpec r = parse_generator_spec("row:2", 6);
    REQUIRE(r.kind.family == GeneratorFamily::Row);
    REQUIRE(r.kind.i == 2);

    GeneratorSpec a = parse_generator_spec("all", 3);
    REQUIRE(a.kind.family == GeneratorFamily::AllEqual);
    REQUIRE(a.kind.n == 3);

    GeneratorSpec f = parse_generator_spec("file:/tmp/x.json", 3);
    REQUIRE(f.from_file);
    REQUIRE(f.file == "/tmp/x.json");

    REQUIRE_THROWS_AS(parse_generator_spec("pair:0", 3), BadGeneratorSpec);
    REQUIRE_THROWS_AS(parse_generator_spec("pair:a,b", 3), BadGeneratorSpec);
    REQUIRE_THROWS_AS(parse_generator_spec("row:", 3), BadGeneratorSpec);
    REQUIRE_THROWS_AS(parse_generator_spec("all:3", 3), BadGeneratorSpec);
    REQUIRE_THROWS_AS(parse_generator_spec("file:", 3), BadGeneratorSpec);
    REQUIRE_THROWS_AS(parse_generator_spec("spin:1", 3), BadGeneratorSpec);

    // index range errors surface when the generator is built, not parsed
    GeneratorSpec same = parse_generator_spec("pair:1,1", 3);
    REQUIRE_THROWS_AS(make_generator(same.kind), BadIndices);
}
