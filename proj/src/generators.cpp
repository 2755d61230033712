#include "corrstress/generators.hpp"

#include <cmath>
#include <charconv>
#include <utility>

#include "corrstress/spdcore.hpp"

namespace corrstress {

namespace {

void check_kind(const GeneratorKind& kind) {
    if (kind.n < 2) throw BadIndices("generator needs n >= 2");
    switch (kind.family) {
        case GeneratorFamily::Pair:
        case GeneratorFamily::Diag:
            if (kind.i < 0 || kind.j < 0 || kind.i >= kind.n || kind.j >= kind.n ||
                kind.i == kind.j) {
                throw BadIndices("indices " + std::to_string(kind.i) + "," +
                                 std::to_string(kind.j) + " invalid for n=" +
                                 std::to_string(kind.n));
            }
            break;
        case GeneratorFamily::Row:
            if (kind.i < 0 || kind.i >= kind.n) {
                throw BadIndices("index " + std::to_string(kind.i) + " invalid for n=" +
                                 std::to_string(kind.n));
            }
            break;
        case GeneratorFamily::AllEqual:
            break;
    }
}

int parse_int(std::string_view s) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
        throw BadGeneratorSpec("bad index '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace

TangentDirection make_generator(const GeneratorKind& kind) {
    check_kind(kind);
    Matrix x = Matrix::Zero(kind.n, kind.n);
    switch (kind.family) {
        case GeneratorFamily::Pair:
            x(kind.i, kind.j) = x(kind.j, kind.i) = 1.0;
            break;
        case GeneratorFamily::Diag:
            x(kind.i, kind.i) = 1.0;
            x(kind.j, kind.j) = -1.0;
            break;
        case GeneratorFamily::Row:
            for (int k = 0; k < kind.n; ++k) {
                if (k == kind.i) continue;
                x(kind.i, k) = x(k, kind.i) = 1.0;
            }
            break;
        case GeneratorFamily::AllEqual:
            x.setOnes();
            x.diagonal().setZero();
            break;
    }
    return TangentDirection::make(SymMatrix(std::move(x)));
}

SpdMatrix closed_form_exp(const GeneratorKind& kind, double t) {
    check_kind(kind);
    const int n = kind.n;
    Matrix e = Matrix::Identity(n, n);
    switch (kind.family) {
        case GeneratorFamily::Pair:
            e(kind.i, kind.i) = e(kind.j, kind.j) = std::cosh(t);
            e(kind.i, kind.j) = e(kind.j, kind.i) = std::sinh(t);
            break;
        case GeneratorFamily::Diag:
            e(kind.i, kind.i) = std::exp(t);
            e(kind.j, kind.j) = std::exp(-t);
            break;
        case GeneratorFamily::Row: {
            // exp(tX) = I + X sinh(st)/s + X^2 (cosh(st)-1)/s^2, s = sqrt(n-1);
            // X^2 has n-1 at (i,i) and ones on the complementary block.
            const double s = std::sqrt(static_cast<double>(n - 1));
            const double a = std::sinh(s * t) / s;
            const double b = (std::cosh(s * t) - 1.0) / (s * s);
            for (int k = 0; k < n; ++k) {
                if (k == kind.i) continue;
                e(kind.i, k) = e(k, kind.i) = a;
                for (int m = 0; m < n; ++m) {
                    if (m == kind.i) continue;
                    e(k, m) += b;
                }
            }
            e(kind.i, kind.i) += b * (n - 1);
            break;
        }
        case GeneratorFamily::AllEqual: {
            // exp(tX) = e^{-t}(I + (e^{nt}-1) J/n)
            const double c = std::exp(-t);
            const double d = c * (std::exp(n * t) - 1.0) / n;
            e = Matrix::Constant(n, n, d);
            e.diagonal().array() += c;
            break;
        }
    }
    SpectralData sd = spectral_decompose(e);
    // Generators are exactly traceless, so the determinant is exactly 1.
    return SpdMatrix::from_spectral(std::move(e), std::move(sd.basis),
                                    std::move(sd.eigenvalues), 0.0);
}

SpdMatrix pair_stress_diagonal_base(const Vector& vols, int i, int j, double t) {
    const int n = static_cast<int>(vols.size());
    if (n < 2 || i < 0 || j < 0 || i >= n || j >= n || i == j) {
        throw BadIndices("indices " + std::to_string(i) + "," + std::to_string(j) +
                         " invalid for n=" + std::to_string(n));
    }
    for (int k = 0; k < n; ++k) {
        if (!(vols(k) > 0.0)) throw NonPositiveVol("vol[" + std::to_string(k) + "]");
    }
    Matrix m = Matrix::Zero(n, n);
    for (int k = 0; k < n; ++k) m(k, k) = vols(k) * vols(k);
    m(i, i) *= std::cosh(t);
    m(j, j) *= std::cosh(t);
    m(i, j) = m(j, i) = vols(i) * vols(j) * std::sinh(t);
    return SpdMatrix::validate(m);
}

Vector lawley_stress(const Vector& eigs, double s) {
    const int n = static_cast<int>(eigs.size());
    double max_eig = 0.0;
    for (int k = 0; k < n; ++k) {
        if (!(eigs(k) > 0.0)) throw Error("eigenvalues must be positive");
        max_eig = std::max(max_eig, eigs(k));
    }
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            if (std::abs(eigs(a) - eigs(b)) <= 1e-10 * max_eig) {
                throw DegenerateSpectrum("eigenvalues " + std::to_string(a) + " and " +
                                         std::to_string(b) + " coincide");
            }
        }
    }
    Vector out(n);
    for (int r = 0; r < n; ++r) {
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            if (i == r) continue;
            sum += eigs(i) / (eigs(r) - eigs(i));
        }
        out(r) = eigs(r) * (1.0 - s * sum);
        if (!(out(r) > 0.0)) {
            throw StressTooLarge("stressed eigenvalue " + std::to_string(r) + " is " +
                                 std::to_string(out(r)));
        }
    }
    return out;
}

EigDerivatives eig_derivatives(const SpdMatrix& base, const SymMatrix& path_first,
                               const SymMatrix& path_second) {
    const int n = base.n();
    if (path_first.n() != n || path_second.n() != n) {
        throw DimensionMismatch("path derivative dimensions do not match base");
    }
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            if (std::abs(base.spectrum()(a) - base.spectrum()(b)) <=
                1e-8 * base.max_eig()) {
                throw DegenerateSpectrum("base eigenvalues " + std::to_string(a) +
                                         " and " + std::to_string(b) + " coincide");
            }
        }
    }
    // Work in the base eigenbasis: first order is the diagonal of U^T Adot U,
    // second order adds the repulsion sum over off-diagonal couplings.
    Matrix ad = base.basis().transpose() * path_first.mat() * base.basis();
    Matrix add = base.basis().transpose() * path_second.mat() * base.basis();
    EigDerivatives out{Vector(n), Vector(n)};
    for (int i = 0; i < n; ++i) {
        out.first(i) = ad(i, i);
        double rep = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            rep += 2.0 * ad(j, i) * ad(j, i) /
                   (base.spectrum()(i) - base.spectrum()(j));
        }
        out.second(i) = add(i, i) + rep;
    }
    return out;
}

GeneratorSpec parse_generator_spec(const std::string& text, int n) {
    GeneratorSpec spec;
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (head == "file") {
        if (rest.empty()) throw BadGeneratorSpec("file: needs a path");
        spec.from_file = true;
        spec.file = rest;
        return spec;
    }
    if (head == "all") {
        if (colon != std::string::npos) throw BadGeneratorSpec("'all' takes no arguments");
        spec.kind = GeneratorKind{GeneratorFamily::AllEqual, n};
        return spec;
    }
    if (head == "row") {
        spec.kind = GeneratorKind{GeneratorFamily::Row, n, parse_int(rest)};
        return spec;
    }
    if (head == "pair" || head == "diag") {
        const auto comma = rest.find(',');
        if (comma == std::string::npos) {
            throw BadGeneratorSpec("'" + head + "' needs two indices i,j");
        }
        const int i = parse_int(rest.substr(0, comma));
        const int j = parse_int(rest.substr(comma + 1));
        spec.kind = GeneratorKind{
            head == "pair" ? GeneratorFamily::Pair : GeneratorFamily::Diag, n, i, j};
        return spec;
    }
    throw BadGeneratorSpec("unknown generator '" + text + "'");
}

}  // namespace corrstress
