#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>

#include <cmath>
#include <filesystem>

#include "corrstress/completion.hpp"
#include "corrstress/fisher_rao.hpp"
#include "corrstress/matrix_io.hpp"
#include "corrstress/spdcore.hpp"
#include "helpers.hpp"

using namespace corrstress;
using test_util::rel_err;

namespace {

SpdMatrix identity2() { return SpdMatrix::validate(Matrix::Identity(2, 2)); }

SpdMatrix demo_base() {
    Matrix m = Matrix::Zero(3, 3);
    m.diagonal() << 144.0, 36.0, 625.0;
    return SpdMatrix::validate(1e-4 * m);
}

CompletionSpec demo_spec() {
    CompletionSpec spec{demo_base(), {{0, 1, 7.2e-4}}, true, {}};
    return spec;
}

}  // namespace

TEST_CASE("fully pinned completion is just a feasibility check") {
    CompletionSpec spec{identity2(),
                        {{0, 0, 1.0}, {0, 1, 0.0}, {1, 1, 1.0}},
                        true,
                        {}};
    CompletionResult r = complete(spec);
    REQUIRE(r.converged);
    REQUIRE(r.distance == 0.0);
    REQUIRE(r.plausibility == 1.0);
    REQUIRE(r.iterations == 0);
    REQUIRE_FALSE(r.multiple_minima);
    REQUIRE(rel_err(r.target.mat(), Matrix::Identity(2, 2)) < 1e-15);
}

TEST_CASE("fully pinned infeasibilities") {
    CompletionSpec not_spd{identity2(),
                           {{0, 0, 1.0}, {0, 1, 5.0}, {1, 1, 1.0}},
                           true,
                           {}};
    REQUIRE_THROWS_AS(complete(not_spd), Infeasible);

    CompletionSpec det_off{identity2(),
                           {{0, 0, 2.0}, {0, 1, 0.0}, {1, 1, 1.0}},
                           true,
                           {}};
    REQUIRE_THROWS_AS(complete(det_off), Infeasible);

    // same pins are fine once the determinant constraint is dropped
    det_off.preserve_determinant = false;
    CompletionResult r = complete(det_off);
    REQUIRE(r.target(0, 0) == 2.0);
    REQUIRE_THAT(r.direction.trace(),
                 Catch::Matchers::WithinAbs(std::log(2.0), 1e-12));
}

TEST_CASE("two asset correlation pin with determinant held") {
    CompletionSpec spec{identity2(), {{0, 1, 0.1}}, true, {}};
    CompletionResult r = complete(spec);
    REQUIRE(r.converged);
    REQUIRE(r.target(0, 1) == 0.1);
    // both diagonals land on sqrt(1.01), restoring det = 1
    REQUIRE_THAT(r.target(0, 0),
                 Catch::Matchers::WithinAbs(1.004987562112089, 5e-6));
    REQUIRE_THAT(r.target(1, 1),
                 Catch::Matchers::WithinAbs(1.004987562112089, 5e-6));
    REQUIRE_THAT(r.target.mat().determinant(), Catch::Matchers::WithinRel(1.0, 1e-10));
    REQUIRE_THAT(r.distance * r.distance,
                 Catch::Matchers::WithinAbs(0.00996684330965322, 1e-9));
    REQUIRE_THAT(r.plausibility,
                 Catch::Matchers::WithinAbs(std::exp(-r.distance), 1e-15));
    REQUIRE(r.direction.traceless());
}

TEST_CASE("demo pin recovers the closed-form optimum") {
    CompletionResult r = complete(demo_spec());
    REQUIRE(r.converged);
    REQUIRE(r.target(0, 1) == 7.2e-4);

    // At the optimum the third row decouples (zero covariances), both pinned
    // variances inflate by the same whitened factor d, and the third variance
    // shrinks to restore the determinant. Stationarity in d reduces to
    //   3 d ln(d^2 - rho^2) = rho ln((d + rho)/(d - rho)),  rho = 0.1,
    // whose root d = 1.0082663943641272 gives everything below; a direct
    // 4-parameter minimization agrees to 2e-14.
    REQUIRE(std::abs(r.target(0, 2)) < 1e-6);
    REQUIRE(std::abs(r.target(1, 2)) < 1e-6);
    REQUIRE_THAT(r.target(0, 0),
                 Catch::Matchers::WithinRel(0.014519036078843433, 1e-5));
    REQUIRE_THAT(r.target(1, 1),
                 Catch::Matchers::WithinRel(0.003629759019710858, 1e-5));
    REQUIRE_THAT(r.target(2, 2),
                 Catch::Matchers::WithinAbs(0.06209013544070865, 1e-6));

    REQUIRE_THAT(r.target.mat().determinant(),
                 Catch::Matchers::WithinRel(3.24e-6, 1e-10));
    REQUIRE_THAT(r.distance * r.distance,
                 Catch::Matchers::WithinAbs(0.009934163964734977, 1e-8));
    REQUIRE_THAT(r.distance,
                 Catch::Matchers::WithinAbs(rao_distance(demo_base(), r.target), 1e-12));

    REQUIRE_FALSE(r.multiple_minima);
    REQUIRE(r.restart_spread < 1e-3);
    REQUIRE_FALSE(r.best_trace.empty());
    for (size_t k = 1; k < r.best_trace.size(); ++k) {
        REQUIRE(r.best_trace[k] <= r.best_trace[k - 1]);
    }
    REQUIRE_THAT(r.best_trace.back(),
                 Catch::Matchers::WithinAbs(r.distance * r.distance, 1e-9));
}

TEST_CASE("pinning both variances as well decouples the third row exactly") {
    // Same base, but the stressed block is held fixed entirely, so only the
    // third-row entries are free. The optimum keeps the new covariances at
    // zero and restores the determinant through (2,2) alone.
    CompletionSpec spec{demo_base(),
                        {{0, 0, 0.0144}, {0, 1, 7.2e-4}, {1, 1, 0.0036}},
                        true,
                        {}};
    CompletionResult r = complete(spec);
    REQUIRE(r.converged);
    REQUIRE(r.target(0, 0) == 0.0144);
    REQUIRE(r.target(1, 1) == 0.0036);
    REQUIRE(std::abs(r.target(0, 2)) < 1e-6);
    REQUIRE(std::abs(r.target(1, 2)) < 1e-6);
    REQUIRE_THAT(r.target(2, 2), Catch::Matchers::WithinAbs(0.0625 / 0.99, 1e-9));
    REQUIRE_THAT(r.distance * r.distance,
                 Catch::Matchers::WithinAbs(0.010142938942391985, 1e-9));
    REQUIRE(r.direction.traceless());
}

TEST_CASE("objective evaluates candidates in free-position order") {
    CompletionSpec spec = demo_spec();
    auto pos = free_positions(spec);
    REQUIRE(pos.size() == 5);
    REQUIRE(pos[0] == std::pair<int, int>(0, 0));
    REQUIRE(pos[1] == std::pair<int, int>(0, 2));
    REQUIRE(pos[2] == std::pair<int, int>(1, 1));
    REQUIRE(pos[3] == std::pair<int, int>(1, 2));
    REQUIRE(pos[4] == std::pair<int, int>(2, 2));

    // ceteris-paribus candidate: base entries plus the pin, determinant
    // repaired through the last diagonal alone
    const double repaired =
        objective(spec, {0.0144, 0.0, 0.0036, 0.0, 0.0625 / 0.99});
    REQUIRE_THAT(repaired,
                 Catch::Matchers::WithinAbs(0.010142938942391985, 1e-12));

    // a widely used alternative candidate, entries printed to two decimals in
    // 1e-4 units, sits nearly four times farther in squared distance
    const double alt =
        objective(spec, {0.0144, 24.76e-4, 0.0036, 23.84e-4, 649.90e-4});
    REQUIRE_THAT(alt, Catch::Matchers::WithinAbs(0.03860968468137645, 1e-10));
    REQUIRE(repaired < alt);

    // non-SPD candidates get the penalty band, not an exception
    REQUIRE(objective(spec, {0.0144, 0.5, 0.0036, 0.0, 0.0625}) >= 1e6);

    REQUIRE_THROWS_AS(objective(spec, {1.0, 2.0}), BadSpec);
}

TEST_CASE("found optimum beats determinant-respecting perturbations") {
    CompletionSpec spec = demo_spec();
    CompletionResult r = complete(spec);
    const double found = r.distance * r.distance;

    const double a = 0.0144, b = 0.0036, p = 7.2e-4;
    const double det = 3.24e-6;
    // solve the free diagonal so the slice stays on the constraint surface
    auto z_for = [&](double x, double y) {
        return (det + a * y * y - 2.0 * p * x * y + b * x * x) / (a * b - p * p);
    };
    for (double x : {-0.005, -0.001, 0.001, 0.005}) {
        for (double y : {-0.005, 0.0, 0.005}) {
            const double val = objective(spec, {a, x, b, y, z_for(x, y)});
            REQUIRE(found <= val + 1e-9);
        }
    }
}

TEST_CASE("tied minima are flagged") {
    // pinning both diagonals of a 2x2 to 2 with det held at 1 forces the
    // off-diagonal to +-sqrt(3); the two solutions are exactly tied
    CompletionSpec spec{identity2(), {{0, 0, 2.0}, {1, 1, 2.0}}, true, {}};
    spec.options.restarts = 8;
    CompletionResult r = complete(spec);
    REQUIRE(r.converged);
    REQUIRE(r.multiple_minima);
    REQUIRE(r.restart_spread > 1e-3);
    REQUIRE_THAT(std::abs(r.target(0, 1)),
                 Catch::Matchers::WithinAbs(std::sqrt(3.0), 1e-6));
    REQUIRE_THAT(r.target.mat().determinant(), Catch::Matchers::WithinRel(1.0, 1e-7));
    REQUIRE(r.target(0, 0) == 2.0);
    REQUIRE(r.target(1, 1) == 2.0);
}

TEST_CASE("dropping the determinant constraint can only help") {
    CompletionSpec held{identity2(), {{0, 1, 0.3}}, true, {}};
    CompletionSpec loose{identity2(), {{0, 1, 0.3}}, false, {}};
    CompletionResult rh = complete(held);
    CompletionResult rl = complete(loose);
    REQUIRE(rl.target(0, 1) == 0.3);
    REQUIRE(rl.converged);
    REQUIRE(rl.distance <= rh.distance + 1e-9);
    REQUIRE_THAT(rl.distance,
                 Catch::Matchers::WithinAbs(rao_distance(identity2(), rl.target), 1e-12));
}

TEST_CASE("completion spec parsing") {
    const std::string inline_spec = R"({
        "base": {"n": 2, "entries": [[1, 0], [0, 1]]},
        "pinned": [{"i": 1, "j": 0, "value": 0.3}]
    })";
    CompletionSpec spec = parse_completion_spec(inline_spec, "");
    REQUIRE(spec.base.n() == 2);
    REQUIRE(spec.pinned.size() == 1);
    REQUIRE(spec.pinned[0].i == 0);   // indices are normalized to i <= j
    REQUIRE(spec.pinned[0].j == 1);
    REQUIRE(spec.pinned[0].value == 0.3);
    REQUIRE(spec.preserve_determinant);
    REQUIRE(spec.options.restarts == 8);
    REQUIRE(spec.options.seed == 42);

    auto dir = std::filesystem::temp_directory_path() /
               ("cst-completion-" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    save_matrix_json((dir / "base.json").string(), Matrix::Identity(3, 3));
    const std::string file_spec = R"({
        "base": "base.json",
        "pinned": [{"i": 0, "j": 2, "value": 0.25}],
        "preserve_determinant": false,
        "restarts": 3,
        "seed": 7
    })";
    CompletionSpec from_file = parse_completion_spec(file_spec, dir.string());
    REQUIRE(from_file.base.n() == 3);
    REQUIRE_FALSE(from_file.preserve_determinant);
    REQUIRE(from_file.options.restarts == 3);
    REQUIRE(from_file.options.seed == 7);
    std::filesystem::remove_all(dir);

    REQUIRE_THROWS_AS(parse_completion_spec("{not json", ""), ParseError);
    REQUIRE_THROWS_AS(parse_completion_spec(R"({"pinned": []})", ""), BadSpec);
    REQUIRE_THROWS_AS(
        parse_completion_spec(
            R"({"base": {"n": 2, "entries": [[1,0],[0,1]]}, "pinned": [{"i": 0}]})", ""),
        ParseError);
    REQUIRE_THROWS_AS(
        parse_completion_spec(
            R"({"base": {"n": 2, "entries": [[1,0],[0,1]]},
                "pinned": [{"i": 0, "j": 5, "value": 1.0}]})",
            ""),
        BadSpec);
    REQUIRE_THROWS_AS(
        parse_completion_spec(
            R"({"base": {"n": 2, "entries": [[1,0],[0,1]]},
                "pinned": [{"i": 0, "j": 1, "value": 0.1},
                           {"i": 1, "j": 0, "value": 0.2}]})",
            ""),
        BadSpec);
    REQUIRE_THROWS_AS(
        parse_completion_spec(
            R"({"base": {"n": 2, "entries": [[1,0],[0,1]]},
                "pinned": [{"i": 0, "j": 0, "value": -1.0}]})",
            ""),
        BadSpec);
}
