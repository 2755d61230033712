#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "corrstress/types.hpp"

namespace corrstress {

struct PinnedEntry {
    int i;
    int j;
    double value;
};

struct CompletionOptions {
    int restarts = 8;
    std::uint64_t seed = 42;
    int max_evals = 50000;
    double f_tol = 1e-12;        // absolute objective spread
    double x_tol_rel = 1e-10;    // relative parameter spread
};

struct CompletionSpec {
    SpdMatrix base;
    std::vector<PinnedEntry> pinned;   // i <= j, symmetric fill implied
    bool preserve_determinant = true;
    CompletionOptions options;
};

struct CompletionResult {
    SpdMatrix target;
    TangentDirection direction;
    double distance;
    double plausibility;
    long iterations;
    bool converged;
    bool multiple_minima;              // restarts disagree beyond 1e-3 relative
    double restart_spread;             // worst relative disagreement seen
    std::vector<double> best_trace;    // best objective after each iteration
};

// Upper-triangle (i <= j) positions not pinned, row-major order. This is the
// coordinate order of free_values everywhere below.
std::vector<std::pair<int, int>> free_positions(const CompletionSpec& spec);

// d^2(base, candidate) with the candidate assembled from pinned entries plus
// free_values; infeasible candidates get 1e6 + |min eig| * 1e6.
double objective(const CompletionSpec& spec, const std::vector<double>& free_values);

CompletionResult complete(const CompletionSpec& spec);

// JSON form: {"base": <path or {"n":..,"entries":..,"scale":..}>,
//             "pinned": [{"i":0,"j":1,"value":7.2e-4}, ...],
//             "preserve_determinant": true, "restarts": 8, "seed": 42}
// Relative base paths resolve against base_dir.
CompletionSpec parse_completion_spec(const std::string& json_text,
                                     const std::string& base_dir);

}  // namespace corrstress
