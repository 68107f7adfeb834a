#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lmqn/pair_store.hpp"
#include "lmqn/vec.hpp"

namespace lmqn {

enum class Algorithm {
    CompactInverse,     // restricted-class compact inverse solve
    TwoLoop,            // BFGS two-loop recursion
    RecursiveSmw,       // rank-one SMW sweep over the unrolled updates
    RecursiveH,         // inverse-slot accumulation
    Sr1CompactInverse,  // SR1 compact inverse solve
    Sr1SelfDual,        // SR1 self-duality recursion
};

std::string_view algorithm_name(Algorithm alg);
std::optional<Algorithm> parse_algorithm(std::string_view name);
bool algorithm_is_sr1(Algorithm alg);

/// Benchmark setup mirroring the simulated line-search protocol: `memory`
/// pairs are produced from random gradients with unit steps, then each
/// selected algorithm solves B p = -g_last `runs` times on the same instance.
struct ExperimentConfig {
    std::size_t n = 10000;
    std::size_t memory = 5;
    bool sr1 = false;
    double phi = 0.0;
    std::vector<Algorithm> algorithms;  // empty = every algorithm valid for the mode
    std::size_t runs = 10;
    std::uint64_t seed = 1;
    double gamma = 1.0;
    std::string output_path;  // empty = no CSV
};

/// All algorithms applicable to the config's update family (two-loop only
/// when phi == 0).
std::vector<Algorithm> default_algorithms(const ExperimentConfig& config);

struct ProblemInstance {
    Vec x0;
    std::vector<Vec> gradients;  // memory + 1 of them
    PairStore store;             // the derived pairs
};

/// Simulates the first `memory` iterations of a line-search run: x0 and the
/// gradients are standard-normal draws from a counter-based generator, each
/// step is s_j = -H_j g_j with H_j the compact inverse of the pairs accepted
/// so far. For restricted-class runs, a pair failing the curvature test
/// triggers a redraw of the next gradient (at most 100 attempts); SR1 runs
/// accept every pair.
ProblemInstance gen_instance(const ExperimentConfig& config);

struct SolveReport {
    Algorithm algorithm;
    std::size_t n = 0;
    std::size_t pairs = 0;
    bool sr1 = false;
    double phi = 0.0;
    std::size_t run = 0;
    std::uint64_t seed = 0;
    double relative_residual = 0.0;
    double wall_time_seconds = 0.0;
    std::uint64_t predicted_flops = 0;
    bool failed = false;
    std::string message;
};

/// Runs every selected algorithm `runs` times on one generated instance.
/// Wall time covers the algorithm's build phase plus its solve; the residual
/// |B p + g| / |g| is evaluated afterwards through the compact forward
/// multiply. A solver breakdown lands in the report row instead of aborting
/// the sweep.
std::vector<SolveReport> run_benchmark(const ExperimentConfig& config);

/// Closed-form operation counts of the solve algorithms, k pairs indexed
/// 0..k as in the solve of B_{k+1} (the two-loop count is stated for k
/// stored pairs).
std::uint64_t flop_model(Algorithm alg, std::size_t n, std::size_t k);

/// Writes one header row plus one row per report. Columns:
/// algorithm,n,k,phi,run,seed,relative_residual,wall_time_seconds,predicted_flops
/// with floats in scientific notation at six significant digits. Refuses an
/// empty report list.
void emit_csv(const std::vector<SolveReport>& reports, const std::string& path);

} // namespace lmqn
