#include "lmqn/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "lmqn/baselines.hpp"
#include "lmqn/broyden_compact.hpp"
#include "lmqn/errors.hpp"
#include "lmqn/rng.hpp"
#include "lmqn/sr1_compact.hpp"

namespace lmqn {

std::string_view algorithm_name(Algorithm alg) {
    switch (alg) {
        case Algorithm::CompactInverse: return "compact_inverse";
        case Algorithm::TwoLoop: return "two_loop";
        case Algorithm::RecursiveSmw: return "recursive_smw";
        case Algorithm::RecursiveH: return "recursive_h";
        case Algorithm::Sr1CompactInverse: return "sr1_compact_inverse";
        case Algorithm::Sr1SelfDual: return "sr1_self_dual";
    }
    return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
    for (Algorithm alg : {Algorithm::CompactInverse, Algorithm::TwoLoop, Algorithm::RecursiveSmw,
                          Algorithm::RecursiveH, Algorithm::Sr1CompactInverse,
                          Algorithm::Sr1SelfDual})
        if (name == algorithm_name(alg)) return alg;
    return std::nullopt;
}

bool algorithm_is_sr1(Algorithm alg) {
    return alg == Algorithm::Sr1CompactInverse || alg == Algorithm::Sr1SelfDual;
}

std::vector<Algorithm> default_algorithms(const ExperimentConfig& config) {
    if (config.sr1) return {Algorithm::Sr1CompactInverse, Algorithm::Sr1SelfDual};
    std::vector<Algorithm> algs{Algorithm::CompactInverse};
    if (config.phi == 0.0) algs.push_back(Algorithm::TwoLoop);
    algs.push_back(Algorithm::RecursiveSmw);
    algs.push_back(Algorithm::RecursiveH);
    return algs;
}

namespace {

void check_config(const ExperimentConfig& config) {
    if (config.n < 1) throw std::invalid_argument("ExperimentConfig: n must be >= 1");
    if (config.runs < 1) throw std::invalid_argument("ExperimentConfig: runs must be >= 1");
    if (config.memory < 1) throw std::invalid_argument("ExperimentConfig: memory must be >= 1");
    if (!config.sr1 && (config.phi < 0.0 || config.phi > 1.0))
        throw std::invalid_argument("ExperimentConfig: phi must lie in [0, 1]");
    if (config.gamma <= 0.0) throw std::invalid_argument("ExperimentConfig: gamma must be > 0");
    for (Algorithm alg : config.algorithms) {
        if (algorithm_is_sr1(alg) != config.sr1)
            throw std::invalid_argument("ExperimentConfig: algorithm does not match update family");
        if (alg == Algorithm::TwoLoop && config.phi != 0.0)
            throw std::invalid_argument("ExperimentConfig: two_loop requires phi == 0");
    }
}

// gradient streams start here; stream 0 is x0
constexpr std::uint64_t kGradientStreamBase = 1;
constexpr int kMaxResampleAttempts = 100;

} // namespace

ProblemInstance gen_instance(const ExperimentConfig& config) {
    check_config(config);
    const std::size_t n = config.n;
    const std::size_t m = config.memory;

    ProblemInstance inst{Vec(), {}, PairStore(n, m, config.gamma)};
    inst.x0 = NormalSampler(config.seed, 0).normal_vector(n);
    inst.gradients.reserve(m + 1);
    inst.gradients.push_back(NormalSampler(config.seed, kGradientStreamBase).normal_vector(n));

    // Unit steps for the restricted class. SR1 needs a non-unit step: at
    // alpha = 1 the first update direction s_0 - H_0 y_0 collapses onto
    // -H_0 g_1 exactly (and at alpha = 2 onto -H_0 y_0), which drives the
    // generated matrix numerically singular. 0.3 keeps the instances
    // comfortably conditioned across sizes.
    const double alpha = config.sr1 ? 0.3 : 1.0;
    const BroydenConfig bcfg{config.sr1 ? 0.0 : config.phi, config.gamma};
    for (std::size_t j = 0; j < m; ++j) {
        const Vec& gj = inst.gradients.back();

        // step along -alpha * H_j g_j, H_j from the pairs accepted so far
        Vec s;
        if (config.sr1) {
            const Sr1InverseState state = build_sr1(inst.store);
            s = scaled(-alpha, solve_sr1(state, gj));
        } else {
            const BroydenStates states = build_states(inst.store, bcfg);
            s = scaled(-alpha, solve(states.inverse, gj));
        }

        bool accepted = false;
        for (int attempt = 0; attempt < kMaxResampleAttempts; ++attempt) {
            const std::uint64_t stream =
                kGradientStreamBase + j + 1 + static_cast<std::uint64_t>(attempt) * 1000;
            Vec gnext = NormalSampler(config.seed, stream).normal_vector(n);
            Vec y = gnext;
            axpy(-1.0, gj, y);
            if (inst.store.push(s, y, /*require_curvature=*/!config.sr1)) {
                inst.gradients.push_back(std::move(gnext));
                accepted = true;
                break;
            }
        }
        if (!accepted)
            throw BreakdownError("gen_instance: curvature resampling exhausted");
    }
    return inst;
}

std::uint64_t flop_model(Algorithm alg, std::size_t n_in, std::size_t k_in) {
    if (n_in < 1) throw std::invalid_argument("flop_model: n must be >= 1");
    const std::uint64_t n = n_in;
    const std::uint64_t k = k_in;
    switch (alg) {
        case Algorithm::CompactInverse:
            return (2 * k + 1) * (n + k + 1) + 2 * n + (40 * k * k * k + 90 * k * k + 122 * k) / 3 +
                   (2 * n - 1) * (k + 1);
        case Algorithm::TwoLoop:
            return 4 * n * k + 3 * k + n + 2 * k * (2 * n - 1);
        case Algorithm::RecursiveSmw:
            return (k + 1) * (23 * k * n + 52 * n + 12 * k + 42) / 2 +
                   (2 * n - 1) * (6 * (k + 1) * (k + 1) + 7 * (k + 1));
        case Algorithm::RecursiveH:
            return (5 * n + 3) * (k + 1) * k + (10 * n + 14) * (k + 1) +
                   (2 * n - 1) * (3 * k + 2) * (k + 1);
        case Algorithm::Sr1CompactInverse:
            return (2 * k + 1) * (n + k + 1) + 2 * n + (2 * n - 1) * (k + 1);
        case Algorithm::Sr1SelfDual:
            return (k + 1) * (k * (2 * n + 1) + 2 * (3 * n + 1)) / 2 + 2 * n +
                   (2 * n - 1) * (k + 2) * (k + 1) / 2;
    }
    throw std::invalid_argument("flop_model: unknown algorithm");
}

namespace {

double elapsed_seconds(std::chrono::steady_clock::time_point t0) {
    const auto dt = std::chrono::steady_clock::now() - t0;
    const double sec = std::chrono::duration<double>(dt).count();
    return sec > 0.0 ? sec : 1e-9;
}

struct TimedSolve {
    Vec solution;
    double seconds;
};

TimedSolve run_algorithm(Algorithm alg, const ProblemInstance& inst, const BroydenConfig& bcfg,
                         const Vec& z) {
    const auto t0 = std::chrono::steady_clock::now();
    Vec p;
    switch (alg) {
        case Algorithm::CompactInverse: {
            const BroydenStates states = build_states(inst.store, bcfg);
            p = solve(states.inverse, z);
            break;
        }
        case Algorithm::TwoLoop:
            p = two_loop_solve(inst.store, z);
            break;
        case Algorithm::RecursiveSmw: {
            UnrolledUpdate u = unroll_forward(inst.store, bcfg);
            p = smw_solve(u, z);
            break;
        }
        case Algorithm::RecursiveH: {
            const UnrolledUpdate u = unroll_inverse(inst.store, bcfg);
            p = recursive_h_solve(u, z);
            break;
        }
        case Algorithm::Sr1CompactInverse: {
            const Sr1InverseState state = build_sr1(inst.store);
            p = solve_sr1(state, z);
            break;
        }
        case Algorithm::Sr1SelfDual:
            p = sr1_self_dual_solve(inst.store, z);
            break;
    }
    return {std::move(p), elapsed_seconds(t0)};
}

} // namespace

std::vector<SolveReport> run_benchmark(const ExperimentConfig& config) {
    check_config(config);
    const std::vector<Algorithm> algs =
        config.algorithms.empty() ? default_algorithms(config) : config.algorithms;

    const ProblemInstance inst = gen_instance(config);
    const std::size_t pairs = inst.store.count();
    const Vec& g = inst.gradients.back();
    const Vec z = scaled(-1.0, g);
    const double gnorm = nrm2(g);
    const BroydenConfig bcfg{config.sr1 ? 0.0 : config.phi, config.gamma};

    // the two-loop count is stated for k stored pairs; the other counts for
    // pairs indexed 0..k
    const auto model_k = [&](Algorithm alg) {
        return alg == Algorithm::TwoLoop ? pairs : pairs - 1;
    };

    std::vector<SolveReport> reports;
    reports.reserve(algs.size() * config.runs);
    for (Algorithm alg : algs) {
        for (std::size_t run = 0; run < config.runs; ++run) {
            SolveReport row;
            row.algorithm = alg;
            row.n = config.n;
            row.pairs = pairs;
            row.sr1 = config.sr1;
            row.phi = config.sr1 ? 0.0 : config.phi;
            row.run = run;
            row.seed = config.seed;
            row.predicted_flops = flop_model(alg, config.n, model_k(alg));
            try {
                const TimedSolve timed = run_algorithm(alg, inst, bcfg, z);
                row.wall_time_seconds = timed.seconds;
                Vec residual = config.sr1
                                   ? multiply_sr1_forward(inst.store, timed.solution)
                                   : multiply_forward(build_states(inst.store, bcfg).forward,
                                                      timed.solution);
                axpy(1.0, g, residual);
                row.relative_residual = nrm2(residual) / gnorm;
            } catch (const BreakdownError& err) {
                row.failed = true;
                row.message = err.what();
            }
            reports.push_back(std::move(row));
        }
    }
    return reports;
}

void emit_csv(const std::vector<SolveReport>& reports, const std::string& path) {
    if (reports.empty()) throw std::invalid_argument("emit_csv: no reports");

    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_csv: cannot open '" + path + "'");

    const auto sci = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.5e", v);
        return std::string(buf);
    };

    out << "algorithm,n,k,phi,run,seed,relative_residual,wall_time_seconds,predicted_flops\n";
    for (const SolveReport& r : reports) {
        out << algorithm_name(r.algorithm) << ',' << r.n << ',' << r.pairs << ','
            << (r.sr1 ? std::string("sr1") : sci(r.phi)) << ',' << r.run << ',' << r.seed << ','
            << sci(r.relative_residual) << ',' << sci(r.wall_time_seconds) << ','
            << r.predicted_flops << '\n';
    }
    if (!out) throw std::runtime_error("emit_csv: write failed for '" + path + "'");
}

} // namespace lmqn
