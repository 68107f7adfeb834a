// Benchmark and analysis CLI for the limited-memory quasi-Newton solvers.
//
//   qnbench bench    --n 10000 --memory 5 --phi 0.5 --alg all --runs 10 \
//                    --seed 1 --gamma 1.0 --out results.csv
//   qnbench flops    --alg compact_inverse --n 10000 --k 5
//   qnbench spectrum --n 1000 --memory 5 --phi sr1 --seed 1
//
// Exit code 0 on success, nonzero on any solver breakdown or I/O failure.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lmqn/bench.hpp"
#include "lmqn/broyden_compact.hpp"
#include "lmqn/errors.hpp"
#include "lmqn/spectral.hpp"
#include "lmqn/sr1_compact.hpp"

namespace {

struct PhiOption {
    bool sr1 = false;
    double phi = 0.0;
};

PhiOption parse_phi(const std::string& text) {
    PhiOption out;
    if (text == "sr1" || text == "SR1") {
        out.sr1 = true;
        return out;
    }
    std::size_t pos = 0;
    out.phi = std::stod(text, &pos);
    if (pos != text.size()) throw CLI::ValidationError("--phi", "expected a number or 'sr1'");
    if (out.phi < 0.0 || out.phi > 1.0)
        throw CLI::ValidationError("--phi", "phi must lie in [0, 1]");
    return out;
}

std::vector<lmqn::Algorithm> parse_algorithms(const std::string& list, bool sr1) {
    if (list == "all") return {};
    std::vector<lmqn::Algorithm> algs;
    std::stringstream ss(list);
    std::string token;
    while (std::getline(ss, token, ',')) {
        auto alg = lmqn::parse_algorithm(token);
        if (!alg) throw CLI::ValidationError("--alg", "unknown algorithm '" + token + "'");
        if (lmqn::algorithm_is_sr1(*alg) != sr1)
            throw CLI::ValidationError("--alg", "'" + token + "' does not match --phi");
        algs.push_back(*alg);
    }
    if (algs.empty()) throw CLI::ValidationError("--alg", "no algorithms selected");
    return algs;
}

int cmd_bench(const lmqn::ExperimentConfig& config) {
    const std::vector<lmqn::SolveReport> reports = lmqn::run_benchmark(config);

    // per-algorithm summary: median time over the runs, the (identical)
    // residual, and the model count
    std::map<std::string, std::vector<const lmqn::SolveReport*>> by_alg;
    for (const auto& r : reports) by_alg[std::string(lmqn::algorithm_name(r.algorithm))].push_back(&r);

    std::printf("%-22s %12s %14s %16s\n", "algorithm", "residual", "median_time_s", "predicted_flops");
    bool any_failed = false;
    for (const auto& [name, rows] : by_alg) {
        std::vector<double> times;
        for (const auto* r : rows) {
            if (r->failed) {
                any_failed = true;
                std::printf("%-22s FAILED: %s\n", name.c_str(), r->message.c_str());
                break;
            }
            times.push_back(r->wall_time_seconds);
        }
        if (times.size() != rows.size()) continue;
        std::sort(times.begin(), times.end());
        std::printf("%-22s %12.3e %14.3e %16llu\n", name.c_str(), rows.front()->relative_residual,
                    times[times.size() / 2],
                    static_cast<unsigned long long>(rows.front()->predicted_flops));
    }

    if (!config.output_path.empty()) {
        lmqn::emit_csv(reports, config.output_path);
        std::printf("wrote %zu rows to %s\n", reports.size(), config.output_path.c_str());
    }
    return any_failed ? 1 : 0;
}

int cmd_spectrum(const lmqn::ExperimentConfig& config) {
    const lmqn::ProblemInstance inst = lmqn::gen_instance(config);
    lmqn::SpectrumReport report;
    if (config.sr1) {
        const lmqn::Sr1InverseState state = lmqn::build_sr1(inst.store);
        report = lmqn::spectrum(state);
    } else {
        const lmqn::BroydenConfig bcfg{config.phi, config.gamma};
        const lmqn::BroydenStates states = lmqn::build_states(inst.store, bcfg);
        report = lmqn::spectrum(states.inverse);
    }

    std::printf("n                 %zu\n", config.n);
    const std::string update =
        config.sr1 ? std::string("sr1") : "broyden phi=" + std::to_string(config.phi);
    std::printf("update            %s\n", update.c_str());
    std::printf("gamma             %.6e\n", config.gamma);
    std::printf("bulk eigenvalue   %.15e  (multiplicity %zu)\n", report.bulk_eigenvalue,
                report.bulk_multiplicity);
    std::printf("shifted eigenvalues of H:\n");
    for (double ev : report.shifted_eigenvalues) std::printf("  %.15e\n", ev);
    std::printf("min |eig(H)|      %.6e\n", report.min_abs_eigenvalue);
    std::printf("max |eig(H)|      %.6e\n", report.max_abs_eigenvalue);
    std::printf("cond(H)           %.6e\n", report.cond_h);
    std::printf("cond(B)           %.6e\n", report.cond_b);
    if (report.near_singular) std::printf("WARNING: matrix is numerically singular\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"limited-memory quasi-Newton linear solver benchmark"};
    app.require_subcommand(1);

    // bench
    auto* bench = app.add_subcommand("bench", "run the solver benchmark on a simulated instance");
    std::size_t n = 10000, memory = 5, runs = 10;
    std::string phi_text = "0.0", alg_list = "all", out_path;
    std::uint64_t seed = 1;
    double gamma = 1.0;
    bool allow_big = false;
    bench->add_option("--n", n, "problem dimension");
    bench->add_option("--memory", memory, "number of stored pairs");
    bench->add_option("--phi", phi_text, "class weight in [0,1], or 'sr1'");
    bench->add_option("--alg", alg_list, "comma-separated algorithm list, or 'all'");
    bench->add_option("--runs", runs, "repetitions per algorithm");
    bench->add_option("--seed", seed, "instance seed");
    bench->add_option("--gamma", gamma, "scale of B0 = gamma*I");
    bench->add_option("--out", out_path, "CSV output path");
    bench->add_flag("--allow-big", allow_big, "permit n >= 1e6 (memory-hungry)");

    // flops
    auto* flops = app.add_subcommand("flops", "print the closed-form operation count");
    std::string flops_alg;
    std::size_t flops_n = 10000, flops_k = 5;
    flops->add_option("--alg", flops_alg, "algorithm name")->required();
    flops->add_option("--n", flops_n, "problem dimension");
    flops->add_option("--k", flops_k, "pair index (pairs 0..k)");

    // spectrum
    auto* spectrum = app.add_subcommand("spectrum", "eigenvalues and condition number of a generated instance");
    spectrum->add_option("--n", n, "problem dimension");
    spectrum->add_option("--memory", memory, "number of stored pairs");
    spectrum->add_option("--phi", phi_text, "class weight in [0,1], or 'sr1'");
    spectrum->add_option("--seed", seed, "instance seed");
    spectrum->add_option("--gamma", gamma, "scale of B0 = gamma*I");

    CLI11_PARSE(app, argc, argv);

    try {
        if (flops->parsed()) {
            auto alg = lmqn::parse_algorithm(flops_alg);
            if (!alg) {
                std::cerr << "unknown algorithm '" << flops_alg << "'\n";
                return 1;
            }
            std::printf("%llu\n",
                        static_cast<unsigned long long>(lmqn::flop_model(*alg, flops_n, flops_k)));
            return 0;
        }

        const PhiOption phi = parse_phi(phi_text);
        lmqn::ExperimentConfig config;
        config.n = n;
        config.memory = memory;
        config.sr1 = phi.sr1;
        config.phi = phi.phi;
        config.runs = runs;
        config.seed = seed;
        config.gamma = gamma;
        config.output_path = out_path;

        if (bench->parsed()) {
            if (n >= 1000000 && !allow_big) {
                std::cerr << "n >= 1e6 needs --allow-big\n";
                return 1;
            }
            config.algorithms = parse_algorithms(alg_list, phi.sr1);
            return cmd_bench(config);
        }
        return cmd_spectrum(config);
    } catch (const lmqn::BreakdownError& err) {
        std::cerr << "solver breakdown: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
}
