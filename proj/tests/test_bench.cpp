#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lmqn/bench.hpp"
#include "lmqn/rng.hpp"
#include "test_support.hpp"

using namespace lmqn;

TEST_CASE("counter-based sampler is reproducible and roughly standard normal") {
    const NormalSampler a(42, 3);
    const NormalSampler b(42, 3);
    CHECK(a.normal(7) == b.normal(7));
    CHECK(a.normal(7) != a.normal(8));

    const std::size_t n = 100000;
    const Vec v = a.normal_vector(n);
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= static_cast<double>(n - 1);
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(var - 1.0) < 0.03);
}

TEST_CASE("instance generation is deterministic and honors the protocol") {
    ExperimentConfig config;
    config.n = 60;
    config.memory = 5;
    config.phi = 0.5;
    config.seed = 11;

    const ProblemInstance a = gen_instance(config);
    const ProblemInstance b = gen_instance(config);

    CHECK(a.store.count() == 5);
    CHECK(a.gradients.size() == 6);
    CHECK(a.x0 == b.x0);
    for (std::size_t j = 0; j < a.gradients.size(); ++j) CHECK(a.gradients[j] == b.gradients[j]);
    for (std::size_t j = 0; j < 5; ++j) {
        CHECK(a.store.s(j) == b.store.s(j));
        CHECK(a.store.y(j) == b.store.y(j));
        // curvature holds on every accepted pair
        CHECK(dot(a.store.s(j), a.store.y(j)) > 0.0);
        // the step and the pair difference reproduce the protocol
        Vec y = a.gradients[j + 1];
        axpy(-1.0, a.gradients[j], y);
        CHECK(a.store.y(j) == y);
    }
}

TEST_CASE("different seeds give different instances") {
    ExperimentConfig config;
    config.n = 30;
    config.memory = 2;
    const auto a = gen_instance(config);
    config.seed = config.seed + 1;
    const auto b = gen_instance(config);
    CHECK(a.gradients[0] != b.gradients[0]);
}

TEST_CASE("benchmark rows are deterministic across runs of one invocation") {
    ExperimentConfig config;
    config.n = 100;
    config.memory = 4;
    config.phi = 0.5;
    config.runs = 2;
    config.seed = 3;

    const std::vector<SolveReport> reports = run_benchmark(config);
    REQUIRE(reports.size() == 3 * 2);  // three applicable algorithms, two runs
    for (std::size_t i = 0; i < reports.size(); i += 2) {
        CHECK_FALSE(reports[i].failed);
        CHECK(reports[i].relative_residual == reports[i + 1].relative_residual);
        CHECK(reports[i].wall_time_seconds > 0.0);
        CHECK(reports[i].relative_residual < 1e-12);
    }
}

TEST_CASE("residuals stay at solver accuracy across problem sizes") {
    for (std::size_t n : {50000u, 100000u}) {
        ExperimentConfig config;
        config.n = n;
        config.memory = 5;
        config.phi = 0.5;
        config.runs = 1;
        config.seed = 2;
        for (const SolveReport& row : run_benchmark(config)) {
            REQUIRE_FALSE(row.failed);
            CHECK(row.relative_residual <= 1e-12);
        }
        config.sr1 = true;
        for (const SolveReport& row : run_benchmark(config)) {
            REQUIRE_FALSE(row.failed);
            CHECK(row.relative_residual <= 1e-12);
        }
    }
}

TEST_CASE("two-loop joins the roster only at the BFGS endpoint") {
    ExperimentConfig config;
    config.phi = 0.0;
    CHECK(default_algorithms(config).size() == 4);
    config.phi = 0.25;
    CHECK(default_algorithms(config).size() == 3);
    config.sr1 = true;
    CHECK(default_algorithms(config).size() == 2);
}

TEST_CASE("closed-form operation counts") {
    // no stored pairs: the two-loop apply collapses to scaling by H0
    CHECK(flop_model(Algorithm::TwoLoop, 1000, 0) == 1000);
    // spot value from the model table
    CHECK(flop_model(Algorithm::Sr1CompactInverse, 1000000, 5) == 25000060u);

    // scaling story: the compact route is O(nk), the SMW route O(nk^2)
    for (std::size_t k = 1; k <= 10; ++k)
        CHECK(flop_model(Algorithm::CompactInverse, 1000000, k) <
              flop_model(Algorithm::RecursiveSmw, 1000000, k));

    for (std::size_t n : {10000u, 100000u, 1000000u}) {
        CHECK(flop_model(Algorithm::CompactInverse, n, 5) <
              flop_model(Algorithm::RecursiveH, n, 5));
        CHECK(flop_model(Algorithm::RecursiveH, n, 5) <
              flop_model(Algorithm::RecursiveSmw, n, 5));
    }
}

TEST_CASE("csv writer emits the pinned schema and round-trips") {
    SolveReport row;
    row.algorithm = Algorithm::CompactInverse;
    row.n = 10000;
    row.pairs = 5;
    row.phi = 0.5;
    row.run = 3;
    row.seed = 17;
    row.relative_residual = 3.14159e-15;
    row.wall_time_seconds = 0.00123456;
    row.predicted_flops = 123456789;

    const std::string path = (std::filesystem::temp_directory_path() / "lmqn_test.csv").string();
    emit_csv({row}, path);

    std::ifstream in(path);
    std::string header, line, extra;
    REQUIRE(std::getline(in, header));
    REQUIRE(std::getline(in, line));
    CHECK_FALSE(std::getline(in, extra));
    CHECK(header ==
          "algorithm,n,k,phi,run,seed,relative_residual,wall_time_seconds,predicted_flops");

    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    REQUIRE(fields.size() == 9);
    CHECK(fields[0] == "compact_inverse");
    CHECK(std::stoul(fields[1]) == 10000);
    CHECK(std::stoul(fields[2]) == 5);
    CHECK(std::stod(fields[3]) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(std::stoul(fields[4]) == 3);
    CHECK(std::stoull(fields[5]) == 17);
    CHECK(std::stod(fields[6]) == doctest::Approx(3.14159e-15).epsilon(1e-6));
    CHECK(std::stod(fields[7]) == doctest::Approx(0.00123456).epsilon(1e-6));
    CHECK(std::stoull(fields[8]) == 123456789);
    std::filesystem::remove(path);
}

TEST_CASE("csv writer labels SR1 rows and rejects empty input") {
    SolveReport row;
    row.algorithm = Algorithm::Sr1SelfDual;
    row.sr1 = true;
    row.n = 10;
    row.pairs = 2;
    const std::string path = (std::filesystem::temp_directory_path() / "lmqn_sr1.csv").string();
    emit_csv({row}, path);
    std::ifstream in(path);
    std::string header, line;
    std::getline(in, header);
    std::getline(in, line);
    CHECK(line.find(",sr1,") != std::string::npos);
    std::filesystem::remove(path);

    const std::string missing =
        (std::filesystem::temp_directory_path() / "lmqn_absent.csv").string();
    CHECK_THROWS_AS(emit_csv({}, missing), std::invalid_argument);
    CHECK_FALSE(std::filesystem::exists(missing));
}

TEST_CASE("config validation") {
    ExperimentConfig config;
    config.runs = 0;
    CHECK_THROWS_AS(run_benchmark(config), std::invalid_argument);
    config.runs = 1;
    config.phi = 2.0;
    CHECK_THROWS_AS(gen_instance(config), std::invalid_argument);
    config.phi = 0.5;
    config.algorithms = {Algorithm::TwoLoop};
    CHECK_THROWS_AS(run_benchmark(config), std::invalid_argument);
}
