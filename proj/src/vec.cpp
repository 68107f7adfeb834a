#include "lmqn/vec.hpp"

#include <cmath>
#include <stdexcept>

namespace lmqn {

namespace {
thread_local std::uint64_t g_inner_product_count = 0;
}

std::uint64_t inner_product_count() { return g_inner_product_count; }
void reset_inner_product_count() { g_inner_product_count = 0; }

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
    ++g_inner_product_count;
    // Four independent accumulators; fixed summation order keeps results
    // reproducible run to run.
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    const std::size_t n = a.size();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

double nrm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("axpy: length mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scal(double alpha, std::span<double> x) {
    for (double& v : x) v *= alpha;
}

Vec scaled(double alpha, const Vec& x) {
    Vec r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = alpha * x[i];
    return r;
}

Vec unit_vector(std::size_t n, std::size_t i) {
    Vec e(n, 0.0);
    e.at(i) = 1.0;
    return e;
}

} // namespace lmqn
