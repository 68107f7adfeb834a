#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lmqn {

using Vec = std::vector<double>;

/// Number of full-length inner products executed on this thread since the
/// last reset. The solver complexity tests key off this counter, so every
/// O(n) inner product in the library must go through dot() or nrm2().
std::uint64_t inner_product_count();
void reset_inner_product_count();

double dot(std::span<const double> a, std::span<const double> b);
double nrm2(std::span<const double> a);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scal(double alpha, std::span<double> x);

Vec scaled(double alpha, const Vec& x);
Vec unit_vector(std::size_t n, std::size_t i);

} // namespace lmqn
