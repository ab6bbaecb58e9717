#pragma once

#include <cstddef>

namespace vnsf::kernels {

enum class Backend { scalar, avx2 };

// Picked once from the CPU flags; VNSF_KERNELS=scalar forces the fallback.
Backend active();
void force(Backend b);
bool avx2_available();

double dot(const double* a, const double* b, std::size_t n);
// sum_i w[i] * a[i] * b[i]
double weighted_dot(const double* w, const double* a, const double* b, std::size_t n);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double weighted_dot(const double* w, const double* a, const double* b, std::size_t n);
}  // namespace scalar

namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double weighted_dot(const double* w, const double* a, const double* b, std::size_t n);
}  // namespace avx2

}  // namespace vnsf::kernels
