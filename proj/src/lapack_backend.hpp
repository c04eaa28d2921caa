#pragma once

#include <complex>
#include <string_view>

namespace uscgibbs::detail {

// Runtime-loaded LAPACKE divide-and-conquer drivers. Each call returns false when no
// working LAPACK is available, in which case the caller falls back to Eigen.
bool lapack_syevd(char jobz, int n, double* a, double* w);
bool lapack_heevd(char jobz, int n, std::complex<double>* a, double* w);

std::string_view lapack_backend_name();

} // namespace uscgibbs::detail
