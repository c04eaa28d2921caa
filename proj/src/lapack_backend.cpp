#include "lapack_backend.hpp"

#include <cstdlib>
#include <mutex>
#include <string>

#include <dlfcn.h>

#include <Eigen/Dense>

namespace uscgibbs::detail {

namespace {

// LAPACKE prototypes with lapack_int = int and the C99 complex layout.
using SyevdFn = int (*)(int, char, char, int, double*, int, double*);
using HeevdFn = int (*)(int, char, char, int, void*, int, double*);
constexpr int kColMajor = 102;

struct Backend {
  SyevdFn syevd = nullptr;
  HeevdFn heevd = nullptr;
  std::string name = "eigen";
};

// OpenBLAS 0.3.20's AVX-512 kernels return corrupted eigenvectors on some CPUs.
// The core type is read once when the library loads, so it has to be pinned
// before the dlopen below. A value set by the user wins.
void pin_openblas_core() {
#if defined(__x86_64__)
  if (std::getenv("OPENBLAS_CORETYPE") == nullptr && __builtin_cpu_supports("avx2"))
    setenv("OPENBLAS_CORETYPE", "Haswell", 0);
#endif
}

bool self_check(SyevdFn syevd) {
  constexpr int n = 200;
  Eigen::MatrixXd m(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) m(i, j) = std::sin(1.0 + i * 0.37 + j * 0.37) + (i == j ? 0.01 * i : 0.0);
  Eigen::MatrixXd a = m;
  Eigen::VectorXd w(n);
  if (syevd(kColMajor, 'V', 'L', n, a.data(), n, w.data()) != 0) return false;
  const double resid = (m * a - a * w.asDiagonal()).norm();
  const double ortho = (a.transpose() * a - Eigen::MatrixXd::Identity(n, n)).norm();
  return resid < 1e-9 * std::max(1.0, m.norm()) && ortho < 1e-9;
}

Backend load() {
  pin_openblas_core();
  Backend b;
  for (const char* lib : {"liblapacke.so.3", "liblapacke.so"}) {
    void* handle = dlopen(lib, RTLD_NOW | RTLD_LOCAL);
    if (handle == nullptr) continue;
    auto syevd = reinterpret_cast<SyevdFn>(dlsym(handle, "LAPACKE_dsyevd"));
    auto heevd = reinterpret_cast<HeevdFn>(dlsym(handle, "LAPACKE_zheevd"));
    if (syevd != nullptr && heevd != nullptr && self_check(syevd)) {
      b.syevd = syevd;
      b.heevd = heevd;
      b.name = std::string("lapacke (") + lib + ")";
      return b;
    }
    dlclose(handle);
  }
  return b;
}

const Backend& backend() {
  static const Backend b = load();
  return b;
}

} // namespace

bool lapack_syevd(char jobz, int n, double* a, double* w) {
  const Backend& b = backend();
  if (b.syevd == nullptr) return false;
  return b.syevd(kColMajor, jobz, 'L', n, a, n, w) == 0;
}

bool lapack_heevd(char jobz, int n, std::complex<double>* a, double* w) {
  const Backend& b = backend();
  if (b.heevd == nullptr) return false;
  return b.heevd(kColMajor, jobz, 'L', n, a, n, w) == 0;
}

std::string_view lapack_backend_name() { return backend().name; }

} // namespace uscgibbs::detail
