#pragma once

// Data-parallel inner loops used by Vector and LinearMap.
//
// Every kernel has a portable scalar reference implementation. When the
// build and the running CPU support AVX2+FMA, an equivalent vectorized table
// is selected at first use. Elementwise kernels are bitwise identical across
// backends; reductions agree up to reassociation.

#include <cstddef>
#include <string_view>

namespace fom::kernels {

enum class Backend { Scalar, Avx2 };

struct KernelTable {
  Backend backend;
  /// sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  /// sum_i x[i]
  double (*sum)(const double* x, std::size_t n);
  /// max_i |x[i]|, 0 for n == 0
  double (*max_abs)(const double* x, std::size_t n);
  /// y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  /// out[i] = a * x[i] + b * y[i]; out may alias x or y
  void (*lincomb)(double a, const double* x, double b, const double* y, double* out,
                  std::size_t n);
  /// y = M x for a row-major rows x cols matrix
  void (*gemv)(const double* m, std::size_t rows, std::size_t cols, const double* x, double* y);
  /// y = M^T u for a row-major rows x cols matrix
  void (*gemv_t)(const double* m, std::size_t rows, std::size_t cols, const double* u,
                 double* y);
};

const KernelTable& scalar_table();

/// Returns nullptr when the AVX2 variant was not compiled in or the CPU lacks
/// AVX2/FMA.
const KernelTable* avx2_table();

/// Table used by the library. Chosen once from FOM_KERNELS (scalar|avx2|auto,
/// default auto) and CPU capabilities; select() overrides it.
const KernelTable& active();

/// Forces a backend. Returns false (and leaves the selection unchanged) if the
/// backend is unavailable.
bool select(Backend backend);

std::string_view backend_name(Backend backend);

}  // namespace fom::kernels
