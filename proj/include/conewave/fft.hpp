#pragma once

// Thin FFTW wrappers (unnormalized, FFTW_ESTIMATE plans so results do not depend on timing).

#include <complex>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "conewave/error.hpp"

namespace conewave::fft {

using cplx = std::complex<double>;

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// In-place complex transform over a row-major array with the given extents.
// sign = FFTW_FORWARD (-1) or FFTW_BACKWARD (+1).
inline void c2c(std::vector<cplx>& data, const std::vector<int>& dims, int sign) {
  std::size_t total = 1;
  for (int d : dims) total *= static_cast<std::size_t>(d);
  require(total == data.size(), "FFT extent mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), p, p, sign, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw NumericalError("FFTW could not create a plan");
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plan);
}

// Real-to-complex 1-D transform: out[k] = sum_j in[j] exp(-2 pi i jk/P), k = 0..P/2.
inline std::vector<cplx> r2c(std::vector<double> in) {
  const int n = static_cast<int>(in.size());
  std::vector<cplx> out(static_cast<std::size_t>(n / 2 + 1));
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw NumericalError("FFTW could not create a plan");
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plan);
  return out;
}

}  // namespace conewave::fft
