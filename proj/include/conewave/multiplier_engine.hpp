#pragma once

// Fourier multipliers on periodic sampled fields (n = 1, 2), local norms, convolution with
// measures and resolution-ladder probes.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "conewave/error.hpp"
#include "conewave/fft.hpp"
#include "conewave/linalg.hpp"
#include "conewave/parallel.hpp"
#include "conewave/quadrature.hpp"
#include "conewave/symbols.hpp"

namespace conewave {

using cplx = std::complex<double>;
using Symbol = std::function<cplx(std::span<const double>)>;

// Samples x_k = (k - N/2) h, h = L/N, on each axis; row-major for n = 2 (index = k0 * N + k1).
struct GridField {
  std::size_t n = 1;
  double L = 1.0;
  std::size_t N = 8;
  std::vector<cplx> values;

  double h() const { return L / static_cast<double>(N); }
  double coord(std::size_t k) const { return (static_cast<double>(k) - 0.5 * static_cast<double>(N)) * h(); }
  double freq(std::size_t m) const { return 2.0 * kPi * (static_cast<double>(m) - 0.5 * static_cast<double>(N)) / L; }
  std::size_t total() const { return n == 1 ? N : N * N; }
  double cell() const { return std::pow(h(), static_cast<double>(n)); }

  void validate() const {
    require(n == 1 || n == 2, "grid fields support n in {1, 2}");
    require(N >= 8 && (N & (N - 1)) == 0, "grid size N must be a power of two >= 8");
    require(L > 0.0 && std::isfinite(L), "grid period must be positive");
    require(values.size() == total(), "grid field has the wrong number of samples");
    for (const auto& v : values) require(std::isfinite(v.real()) && std::isfinite(v.imag()), "grid field values must be finite");
  }

  template <class F>
  static GridField sample(std::size_t n, double L, std::size_t N, F&& f) {
    GridField g{n, L, N, {}};
    g.values.assign(n == 1 ? N : N * N, cplx{});
    require(n == 1 || n == 2, "grid fields support n in {1, 2}");
    if (n == 1) {
      for (std::size_t k = 0; k < N; ++k) {
        const std::array<double, 1> x{g.coord(k)};
        g.values[k] = f(std::span<const double>(x));
      }
    } else {
      for (std::size_t a = 0; a < N; ++a)
        for (std::size_t b = 0; b < N; ++b) {
          const std::array<double, 2> x{g.coord(a), g.coord(b)};
          g.values[a * N + b] = f(std::span<const double>(x));
        }
    }
    g.validate();
    return g;
  }
};

namespace detail {

inline std::vector<int> fft_dims(std::size_t n, std::size_t N) {
  return std::vector<int>(n, static_cast<int>(N));
}

// (-1)^(sum of indices): moves the origin to index N/2 in both domains.
inline void checkerboard(std::vector<cplx>& v, std::size_t n, std::size_t N, double scale) {
  if (n == 1) {
    for (std::size_t k = 0; k < N; ++k) v[k] *= (k % 2 ? -scale : scale);
    return;
  }
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = 0; b < N; ++b) v[a * N + b] *= ((a + b) % 2 ? -scale : scale);
}

// Multiplies the centered spectrum by the symbol at the grid frequencies.
inline void multiply_spectrum(std::vector<cplx>& spec, const Symbol& sym, std::size_t n, std::size_t N,
                              const GridField& grid) {
  const std::size_t rows = n == 1 ? 1 : N;
  parallel_for(rows, [&](std::size_t a) {
    for (std::size_t b = 0; b < N; ++b) {
      std::array<double, 2> xi{};
      std::size_t idx;
      if (n == 1) {
        xi[0] = grid.freq(b);
        idx = b;
      } else {
        xi = {grid.freq(a), grid.freq(b)};
        idx = a * N + b;
      }
      const cplx s = sym(std::span<const double>(xi.data(), n));
      if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
        throw ConfigError("symbol returned a non-finite value at a grid frequency");
      spec[idx] *= s;
    }
  });
}

}  // namespace detail

// Ff(xi_m) ~ h^n sum_k f(x_k) exp(-i x_k . xi_m), xi_m = 2 pi (m - N/2) / L.
inline GridField dft_forward(const GridField& f) {
  f.validate();
  GridField out = f;
  detail::checkerboard(out.values, f.n, f.N, 1.0);
  fft::c2c(out.values, detail::fft_dims(f.n, f.N), FFTW_FORWARD);
  detail::checkerboard(out.values, f.n, f.N, f.cell());
  return out;
}

// Inverse with the (2 pi)^{-n} factor: f(x_k) = (2 pi)^{-n} (2 pi / L)^n sum_m F_m exp(i x_k . xi_m).
inline GridField dft_inverse(const GridField& spec) {
  spec.validate();
  GridField out = spec;
  detail::checkerboard(out.values, spec.n, spec.N, 1.0);
  fft::c2c(out.values, detail::fft_dims(spec.n, spec.N), FFTW_BACKWARD);
  detail::checkerboard(out.values, spec.n, spec.N, 1.0 / std::pow(spec.L, static_cast<double>(spec.n)));
  return out;
}

// psi(D) f; the two checkerboards of the spectrum cancel, so only the spatial ones remain.
inline GridField apply_multiplier(const Symbol& sym, const GridField& f) {
  f.validate();
  GridField out = f;
  const auto dims = detail::fft_dims(f.n, f.N);
  detail::checkerboard(out.values, f.n, f.N, 1.0);
  fft::c2c(out.values, dims, FFTW_FORWARD);
  detail::multiply_spectrum(out.values, sym, f.n, f.N, f);
  fft::c2c(out.values, dims, FFTW_BACKWARD);
  detail::checkerboard(out.values, f.n, f.N, 1.0 / static_cast<double>(f.total()));
  return out;
}

inline double symbol_max_on_grid(const Symbol& sym, const GridField& f) {
  double m = 0.0;
  const std::size_t rows = f.n == 1 ? 1 : f.N;
  for (std::size_t a = 0; a < rows; ++a)
    for (std::size_t b = 0; b < f.N; ++b) {
      std::array<double, 2> xi = f.n == 1 ? std::array<double, 2>{f.freq(b), 0.0}
                                          : std::array<double, 2>{f.freq(a), f.freq(b)};
      m = std::max(m, std::abs(sym(std::span<const double>(xi.data(), f.n))));
    }
  return m;
}


// ---------------------------------------------------------------------------------------
// Local norms.

struct Box {
  std::vector<std::pair<double, double>> sides;  // [lo, hi] per axis
};

inline Box cube(std::size_t n, double lo, double hi) { return Box{std::vector<std::pair<double, double>>(n, {lo, hi})}; }

namespace detail {

inline std::vector<std::size_t> indices_in(const GridField& f, std::pair<double, double> side) {
  std::vector<std::size_t> ks;
  const double eps = 1e-12 * f.h();
  for (std::size_t k = 0; k < f.N; ++k) {
    const double x = f.coord(k);
    if (x >= side.first - eps && x <= side.second + eps) ks.push_back(k);
  }
  return ks;
}

}  // namespace detail

// Riemann-sum L^p(K) norm, p in {1, 2, inf} (p = inf passed as infinity).
inline double local_norm(const GridField& f, const Box& K, double p) {
  require(K.sides.size() == f.n, "region dimension differs from the field");
  require(p == 1.0 || p == 2.0 || std::isinf(p), "local norms support p in {1, 2, inf}");
  for (const auto& [lo, hi] : K.sides)
    require(lo <= hi && lo >= -0.5 * f.L - 1e-12 && hi <= 0.5 * f.L + 1e-12, "region must lie in the period box");
  const auto i0 = detail::indices_in(f, K.sides[0]);
  const auto i1 = f.n == 2 ? detail::indices_in(f, K.sides[1]) : std::vector<std::size_t>{0};
  if (i0.empty() || i1.empty()) throw ConfigError("region K contains no samples");
  double acc = 0.0;
  for (std::size_t a : i0)
    for (std::size_t b : i1) {
      const double v = std::abs(f.values[f.n == 1 ? a : a * f.N + b]);
      if (std::isinf(p)) acc = std::max(acc, v);
      else acc += (p == 1.0 ? v : v * v);
    }
  if (std::isinf(p)) return acc;
  acc *= f.cell();
  return p == 1.0 ? acc : std::sqrt(acc);
}

// ---------------------------------------------------------------------------------------
// Convolution with measures and translations.

struct Atom {
  std::vector<double> location;
  cplx weight;
};

struct MeasureSpec {
  std::vector<Atom> atoms;
  std::optional<GridField> density;

  double total_variation() const {
    double s = 0.0;
    for (const auto& a : atoms) s += std::abs(a.weight);
    if (density) {
      double d = 0.0;
      for (const auto& v : density->values) d += std::abs(v);
      s += d * density->cell();
    }
    return s;
  }
};

// Circular shift by an integer number of samples per axis: (T f)(x) = f(x - shift h).
inline GridField translate(const GridField& f, std::span<const long> shift) {
  require(shift.size() == f.n, "shift dimension differs from the field");
  GridField out = f;
  const long N = static_cast<long>(f.N);
  auto wrap = [N](long k) { return static_cast<std::size_t>(((k % N) + N) % N); };
  if (f.n == 1) {
    for (long k = 0; k < N; ++k) out.values[wrap(k + shift[0])] = f.values[static_cast<std::size_t>(k)];
  } else {
    for (long a = 0; a < N; ++a)
      for (long b = 0; b < N; ++b)
        out.values[wrap(a + shift[0]) * f.N + wrap(b + shift[1])] = f.values[static_cast<std::size_t>(a * N + b)];
  }
  return out;
}

// f * mu: shifted copies for atoms (multilinear interpolation off the grid) plus a spectral
// product for the density.
inline GridField convolve_with_measure(const GridField& f, const MeasureSpec& mu) {
  f.validate();
  GridField out = f;
  std::fill(out.values.begin(), out.values.end(), cplx{});
  for (const auto& atom : mu.atoms) {
    require(atom.location.size() == f.n, "atom dimension differs from the field");
    std::array<long, 2> base{};
    std::array<double, 2> frac{};
    for (std::size_t d = 0; d < f.n; ++d) {
      require(std::abs(atom.location[d]) <= 0.5 * f.L, "atom lies outside the period box");
      const double q = atom.location[d] / f.h();
      base[d] = static_cast<long>(std::floor(q));
      frac[d] = q - static_cast<double>(base[d]);
    }
    const std::size_t corners = f.n == 1 ? 2 : 4;
    for (std::size_t c = 0; c < corners; ++c) {
      std::array<long, 2> sh{};
      double w = 1.0;
      for (std::size_t d = 0; d < f.n; ++d) {
        const bool up = (c >> d) & 1u;
        sh[d] = base[d] + (up ? 1 : 0);
        w *= up ? frac[d] : 1.0 - frac[d];
      }
      if (w == 0.0) continue;
      const auto moved = translate(f, std::span<const long>(sh.data(), f.n));
      for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += atom.weight * w * moved.values[i];
    }
  }
  if (mu.density) {
    const auto& g = *mu.density;
    require(g.n == f.n && g.N == f.N && std::abs(g.L - f.L) < 1e-12 * f.L, "density grid differs from the field");
    auto Ff = dft_forward(f);
    const auto Fg = dft_forward(g);
    for (std::size_t i = 0; i < Ff.values.size(); ++i) Ff.values[i] *= Fg.values[i];
    const auto conv = dft_inverse(Ff);
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += conv.values[i];
  }
  return out;
}

// max |psi(D) T f - T psi(D) f| over the grid.
inline double translation_commutation_check(const Symbol& sym, const GridField& f, std::span<const long> shift) {
  const auto a = apply_multiplier(sym, translate(f, shift));
  const auto b = translate(apply_multiplier(sym, f), shift);
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

// ---------------------------------------------------------------------------------------
// Symbols used by the probes.

inline Symbol sign_symbol() {
  return [](std::span<const double> xi) { return cplx(xi[0] > 0.0 ? 1.0 : (xi[0] < 0.0 ? -1.0 : 0.0), 0.0); };
}

// Smooth, compactly supported: 1 for |xi| <= R, 0 for |xi| >= 2R.
inline Symbol control_symbol(double R) {
  require(R > 0.0, "control symbol needs R > 0");
  return [R](std::span<const double> xi) { return cplx(1.0 - smooth_step(norm(xi) / R - 1.0), 0.0); };
}

template <class S>
Symbol real_symbol(S s) {
  return [s = std::move(s)](std::span<const double> xi) { return cplx(s(xi), 0.0); };
}

// Indicator of the centered box [-a_i, a_i]; samples on a face get `edge`.
inline std::function<cplx(std::span<const double>)> box_indicator(std::vector<double> half, double edge = 0.5) {
  return [half = std::move(half), edge](std::span<const double> x) {
    double v = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = std::abs(x[i]) - half[i];
      if (d > 1e-12 * half[i]) return cplx{};
      if (d > -1e-12 * half[i]) v *= edge;
    }
    return cplx(v, 0.0);
  };
}

// f(x) = |x|^{-n} / ln^2(|x|) on |x| < 1/2 (n = 2): in L^1 but unbounded at 0. The sample at the
// origin carries the mass of the disc of area h^2.
inline std::function<cplx(std::span<const double>)> log_singular_input(double h) {
  return [h](std::span<const double> x) {
    const double r = norm(x);
    if (r >= 0.5) return cplx{};
    if (r < 0.5 * h) return cplx(2.0 * kPi / (h * h) / std::log(std::sqrt(kPi) / h), 0.0);
    const double l = std::log(r);
    return cplx(1.0 / (r * r * l * l), 0.0);
  };
}

// ---------------------------------------------------------------------------------------
// Resolution ladders.

struct NormProbe {
  std::size_t index = 0;
  std::size_t N = 0;
  double p = 1.0;
  Box K;
  double value = 0.0;
};

struct BlowupReport {
  std::vector<NormProbe> probes;
  quad::LineFit fit;      // value against ln N
  bool increasing = false;
  bool divergentTrend = false;  // increasing, positive slope, R^2 >= 0.9
  bool stabilizes = false;      // last two values within 2%
};

// Records ||psi(D) f_N||_{L^p(K)} where makeInput(N) gives the input sampled at resolution N.
template <class Factory>
BlowupReport blowup_probe_family(const Symbol& sym, std::size_t n, double L, const Factory& makeInput,
                                 const std::vector<std::size_t>& Ns, const Box& K, double p) {
  require(!Ns.empty(), "blow-up probe needs a resolution ladder");
  BlowupReport rep;
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    GridField f = GridField::sample(n, L, Ns[i], makeInput(Ns[i]));
    f = apply_multiplier(sym, f);
    rep.probes.push_back({i, Ns[i], p, K, local_norm(f, K, p)});
  }
  std::vector<double> x, y;
  for (const auto& pr : rep.probes) {
    x.push_back(std::log(static_cast<double>(pr.N)));
    y.push_back(pr.value);
  }
  rep.increasing = true;
  for (std::size_t i = 1; i < y.size(); ++i) rep.increasing = rep.increasing && y[i] > y[i - 1];
  if (y.size() >= 2) {
    rep.fit = quad::fit_line(x, y);
    const double a = y[y.size() - 2], b = y.back();
    rep.stabilizes = std::abs(b - a) <= 0.02 * std::max(std::abs(a), std::abs(b));
  }
  rep.divergentTrend = rep.increasing && rep.fit.slope > 0.0 && rep.fit.r2 >= 0.9;
  return rep;
}

// Fixed input function sampled at each N.
template <class Input>
BlowupReport blowup_probe(const Symbol& sym, std::size_t n, double L, const Input& input,
                          const std::vector<std::size_t>& Ns, const Box& K, double p) {
  return blowup_probe_family(sym, n, L, [&](std::size_t) { return input; }, Ns, K, p);
}

inline std::vector<std::size_t> power_ladder(int lo, int hi) {
  std::vector<std::size_t> v;
  for (int e = lo; e <= hi; ++e) v.push_back(std::size_t{1} << e);
  return v;
}

}  // namespace conewave
