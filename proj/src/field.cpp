// SPDX-License-Identifier: Apache-2.0
#include "gmc/field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "gmc/digest.hpp"
#include "gmc/rng.hpp"
#include "gmc/spectral.hpp"

namespace gmc {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t bytes) : ptr(fftw_malloc(bytes)) {
    if (!ptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  void* ptr;
};

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

std::size_t GridSpec::cells() const {
  std::size_t c = 1;
  for (int i = 0; i < dimension; ++i) c *= static_cast<std::size_t>(n);
  return c;
}

void GridSpec::validate() const {
  if (dimension < 1 || dimension > 3) throw std::invalid_argument("grid: dimension must be 1, 2 or 3");
  if (!is_power_of_two(n) || n < 8) throw std::invalid_argument("grid: n must be a power of two >= 8");
  if (!(length > 0.0) || !std::isfinite(length)) throw std::invalid_argument("grid: length must be positive");
  if (cells() > (std::size_t{1} << 28)) throw std::invalid_argument("grid: more than 2^28 cells");
}

void require_periodization_margin(const GridSpec& grid, const KernelSpec& kernel, double extent) {
  if (grid.length < 2.0 * kernel.scale + extent) {
    std::ostringstream msg;
    msg << "grid: side " << grid.length << " is below 2R + extent = " << 2.0 * kernel.scale + extent;
    throw std::invalid_argument(msg.str());
  }
}

double ShellLadder::base_weight(double xi) const { return cumulative_weight(0, xi); }

double ShellLadder::shell_weight(int k, double xi) const {
  const int d = kernel.dimension;
  const double fh = kernel_hat(kernel, xi).value;
  return fh * (mollifier_hat(mollifier, eps.at(k + 1) * xi, d) - mollifier_hat(mollifier, eps.at(k) * xi, d));
}

double ShellLadder::cumulative_weight(int level, double xi) const {
  return kernel_hat(kernel, xi).value * mollifier_hat(mollifier, eps.at(level) * xi, kernel.dimension);
}

std::string ShellLadder::digest() const {
  std::ostringstream s;
  s.precision(17);
  s << "d=" << kernel.dimension << ";l2=" << kernel.lambda2 << ";R=" << kernel.scale
    << ";g=" << to_string(kernel.remainder.kind) << ":" << kernel.remainder.constant;
  for (std::size_t i = 0; i < kernel.remainder.r.size(); ++i)
    s << "," << kernel.remainder.r[i] << ":" << kernel.remainder.g[i];
  s << ";m=" << to_string(mollifier) << ";eps=";
  for (double e : eps) s << e << ",";
  return fnv1a_hex(s.str());
}

std::vector<double> geometric_schedule(double eps0, int shells) {
  if (!(eps0 > 0.0)) throw std::invalid_argument("schedule: eps0 must be positive");
  if (shells < 0) throw std::invalid_argument("schedule: shell count must be >= 0");
  std::vector<double> e(static_cast<std::size_t>(shells) + 1);
  for (int k = 0; k <= shells; ++k) e[k] = std::ldexp(eps0, -k);
  return e;
}

ShellLadder build_ladder(const KernelSpec& kernel, MollifierKind mollifier, const std::vector<double>& schedule) {
  kernel.validate();
  if (schedule.empty()) throw std::invalid_argument("ladder: empty schedule");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] > 0.0)) throw std::invalid_argument("ladder: scales must be positive");
    if (i > 0 && !(schedule[i] < schedule[i - 1])) throw std::invalid_argument("ladder: scales must strictly decrease");
  }
  ShellLadder ladder{kernel, mollifier, schedule};
  // Probe frequencies up to where the finest mollifier has cut everything off.
  const double hi = mollifier_hat_cutoff(mollifier) / schedule.back();
  const double lo = 1e-3 / kernel.scale;
  const int probes = 300;
  std::vector<double> fh(probes), xi(probes);
  double fmax = 0.0;
  for (int i = 0; i < probes; ++i) {
    xi[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (probes - 1));
    fh[i] = kernel_hat(kernel, xi[i]).value;
    fmax = std::max(fmax, std::abs(fh[i]));
  }
  for (int i = 0; i < probes; ++i)
    if (fh[i] < -1e-12 * fmax) {
      std::ostringstream msg;
      msg << "ladder: kernel spectrum is negative (" << fh[i] << ") at xi = " << xi[i];
      throw std::invalid_argument(msg.str());
    }
  const int d = kernel.dimension;
  for (int k = 0; k + 1 < static_cast<int>(schedule.size()); ++k) {
    double wmax = 0.0;
    std::vector<double> w(probes);
    for (int i = 0; i < probes; ++i) {
      w[i] = fh[i] * (mollifier_hat(mollifier, schedule[k + 1] * xi[i], d) - mollifier_hat(mollifier, schedule[k] * xi[i], d));
      wmax = std::max(wmax, std::abs(w[i]));
    }
    for (int i = 0; i < probes; ++i)
      if (w[i] < -1e-12 * wmax) {
        std::ostringstream msg;
        msg << "ladder: shell " << k << " weight is negative at xi = " << xi[i];
        throw std::invalid_argument(msg.str());
      }
  }
  return ladder;
}

FieldSynthesizer::FieldSynthesizer(const ShellLadder& ladder, const GridSpec& grid) : ladder_(ladder), grid_(grid) {
  grid_.validate();
  ladder_.kernel.validate();
  const int d = grid_.dimension;
  if (d != ladder_.kernel.dimension) throw std::invalid_argument("synthesis: grid and kernel dimensions differ");
  const int n = grid_.n;
  const int nh = n / 2 + 1;
  real_size_ = grid_.cells();
  complex_size_ = real_size_ / n * nh;
  const double L = grid_.length;
  const double volume = std::pow(L, d);

  // Nyquist gate on the finest scale.
  const double xi_nyq = 0.5 * n / L;
  diag_.nyquist_theta_hat = mollifier_hat(ladder_.mollifier, ladder_.eps.back() * xi_nyq, d);
  if (diag_.nyquist_theta_hat > 1e-2) {
    std::ostringstream msg;
    msg << "synthesis: grid does not resolve eps = " << ladder_.eps.back() << " (theta_hat at Nyquist = "
        << diag_.nyquist_theta_hat << " > 1e-2)";
    throw std::invalid_argument(msg.str());
  }

  // Integer squared wave numbers, multiplicities and conjugate partners.
  std::vector<std::uint64_t> m2(complex_size_);
  multiplicity_.assign(complex_size_, 2.0);
  partner_.assign(complex_size_, -2);
  auto wrap = [n](int i) { return i <= n / 2 ? i : i - n; };
  std::array<int, 3> idx{0, 0, 0};
  for (std::size_t j = 0; j < complex_size_; ++j) {
    // Decode j into (i_0, ..., i_{d-1}) with the halved axis last.
    std::size_t rem = j;
    idx[d - 1] = static_cast<int>(rem % nh);
    rem /= nh;
    for (int a = d - 2; a >= 0; --a) {
      idx[a] = static_cast<int>(rem % n);
      rem /= n;
    }
    std::uint64_t s = 0;
    for (int a = 0; a < d; ++a) {
      const std::int64_t k = wrap(idx[a]);
      s += static_cast<std::uint64_t>(k * k);
    }
    m2[j] = s;
    const int last = idx[d - 1];
    if (last == 0 || last == n / 2) {
      multiplicity_[j] = 1.0;
      // Partner: negate the leading indices.
      std::size_t pj = static_cast<std::size_t>(last);
      std::size_t stride = nh;
      for (int a = d - 2; a >= 0; --a) {
        const int neg = (n - idx[a]) % n;
        pj += static_cast<std::size_t>(neg) * stride;
        stride *= n;
      }
      if (pj == j)
        partner_[j] = -1;
      else if (pj < j)
        partner_[j] = static_cast<std::int64_t>(pj);
    }
  }

  // Kernel spectrum per distinct |k|^2.
  std::unordered_map<std::uint64_t, double> fhat;
  for (std::size_t j = 0; j < complex_size_; ++j) {
    if (fhat.count(m2[j])) continue;
    const double xi = std::sqrt(static_cast<double>(m2[j])) / L;
    fhat[m2[j]] = kernel_hat(ladder_.kernel, xi).value;
  }
  const double atom = kernel_atom(ladder_.kernel);

  const int layers = levels();
  amp_.assign(layers, std::vector<double>(complex_size_));
  layer_variance_.assign(layers, 0.0);
  double negative = 0.0;
  double trace = 0.0;
  for (int layer = 0; layer < layers; ++layer) {
    auto& a = amp_[layer];
    for (std::size_t j = 0; j < complex_size_; ++j) {
      const double xi = std::sqrt(static_cast<double>(m2[j])) / L;
      double th;
      if (layer == 0) {
        th = mollifier_hat(ladder_.mollifier, ladder_.eps[0] * xi, d);
      } else {
        th = mollifier_hat(ladder_.mollifier, ladder_.eps[layer] * xi, d) -
             mollifier_hat(ladder_.mollifier, ladder_.eps[layer - 1] * xi, d);
      }
      double s = fhat[m2[j]] * th / volume;
      if (layer == 0 && m2[j] == 0) s += atom;
      if (s < 0.0) {
        negative += -s * multiplicity_[j];
        s = 0.0;
      }
      trace += s * multiplicity_[j];
      a[j] = std::sqrt(s);
      layer_variance_[layer] += s * multiplicity_[j];
    }
  }
  diag_.clipped_negative_mass = negative;
  diag_.trace = trace;
  if (negative > 1e-8 * trace) {
    std::ostringstream msg;
    msg << "synthesis: circulant embedding has negative eigenvalues of total mass " << negative
        << " (trace " << trace << ")";
    throw std::runtime_error(msg.str());
  }

  continuum_variance_.assign(layers, 0.0);
  if (ladder_.kernel.remainder.kind == RemainderKind::zero ||
      ladder_.kernel.remainder.kind == RemainderKind::constant) {
    for (int level = 0; level < layers; ++level)
      continuum_variance_[level] =
          mollified_covariance(ladder_.kernel, MollifierSpec{ladder_.mollifier, ladder_.eps[level]}, 0.0).value;
  }

  std::lock_guard<std::mutex> lock(planner_mutex());
  FftwBuffer in(sizeof(fftw_complex) * complex_size_);
  FftwBuffer out(sizeof(double) * real_size_);
  std::array<int, 3> dims{n, n, n};
  plan_ = fftw_plan_dft_c2r(d, dims.data(), static_cast<fftw_complex*>(in.ptr), static_cast<double*>(out.ptr),
                            FFTW_ESTIMATE);
  if (!plan_) throw std::runtime_error("synthesis: FFTW planning failed");
}

FieldSynthesizer::~FieldSynthesizer() {
  if (plan_) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  }
}

double FieldSynthesizer::discrete_variance(int level) const {
  double v = 0.0;
  for (int l = 0; l <= level; ++l) v += layer_variance_.at(l);
  return v;
}

double FieldSynthesizer::discrete_covariance(int level, int lag_cells) const {
  const int d = grid_.dimension;
  const int n = grid_.n;
  const int nh = n / 2 + 1;
  double c = 0.0;
  for (std::size_t j = 0; j < complex_size_; ++j) {
    // First-axis index of bin j.
    int i0;
    if (d == 1) {
      i0 = static_cast<int>(j % nh);
    } else {
      std::size_t stride = nh;
      for (int a = 1; a < d - 1; ++a) stride *= n;
      i0 = static_cast<int>(j / stride);
    }
    double s = 0.0;
    for (int l = 0; l <= level; ++l) s += amp_[l][j] * amp_[l][j];
    c += multiplicity_[j] * s * std::cos(2.0 * M_PI * i0 * lag_cells / n);
  }
  return c;
}

void FieldSynthesizer::accumulate_layer(std::complex<double>* spec, std::uint64_t seed, std::uint64_t replica,
                                        int layer) const {
  Stream rng(seed, replica, static_cast<std::uint32_t>(layer), StreamTag::field);
  const auto& a = amp_.at(layer);
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  for (std::size_t j = 0; j < complex_size_; ++j) {
    const double re = rng.normal();
    const double im = rng.normal();
    const std::int64_t p = partner_[j];
    std::complex<double> z;
    if (p == -1) {
      z = {re, 0.0};
    } else if (p >= 0) {
      // Conjugate of the partner's draw, recovered from what was added there.
      continue;
    } else {
      z = {re * inv_sqrt2, im * inv_sqrt2};
    }
    spec[j] += a[j] * z;
  }
  // Fill the second member of each stored conjugate pair.
  for (std::size_t j = 0; j < complex_size_; ++j) {
    const std::int64_t p = partner_[j];
    if (p >= 0) spec[j] = std::conj(spec[static_cast<std::size_t>(p)]);
  }
}

void FieldSynthesizer::backward(std::complex<double>* spec, double* out) const {
  fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_), reinterpret_cast<fftw_complex*>(spec), out);
}

FieldSample FieldSynthesizer::synthesize(std::uint64_t seed, std::uint64_t replica, int level) const {
  if (level < 0 || level >= levels()) throw std::out_of_range("synthesize: level outside the ladder");
  FftwBuffer spec(sizeof(fftw_complex) * complex_size_);
  FftwBuffer out(sizeof(double) * real_size_);
  auto* c = static_cast<std::complex<double>*>(spec.ptr);
  std::fill(c, c + complex_size_, std::complex<double>(0.0, 0.0));
  FieldSample s;
  for (int layer = 0; layer <= level; ++layer) {
    accumulate_layer(c, seed, replica, layer);
    s.streams.push_back(static_cast<std::uint32_t>(layer));
  }
  backward(c, static_cast<double*>(out.ptr));
  const double* r = static_cast<const double*>(out.ptr);
  s.grid = grid_;
  s.level = level;
  s.eps = ladder_.eps[level];
  s.values.assign(r, r + real_size_);
  s.variance = discrete_variance(level);
  s.continuum_variance = continuum_variance_[level];
  s.seed = seed;
  s.replica = replica;
  s.ladder_digest = ladder_.digest();
  return s;
}

std::vector<double> FieldSynthesizer::layer_field(std::uint64_t seed, std::uint64_t replica, int layer) const {
  if (layer < 0 || layer >= levels()) throw std::out_of_range("layer_field: layer outside the ladder");
  FftwBuffer spec(sizeof(fftw_complex) * complex_size_);
  FftwBuffer out(sizeof(double) * real_size_);
  auto* c = static_cast<std::complex<double>*>(spec.ptr);
  std::fill(c, c + complex_size_, std::complex<double>(0.0, 0.0));
  accumulate_layer(c, seed, replica, layer);
  backward(c, static_cast<double*>(out.ptr));
  const double* r = static_cast<const double*>(out.ptr);
  return std::vector<double>(r, r + real_size_);
}

void FieldSynthesizer::refine(FieldSample& sample) const {
  if (sample.level + 1 >= levels()) throw std::out_of_range("refine: shell index exhausted");
  if (sample.values.size() != real_size_) throw std::invalid_argument("refine: sample does not match the grid");
  const int layer = sample.level + 1;
  const std::vector<double> inc = layer_field(sample.seed, sample.replica, layer);
  for (std::size_t i = 0; i < real_size_; ++i) sample.values[i] += inc[i];
  sample.level = layer;
  sample.eps = ladder_.eps[layer];
  sample.variance = discrete_variance(layer);
  sample.continuum_variance = continuum_variance_[layer];
  sample.streams.push_back(static_cast<std::uint32_t>(layer));
}

}  // namespace gmc
