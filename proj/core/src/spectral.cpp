#include "dislo/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>

#include "dislo/errors.hpp"

namespace dislo {

// FFTW's planner is not reentrant; executions of distinct plans are.
static std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// ---------------------------------------------------------------------------
// HalfLaplacianPeriodic

struct HalfLaplacianPeriodic::Impl {
  fftw_plan fwd = nullptr, bwd = nullptr;
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  std::vector<double> multiplier;
  int n = 0;

  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    if (real) fftw_free(real);
    if (spec) fftw_free(spec);
  }
};

HalfLaplacianPeriodic::HalfLaplacianPeriodic(int n, double domain_length)
    : impl_(std::make_unique<Impl>()), n_(n) {
  if (n < 4) throw DomainError("HalfLaplacianPeriodic: n >= 4 required");
  if (!(domain_length > 0)) throw DomainError("HalfLaplacianPeriodic: L > 0");
  impl_->n = n;
  impl_->real = fftw_alloc_real(n);
  impl_->spec = fftw_alloc_complex(n / 2 + 1);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    impl_->fwd = fftw_plan_dft_r2c_1d(n, impl_->real, impl_->spec, FFTW_ESTIMATE);
    impl_->bwd = fftw_plan_dft_c2r_1d(n, impl_->spec, impl_->real, FFTW_ESTIMATE);
  }
  impl_->multiplier.resize(n / 2 + 1);
  for (int k = 0; k <= n / 2; ++k)
    impl_->multiplier[k] = 2.0 * std::numbers::pi * k / domain_length;

  // First circulant row = operator applied to the unit vector e_0.
  std::vector<double> e0(n, 0.0);
  e0[0] = 1.0;
  row0_.resize(n);
  apply(e0.data(), row0_.data());
}

HalfLaplacianPeriodic::~HalfLaplacianPeriodic() = default;

void HalfLaplacianPeriodic::apply(const double* in, double* out) const {
  auto& im = *impl_;
  std::memcpy(im.real, in, sizeof(double) * n_);
  fftw_execute(im.fwd);
  for (int k = 0; k <= n_ / 2; ++k) {
    im.spec[k][0] *= im.multiplier[k] / n_;
    im.spec[k][1] *= im.multiplier[k] / n_;
  }
  fftw_execute(im.bwd);
  std::memcpy(out, im.real, sizeof(double) * n_);
}

std::vector<double> HalfLaplacianPeriodic::apply(
    const std::vector<double>& in) const {
  std::vector<double> out(in.size());
  apply(in.data(), out.data());
  return out;
}

// ---------------------------------------------------------------------------
// Dst1Batch

struct Dst1Batch::Impl {
  fftw_plan plan = nullptr;
  double* buf = nullptr;
  int m = 0, rows = 0;

  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (plan) fftw_destroy_plan(plan);
    if (buf) fftw_free(buf);
  }
};

Dst1Batch::Dst1Batch(int m, int n_rows) : impl_(std::make_unique<Impl>()), m_(m) {
  if (m < 2 || n_rows < 1) throw DomainError("Dst1Batch: bad shape");
  impl_->m = m;
  impl_->rows = n_rows;
  impl_->buf = fftw_alloc_real(static_cast<size_t>(m) * n_rows);
  fftw_r2r_kind kind = FFTW_RODFT00;
  std::lock_guard<std::mutex> lock(planner_mutex());
  // FFTW_UNALIGNED keeps new-array execution valid on plain vector storage.
  impl_->plan = fftw_plan_many_r2r(1, &m, n_rows, impl_->buf, nullptr, 1, m,
                                   impl_->buf, nullptr, 1, m, &kind,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
}

Dst1Batch::~Dst1Batch() = default;

void Dst1Batch::execute(double* data) const {
  // New-array execution keeps one plan shared across call sites.
  fftw_execute_r2r(impl_->plan, data, data);
}

// ---------------------------------------------------------------------------
// PeriodicFourier

struct PeriodicFourier::Impl {
  fftw_plan fwd = nullptr, bwd = nullptr;
  double* real = nullptr;
  fftw_complex* spec = nullptr;

  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    if (real) fftw_free(real);
    if (spec) fftw_free(spec);
  }
};

PeriodicFourier::PeriodicFourier(int n, double domain_length)
    : impl_(std::make_unique<Impl>()), n_(n), length_(domain_length) {
  if (n < 4) throw DomainError("PeriodicFourier: n >= 4 required");
  impl_->real = fftw_alloc_real(n);
  impl_->spec = fftw_alloc_complex(n / 2 + 1);
  std::lock_guard<std::mutex> lock(planner_mutex());
  impl_->fwd = fftw_plan_dft_r2c_1d(n, impl_->real, impl_->spec, FFTW_ESTIMATE);
  impl_->bwd = fftw_plan_dft_c2r_1d(n, impl_->spec, impl_->real, FFTW_ESTIMATE);
}

PeriodicFourier::~PeriodicFourier() = default;

double PeriodicFourier::freq(int k) const {
  return 2.0 * std::numbers::pi * k / length_;
}

void PeriodicFourier::forward(const double* in) {
  std::memcpy(impl_->real, in, sizeof(double) * n_);
  fftw_execute(impl_->fwd);
}

std::complex<double>& PeriodicFourier::mode(int k) {
  return reinterpret_cast<std::complex<double>*>(impl_->spec)[k];
}

void PeriodicFourier::inverse(double* out) {
  fftw_execute(impl_->bwd);
  const double scale = 1.0 / n_;
  for (int i = 0; i < n_; ++i) out[i] = impl_->real[i] * scale;
}

void PeriodicFourier::apply_multiplier(const double* in,
                                       const std::vector<double>& factors,
                                       double* out) {
  forward(in);
  for (int k = 0; k <= n_ / 2; ++k) mode(k) *= factors[k];
  inverse(out);
}

}  // namespace dislo
