#pragma once

#include <complex>
#include <memory>
#include <vector>

namespace dislo {

// Periodic spectral representation of (-Laplace)^{1/2} on n uniform nodes
// spanning one period of length L: Fourier multiplier |xi_m| with
// xi_m = 2*pi*m/L.  Provides both a fast apply and the dense circulant
// matrix row for direct linear solves.
class HalfLaplacianPeriodic {
 public:
  HalfLaplacianPeriodic(int n, double domain_length);
  ~HalfLaplacianPeriodic();
  HalfLaplacianPeriodic(const HalfLaplacianPeriodic&) = delete;
  HalfLaplacianPeriodic& operator=(const HalfLaplacianPeriodic&) = delete;

  int size() const { return n_; }
  void apply(const double* in, double* out) const;
  std::vector<double> apply(const std::vector<double>& in) const;
  // K[j][l] = first_row[(l - j + n) % n]
  const std::vector<double>& first_row() const { return row0_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int n_;
  std::vector<double> row0_;
};

// Batched DST-I along contiguous rows of an (n_rows x m) array.  One
// forward apply of DST-I twice scales by 2*(m+1); `normalization()`
// returns that factor.
class Dst1Batch {
 public:
  Dst1Batch(int m, int n_rows);
  ~Dst1Batch();
  Dst1Batch(const Dst1Batch&) = delete;
  Dst1Batch& operator=(const Dst1Batch&) = delete;

  void execute(double* data) const;  // in-place, all rows
  double normalization() const { return 2.0 * (m_ + 1); }
  int m() const { return m_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int m_;
};

// Real-to-complex periodic FFT pair on n nodes over period L, for diagonal
// multiplier application: out = F^{-1}[ g(|xi|) * F in ] with user-supplied
// per-mode factors.
class PeriodicFourier {
 public:
  PeriodicFourier(int n, double domain_length);
  ~PeriodicFourier();
  PeriodicFourier(const PeriodicFourier&) = delete;
  PeriodicFourier& operator=(const PeriodicFourier&) = delete;

  int n() const { return n_; }
  int n_modes() const { return n_ / 2 + 1; }
  double freq(int k) const;  // |xi_k| = 2*pi*k/L, k = 0..n/2

  void forward(const double* in);               // fills internal spectrum
  std::complex<double>& mode(int k);            // mutable access
  void inverse(double* out);                    // consumes internal spectrum
  // Convenience: out = F^{-1}[ factors[k] * F(in) ], factors real.
  void apply_multiplier(const double* in, const std::vector<double>& factors,
                        double* out);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int n_;
  double length_;
};

}  // namespace dislo
