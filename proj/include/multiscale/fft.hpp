#pragma once

// Thin RAII layer over FFTW. Planning is serialized through one mutex (FFTW's
// planner is not re-entrant); executing a plan on caller-owned buffers is
// thread-safe. Plans use FFTW_ESTIMATE so results do not depend on timing.

#include <complex>
#include <cstddef>
#include <mutex>
#include <span>
#include <vector>

#include <fftw3.h>

namespace multiscale::fft {

using cplx = std::complex<double>;

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

inline fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

class Plan {
 public:
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  Plan(Plan&& other) noexcept : plan_(other.plan_), n_(other.n_) { other.plan_ = nullptr; }
  ~Plan() {
    if (plan_ != nullptr) {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan_);
    }
  }

  /// Complex-to-complex plan of length n; sign is FFTW_FORWARD or FFTW_BACKWARD.
  static Plan complex(std::size_t n, int sign) {
    std::vector<cplx> in(n), out(n);
    std::lock_guard lock(planner_mutex());
    return Plan(fftw_plan_dft_1d(static_cast<int>(n), as_fftw(in.data()), as_fftw(out.data()), sign,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED),
                n);
  }

  static Plan real_forward(std::size_t n) {
    std::vector<double> in(n);
    std::vector<cplx> out(n / 2 + 1);
    std::lock_guard lock(planner_mutex());
    return Plan(fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), as_fftw(out.data()),
                                     FFTW_ESTIMATE | FFTW_UNALIGNED),
                n);
  }

  static Plan real_backward(std::size_t n) {
    std::vector<cplx> in(n / 2 + 1);
    std::vector<double> out(n);
    std::lock_guard lock(planner_mutex());
    return Plan(fftw_plan_dft_c2r_1d(static_cast<int>(n), as_fftw(in.data()), out.data(),
                                     FFTW_ESTIMATE | FFTW_UNALIGNED),
                n);
  }

  std::size_t size() const noexcept { return n_; }

  void execute(const cplx* in, cplx* out) const {
    fftw_execute_dft(plan_, as_fftw(const_cast<cplx*>(in)), as_fftw(out));
  }
  void execute(const double* in, cplx* out) const {
    fftw_execute_dft_r2c(plan_, const_cast<double*>(in), as_fftw(out));
  }
  // c2r destroys its input, hence the copy held by the caller.
  void execute(cplx* in, double* out) const { fftw_execute_dft_c2r(plan_, as_fftw(in), out); }

 private:
  Plan(fftw_plan p, std::size_t n) : plan_(p), n_(n) {}
  fftw_plan plan_;
  std::size_t n_;
};

/// Unnormalized forward DFT of a real sequence, bins 0..n/2.
inline std::vector<cplx> rfft(std::span<const double> x) {
  auto plan = Plan::real_forward(x.size());
  std::vector<cplx> out(x.size() / 2 + 1);
  plan.execute(x.data(), out.data());
  return out;
}

/// Unnormalized inverse of rfft (result is n times the input sequence).
inline std::vector<double> irfft(std::span<const cplx> half, std::size_t n) {
  auto plan = Plan::real_backward(n);
  std::vector<cplx> work(half.begin(), half.end());
  std::vector<double> out(n);
  plan.execute(work.data(), out.data());
  return out;
}

inline std::vector<cplx> dft(std::span<const cplx> x, int sign) {
  auto plan = Plan::complex(x.size(), sign);
  std::vector<cplx> out(x.size());
  plan.execute(x.data(), out.data());
  return out;
}

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace multiscale::fft
