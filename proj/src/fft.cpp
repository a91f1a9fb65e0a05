#include "bandana/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>
#include <mutex>

#include "bandana/error.hpp"

namespace bandana::dsp {
namespace {

// FFTW's planner is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan p) const {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};

}  // namespace

std::vector<std::complex<double>> rfft(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  std::vector<double> in(x.begin(), x.end());
  std::vector<std::complex<double>> out(n / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  }
  if (!plan) throw Error(ErrorCode::InvalidArgument, "fftw plan creation failed");
  std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDeleter> guard(plan);
  fftw_execute(plan);
  return out;
}

std::vector<double> irfft(std::span<const std::complex<double>> spectrum, std::size_t n) {
  if (n == 0) return {};
  if (spectrum.size() != n / 2 + 1) {
    throw Error(ErrorCode::LengthMismatch, "irfft spectrum size does not match n/2+1");
  }
  // c2r destroys its input, so work on a copy.
  std::vector<std::complex<double>> in(spectrum.begin(), spectrum.end());
  std::vector<double> out(n);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
                                out.data(), FFTW_ESTIMATE);
  }
  if (!plan) throw Error(ErrorCode::InvalidArgument, "fftw plan creation failed");
  std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDeleter> guard(plan);
  fftw_execute(plan);
  const double scale = 1.0 / static_cast<double>(n);
  std::transform(out.begin(), out.end(), out.begin(), [scale](double v) { return v * scale; });
  return out;
}

}  // namespace bandana::dsp
