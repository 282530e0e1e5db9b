#include "wavespec/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "wavespec/errors.hpp"

namespace wavespec::fft {

namespace {

// The FFTW planner and plan destruction are not thread-safe; execution of an
// existing plan on new arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};
using PlanHandle = std::unique_ptr<fftw_plan_s, PlanDeleter>;

enum class Kind { C2CForward, C2CBackward, R2C };

// Plans are made with FFTW_UNALIGNED so they may be executed on any
// caller-owned std::complex / double storage via the new-array interface.
fftw_plan_s* make_plan(Kind kind, int n) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  fftw_plan plan = nullptr;
  if (kind == Kind::R2C) {
    double* in = fftw_alloc_real(static_cast<std::size_t>(n));
    fftw_complex* out = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
    plan = fftw_plan_dft_r2c_1d(n, in, out, flags);
    fftw_free(in);
    fftw_free(out);
  } else {
    fftw_complex* in = fftw_alloc_complex(static_cast<std::size_t>(n));
    fftw_complex* out = fftw_alloc_complex(static_cast<std::size_t>(n));
    plan = fftw_plan_dft_1d(n, in, out, kind == Kind::C2CForward ? FFTW_FORWARD : FFTW_BACKWARD,
                            flags);
    fftw_free(in);
    fftw_free(out);
  }
  if (plan == nullptr) throw NumericalError("FFTW failed to create a plan");
  return plan;
}

fftw_plan_s* cached_plan(Kind kind, std::size_t n) {
  thread_local std::map<std::tuple<Kind, std::size_t>, PlanHandle> cache;
  auto& slot = cache[{kind, n}];
  if (!slot) slot.reset(make_plan(kind, static_cast<int>(n)));
  return slot.get();
}

fftw_complex* as_fftw(cdouble* p) { return reinterpret_cast<fftw_complex*>(p); }
fftw_complex* as_fftw(const cdouble* p) {
  // FFTW's signature is not const-correct; out-of-place plans never write the input.
  return reinterpret_cast<fftw_complex*>(const_cast<cdouble*>(p));
}

}  // namespace

void dft(std::span<const cdouble> in, std::span<cdouble> out, Direction dir) {
  if (in.size() != out.size()) throw ConfigError("dft: input and output sizes differ");
  if (in.empty()) return;
  if (in.data() == out.data()) {
    std::vector<cdouble> copy(in.begin(), in.end());
    dft(copy, out, dir);
    return;
  }
  const Kind kind = dir == Direction::Forward ? Kind::C2CForward : Kind::C2CBackward;
  fftw_execute_dft(cached_plan(kind, in.size()), as_fftw(in.data()), as_fftw(out.data()));
}

std::vector<cdouble> dft(std::span<const cdouble> in, Direction dir) {
  std::vector<cdouble> out(in.size());
  dft(in, out, dir);
  return out;
}

std::vector<cdouble> rdft(std::span<const double> in) {
  std::vector<cdouble> out(in.size() / 2 + 1);
  if (in.empty()) return {};
  std::vector<double> copy(in.begin(), in.end());  // r2c plans may clobber input
  fftw_execute_dft_r2c(cached_plan(Kind::R2C, in.size()), copy.data(), as_fftw(out.data()));
  return out;
}

void dft2d_inplace(std::span<cdouble> data, std::size_t rows, std::size_t cols, Direction dir) {
  if (data.size() != rows * cols) throw ConfigError("dft2d: size mismatch");
  const auto nr = static_cast<std::ptrdiff_t>(rows);
  const auto nc = static_cast<std::ptrdiff_t>(cols);

#pragma omp parallel
  {
    std::vector<cdouble> buf(std::max(rows, cols));
    std::vector<cdouble> col(rows);

#pragma omp for schedule(static)
    for (std::ptrdiff_t r = 0; r < nr; ++r) {
      std::span<cdouble> row = data.subspan(static_cast<std::size_t>(r) * cols, cols);
      std::span<cdouble> tmp(buf.data(), cols);
      dft(row, tmp, dir);
      std::copy(tmp.begin(), tmp.end(), row.begin());
    }

#pragma omp for schedule(static)
    for (std::ptrdiff_t c = 0; c < nc; ++c) {
      for (std::size_t r = 0; r < rows; ++r) col[r] = data[r * cols + static_cast<std::size_t>(c)];
      std::span<cdouble> tmp(buf.data(), rows);
      dft(col, tmp, dir);
      for (std::size_t r = 0; r < rows; ++r) data[r * cols + static_cast<std::size_t>(c)] = tmp[r];
    }
  }
}

void dft2d_inplace_serial(std::span<cdouble> data, std::size_t rows, std::size_t cols,
                          Direction dir) {
  if (data.size() != rows * cols) throw ConfigError("dft2d: size mismatch");
  fftw_plan plan = nullptr;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols), as_fftw(data.data()),
                            as_fftw(data.data()), dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD,
                            FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw NumericalError("FFTW failed to create a 2-D plan");
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plan);
}

}  // namespace wavespec::fft
