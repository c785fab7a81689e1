#include "fft.hpp"

#include "riesz/grid.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace riesz::detail {
namespace {

// FFTW planning is not thread-safe; execution with fftw_execute_dft is.
// Plans are created once per shape and reused for every array.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int dimension, std::size_t m, FftSign sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(dimension, m, static_cast<int>(sign));
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    const std::size_t total = dimension == 1 ? m : m * m;
    fftw_complex* scratch = fftw_alloc_complex(total);
    const int n = static_cast<int>(m);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = dimension == 1
                         ? fftw_plan_dft_1d(n, scratch, scratch, static_cast<int>(sign), flags)
                         : fftw_plan_dft_2d(n, n, scratch, scratch, static_cast<int>(sign), flags);
    fftw_free(scratch);
    if (plan == nullptr) throw std::runtime_error("fftw planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void fft_inplace(std::span<std::complex<double>> data, int dimension, std::size_t m,
                 FftSign sign) {
  fftw_plan plan = cache().get(dimension, m, sign);
  auto* raw = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, raw, raw);
}

}  // namespace riesz::detail

namespace riesz {

const char* fft_backend_version() { return fftw_version; }

}  // namespace riesz
