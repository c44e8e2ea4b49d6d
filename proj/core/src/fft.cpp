#include "nch/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <new>
#include <tuple>

namespace nch::fft {

namespace {

struct FftwFree {
  void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};
using Buffer = std::unique_ptr<fftw_complex[], FftwFree>;

Buffer allocate(std::size_t n) {
  auto* p = fftw_alloc_complex(n);
  if (p == nullptr) throw std::bad_alloc();
  return Buffer(p);
}

// Plans live for the whole process. FFTW planning is not thread safe, so it
// is serialized; fftw_execute_dft on distinct buffers is.
class PlanCache {
 public:
  fftw_plan get(int nx, int ny, Direction direction) {
    const auto key = std::make_tuple(nx, ny, direction == Direction::forward);
    std::lock_guard lock(mutex_);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    const auto n = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
    Buffer scratch = allocate(n);
    fftw_plan plan = fftw_plan_dft_2d(
        ny, nx, scratch.get(), scratch.get(),
        direction == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD,
        FFTW_ESTIMATE);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, bool>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void transform(int nx, int ny, std::span<std::complex<double>> data,
               Direction direction) {
  fftw_plan plan = cache().get(nx, ny, direction);
  Buffer buf = allocate(data.size());
  auto* raw = reinterpret_cast<std::complex<double>*>(buf.get());
  std::copy(data.begin(), data.end(), raw);
  fftw_execute_dft(plan, buf.get(), buf.get());
  std::copy(raw, raw + data.size(), data.begin());
}

}  // namespace nch::fft
