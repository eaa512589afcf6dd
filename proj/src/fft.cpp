#include "irsense/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace irsense {
namespace {

// FFTW planning is not thread-safe; execution on fresh arrays is. Plans are
// created once per (size, direction) and reused through the new-array API.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find({n, sign});
    if (it != plans_.end()) return it->second;
    auto* in = fftw_alloc_complex(static_cast<std::size_t>(n));
    auto* out = fftw_alloc_complex(static_cast<std::size_t>(n));
    fftw_plan p = fftw_plan_dft_1d(n, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(std::pair{n, sign}, p);
    return p;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

std::vector<cd> run(std::span<const cd> x, int sign) {
  std::vector<cd> in(x.begin(), x.end());
  std::vector<cd> out(x.size());
  if (x.empty()) return out;
  fftw_plan p = cache().get(static_cast<int>(x.size()), sign);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

}  // namespace

std::vector<cd> dft(std::span<const cd> x) { return run(x, FFTW_FORWARD); }

std::vector<cd> idft_unnormalized(std::span<const cd> x) { return run(x, FFTW_BACKWARD); }

}  // namespace irsense
