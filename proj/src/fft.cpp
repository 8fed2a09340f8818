#include "q4nl/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "q4nl/error.hpp"

namespace q4nl::fft {
namespace {

// FFTW planning is not thread-safe; execution through the new-array interface is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int dim, int n, int sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(dim, n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<int> dims(static_cast<std::size_t>(dim), n);
    std::size_t size = 1;
    for (int a = 0; a < dim; ++a) size *= static_cast<std::size_t>(n);
    std::vector<fftw_complex> scratch(size);
    fftw_plan plan = fftw_plan_dft(dim, dims.data(), scratch.data(), scratch.data(), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw Error("FFTW failed to create a plan");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void execute(const Grid& grid, ComplexField& data, int sign) {
  if (data.size() != grid.size()) throw Error("field size does not match grid");
  fftw_plan plan = cache().get(grid.dim(), grid.n(), sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
}

}  // namespace

void forward(const Grid& grid, ComplexField& data) { execute(grid, data, FFTW_FORWARD); }

void inverse(const Grid& grid, ComplexField& data) {
  execute(grid, data, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (auto& v : data) v *= scale;
}

ComplexField forward_real(const Grid& grid, const RealField& data) {
  ComplexField out(data.begin(), data.end());
  forward(grid, out);
  return out;
}

}  // namespace q4nl::fft
