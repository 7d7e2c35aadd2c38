#include "urt/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <numbers>
#include <tuple>
#include <vector>

namespace urt::fft {
namespace {

using PlanKey = std::tuple<int, int, int, int>;

// FFTW planning is not thread-safe; execution with fftw_execute_dft is.
// Plans are made once per shape with FFTW_ESTIMATE, so the chosen algorithm
// (and therefore every bit of the output) does not depend on timing.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(const Grid& grid, int sign) {
    const PlanKey key{grid.points[0], grid.points[1], grid.points[2], sign};
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    std::vector<std::complex<double>> scratch(static_cast<size_t>(grid.size()));
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = nullptr;
    const int flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    switch (grid.dimension) {
      case 1:
        plan = fftw_plan_dft_1d(grid.points[0], buf, buf, sign, flags);
        break;
      case 2:
        plan = fftw_plan_dft_2d(grid.points[0], grid.points[1], buf, buf, sign,
                                flags);
        break;
      default:
        plan = fftw_plan_dft_3d(grid.points[0], grid.points[1], grid.points[2],
                                buf, buf, sign, flags);
        break;
    }
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<PlanKey, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void execute(const Grid& grid, Eigen::ArrayXcd& values, int sign) {
  fftw_plan plan = cache().get(grid, sign);
  auto* data = reinterpret_cast<fftw_complex*>(values.data());
  fftw_execute_dft(plan, data, data);
}

}  // namespace

void forward(const Grid& grid, Eigen::ArrayXcd& values) {
  execute(grid, values, FFTW_FORWARD);
}

void backward(const Grid& grid, Eigen::ArrayXcd& values) {
  execute(grid, values, FFTW_BACKWARD);
}

Eigen::ArrayXd wavenumbers(const Grid& grid, int axis) {
  const int n = grid.points[axis];
  const double dk = 2.0 * std::numbers::pi / grid.extent[axis];
  Eigen::ArrayXd out(grid.size());
  for (Eigen::Index flat = 0; flat < grid.size(); ++flat) {
    const int k = grid.unflatten(flat)[axis];
    out[flat] = dk * (k < n / 2 ? k : k - n);
  }
  return out;
}

Eigen::ArrayXd wavenumbers_squared(const Grid& grid) {
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(grid.size());
  for (int axis = 0; axis < grid.dimension; ++axis) {
    out += wavenumbers(grid, axis).square();
  }
  return out;
}

}  // namespace urt::fft
