#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <thread>
#include <vector>

namespace bltk {

// Neumaier-compensated accumulator. All reductions in the library sum in
// a fixed index order, so parallel schedules cannot change the result.
class CompensatedSum {
 public:
  CompensatedSum& operator+=(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
      carry_ += (sum_ - t) + x;
    else
      carry_ += (x - t) + sum_;
    sum_ = t;
    return *this;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

inline unsigned effective_jobs(unsigned requested) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (requested == 0) return hw;
  return requested < hw ? requested : hw;
}

// Index-parallel map. Results are produced per index; callers reduce in
// index order afterwards, which keeps output schedule-independent.
template <class F>
void parallel_for(std::size_t n, unsigned jobs, F&& body) {
  jobs = effective_jobs(jobs);
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::size_t chunk = (n + jobs - 1) / jobs;
  for (unsigned w = 0; w < jobs; ++w) {
    std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace bltk
