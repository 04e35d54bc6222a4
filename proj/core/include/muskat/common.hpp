#pragma once

// ===== shared plumbing: error taxonomy, thread control, small numerics =====

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace muskat {

// ===== error taxonomy =====
//
// config_error  : bad configuration / precondition violations detectable before compute
// data_error    : malformed or non-finite input data (fields, files)
// numeric_error : runtime numerical failure (NaN/Inf mid-computation, domain refusals)

class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class config_error : public error {
 public:
  using error::error;
};

class data_error : public error {
 public:
  using error::error;
};

class numeric_error : public error {
 public:
  using error::error;
};

// ===== thread control =====
//
// Process-wide worker count used by the grid-point loops. Every parallel loop
// assigns each grid point to exactly one worker and each per-point result is
// accumulated in a fixed enumeration order, so results are bit-identical at
// any thread count.

namespace threads {

int get();
void set(int n);  // n <= 0 restores the hardware default

}  // namespace threads

// Splits [0, n) into contiguous chunks, one per worker, and runs
// body(begin, end) on each. Runs inline when a single worker suffices.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

// ===== small numerics =====

// Compensated accumulator for long fixed-order reductions.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

inline bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

// Throws data_error naming the offending entry when v contains NaN/Inf.
void require_finite(const std::vector<double>& v, const std::string& context);

}  // namespace muskat
