#pragma once

#include <fftw3.h>

#include "aggdiff/grid.hpp"

namespace aggdiff::detail {

// Out-of-place complex plans executed through the new-array interface, which
// is thread-safe once the plan exists. Planning itself is serialized.
class FftPlans {
 public:
  FftPlans(int dim, int n);
  ~FftPlans();
  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;

  // Unnormalized sum_j in_j exp(-2 pi i j k / n).
  void forward(const Complex* in, Complex* out) const;
  // Unnormalized sum_k in_k exp(+2 pi i j k / n).
  void backward(const Complex* in, Complex* out) const;

 private:
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace aggdiff::detail
