#pragma once

#include <span>
#include <vector>

namespace irldrive {

// Least-squares polynomial smoother over a sliding odd-length window.
//
// Each output sample is the local fitting polynomial evaluated at that
// sample, together with its first and second time derivatives. The first and
// last half-window samples reuse the fit of the first/last full window and
// evaluate it off-centre, so the output has the same length as the input.
class SavitzkyGolay {
 public:
  SavitzkyGolay(int half_window, int order);

  struct Result {
    std::vector<double> value;
    std::vector<double> first;
    std::vector<double> second;
  };

  // Requires samples.size() >= window().
  Result apply(std::span<const double> samples, double dt) const;

  int window() const { return 2 * half_ + 1; }
  int order() const { return order_; }

 private:
  // Weights turning the window samples into derivative `deriv` (in
  // sample-index units) of the fit, evaluated at `offset` samples from the
  // window centre.
  const std::vector<double>& weights(int offset, int deriv) const;

  int half_;
  int order_;
  // weights_[deriv][offset + half_]
  std::vector<std::vector<std::vector<double>>> weights_;
};

}  // namespace irldrive
