#include "irldrive/savitzky_golay.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace irldrive {
namespace {

// Solves the dense system m * x = rhs in place with partial pivoting.
std::vector<double> solve_dense(std::vector<std::vector<double>> m,
                                std::vector<double> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    }
    std::swap(m[col], m[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = m[r][col] / m[col][col];
      for (std::size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = rhs[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= m[i][c] * x[c];
    x[i] = s / m[i][i];
  }
  return x;
}

}  // namespace

SavitzkyGolay::SavitzkyGolay(int half_window, int order)
    : half_(half_window), order_(order) {
  if (half_window < 1 || order < 0 || order >= 2 * half_window + 1) {
    throw std::invalid_argument("Savitzky-Golay window too small for order");
  }
  const int n = window();
  const int p = order + 1;
  // Abscissae are scaled to [-1, 1] to keep the normal equations well
  // conditioned; derivatives are rescaled by 1/half_ per order below.
  std::vector<double> u(n);
  for (int k = 0; k < n; ++k) u[k] = static_cast<double>(k - half_) / half_;

  std::vector<std::vector<double>> normal(p, std::vector<double>(p, 0.0));
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      for (int k = 0; k < n; ++k) normal[i][j] += std::pow(u[k], i + j);
    }
  }
  // projection[j][k]: coefficient j of the fit as a linear function of y_k.
  std::vector<std::vector<double>> projection(p, std::vector<double>(n));
  for (int k = 0; k < n; ++k) {
    std::vector<double> rhs(p);
    for (int i = 0; i < p; ++i) rhs[i] = std::pow(u[k], i);
    const auto col = solve_dense(normal, rhs);
    for (int j = 0; j < p; ++j) projection[j][k] = col[j];
  }

  weights_.assign(3, std::vector<std::vector<double>>(
                         n, std::vector<double>(n, 0.0)));
  for (int deriv = 0; deriv < 3; ++deriv) {
    const double scale = std::pow(1.0 / half_, deriv);
    for (int off = -half_; off <= half_; ++off) {
      const double s = static_cast<double>(off) / half_;
      auto& w = weights_[deriv][off + half_];
      for (int j = deriv; j < p; ++j) {
        double falling = 1.0;
        for (int d = 0; d < deriv; ++d) falling *= (j - d);
        const double basis = falling * std::pow(s, j - deriv) * scale;
        for (int k = 0; k < n; ++k) w[k] += basis * projection[j][k];
      }
    }
  }
}

const std::vector<double>& SavitzkyGolay::weights(int offset,
                                                  int deriv) const {
  return weights_[deriv][offset + half_];
}

SavitzkyGolay::Result SavitzkyGolay::apply(std::span<const double> samples,
                                           double dt) const {
  const int n = static_cast<int>(samples.size());
  if (n < window()) {
    throw std::invalid_argument("series shorter than Savitzky-Golay window");
  }
  Result out;
  out.value.resize(n);
  out.first.resize(n);
  out.second.resize(n);
  for (int i = 0; i < n; ++i) {
    int centre = i;
    if (i < half_) centre = half_;
    if (i > n - 1 - half_) centre = n - 1 - half_;
    const int offset = i - centre;
    const int begin = centre - half_;
    double v = 0.0, d1 = 0.0, d2 = 0.0;
    const auto& w0 = weights(offset, 0);
    const auto& w1 = weights(offset, 1);
    const auto& w2 = weights(offset, 2);
    for (int k = 0; k < window(); ++k) {
      const double y = samples[begin + k];
      v += w0[k] * y;
      d1 += w1[k] * y;
      d2 += w2[k] * y;
    }
    out.value[i] = v;
    out.first[i] = d1 / dt;
    out.second[i] = d2 / (dt * dt);
  }
  return out;
}

}  // namespace irldrive
