#include "arganno/tensor.hpp"

#include <cmath>

#include "arganno/errors.hpp"

namespace arganno {

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols != b.rows)
    throw NumericError("matmul shape mismatch: " + std::to_string(a.cols) + " vs " +
                       std::to_string(b.rows));
  Tensor out(a.rows, b.cols);
  const int m = a.rows, k = a.cols, n = b.cols;
  for (int i = 0; i < m; ++i) {
    const double* arow = a.data.data() + static_cast<size_t>(i) * static_cast<size_t>(k);
    double* orow = out.data.data() + static_cast<size_t>(i) * static_cast<size_t>(n);
    for (int p = 0; p < k; ++p) {
      const double av = arow[p];
      if (av == 0.0) continue;
      const double* brow = b.data.data() + static_cast<size_t>(p) * static_cast<size_t>(n);
      for (int j = 0; j < n; ++j) orow[j] += av * brow[j];
    }
  }
  return out;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  if (a.cols != b.cols)
    throw NumericError("matmul_nt shape mismatch: " + std::to_string(a.cols) + " vs " +
                       std::to_string(b.cols));
  Tensor out(a.rows, b.rows);
  const int k = a.cols;
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = a.data.data() + static_cast<size_t>(i) * static_cast<size_t>(k);
    for (int j = 0; j < b.rows; ++j) {
      const double* brow = b.data.data() + static_cast<size_t>(j) * static_cast<size_t>(k);
      double acc = 0.0;
      for (int p = 0; p < k; ++p) acc += arow[p] * brow[p];
      out.at(i, j) = acc;
    }
  }
  return out;
}

Tensor matmul_tn(const Tensor& a, const Tensor& b) {
  if (a.rows != b.rows)
    throw NumericError("matmul_tn shape mismatch: " + std::to_string(a.rows) + " vs " +
                       std::to_string(b.rows));
  Tensor out(a.cols, b.cols);
  const int n = b.cols;
  for (int p = 0; p < a.rows; ++p) {
    const double* arow = a.data.data() + static_cast<size_t>(p) * static_cast<size_t>(a.cols);
    const double* brow = b.data.data() + static_cast<size_t>(p) * static_cast<size_t>(n);
    for (int i = 0; i < a.cols; ++i) {
      const double av = arow[i];
      if (av == 0.0) continue;
      double* orow = out.data.data() + static_cast<size_t>(i) * static_cast<size_t>(n);
      for (int j = 0; j < n; ++j) orow[j] += av * brow[j];
    }
  }
  return out;
}

void add_inplace(Tensor& dst, const Tensor& src) {
  if (!dst.same_shape(src)) throw NumericError("add_inplace shape mismatch");
  for (size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += src.data[i];
}

void scale_inplace(Tensor& t, double s) {
  for (double& v : t.data) v *= s;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) throw NumericError("max_abs_diff shape mismatch");
  double m = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i)
    m = std::max(m, std::fabs(a.data[i] - b.data[i]));
  return m;
}

bool all_finite(const Tensor& t) {
  for (double v : t.data)
    if (!std::isfinite(v)) return false;
  return true;
}

Tensor sinusoid_offsets(int first_offset, int count, int width) {
  Tensor out(count, width);
  for (int r = 0; r < count; ++r) {
    const double pos = static_cast<double>(first_offset + r);
    for (int i = 0; i < width; i += 2) {
      double freq = std::pow(10000.0, -static_cast<double>(i) / static_cast<double>(width));
      out.at(r, i) = std::sin(pos * freq);
      if (i + 1 < width) out.at(r, i + 1) = std::cos(pos * freq);
    }
  }
  return out;
}

}  // namespace arganno
