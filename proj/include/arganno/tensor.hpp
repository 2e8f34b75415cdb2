#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace arganno {

/// Dense row-major matrix of doubles. All model math is 64-bit.
struct Tensor {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * static_cast<size_t>(c), 0.0) {}

  double& at(int r, int c) { return data[static_cast<size_t>(r) * static_cast<size_t>(cols) + static_cast<size_t>(c)]; }
  double at(int r, int c) const { return data[static_cast<size_t>(r) * static_cast<size_t>(cols) + static_cast<size_t>(c)]; }
  size_t size() const { return data.size(); }
  bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }

  bool operator==(const Tensor&) const = default;
};

Tensor matmul(const Tensor& a, const Tensor& b);     // a[m×k] · b[k×n]
Tensor matmul_nt(const Tensor& a, const Tensor& b);  // a[m×k] · b[n×k]^T
Tensor matmul_tn(const Tensor& a, const Tensor& b);  // a[k×m]^T · b[k×n]

void add_inplace(Tensor& dst, const Tensor& src);
void scale_inplace(Tensor& t, double s);
double max_abs_diff(const Tensor& a, const Tensor& b);
bool all_finite(const Tensor& t);

/// Sinusoidal embedding rows for integer offsets [first_offset, first_offset + count).
Tensor sinusoid_offsets(int first_offset, int count, int width);

}  // namespace arganno
