#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace agrl {

// Row-major dense float32 tensor. Shapes are validated on construction:
// every dimension >= 1 and product(shape) == data.size().
struct Tensor {
  std::vector<int> shape;
  std::vector<float> data;

  Tensor() = default;
  Tensor(std::vector<int> shape_, std::vector<float> data_);

  static Tensor zeros(std::vector<int> shape_);
  static Tensor full(std::vector<int> shape_, float value);

  int64_t numel() const { return static_cast<int64_t>(data.size()); }
  int ndim() const { return static_cast<int>(shape.size()); }
  int dim(int i) const { return shape[static_cast<size_t>(i)]; }

  // 2D row view helpers ([rows, cols] tensors).
  float* row(int r) { return data.data() + static_cast<int64_t>(r) * dim(ndim() - 1); }
  const float* row(int r) const { return data.data() + static_cast<int64_t>(r) * dim(ndim() - 1); }

  float& at(int64_t i) { return data[static_cast<size_t>(i)]; }
  float at(int64_t i) const { return data[static_cast<size_t>(i)]; }

  std::string shape_str() const;
};

// Throws ShapeError unless the tensor is 2D with the given dims (-1 = any).
void expect_2d(const Tensor& t, int rows, int cols, const char* what);

}  // namespace agrl
