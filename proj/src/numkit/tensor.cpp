#include "agrl/tensor.hpp"

#include <sstream>

#include "agrl/errors.hpp"

namespace agrl {

namespace {

int64_t checked_numel(const std::vector<int>& shape) {
  if (shape.empty()) throw ShapeError("tensor shape must have at least one dimension");
  int64_t n = 1;
  for (int d : shape) {
    if (d < 1) throw ShapeError("tensor dimensions must be >= 1");
    n *= d;
  }
  return n;
}

}  // namespace

Tensor::Tensor(std::vector<int> shape_, std::vector<float> data_)
    : shape(std::move(shape_)), data(std::move(data_)) {
  if (checked_numel(shape) != static_cast<int64_t>(data.size())) {
    throw ShapeError("tensor data size does not match shape " + shape_str());
  }
}

Tensor Tensor::zeros(std::vector<int> shape_) {
  int64_t n = checked_numel(shape_);
  Tensor t;
  t.shape = std::move(shape_);
  t.data.assign(static_cast<size_t>(n), 0.0f);
  return t;
}

Tensor Tensor::full(std::vector<int> shape_, float value) {
  Tensor t = zeros(std::move(shape_));
  for (float& v : t.data) v = value;
  return t;
}

std::string Tensor::shape_str() const {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << "]";
  return os.str();
}

void expect_2d(const Tensor& t, int rows, int cols, const char* what) {
  if (t.ndim() != 2 || (rows >= 0 && t.dim(0) != rows) || (cols >= 0 && t.dim(1) != cols)) {
    std::ostringstream os;
    os << what << ": expected [" << (rows < 0 ? -1 : rows) << ", " << (cols < 0 ? -1 : cols)
       << "], got " << t.shape_str();
    throw ShapeError(os.str());
  }
}

}  // namespace agrl
