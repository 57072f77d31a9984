#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "dwmrpm/core/errors.hpp"

namespace dwmrpm {

using Shape = std::vector<std::size_t>;

inline std::string shape_string(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) out << (i ? "x" : "") << shape[i];
  out << ']';
  return out.str();
}

inline std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

// Rejects zero-rank shapes and zero-length dimensions.
inline void check_shape(const Shape& shape) {
  if (shape.empty()) throw ShapeError("tensor shape must have at least one dimension");
  for (auto d : shape)
    if (d == 0) throw ShapeError("tensor dimension must be positive, got " + shape_string(shape));
}

/// Dense n-dimensional array stored row-major in an Eigen vector.
///
/// The tensor owns its data; matrix() hands out Eigen maps so layer kernels can
/// use BLAS-style products without copying.
template <typename Scalar>
class Tensor {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using MatrixMap = Eigen::Map<RowMatrix>;
  using ConstMatrixMap = Eigen::Map<const RowMatrix>;

  Tensor() = default;

  explicit Tensor(Shape shape) : shape_(std::move(shape)) {
    check_shape(shape_);
    data_ = Vector::Zero(static_cast<Eigen::Index>(shape_size(shape_)));
  }

  Tensor(Shape shape, Vector data) : shape_(std::move(shape)), data_(std::move(data)) {
    check_shape(shape_);
    if (static_cast<std::size_t>(data_.size()) != shape_size(shape_))
      throw ShapeError("data length " + std::to_string(data_.size()) + " does not match shape " +
                       shape_string(shape_));
  }

  Tensor(Shape shape, std::initializer_list<Scalar> values)
      : Tensor(std::move(shape), Vector(Eigen::Map<const Vector>(values.begin(),
                                                                   static_cast<Eigen::Index>(values.size())))) {}

  static Tensor vector(std::initializer_list<Scalar> values) { return Tensor({values.size()}, values); }

  static Tensor constant(Shape shape, Scalar value) {
    Tensor t(std::move(shape));
    t.data_.setConstant(value);
    return t;
  }

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return static_cast<std::size_t>(data_.size()); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  bool empty() const { return shape_.empty(); }

  Vector& data() { return data_; }
  const Vector& data() const { return data_; }
  Scalar* raw() { return data_.data(); }
  const Scalar* raw() const { return data_.data(); }

  Scalar& operator[](std::size_t i) { return data_[static_cast<Eigen::Index>(i)]; }
  Scalar operator[](std::size_t i) const { return data_[static_cast<Eigen::Index>(i)]; }

  /// Row-major view with the leading dimension as rows and the rest flattened.
  MatrixMap matrix() { return matrix(shape_.front(), size() / shape_.front()); }
  ConstMatrixMap matrix() const { return matrix(shape_.front(), size() / shape_.front()); }

  MatrixMap matrix(std::size_t rows, std::size_t cols) {
    check_view(rows, cols);
    return MatrixMap(data_.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  }
  ConstMatrixMap matrix(std::size_t rows, std::size_t cols) const {
    check_view(rows, cols);
    return ConstMatrixMap(data_.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  }

  Tensor reshaped(Shape shape) const {
    if (shape_size(shape) != size())
      throw ShapeError("cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
    return Tensor(std::move(shape), data_);
  }

  bool all_finite() const { return data_.allFinite(); }

  template <typename Other>
  Tensor<Other> cast() const {
    return Tensor<Other>(shape_, data_.template cast<Other>());
  }

  // Bitwise-style equality: same shape and elementwise ==.
  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  void check_view(std::size_t rows, std::size_t cols) const {
    if (rows * cols != size())
      throw ShapeError("matrix view " + std::to_string(rows) + "x" + std::to_string(cols) +
                       " does not cover tensor " + shape_string(shape_));
  }

  Shape shape_;
  Vector data_;
};

}  // namespace dwmrpm
