#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <sstream>
#include <vector>

#include "noisegan/core/error.hpp"

namespace noisegan {

// Dense row-major matrix. Spectrogram convention: rows are frequency bins,
// columns are time frames.
template <typename T>
class Matrix {
 public:
  using value_type = T;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw ShapeError("matrix data size does not match rows*cols");
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<T>& data() noexcept { return data_; }
  const std::vector<T>& data() const noexcept { return data_; }

  bool same_shape(const Matrix& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  // Copy of columns [start, start + count).
  Matrix columns(std::size_t start, std::size_t count) const {
    if (start + count > cols_) throw ShapeError("column range out of bounds");
    Matrix out(rows_, count);
    for (std::size_t r = 0; r < rows_; ++r) {
      std::copy_n(data_.begin() + r * cols_ + start, count, out.data_.begin() + r * count);
    }
    return out;
  }

  // Writes `src` into columns starting at `start`.
  void set_columns(std::size_t start, const Matrix& src) {
    if (src.rows_ != rows_ || start + src.cols_ > cols_) {
      throw ShapeError("set_columns: source does not fit");
    }
    for (std::size_t r = 0; r < rows_; ++r) {
      std::copy_n(src.data_.begin() + r * src.cols_, src.cols_, data_.begin() + r * cols_ + start);
    }
  }

  Matrix flipped_rows() const {
    Matrix out(rows_, cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
      std::copy_n(data_.begin() + r * cols_, cols_, out.data_.begin() + (rows_ - 1 - r) * cols_);
    }
    return out;
  }

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

inline std::string shape_string(std::size_t rows, std::size_t cols) {
  std::ostringstream os;
  os << rows << "x" << cols;
  return os.str();
}

}  // namespace noisegan
