#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pelletseg {

// Error hierarchy. The CLI maps FormatError/ShapeError to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class CoverageError : public Error {
 public:
  using Error::Error;
};

struct Pixel {
  int row = 0;
  int col = 0;

  friend bool operator==(const Pixel&, const Pixel&) = default;
  friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

struct Point2 {
  double row = 0.0;
  double col = 0.0;
};

/// Dense row-major image with interleaved channels (H, W, C), matching the
/// C-order layout of the NPY files the pipeline exchanges.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int rows, int cols, int channels = 1, T fill = T{})
      : rows_(rows), cols_(cols), channels_(channels) {
    if (rows < 0 || cols < 0 || channels < 1) {
      throw InvalidParameter("grid dimensions must be non-negative with at least one channel");
    }
    data_.assign(static_cast<std::size_t>(rows) * cols * channels, fill);
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int channels() const { return channels_; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(rows_) * cols_; }
  bool empty() const { return data_.empty(); }

  bool in_bounds(int r, int c) const { return r >= 0 && c >= 0 && r < rows_ && c < cols_; }
  bool same_extent(int rows, int cols) const { return rows_ == rows && cols_ == cols; }
  template <typename U>
  bool same_extent(const Grid<U>& other) const {
    return rows_ == other.rows() && cols_ == other.cols();
  }

  std::size_t index(int r, int c, int k = 0) const {
    return (static_cast<std::size_t>(r) * cols_ + c) * channels_ + k;
  }

  T& operator()(int r, int c, int k = 0) { return data_[index(r, c, k)]; }
  const T& operator()(int r, int c, int k = 0) const { return data_[index(r, c, k)]; }

  std::span<T> pixel(int r, int c) { return {data_.data() + index(r, c), static_cast<std::size_t>(channels_)}; }
  std::span<const T> pixel(int r, int c) const {
    return {data_.data() + index(r, c), static_cast<std::size_t>(channels_)};
  }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }
  std::vector<T>& storage() { return data_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  int channels_ = 1;
  std::vector<T> data_;
};

using Label = std::uint32_t;
using LabelMap = Grid<Label>;
using ClassMap = Grid<std::uint8_t>;
using ProbMap = Grid<float>;
using DistanceMaps = Grid<float>;
using BinaryMask = Grid<std::uint8_t>;
using RgbImage = Grid<std::uint8_t>;

template <typename A, typename B>
void require_same_extent(const Grid<A>& a, const Grid<B>& b, const char* what) {
  if (!a.same_extent(b)) {
    throw ShapeError(std::string(what) + ": shape mismatch (" + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()) + ")");
  }
}

}  // namespace pelletseg
