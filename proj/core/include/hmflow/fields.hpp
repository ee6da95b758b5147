#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace hmflow {

/// Doubly periodic H x W grid on [0,1)^2. Node (i, j) sits at
/// (x, y) = (j / W, i / H): columns run along x, rows along y.
struct GridShape {
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t size() const noexcept { return rows * cols; }
  double hx() const noexcept { return 1.0 / static_cast<double>(cols); }
  double hy() const noexcept { return 1.0 / static_cast<double>(rows); }
  double x(std::size_t j) const noexcept { return static_cast<double>(j) * hx(); }
  double y(std::size_t i) const noexcept { return static_cast<double>(i) * hy(); }
  /// Quadrature weight of one node (cell area).
  double cell_area() const noexcept { return hx() * hy(); }

  friend bool operator==(const GridShape&, const GridShape&) = default;
};

/// Grid of vectors in R^K, stored row-major with the K components of a node
/// contiguous.
class VectorField {
 public:
  VectorField() = default;
  VectorField(GridShape shape, std::size_t dim)
      : shape_(shape), dim_(dim), data_(shape.size() * dim, 0.0) {}

  const GridShape& shape() const noexcept { return shape_; }
  std::size_t dim() const noexcept { return dim_; }

  std::span<double> at(std::size_t i, std::size_t j) noexcept {
    return {data_.data() + (i * shape_.cols + j) * dim_, dim_};
  }
  std::span<const double> at(std::size_t i, std::size_t j) const noexcept {
    return {data_.data() + (i * shape_.cols + j) * dim_, dim_};
  }

  std::vector<double>& data() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const VectorField&, const VectorField&) = default;

 private:
  GridShape shape_;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

/// Discretised map u: T^2 -> N in R^K. Values are expected to lie on the
/// target; the flow re-projects after every step.
class MapField : public VectorField {
 public:
  using VectorField::VectorField;
};

/// Coefficient field phi of a quadratic differential phi dz^2, with z the
/// isothermal coordinate of the current lattice.
class QuadDiffField {
 public:
  QuadDiffField() = default;
  explicit QuadDiffField(GridShape shape)
      : shape_(shape), data_(shape.size()) {}

  const GridShape& shape() const noexcept { return shape_; }

  std::complex<double>& at(std::size_t i, std::size_t j) noexcept {
    return data_[i * shape_.cols + j];
  }
  const std::complex<double>& at(std::size_t i, std::size_t j) const noexcept {
    return data_[i * shape_.cols + j];
  }

  std::vector<std::complex<double>>& data() noexcept { return data_; }
  const std::vector<std::complex<double>>& data() const noexcept { return data_; }

 private:
  GridShape shape_;
  std::vector<std::complex<double>> data_;
};

}  // namespace hmflow
