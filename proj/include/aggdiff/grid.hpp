#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace aggdiff {

using Complex = std::complex<double>;

namespace detail {
class FftPlans;
}

/// Periodic box [-L, L)^N used as a stand-in for R^N.
///
/// Points along every axis sit at x_j = -L + j h with h = 2L/n, so the origin
/// is the index n/2. Arrays are row-major with the last axis fastest.
/// Wavenumbers are xi_k = (pi/L) k in standard FFT ordering
/// (k = 0, 1, ..., n/2-1, -n/2, ..., -1).
///
/// A Grid is immutable after construction and is shared through GridPtr.
class Grid {
 public:
  Grid(int dim, int n, double half_width);
  ~Grid();
  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  int dim() const noexcept { return dim_; }
  int n() const noexcept { return n_; }
  double half_width() const noexcept { return half_width_; }
  double spacing() const noexcept { return spacing_; }
  /// h^N, the quadrature weight of one cell.
  double cell_volume() const noexcept { return cell_volume_; }
  /// pi / L, the spacing of the wavenumber lattice.
  double wavenumber_spacing() const noexcept;
  std::size_t size() const noexcept { return size_; }

  std::span<const double> coordinates() const noexcept { return coords_; }
  std::span<const double> wavenumbers() const noexcept { return wavenumbers_; }
  /// Signed integer frequency of an axis index.
  int frequency(int index) const noexcept { return index < n_ / 2 ? index : index - n_; }

  /// |xi|^2 for every flat spectral index.
  std::span<const double> wavenumber_squared() const noexcept { return xi_sq_; }
  /// (-1)^(i_1 + ... + i_N): shifts the DFT so that coefficients refer to the
  /// box centre rather than the corner -L.
  std::span<const double> centring_phase() const noexcept { return phase_; }

  std::array<int, 3> unravel(std::size_t flat) const noexcept;
  std::size_t ravel(const std::array<int, 3>& idx) const noexcept;
  /// Physical coordinate along `axis` of a flat index.
  double coordinate(std::size_t flat, int axis) const noexcept;
  /// Squared distance of a grid point to the origin.
  double radius_squared(std::size_t flat) const noexcept;

  bool same_as(const Grid& other) const noexcept;

  const detail::FftPlans& plans() const noexcept { return *plans_; }

 private:
  int dim_;
  int n_;
  double half_width_;
  double spacing_;
  double cell_volume_;
  std::size_t size_;
  std::vector<double> coords_;
  std::vector<double> wavenumbers_;
  std::vector<double> xi_sq_;
  std::vector<double> phase_;
  std::unique_ptr<detail::FftPlans> plans_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Validates dim in {1,2,3}, n a power of two >= 16 and half_width > 0.
GridPtr make_grid(int dim, int n, double half_width);

/// Throws std::invalid_argument when the two grids differ.
void require_same_grid(const Grid& a, const Grid& b);

/// Real density sampled on a Grid.
struct Field {
  GridPtr grid;
  std::vector<double> values;

  Field() = default;
  explicit Field(GridPtr g) : grid(std::move(g)), values(grid->size(), 0.0) {}
  Field(GridPtr g, std::vector<double> v);

  std::size_t size() const noexcept { return values.size(); }
  double& operator[](std::size_t i) noexcept { return values[i]; }
  double operator[](std::size_t i) const noexcept { return values[i]; }

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double factor);

  /// h^N * sum of values.
  double integral() const;
  bool all_finite() const;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double factor, Field a);

/// Complex coefficients of a Field in the symmetric continuous-transform
/// normalization (see spectral.hpp).
struct Spectrum {
  GridPtr grid;
  std::vector<Complex> coeffs;

  Spectrum() = default;
  explicit Spectrum(GridPtr g) : grid(std::move(g)), coeffs(grid->size(), Complex{}) {}

  std::size_t size() const noexcept { return coeffs.size(); }
};

}  // namespace aggdiff
