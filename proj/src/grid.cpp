#include "aggdiff/grid.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fft_plans.hpp"

namespace aggdiff {

namespace detail {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

FftPlans::FftPlans(int dim, int n) {
  std::array<int, 3> dims{n, n, n};
  std::size_t total = 1;
  for (int d = 0; d < dim; ++d) total *= static_cast<std::size_t>(n);
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_complex* a = fftw_alloc_complex(total);
  fftw_complex* b = fftw_alloc_complex(total);
  // FFTW_ESTIMATE keeps the chosen algorithm, and hence the rounding, fixed
  // from run to run.
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_ = fftw_plan_dft(dim, dims.data(), a, b, FFTW_FORWARD, flags);
  backward_ = fftw_plan_dft(dim, dims.data(), a, b, FFTW_BACKWARD, flags);
  fftw_free(a);
  fftw_free(b);
  if (!forward_ || !backward_) throw std::runtime_error("FFTW planning failed");
}

FftPlans::~FftPlans() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(forward_);
  fftw_destroy_plan(backward_);
}

void FftPlans::forward(const Complex* in, Complex* out) const {
  fftw_execute_dft(forward_, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

void FftPlans::backward(const Complex* in, Complex* out) const {
  fftw_execute_dft(backward_, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace detail

namespace {
bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
}  // namespace

Grid::Grid(int dim, int n, double half_width)
    : dim_(dim), n_(n), half_width_(half_width) {
  if (dim < 1 || dim > 3)
    throw std::invalid_argument("grid dimension must be 1, 2 or 3, got " + std::to_string(dim));
  if (!is_power_of_two(n) || n < 16)
    throw std::invalid_argument("points per axis must be a power of two >= 16, got " +
                                std::to_string(n));
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw std::invalid_argument("half_width must be positive");

  spacing_ = 2.0 * half_width / n;
  cell_volume_ = std::pow(spacing_, dim);
  size_ = 1;
  for (int d = 0; d < dim; ++d) size_ *= static_cast<std::size_t>(n);

  coords_.resize(n);
  wavenumbers_.resize(n);
  const double dxi = std::numbers::pi / half_width;
  for (int j = 0; j < n; ++j) {
    coords_[j] = -half_width + j * spacing_;
    wavenumbers_[j] = dxi * frequency(j);
  }

  xi_sq_.resize(size_);
  phase_.resize(size_);
  for (std::size_t f = 0; f < size_; ++f) {
    const auto idx = unravel(f);
    double s = 0.0;
    int parity = 0;
    for (int d = 0; d < dim; ++d) {
      s += wavenumbers_[idx[d]] * wavenumbers_[idx[d]];
      parity += idx[d];
    }
    xi_sq_[f] = s;
    phase_[f] = (parity % 2 == 0) ? 1.0 : -1.0;
  }

  plans_ = std::make_unique<detail::FftPlans>(dim, n);
}

Grid::~Grid() = default;

double Grid::wavenumber_spacing() const noexcept { return std::numbers::pi / half_width_; }

std::array<int, 3> Grid::unravel(std::size_t flat) const noexcept {
  std::array<int, 3> idx{0, 0, 0};
  for (int d = dim_ - 1; d >= 0; --d) {
    idx[d] = static_cast<int>(flat % n_);
    flat /= n_;
  }
  return idx;
}

std::size_t Grid::ravel(const std::array<int, 3>& idx) const noexcept {
  std::size_t flat = 0;
  for (int d = 0; d < dim_; ++d) flat = flat * n_ + static_cast<std::size_t>(idx[d]);
  return flat;
}

double Grid::coordinate(std::size_t flat, int axis) const noexcept {
  std::size_t stride = 1;
  for (int d = dim_ - 1; d > axis; --d) stride *= n_;
  return coords_[(flat / stride) % n_];
}

double Grid::radius_squared(std::size_t flat) const noexcept {
  double r2 = 0.0;
  for (int d = dim_ - 1; d >= 0; --d) {
    const double x = coords_[flat % n_];
    r2 += x * x;
    flat /= n_;
  }
  return r2;
}

bool Grid::same_as(const Grid& other) const noexcept {
  return this == &other ||
         (dim_ == other.dim_ && n_ == other.n_ && half_width_ == other.half_width_);
}

GridPtr make_grid(int dim, int n, double half_width) {
  return std::make_shared<const Grid>(dim, n, half_width);
}

void require_same_grid(const Grid& a, const Grid& b) {
  if (!a.same_as(b)) throw std::invalid_argument("grid mismatch");
}

Field::Field(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  if (!grid) throw std::invalid_argument("field without grid");
  if (values.size() != grid->size())
    throw std::invalid_argument("field length does not match grid size");
}

Field& Field::operator+=(const Field& other) {
  require_same_grid(*grid, *other.grid);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += other.values[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_grid(*grid, *other.grid);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] -= other.values[i];
  return *this;
}

Field& Field::operator*=(double factor) {
  for (double& v : values) v *= factor;
  return *this;
}

double Field::integral() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * grid->cell_volume();
}

bool Field::all_finite() const {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double factor, Field a) { return a *= factor; }

}  // namespace aggdiff
