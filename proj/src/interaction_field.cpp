#include <fftw3.h>

#include <cmath>
#include <complex>
#include <algorithm>
#include <cstring>
#include <cstddef>
#include <memory>
#include <utility>

#include "pedflow/errors.hpp"
#include "pedflow/forces.hpp"

namespace pedflow {

namespace {

struct FftwDeleter {
  void operator()(double* p) const { fftw_free(p); }
  void operator()(fftw_complex* p) const { fftw_free(p); }
};

template <class T>
using FftwBuffer = std::unique_ptr<T, FftwDeleter>;

class Plan {
 public:
  Plan() = default;
  explicit Plan(fftw_plan p) : plan_(p) {}
  Plan(Plan&& o) noexcept : plan_(o.plan_) { o.plan_ = nullptr; }
  Plan& operator=(Plan&& o) noexcept {
    std::swap(plan_, o.plan_);
    return *this;
  }
  ~Plan() {
    if (plan_ != nullptr) fftw_destroy_plan(plan_);
  }
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_ = nullptr;
};

}  // namespace

struct InteractionField::Impl {
  Grid grid;
  int lx = 0;
  int ly = 0;
  std::size_t spectrum_size = 0;
  FftwBuffer<double> real;
  FftwBuffer<fftw_complex> spectrum;
  FftwBuffer<fftw_complex> kernel_x;
  FftwBuffer<fftw_complex> kernel_y;
  FftwBuffer<fftw_complex> work;
  Plan forward;
  Plan backward;

  std::size_t padded(std::size_t i, std::size_t j) const {
    return i * static_cast<std::size_t>(ly) + j;
  }
};

InteractionField::InteractionField(const ForceParams& params, const Grid& grid)
    : impl_(std::make_unique<Impl>()) {
  Impl& m = *impl_;
  m.grid = grid;
  m.lx = static_cast<int>(2 * grid.nx());
  m.ly = static_cast<int>(2 * grid.ny());
  const std::size_t real_size = static_cast<std::size_t>(m.lx) * static_cast<std::size_t>(m.ly);
  m.spectrum_size = static_cast<std::size_t>(m.lx) * static_cast<std::size_t>(m.ly / 2 + 1);

  m.real.reset(fftw_alloc_real(real_size));
  m.spectrum.reset(fftw_alloc_complex(m.spectrum_size));
  m.kernel_x.reset(fftw_alloc_complex(m.spectrum_size));
  m.kernel_y.reset(fftw_alloc_complex(m.spectrum_size));
  m.work.reset(fftw_alloc_complex(m.spectrum_size));
  if (!m.real || !m.spectrum || !m.kernel_x || !m.kernel_y || !m.work) {
    throw RuntimeFailure("FFT buffer allocation failed");
  }
  // FFTW_ESTIMATE keeps plan selection, and hence rounding, reproducible.
  m.forward = Plan(fftw_plan_dft_r2c_2d(m.lx, m.ly, m.real.get(), m.spectrum.get(), FFTW_ESTIMATE));
  m.backward = Plan(fftw_plan_dft_c2r_2d(m.lx, m.ly, m.work.get(), m.real.get(), FFTW_ESTIMATE));

  const double cutoff = params.cutoff();
  const auto nx = static_cast<long>(grid.nx());
  const auto ny = static_cast<long>(grid.ny());
  auto transform_component = [&](bool want_x, fftw_complex* dest) {
    std::fill(m.real.get(), m.real.get() + real_size, 0.0);
    for (long a = -(nx - 1); a <= nx - 1; ++a) {
      for (long b = -(ny - 1); b <= ny - 1; ++b) {
        const Vec2 d{static_cast<double>(a) * grid.dx(), static_cast<double>(b) * grid.dy()};
        const double r = norm(d);
        if (r < 1e-9 || r > cutoff) continue;
        const Vec2 g = interaction_kernel(params, d);
        const auto pi = static_cast<std::size_t>((a + m.lx) % m.lx);
        const auto pj = static_cast<std::size_t>((b + m.ly) % m.ly);
        m.real.get()[m.padded(pi, pj)] = want_x ? g.x : g.y;
      }
    }
    m.forward.execute();
    std::memcpy(dest, m.spectrum.get(), m.spectrum_size * sizeof(fftw_complex));
  };
  transform_component(true, m.kernel_x.get());
  transform_component(false, m.kernel_y.get());
}

InteractionField::~InteractionField() = default;
InteractionField::InteractionField(InteractionField&&) noexcept = default;
InteractionField& InteractionField::operator=(InteractionField&&) noexcept = default;

void InteractionField::apply(std::span<const double> density, std::span<Vec2> out) {
  Impl& m = *impl_;
  const Grid& grid = m.grid;
  if (density.size() != grid.size() || out.size() != grid.size()) {
    throw ConfigError("interaction field: density size does not match the grid");
  }
  const std::size_t real_size = static_cast<std::size_t>(m.lx) * static_cast<std::size_t>(m.ly);
  std::fill(m.real.get(), m.real.get() + real_size, 0.0);
  for (std::size_t i = 0; i < grid.nx(); ++i) {
    for (std::size_t j = 0; j < grid.ny(); ++j) {
      m.real.get()[m.padded(i, j)] = density[grid.index(i, j)];
    }
  }
  m.forward.execute();

  const double scale = grid.cell_area() / static_cast<double>(real_size);
  auto convolve = [&](const fftw_complex* kernel, bool want_x) {
    for (std::size_t k = 0; k < m.spectrum_size; ++k) {
      const std::complex<double> u(m.spectrum.get()[k][0], m.spectrum.get()[k][1]);
      const std::complex<double> g(kernel[k][0], kernel[k][1]);
      const std::complex<double> p = u * g;
      m.work.get()[k][0] = p.real();
      m.work.get()[k][1] = p.imag();
    }
    m.backward.execute();
    for (std::size_t i = 0; i < grid.nx(); ++i) {
      for (std::size_t j = 0; j < grid.ny(); ++j) {
        const double value = m.real.get()[m.padded(i, j)] * scale;
        Vec2& o = out[grid.index(i, j)];
        if (want_x) {
          o.x = value;
        } else {
          o.y = value;
        }
      }
    }
  };
  convolve(m.kernel_x.get(), true);
  convolve(m.kernel_y.get(), false);
}

}  // namespace pedflow
