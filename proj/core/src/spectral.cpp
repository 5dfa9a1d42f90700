//
// FFTW-backed transforms and spectral multipliers.
//
// Plans are cached per (dim, n, direction) under a mutex and executed through
// fftw_execute_dft on caller buffers; plans are created with FFTW_UNALIGNED
// so any heap buffer is acceptable. Execution itself is thread-safe, which
// keeps every operation here safe for concurrent use on distinct fields.
//

#include "fraclab/spectral.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace fraclab {

namespace {

struct PlanCache {
  std::mutex mtx;
  std::map<std::tuple<int, int, int>, fftw_plan> plans;

  fftw_plan get(const GridSpec& g, int sign) {
    std::lock_guard<std::mutex> lock(mtx);
    const auto key = std::make_tuple(g.dim, g.n, sign);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;

    std::vector<std::complex<double>> scratch(g.size());
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = nullptr;
    if (g.dim == 1) {
      plan = fftw_plan_dft_1d(g.n, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    } else {
      plan = fftw_plan_dft_2d(g.n, g.n, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    plans.emplace(key, plan);
    return plan;
  }
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

void execute(const GridSpec& g, int sign, std::vector<std::complex<double>>& buf) {
  fftw_plan plan = plan_cache().get(g, sign);
  auto* p = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_execute_dft(plan, p, p);
}

template <typename Fn>
SpectralField apply_multiplier(const ScalarField& field, Fn&& mult) {
  SpectralField spec = forward(field);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto k = wavevector(spec.grid, i);
    spec[i] *= mult(std::sqrt(k[0] * k[0] + k[1] * k[1]));
  }
  return spec;
}

} // namespace

SpectralField forward(const ScalarField& field) {
  field.grid.validate();
  if (field.values.size() != field.grid.size())
    throw std::invalid_argument("forward: value count does not match grid");
  SpectralField spec(field.grid);
  for (std::size_t i = 0; i < field.size(); ++i) spec[i] = field[i];
  execute(field.grid, FFTW_FORWARD, spec.coeff);
  return spec;
}

ScalarField inverse(const SpectralField& spec) {
  if (spec.coeff.size() != spec.grid.size())
    throw std::invalid_argument("inverse: coefficient count does not match grid");
  std::vector<std::complex<double>> buf = spec.coeff;
  execute(spec.grid, FFTW_BACKWARD, buf);
  ScalarField out(spec.grid);
  const double scale = 1.0 / static_cast<double>(spec.grid.size());
  for (std::size_t i = 0; i < buf.size(); ++i) out[i] = buf[i].real() * scale;
  return out;
}

double inverse_imag_residual(const SpectralField& spec) {
  std::vector<std::complex<double>> buf = spec.coeff;
  execute(spec.grid, FFTW_BACKWARD, buf);
  double imag = 0.0, real = 0.0;
  for (const auto& z : buf) {
    imag = std::max(imag, std::fabs(z.imag()));
    real = std::max(real, std::fabs(z.real()));
  }
  return real > 0.0 ? imag / real : imag;
}

ScalarField fractional_laplacian(const ScalarField& field, double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw std::invalid_argument("fractional_laplacian: alpha must lie in (0,2]");
  return inverse(apply_multiplier(field, [alpha](double k) {
    return k == 0.0 ? 0.0 : std::pow(k, alpha);
  }));
}

ScalarField diffusion_semigroup(const ScalarField& field, double alpha, double t) {
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw std::invalid_argument("diffusion_semigroup: alpha must lie in (0,2]");
  if (t < 0.0) throw std::invalid_argument("diffusion_semigroup: negative time");
  if (t == 0.0) return field;
  return inverse(apply_multiplier(field, [alpha, t](double k) {
    return k == 0.0 ? 1.0 : std::exp(-t * std::pow(k, alpha));
  }));
}

SpectralField dealias(const SpectralField& spec) {
  SpectralField out = spec;
  const int n = spec.grid.n;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto m = modes_of_index(spec.grid, i);
    for (int a = 0; a < spec.grid.dim; ++a) {
      if (3 * std::abs(m[a]) >= n) {
        out[i] = 0.0;
        break;
      }
    }
  }
  return out;
}

ScalarField dealias(const ScalarField& field) { return inverse(dealias(forward(field))); }

double sobolev_seminorm(const ScalarField& field, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("sobolev_seminorm: h must be positive");
  const SpectralField spec = forward(field);
  const double nd = static_cast<double>(spec.grid.size());
  double s = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto k = wavevector(spec.grid, i);
    const double kk = k[0] * k[0] + k[1] * k[1];
    if (kk == 0.0) continue;
    s += std::pow(kk, h) * std::norm(spec[i]);
  }
  return s * spec.grid.volume() / (nd * nd);
}

double spectral_inner(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f.grid, g.grid, "spectral_inner");
  const double nd = static_cast<double>(f.grid.size());
  std::complex<double> s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * std::conj(g[i]);
  return s.real() * f.grid.volume() / (nd * nd);
}

ScalarField partial_derivative(const ScalarField& field, int axis) {
  if (axis < 0 || axis >= field.grid.dim)
    throw std::invalid_argument("partial_derivative: axis out of range");
  SpectralField spec = forward(field);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto k = wavevector(spec.grid, i);
    spec[i] *= std::complex<double>(0.0, k[axis]);
  }
  return inverse(spec);
}

ScalarField poisson_solve(const ScalarField& rhs) {
  SpectralField spec = forward(rhs);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto k = wavevector(spec.grid, i);
    const double kk = k[0] * k[0] + k[1] * k[1];
    spec[i] = kk == 0.0 ? 0.0 : spec[i] / (-kk);
  }
  return inverse(spec);
}

} // namespace fraclab
