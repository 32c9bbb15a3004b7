#include "rmflow/flow_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "rmflow/errors.hpp"

namespace rmflow {

namespace {

std::string fmt_time(double t) {
  std::ostringstream os;
  os.precision(10);
  os << t;
  return os.str();
}

bool inside(Projection domain, double x) {
  switch (domain) {
    case Projection::none:
      return true;
    case Projection::nonneg:
      return x >= 0.0;
    case Projection::unit_interval:
      return x >= 0.0 && x <= 1.0;
  }
  return true;
}

double clamp_to(Projection domain, double x) {
  switch (domain) {
    case Projection::none:
      return x;
    case Projection::nonneg:
      return std::max(x, 0.0);
    case Projection::unit_interval:
      return std::clamp(x, 0.0, 1.0);
  }
  return x;
}

double drift_factor(const FlowSpec& spec) {
  if (spec.scaling == TimeScaling::unscaled || spec.drift_prescaled) return 1.0;
  return 1.0 / static_cast<double>(spec.n);
}

template <class T>
Matrix<T> spectral_or_affine(const SpectralFunction& f, const Matrix<T>& x,
                             const std::optional<EigenDecomposition<T>>& d) {
  if (f.is_affine()) {
    Matrix<T> r = x;
    r *= f.slope();
    for (std::size_t i = 0; i < r.size(); ++i) r(i, i) += T{f.intercept()};
    return r;
  }
  return apply_spectral(f, *d);
}

// Tracks record times, diagnostics and domain exits for both steppers.
struct Recorder {
  const FlowSpec& spec;
  EigenPath path;
  std::vector<std::size_t> record_steps;
  std::size_t next = 0;
  Projection watched;

  explicit Recorder(const FlowSpec& s) : spec(s) {
    path.t_grid = s.t_grid;
    watched = s.monitored_domain.value_or(s.projection);
    for (double t : s.t_grid) record_steps.push_back(snapped_step(t, s.dt));
    path.diagnostics.min_eigenvalue = HUGE_VAL;
    path.diagnostics.max_eigenvalue = -HUGE_VAL;
  }

  std::size_t total_steps() const { return record_steps.back(); }

  void watch(const std::vector<double>& lambda, std::size_t step) {
    if (path.diagnostics.first_domain_exit || watched == Projection::none) return;
    for (double x : lambda)
      if (!inside(watched, x)) {
        path.diagnostics.first_domain_exit = static_cast<double>(step) * spec.dt;
        return;
      }
  }

  void record(std::vector<double> lambda, std::size_t step) {
    std::sort(lambda.begin(), lambda.end());
    while (next < record_steps.size() && record_steps[next] == step) {
      path.diagnostics.min_eigenvalue = std::min(path.diagnostics.min_eigenvalue, lambda.front());
      path.diagnostics.max_eigenvalue = std::max(path.diagnostics.max_eigenvalue, lambda.back());
      path.spectra.push_back(lambda);
      ++next;
    }
  }
};

void require_finite(const std::vector<double>& lambda, std::size_t step, double dt) {
  for (double x : lambda)
    if (!std::isfinite(x))
      throw NumericalError("simulate_path: non-finite state at t=" +
                           fmt_time(static_cast<double>(step) * dt));
}

// All coefficients affine, no clamp: step the matrix itself, diagonalize
// only at record times.
template <class T>
EigenPath simulate_direct(const FlowSpec& spec, RngStream& stream) {
  const std::size_t n = spec.n;
  Recorder rec(spec);
  Matrix<T> x = Matrix<T>::diagonal(spec.initial_spectrum);
  rec.record(spec.initial_spectrum, 0);
  rec.watch(spec.initial_spectrum, 0);
  const double bf = drift_factor(spec) * spec.dt;
  const bool scalar_noise = spec.g.is_constant() && spec.h.is_constant();

  for (std::size_t step = 1; step <= rec.total_steps(); ++step) {
    const Matrix<T> dw = sample_noise<T>(n, spec.dt, stream, spec.scaling);
    Matrix<T> a;
    if (scalar_noise) {
      a = dw;
      a *= spec.g.intercept() * spec.h.intercept();
    } else {
      const std::optional<EigenDecomposition<T>> none;
      a = spectral_or_affine(spec.g, x, none) * dw * spectral_or_affine(spec.h, x, none);
    }
    Matrix<T> next = x;
    next *= 1.0 + spec.b.slope() * bf;
    for (std::size_t i = 0; i < n; ++i) next(i, i) += T{spec.b.intercept() * bf};
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        // hermitized entry of next + a + a^*
        const T aij = a(i, j) + FieldTraits<T>::conj(a(j, i));
        const T v = 0.5 * (next(i, j) + FieldTraits<T>::conj(next(j, i))) + aij;
        next(i, j) = v;
        next(j, i) = FieldTraits<T>::conj(v);
      }
      next(i, i) = T{FieldTraits<T>::real(next(i, i))};
    }
    x = std::move(next);
    if (!x.all_finite())
      throw NumericalError("simulate_path: non-finite state at t=" +
                           fmt_time(static_cast<double>(step) * spec.dt));
    if (rec.next < rec.record_steps.size() && rec.record_steps[rec.next] == step) {
      auto lambda = eigen_unchecked(x).eigenvalues;
      require_finite(lambda, step, spec.dt);
      rec.watch(lambda, step);
      rec.record(std::move(lambda), step);
    }
  }
  return std::move(rec.path);
}

// General coefficients: keep X = H diag(lambda) H^* and step in the moving
// eigenframe.  Y = diag(lambda + b dt/n) + D_g (H^* dW H) D_h + adjoint is
// exactly H^* X_{next} H, so one Jacobi solve of a near-diagonal matrix per
// step replaces the decomposition the literal step needs.  With
// NoiseFrame::eigenbasis, H^* dW H is replaced by a fresh draw and H is
// never formed.
template <class T>
EigenPath simulate_frame(const FlowSpec& spec, RngStream& stream) {
  using F = FieldTraits<T>;
  const std::size_t n = spec.n;
  const bool track_frame = spec.noise_frame == NoiseFrame::fixed;
  Recorder rec(spec);
  // X_0 = diag(initial_spectrum) in the given order, so the frame starts at I
  std::vector<double> lambda = spec.initial_spectrum;
  Matrix<T> frame = Matrix<T>::identity(track_frame ? n : 0);
  rec.record(lambda, 0);
  rec.watch(lambda, 0);
  const double bf = drift_factor(spec) * spec.dt;
  std::vector<double> gv(n), hv(n), bv(n);

  for (std::size_t step = 1; step <= rec.total_steps(); ++step) {
    for (std::size_t i = 0; i < n; ++i) {
      gv[i] = spec.g(lambda[i]);
      hv[i] = spec.h(lambda[i]);
      bv[i] = spec.b(lambda[i]);
    }
    Matrix<T> w = sample_noise<T>(n, spec.dt, stream, spec.scaling);
    if (track_frame) w = frame.adjoint() * w * frame;
    Matrix<T> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        const T v = gv[i] * w(i, j) * hv[j] + hv[i] * F::conj(w(j, i)) * gv[j];
        y(i, j) = v;
        y(j, i) = F::conj(v);
      }
      y(i, i) = T{F::real(y(i, i)) + lambda[i] + bv[i] * bf};
    }
    std::vector<double> next;
    if (track_frame) {
      auto d = eigen_unchecked(std::move(y));
      next = std::move(d.eigenvalues);
      frame = frame * d.eigenvectors;
    } else {
      next = eigenvalues_unchecked(std::move(y));
    }
    require_finite(next, step, spec.dt);
    rec.watch(next, step);
    if (spec.projection != Projection::none) {
      for (auto& x : next) {
        const double c = clamp_to(spec.projection, x);
        if (c != x) ++rec.path.diagnostics.clamp_events;
        x = c;
      }
    }
    lambda = std::move(next);
    if (rec.next < rec.record_steps.size() && rec.record_steps[rec.next] == step)
      rec.record(lambda, step);
  }
  return std::move(rec.path);
}

template <class T>
EigenPath simulate_typed(const FlowSpec& spec, RngStream& stream) {
  const bool affine = spec.g.is_affine() && spec.h.is_affine() && spec.b.is_affine();
  if (affine && spec.projection == Projection::none) return simulate_direct<T>(spec, stream);
  return simulate_frame<T>(spec, stream);
}

[[noreturn]] void rethrow_with_replica(std::exception_ptr ep, std::size_t r) {
  const std::string prefix = "replica " + std::to_string(r) + ": ";
  try {
    std::rethrow_exception(ep);
  } catch (const NumericalError& e) {
    throw NumericalError(prefix + e.what());
  } catch (const DomainError& e) {
    throw DomainError(prefix + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(prefix + e.what());
  } catch (const std::exception& e) {
    throw NumericalError(prefix + e.what());
  }
}

}  // namespace

std::size_t snapped_step(double t, double dt) {
  return static_cast<std::size_t>(std::llround(t / dt));
}

void validate(const FlowSpec& spec) {
  if (spec.beta != 1 && spec.beta != 2) throw ValidationError("FlowSpec: beta must be 1 or 2");
  if (spec.n == 0) throw ValidationError("FlowSpec: n must be positive");
  if (!(spec.dt > 0.0) || !std::isfinite(spec.dt)) throw ValidationError("FlowSpec: dt must be > 0");
  if (spec.t_grid.empty()) throw ValidationError("FlowSpec: t_grid is empty");
  if (spec.t_grid.front() != 0.0) throw ValidationError("FlowSpec: t_grid must start at 0");
  for (std::size_t k = 1; k < spec.t_grid.size(); ++k)
    if (!(spec.t_grid[k] > spec.t_grid[k - 1]) || !std::isfinite(spec.t_grid[k]))
      throw ValidationError("FlowSpec: t_grid must be strictly ascending and finite");
  if (spec.initial_spectrum.size() != spec.n)
    throw ValidationError("FlowSpec: initial_spectrum must have length n");
  for (double x : spec.initial_spectrum) {
    if (!std::isfinite(x)) throw ValidationError("FlowSpec: initial_spectrum must be finite");
    if (!inside(spec.projection, x))
      throw ValidationError("FlowSpec: initial_spectrum lies outside the projection domain");
  }
}

std::vector<std::string> growth_condition_warnings(const FlowSpec& spec) {
  std::vector<std::string> out;
  const double nf = drift_factor(spec);
  auto ratio = [&](double x) {
    const double g = spec.g(x), h = spec.h(x);
    return std::max(g * g + h * h, std::fabs(spec.b(x)) * nf) / (1.0 + std::fabs(x));
  };
  for (double sign : {-1.0, 1.0}) {
    const double near = ratio(sign * 1e3);
    const double far = ratio(sign * 1e6);
    if (!std::isfinite(far) || far > 100.0 * near + 1.0) {
      std::ostringstream os;
      os << "coefficients appear to grow faster than linearly as x -> " << (sign < 0 ? "-inf" : "+inf")
         << " (g^2+h^2 or |b|/n over 1+|x|: " << near << " at 1e3, " << far << " at 1e6)";
      out.push_back(os.str());
    }
  }
  return out;
}

template <class T>
Matrix<T> sample_noise(std::size_t n, double dt, RngStream& stream, TimeScaling scaling) {
  const double sd = std::sqrt(scaling == TimeScaling::scaled ? dt / static_cast<double>(n) : dt);
  Matrix<T> w(n);
  for (auto& x : w.storage()) {
    if constexpr (std::is_same_v<T, double>) {
      x = sd * stream.normal();
    } else {
      const double re = stream.normal();
      const double im = stream.normal();
      x = Complex(sd * re, sd * im);
    }
  }
  return w;
}

template <class T>
StepResult<T> euler_step(const Matrix<T>& x, const FlowSpec& spec, const Matrix<T>& noise) {
  require_hermitian(x, "euler_step");
  if (noise.size() != x.size()) throw ValidationError("euler_step: noise dimension mismatch");
  std::optional<EigenDecomposition<T>> d;
  if (!(spec.g.is_affine() && spec.h.is_affine() && spec.b.is_affine())) d = eigen(x);
  const Matrix<T> gx = spectral_or_affine(spec.g, x, d);
  const Matrix<T> hx = spectral_or_affine(spec.h, x, d);
  Matrix<T> bx = spectral_or_affine(spec.b, x, d);
  bx *= drift_factor(spec) * spec.dt;
  const Matrix<T> a = gx * noise * hx;
  StepResult<T> out;
  out.state = hermitize(x + a + a.adjoint() + bx);
  if (spec.projection != Projection::none) {
    auto e = eigen_unchecked(out.state);
    for (auto& v : e.eigenvalues) {
      const double c = clamp_to(spec.projection, v);
      if (c != v) ++out.clamped;
      v = c;
    }
    if (out.clamped) out.state = reconstruct(e.eigenvectors, e.eigenvalues);
  }
  return out;
}

EigenPath simulate_path(const FlowSpec& spec, RngStream stream) {
  validate(spec);
  return spec.beta == 1 ? simulate_typed<double>(spec, stream) : simulate_typed<Complex>(spec, stream);
}

std::vector<EigenPath> simulate_ensemble(const FlowSpec& spec, std::size_t replica_count,
                                         std::uint64_t base_seed, unsigned threads) {
  if (replica_count == 0) throw ValidationError("simulate_ensemble: replica_count must be >= 1");
  validate(spec);
  std::vector<EigenPath> out(replica_count);
  std::vector<std::exception_ptr> errors(replica_count);
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    for (std::size_t r; (r = cursor.fetch_add(1)) < replica_count;) {
      try {
        out[r] = simulate_path(spec, RngStream(base_seed, r));
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  const unsigned nt = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(replica_count)));
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < nt; ++k) pool.emplace_back(worker);
  }
  for (std::size_t r = 0; r < replica_count; ++r)
    if (errors[r]) rethrow_with_replica(errors[r], r);
  return out;
}

template Matrix<double> sample_noise<double>(std::size_t, double, RngStream&, TimeScaling);
template Matrix<Complex> sample_noise<Complex>(std::size_t, double, RngStream&, TimeScaling);
template StepResult<double> euler_step<double>(const Matrix<double>&, const FlowSpec&, const Matrix<double>&);
template StepResult<Complex> euler_step<Complex>(const Matrix<Complex>&, const FlowSpec&, const Matrix<Complex>&);

}  // namespace rmflow
