#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rmflow/linalg.hpp"
#include "rmflow/rng.hpp"
#include "rmflow/spectral_function.hpp"

namespace rmflow {

enum class Projection { none, nonneg, unit_interval };

// scaled:   noise n^{-1/2} dW and drift b/n.
// unscaled: noise dW and drift b_n.  Run to
//           time t/n it matches the scaled flow at time t.
enum class TimeScaling { scaled, unscaled };

// How the stepper for non-affine coefficients draws its noise.
//   fixed:      dW in the original basis, rotated into the eigenframe; the path
//               equals repeated euler_step with the same draws.
//   eigenbasis: dW drawn directly in the current eigenbasis.  The Gaussian
//               matrix is unitarily invariant and independent of the past, so
//               the eigenvalue chain has exactly the law of the EM chain, and
//               no eigenvectors are needed.
enum class NoiseFrame { fixed, eigenbasis };

struct FlowSpec {
  SpectralFunction g = SpectralFunction::zero();
  SpectralFunction h = SpectralFunction::zero();
  SpectralFunction b = SpectralFunction::zero();
  int beta = 2;
  std::size_t n = 0;
  bool drift_prescaled = false;
  double dt = 1e-3;
  std::vector<double> t_grid;
  std::vector<double> initial_spectrum;
  Projection projection = Projection::none;
  // Domain watched for the first-exit diagnostic.  Defaults to the projection
  // domain; can be set without clamping.
  std::optional<Projection> monitored_domain;
  TimeScaling scaling = TimeScaling::scaled;
  NoiseFrame noise_frame = NoiseFrame::eigenbasis;
};

void validate(const FlowSpec& spec);

// Heuristic check of the linear growth condition on g^2 + h^2 and b/n.  Only
// superlinear growth is detectable at fixed n, so this never throws.
std::vector<std::string> growth_condition_warnings(const FlowSpec& spec);

struct PathDiagnostics {
  double min_eigenvalue = 0.0;  // over recorded spectra
  double max_eigenvalue = 0.0;
  std::optional<double> first_domain_exit;
  std::size_t clamp_events = 0;
};

struct EigenPath {
  std::vector<double> t_grid;
  std::vector<std::vector<double>> spectra;
  PathDiagnostics diagnostics;
};

// Snapped step index of a record time: round(t / dt).
std::size_t snapped_step(double t, double dt);

// Returns n^{-1/2} dW (scaled) or dW (unscaled).  Complex entries have
// independent real and imaginary parts of variance dt each.
template <class T>
Matrix<T> sample_noise(std::size_t n, double dt, RngStream& stream,
                       TimeScaling scaling = TimeScaling::scaled);

template <class T>
struct StepResult {
  Matrix<T> state;
  std::size_t clamped = 0;
};

// Literal Euler-Maruyama step through spectral application.
template <class T>
StepResult<T> euler_step(const Matrix<T>& x, const FlowSpec& spec, const Matrix<T>& noise);

EigenPath simulate_path(const FlowSpec& spec, RngStream stream);
inline EigenPath simulate_path(const FlowSpec& spec, std::uint64_t seed) {
  return simulate_path(spec, RngStream(seed, 0));
}

// Replica r runs on RngStream(base_seed, r).  Output order and content do
// not depend on the thread count.
std::vector<EigenPath> simulate_ensemble(const FlowSpec& spec, std::size_t replica_count,
                                         std::uint64_t base_seed, unsigned threads = 1);

}  // namespace rmflow
