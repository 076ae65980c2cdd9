#include "nfh/nltikh.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "nfh/fft.hpp"
#include "nfh/propagate.hpp"
#include "nfh/rng.hpp"

namespace nfh {

namespace {

// Evaluates the nonlinear functional and its gradient against a fixed data
// set. Kernels live on the padded grid and are built once; within one
// gradient evaluation the exit wave and its propagated copies are shared
// between the residual and the adjoint, so the cost is J forward plus J
// backward propagations (a value evaluation is J forward).
class NlEvaluator {
 public:
  NlEvaluator(const HologramSet& data, const MaterialCoupling& coupling,
              const RegularizationWeights& weights, const Padding& padding)
      : data_(data), coupling_(coupling), weights_(weights), padding_(padding) {
    validate_hologram_set(data_);
    ny_ = data_.ny();
    nx_ = data_.nx();
    pny_ = padded_extent(ny_, padding_.factor);
    pnx_ = padded_extent(nx_, padding_.factor);
    if (weights_.alpha.rows() != pny_ || weights_.alpha.cols() != pnx_)
      throw std::invalid_argument(
          "regularization weights were built on the wrong grid (expected the padded shape)");
    const FrequencyGrid grid = frequency_sq_grid(pny_, pnx_);
    kernels_.reserve(data_.fresnel_numbers.size());
    for (double f : data_.fresnel_numbers) kernels_.push_back(fresnel_kernel(f, grid));
  }

  Index ny() const { return ny_; }
  Index nx() const { return nx_; }

  double value(const RealImage& phi) const {
    const RealImage u = padded(phi);
    const ComplexField e = exit_wave(u);
    double v = (weights_.alpha * fft2(to_complex(u)).abs2()).sum();
    for (std::size_t j = 0; j < kernels_.size(); ++j) {
      const ComplexField w = fresnel_propagate(e, kernels_[j]);
      const RealImage model = crop_image(w.abs2(), ny_, nx_);
      v += (model - data_.holograms[j]).square().sum();
    }
    return v;
  }

  RealImage gradient(const RealImage& phi) const {
    const Complex gamma = coupling_.gamma();
    const RealImage u = padded(phi);
    const ComplexField e = exit_wave(u);
    RealImage g_padded = 2.0 * ifft2(ComplexField(weights_.alpha * fft2(to_complex(u)))).real();
    for (std::size_t j = 0; j < kernels_.size(); ++j) {
      const ComplexField w = fresnel_propagate(e, kernels_[j]);
      const RealImage residual = crop_image(w.abs2(), ny_, nx_) - data_.holograms[j];
      const ComplexField back = fresnel_backpropagate(
          ComplexField(w * to_complex(zero_embed(residual, pny_, pnx_))), kernels_[j]);
      g_padded += 4.0 * ((gamma * e).conjugate() * back).real();
    }
    return pad_linear_adjoint(g_padded, ny_, nx_, padding_);
  }

 private:
  RealImage padded(const RealImage& phi) const {
    if (phi.rows() != ny_ || phi.cols() != nx_)
      throw std::invalid_argument("nltikh: phase/data shape mismatch");
    if (!all_finite(phi)) throw std::invalid_argument("nltikh: non-finite phase values");
    return pad_image(phi, padding_);
  }

  ComplexField exit_wave(const RealImage& u) const {
    const Complex gamma = coupling_.gamma();
    return u.unaryExpr([gamma](double p) { return std::exp(gamma * p); });
  }

  const HologramSet& data_;
  MaterialCoupling coupling_;
  const RegularizationWeights& weights_;
  Padding padding_;
  Index ny_ = 0, nx_ = 0, pny_ = 0, pnx_ = 0;
  std::vector<FresnelKernel> kernels_;
};

void check_options(const NltikhOptions& options) {
  if (options.max_iterations < 1)
    throw std::invalid_argument("nltikh: max_iterations must be >= 1");
  if (!(options.gradient_tolerance > 0.0))
    throw std::invalid_argument("nltikh: gradient tolerance must be positive");
  if (options.linesearch_window < 1)
    throw std::invalid_argument("nltikh: linesearch window must be >= 1");
  if (!(options.backtrack_factor > 0.0) || !(options.backtrack_factor < 1.0))
    throw std::invalid_argument("nltikh: backtrack factor must lie in (0, 1)");
  if (!(options.sufficient_decrease >= 0.0))
    throw std::invalid_argument("nltikh: sufficient decrease must be >= 0");
  if (options.max_backtracks < 0)
    throw std::invalid_argument("nltikh: max_backtracks must be >= 0");
  if (options.fixed_iterations < 0)
    throw std::invalid_argument("nltikh: fixed_iterations must be >= 0");
  if (options.stepsize.kind == StepsizeKind::Constant &&
      (!(options.stepsize.constant_value > 0.0) || !std::isfinite(options.stepsize.constant_value)))
    throw std::invalid_argument("nltikh: constant stepsize must be positive and finite");
}

// Curvature probe along a seeded random direction: tau_0 = 1 / L with
// L = ||grad(phi + h d) - grad(phi)|| / h, ||d|| = 1.
double probe_stepsize(const NlEvaluator& ev, const RealImage& phi, const RealImage& grad_phi,
                      std::uint64_t seed) {
  RealImage d(phi.rows(), phi.cols());
  CounterRng rng(derive_stream(seed, 0x70726F6265ULL));  // "probe"
  for (Index iy = 0; iy < d.rows(); ++iy)
    for (Index ix = 0; ix < d.cols(); ++ix) d(iy, ix) = rng.gaussian();
  const double dn = l2_norm(d);
  if (dn == 0.0) return 1.0;
  d /= dn;
  const double h = 1e-4 * std::max(1.0, l2_norm(phi));
  const RealImage g_probe = ev.gradient(RealImage(phi + h * d));
  const double lhat = l2_norm(RealImage(g_probe - grad_phi)) / h;
  if (!std::isfinite(lhat) || !(lhat > 0.0)) return 1.0;
  return 1.0 / lhat;
}

}  // namespace

double tikhonov_nl_value(const RealImage& phi, const HologramSet& data,
                         const MaterialCoupling& coupling, const RegularizationWeights& weights,
                         const Padding& padding) {
  return NlEvaluator(data, coupling, weights, padding).value(phi);
}

RealImage tikhonov_nl_gradient(const RealImage& phi, const HologramSet& data,
                               const MaterialCoupling& coupling,
                               const RegularizationWeights& weights, const Padding& padding) {
  return NlEvaluator(data, coupling, weights, padding).gradient(phi);
}

double bb_stepsize(int iteration, const RealImage& delta_phi, const RealImage& delta_gradient,
                   double previous_stepsize) {
  const double dphi2 = delta_phi.square().sum();
  const double dg2 = delta_gradient.square().sum();
  if (dphi2 == 0.0 && dg2 == 0.0)
    throw std::domain_error("bb_stepsize: stagnation (both differences vanish)");
  const double tau = (iteration % 2 != 0) ? inner(delta_phi, delta_gradient) / dg2
                                          : dphi2 / inner(delta_phi, delta_gradient);
  if (!std::isfinite(tau) || !(tau > 0.0)) return previous_stepsize;
  return tau;
}

LinesearchResult nonmonotone_linesearch(const std::function<double(const RealImage&)>& objective,
                                        const RealImage& phi, const RealImage& gradient,
                                        const ConstraintSet& constraints, double candidate_step,
                                        double window_max, const NltikhOptions& options) {
  if (!(candidate_step > 0.0) || !std::isfinite(candidate_step))
    throw std::invalid_argument("linesearch: candidate step must be positive and finite");
  if (gradient.rows() != phi.rows() || gradient.cols() != phi.cols())
    throw std::invalid_argument("linesearch: gradient shape mismatch");
  const double gnorm2 = gradient.square().sum();
  double tau = candidate_step;
  LinesearchResult result;
  for (int bt = 0;; ++bt) {
    RealImage trial = phi - tau * gradient;
    if (constraints.any()) trial = project(trial, constraints);
    const double f = objective(trial);
    const bool accept =
        std::isfinite(f) && f <= window_max - options.sufficient_decrease * tau * gnorm2;
    if (accept || bt == options.max_backtracks) {
      result.stepsize = tau;
      result.iterate = std::move(trial);
      result.value = f;
      result.backtracks = bt;
      result.hit_limit = !accept;
      return result;
    }
    tau *= options.backtrack_factor;
  }
}

NltikhResult nltikh_reconstruct(const HologramSet& data, const MaterialCoupling& coupling,
                                const RegularizationWeights& weights,
                                const ConstraintSet& constraints, const NltikhOptions& options,
                                const Padding& padding) {
  check_options(options);
  const NlEvaluator ev(data, coupling, weights, padding);
  validate_constraints(constraints, ev.ny(), ev.nx());
  const auto start = std::chrono::steady_clock::now();
  const auto elapsed = [&start] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  NltikhResult result;

  const RealImage zero = RealImage::Zero(ev.ny(), ev.nx());
  const double grad0_norm = l2_norm(ev.gradient(zero));
  if (grad0_norm == 0.0) {
    // Fully consistent trivial data: zero phase is already stationary.
    result.phi = zero;
    result.trace.converged = true;
    result.trace.message = "trivial data, zero phase is stationary";
    return result;
  }

  RealImage phi;
  if (!options.warm_start) {
    phi = zero;
  } else if (constraints.any()) {
    phi = cctf_reconstruct(data, coupling, weights, constraints, options.warm_start_cctf, padding).phi;
  } else {
    phi = ctf_reconstruct(data, coupling, weights, padding);
  }
  phi = project(phi, constraints);

  RealImage grad = ev.gradient(phi);
  double value = ev.value(phi);
  double grad_residual = l2_norm(grad) / grad0_norm;
  std::vector<double> window{value};

  double tau = options.stepsize.kind == StepsizeKind::Constant
                   ? options.stepsize.constant_value
                   : probe_stepsize(ev, phi, grad, options.seed);

  const bool fixed_mode = options.fixed_iterations > 0;
  const int budget = fixed_mode ? options.fixed_iterations : options.max_iterations;
  const auto value_fn = [&ev](const RealImage& candidate) { return ev.value(candidate); };

  for (int k = 1; k <= budget; ++k) {
    if (!fixed_mode && grad_residual < options.gradient_tolerance) {
      result.trace.converged = true;
      result.trace.message = "converged";
      break;
    }
    const double window_max = *std::max_element(window.begin(), window.end());
    const LinesearchResult ls =
        nonmonotone_linesearch(value_fn, phi, grad, constraints, tau, window_max, options);
    if (!std::isfinite(ls.value))
      throw std::runtime_error("nltikh: objective became non-finite at iteration " +
                               std::to_string(k));
    const RealImage grad_next = ev.gradient(ls.iterate);
    const RealImage delta_phi = ls.iterate - phi;
    const RealImage delta_grad = grad_next - grad;

    phi = ls.iterate;
    grad = grad_next;
    value = ls.value;
    grad_residual = l2_norm(grad) / grad0_norm;
    window.push_back(value);
    if (static_cast<int>(window.size()) > options.linesearch_window) window.erase(window.begin());

    TraceRow row;
    row.iteration = k;
    row.objective = value;
    row.gradient_residual = grad_residual;
    row.stepsize = ls.stepsize;
    row.backtracks = ls.backtracks;
    row.elapsed_s = elapsed();
    result.trace.rows.push_back(row);
    if (ls.hit_limit && result.trace.message.empty())
      result.trace.message = "linesearch budget exhausted at iteration " + std::to_string(k);

    if (options.stepsize.kind == StepsizeKind::Constant) {
      tau = options.stepsize.constant_value;
    } else {
      const bool stalled = delta_phi.square().sum() == 0.0 && delta_grad.square().sum() == 0.0;
      if (stalled) {
        result.trace.message = "stagnated at iteration " + std::to_string(k);
        break;
      }
      tau = bb_stepsize(k, delta_phi, delta_grad, tau);
    }
  }

  if (!fixed_mode && !result.trace.converged && grad_residual < options.gradient_tolerance) {
    // The budget ended exactly on a converged iterate.
    result.trace.converged = true;
    if (result.trace.message.empty()) result.trace.message = "converged";
  }
  if (fixed_mode) {
    result.trace.converged = grad_residual < options.gradient_tolerance;
    result.trace.message = "fixed iteration budget completed";
  } else if (!result.trace.converged && result.trace.message.empty()) {
    result.trace.message = "max iterations reached without convergence";
  }
  result.phi = std::move(phi);
  return result;
}

double gradient_residual(const RealImage& phi, const HologramSet& data,
                         const MaterialCoupling& coupling, const RegularizationWeights& weights,
                         const Padding& padding) {
  const NlEvaluator ev(data, coupling, weights, padding);
  const double denom = l2_norm(ev.gradient(RealImage(RealImage::Zero(ev.ny(), ev.nx()))));
  if (denom == 0.0) return 0.0;
  return l2_norm(ev.gradient(phi)) / denom;
}

double value_residual(const RealImage& phi, const RealImage& phi_reference,
                      const HologramSet& data, const MaterialCoupling& coupling,
                      const RegularizationWeights& weights, const Padding& padding) {
  const NlEvaluator ev(data, coupling, weights, padding);
  const double v0 = ev.value(RealImage(RealImage::Zero(ev.ny(), ev.nx())));
  const double vref = ev.value(phi_reference);
  const double denom = v0 - vref;
  if (denom == 0.0)
    throw std::domain_error("value_residual: trivial problem, reference matches the zero phase");
  return (ev.value(phi) - vref) / denom;
}

}  // namespace nfh
