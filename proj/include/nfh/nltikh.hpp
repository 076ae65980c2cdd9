#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "nfh/constraints.hpp"
#include "nfh/ctf.hpp"
#include "nfh/forward.hpp"
#include "nfh/pad.hpp"
#include "nfh/regularization.hpp"
#include "nfh/trace.hpp"
#include "nfh/types.hpp"

namespace nfh {

enum class StepsizeKind { BarzilaiBorwein, Constant };

struct StepsizePolicy {
  StepsizeKind kind = StepsizeKind::BarzilaiBorwein;
  double constant_value = 0.0;  // required > 0 for Constant
};

struct NltikhOptions {
  int max_iterations = 500;
  double gradient_tolerance = 1e-3;  // on ||grad(phi_k)|| / ||grad(0)||
  int linesearch_window = 10;        // non-monotone memory M
  double backtrack_factor = 0.5;
  double sufficient_decrease = 1e-4;
  int max_backtracks = 20;
  StepsizePolicy stepsize;
  bool warm_start = true;   // start from the (constrained) CTF reconstruction
  int fixed_iterations = 0; // > 0: run exactly this many iterations, stopping disabled
  std::uint64_t seed = 0;   // seeds the initial-stepsize probe direction
  CctfOptions warm_start_cctf;  // inner solver settings for constrained warm starts
};

// Nonlinear Tikhonov functional
//   T(phi) = sum_j || nonlinear_model_j(phi) - I_j ||^2 + || alpha^(1/2) F(phi) ||^2
// and its exact gradient. The gradient shares one exit-wave propagation per
// hologram between the residual and the adjoint, so it costs J forward plus
// J backward propagations; a value evaluation costs J forward.
double tikhonov_nl_value(const RealImage& phi, const HologramSet& data,
                         const MaterialCoupling& coupling, const RegularizationWeights& weights,
                         const Padding& padding = {});

RealImage tikhonov_nl_gradient(const RealImage& phi, const HologramSet& data,
                               const MaterialCoupling& coupling,
                               const RegularizationWeights& weights, const Padding& padding = {});

// Alternating Barzilai-Borwein stepsize from the last iterate/gradient
// differences: <dphi, dg>/||dg||^2 on odd iterations, ||dphi||^2/<dphi, dg>
// on even ones. Non-positive or non-finite results fall back to
// previous_stepsize; both differences zero signals stagnation
// (std::domain_error).
double bb_stepsize(int iteration, const RealImage& delta_phi, const RealImage& delta_gradient,
                   double previous_stepsize);

struct LinesearchResult {
  double stepsize = 0.0;
  RealImage iterate;
  double value = 0.0;
  int backtracks = 0;
  bool hit_limit = false;  // budget exhausted; smallest trial was accepted
};

// Projected non-monotone backtracking: accepts the first step with
//   T(P_A(phi - tau * g)) <= window_max - sufficient_decrease * tau * ||g||^2
// halving tau up to max_backtracks times, then accepts the smallest trial.
LinesearchResult nonmonotone_linesearch(const std::function<double(const RealImage&)>& objective,
                                        const RealImage& phi, const RealImage& gradient,
                                        const ConstraintSet& constraints, double candidate_step,
                                        double window_max, const NltikhOptions& options);

struct NltikhResult {
  RealImage phi;
  ConvergenceTrace trace;
};

// Projected gradient descent on the nonlinear functional with BB stepsizes
// and the non-monotone linesearch. Stops when the relative gradient norm
// drops below gradient_tolerance (unless fixed_iterations is set).
NltikhResult nltikh_reconstruct(const HologramSet& data, const MaterialCoupling& coupling,
                                const RegularizationWeights& weights,
                                const ConstraintSet& constraints, const NltikhOptions& options = {},
                                const Padding& padding = {});

// Diagnostics: relative gradient norm ||grad(phi)|| / ||grad(0)|| (returns 0
// for fully consistent trivial data where the denominator vanishes), and
// relative objective gap against a reference reconstruction.
double gradient_residual(const RealImage& phi, const HologramSet& data,
                         const MaterialCoupling& coupling, const RegularizationWeights& weights,
                         const Padding& padding = {});

double value_residual(const RealImage& phi, const RealImage& phi_reference,
                      const HologramSet& data, const MaterialCoupling& coupling,
                      const RegularizationWeights& weights, const Padding& padding = {});

}  // namespace nfh
