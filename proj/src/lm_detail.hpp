#pragma once

// Projected Levenberg-Marquardt over a small fixed parameter vector. Each
// trial step solves (A + lambda * diag(A)) delta = -g, is projected back onto
// the feasible set, and is accepted only if it lowers the residual sum.

#include "rh/hypothesis.hpp"

#include <Eigen/Dense>

#include <limits>
#include <vector>

namespace rh::detail {

template <int N>
struct LmEval {
  bool ok = false;
  double F = std::numeric_limits<double>::infinity();
  Eigen::Matrix<double, N, N> A = Eigen::Matrix<double, N, N>::Zero();  // J^T J
  Eigen::Matrix<double, N, 1> g = Eigen::Matrix<double, N, 1>::Zero();  // J^T r
  int pixels = 0;
};

template <int N>
struct LmResult {
  Eigen::Matrix<double, N, 1> params;
  LmEval<N> eval;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

// `pinned(params, g)` marks parameters held at a bound the descent direction
// points out of; their step is zero for that iteration.
template <int N, typename Eval, typename Project, typename StepNorm, typename Pinned>
LmResult<N> projected_lm(const Eigen::Matrix<double, N, 1>& init, Eval&& evaluate, Project&& project,
                         StepNorm&& step_norm, Pinned&& pinned, const LmSettings& lm,
                         bool record_trace) {
  using Vec = Eigen::Matrix<double, N, 1>;
  using Mat = Eigen::Matrix<double, N, N>;
  LmResult<N> res;
  res.params = project(init);
  res.eval = evaluate(res.params);
  if (!res.eval.ok) return res;
  if (record_trace) res.trace.push_back(res.eval.F);

  double lambda = lm.damping_init;
  while (res.iterations < lm.max_iter) {
    ++res.iterations;
    Mat damped = res.eval.A;
    const double scale = res.eval.A.diagonal().maxCoeff();
    for (int i = 0; i < N; ++i) {
      damped(i, i) += lambda * (res.eval.A(i, i) + 1e-12 * scale + 1e-300);
    }
    const Eigen::Matrix<bool, N, 1> fixed = pinned(res.params, res.eval.g);
    Vec rhs = -res.eval.g;
    for (int i = 0; i < N; ++i) {
      if (!fixed(i)) continue;
      damped.row(i).setZero();
      damped.col(i).setZero();
      damped(i, i) = 1.0;
      rhs(i) = 0.0;
    }
    const Vec delta = damped.ldlt().solve(rhs);
    const Vec candidate = project(Vec(res.params + delta));
    if (!candidate.allFinite()) break;
    const double step = step_norm(res.params, candidate);
    if (step < lm.step_tol) {
      res.converged = true;
      break;
    }
    LmEval<N> trial = evaluate(candidate);
    if (trial.ok && trial.F < res.eval.F) {
      const bool stalled = res.eval.F - trial.F < lm.f_tol * res.eval.F;
      res.params = candidate;
      res.eval = trial;
      if (record_trace) res.trace.push_back(trial.F);
      lambda = std::max(lambda / 10.0, 1e-12);
      if (stalled) {
        res.converged = true;
        break;
      }
    } else {
      lambda *= 10.0;
      if (lambda > 1e12) {
        // No descent direction survives the damping: a (constrained) minimum.
        res.converged = true;
        break;
      }
    }
  }
  if (res.converged) {
    // A minimum pinned against the image border instead of the feasible set:
    // the undamped step leaves the evaluable region.
    const Vec gn = res.eval.A.ldlt().solve(-res.eval.g);
    const Vec candidate = project(Vec(res.params + gn));
    if (candidate.allFinite() && !evaluate(candidate).ok) res.converged = false;
  }
  return res;
}

template <int N, typename Eval, typename Project, typename StepNorm>
LmResult<N> projected_lm(const Eigen::Matrix<double, N, 1>& init, Eval&& evaluate, Project&& project,
                         StepNorm&& step_norm, const LmSettings& lm, bool record_trace) {
  auto none = [](const Eigen::Matrix<double, N, 1>&, const Eigen::Matrix<double, N, 1>&) {
    return Eigen::Matrix<bool, N, 1>::Constant(false);
  };
  return projected_lm<N>(init, evaluate, project, step_norm, none, lm, record_trace);
}

template <int N>
double min_eigenvalue(const Eigen::Matrix<double, N, N>& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, N, N>> solver(A, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

}  // namespace rh::detail
