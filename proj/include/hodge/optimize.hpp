#pragma once

// Thin RAII wrapper over GSL's Nelder-Mead simplex (nmsimplex2).

#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include <Eigen/Dense>

#include "hodge/errors.hpp"

namespace hodge {

struct SimplexOptions {
  int max_iterations = 400;
  double size_tolerance = 1e-4;  // simplex characteristic size at convergence
  double initial_step = 1.0;
};

struct SimplexResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

namespace detail {

struct GslVectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
struct GslMinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};
using GslVector = std::unique_ptr<gsl_vector, GslVectorDeleter>;
using GslMinimizer = std::unique_ptr<gsl_multimin_fminimizer, GslMinimizerDeleter>;

using Objective = std::function<double(const Eigen::VectorXd&)>;

inline double gsl_trampoline(const gsl_vector* v, void* params) {
  const auto& f = *static_cast<const Objective*>(params);
  Eigen::VectorXd x(static_cast<Eigen::Index>(v->size));
  for (std::size_t i = 0; i < v->size; ++i) x[static_cast<Eigen::Index>(i)] = gsl_vector_get(v, i);
  const double y = f(x);
  return std::isfinite(y) ? y : 1e100;
}

}  // namespace detail

/// Minimizes f from x0. Non-finite objective values are treated as 1e100.
inline SimplexResult minimize_simplex(const std::function<double(const Eigen::VectorXd&)>& f,
                                      const Eigen::VectorXd& x0, const SimplexOptions& opt = {}) {
  const auto n = static_cast<std::size_t>(x0.size());
  if (n == 0) {
    SimplexResult r;
    r.x = x0;
    r.value = f(x0);
    r.converged = true;
    return r;
  }
  gsl_set_error_handler_off();
  detail::Objective obj = f;
  gsl_multimin_function fn;
  fn.n = n;
  fn.f = &detail::gsl_trampoline;
  fn.params = &obj;

  detail::GslVector start(gsl_vector_alloc(n));
  detail::GslVector step(gsl_vector_alloc(n));
  for (std::size_t i = 0; i < n; ++i) gsl_vector_set(start.get(), i, x0[static_cast<Eigen::Index>(i)]);
  gsl_vector_set_all(step.get(), opt.initial_step);

  detail::GslMinimizer m(gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n));
  if (!m) throw NumericalFailure("could not allocate simplex minimizer");
  if (gsl_multimin_fminimizer_set(m.get(), &fn, start.get(), step.get()) != GSL_SUCCESS)
    throw NumericalFailure("could not initialize simplex minimizer");

  SimplexResult r;
  for (r.iterations = 0; r.iterations < opt.max_iterations; ++r.iterations) {
    if (gsl_multimin_fminimizer_iterate(m.get()) != GSL_SUCCESS) break;
    const double size = gsl_multimin_fminimizer_size(m.get());
    if (gsl_multimin_test_size(size, opt.size_tolerance) == GSL_SUCCESS) {
      r.converged = true;
      break;
    }
  }
  const gsl_vector* best = gsl_multimin_fminimizer_x(m.get());
  r.x.resize(x0.size());
  for (std::size_t i = 0; i < n; ++i) r.x[static_cast<Eigen::Index>(i)] = gsl_vector_get(best, i);
  r.value = gsl_multimin_fminimizer_minimum(m.get());
  return r;
}

}  // namespace hodge
