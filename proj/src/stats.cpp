#include "hetfuse/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include "hetfuse/errors.hpp"

namespace hetfuse {

double chi_squared_quantile(double p, double dof) {
  if (p <= 0.0 || p >= 1.0 || dof <= 0.0) {
    throw Error("chi_squared_quantile: p must be in (0,1) and dof positive");
  }
  return boost::math::quantile(boost::math::chi_squared(dof), p);
}

NeesBounds average_nees_bounds(int n_runs, int dof, double alpha) {
  if (n_runs < 1 || dof < 1) throw Error("average_nees_bounds: bad arguments");
  const double n = static_cast<double>(n_runs);
  const double d = static_cast<double>(n_runs * dof);
  return {chi_squared_quantile(alpha / 2.0, d) / n,
          chi_squared_quantile(1.0 - alpha / 2.0, d) / n};
}

}  // namespace hetfuse
