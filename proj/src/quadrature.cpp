// SPDX-License-Identifier: Apache-2.0
#include "corridor/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace corridor {

void QuadratureConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
    throw ParameterError("quadrature tolerances must be > 0");
  }
  if (max_subdivisions < 1) {
    throw ParameterError("max_subdivisions must be >= 1");
  }
}

namespace detail {

const KronrodRule& kronrod21() {
  static const KronrodRule rule = [] {
    using kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
    using gauss = boost::math::quadrature::gauss<double, 10>;
    KronrodRule r{};
    for (std::size_t i = 0; i < 11; ++i) {
      r.nodes[i] = kronrod::abscissa()[i];
      r.kronrod_weights[i] = kronrod::weights()[i];
      r.gauss_weights[i] = (i % 2 == 1) ? gauss::weights()[i / 2] : 0.0;
    }
    return r;
  }();
  return rule;
}

}  // namespace detail
}  // namespace corridor
