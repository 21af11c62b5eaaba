#pragma once

#include <functional>
#include <string>

#include "geocut/manifold.hpp"

namespace geocut {

/// First-order oracle for a geodesically convex function: evaluation plus a
/// subgradient, with a declared Lipschitz constant valid on the domain the
/// oracle was built for.
struct SubgradientOracle {
  std::function<double(const Point&)> eval;
  std::function<Tangent(const Point&)> subgrad;
  double lipschitz = 0.0;
  std::string name;
};

}  // namespace geocut
