#include "gibbstree/quadratic_surd.hpp"

#include <cmath>

namespace gibbstree {

double to_double(const QuadraticSurd& x) {
  return x.rational_.get_d() + x.irrational_.get_d() * std::sqrt(x.radicand_.get_d());
}

}  // namespace gibbstree
