#include "hzn/rng.hpp"

#include <cmath>

namespace hzn {

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = uniform01();
  const double u2 = uniform01();
  // log1p(-u1) = log(1 - u1), and 1 - u1 is in (0, 1], so the log is finite.
  const double r = std::sqrt(-2.0 * std::log1p(-u1));
  const double a = 6.283185307179586476925286766559 * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

}  // namespace hzn
