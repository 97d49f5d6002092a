#include "sandwich/rng.hpp"

#include "sandwich/stats.hpp"

namespace sandwich {

double Rng::uniform() {
  for (;;) {
    // top 53 bits scaled into [0, 1); reject exact zero
    const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    if (u > 0.0) {
      return u;
    }
  }
}

double Rng::normal() { return stats::normal_quantile(uniform()); }

}  // namespace sandwich
