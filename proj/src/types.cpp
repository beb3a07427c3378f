#include "rjlt/types.hpp"

#include <cmath>
#include <string>

#include "rjlt/errors.hpp"

namespace rjlt {

void validate(const LaplacePoint& p) {
  if (!(p.u >= 0.0) || !(p.v >= 0.0) || !std::isfinite(p.u) || !std::isfinite(p.v))
    throw ConfigError("Laplace point components must be finite and nonnegative");
}

void SamplePath::validate() const {
  if (times.size() != values.size())
    throw DataError("sample path: times and values differ in length");
  if (times.size() < 3) throw DataError("sample path: at least 3 observations required");
  if (!(times.front() >= 0.0)) throw DataError("sample path: times must start at or after 0");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1]))
      throw DataError("sample path: times not strictly increasing at index " +
                      std::to_string(i));
  }
}

void VolPath::validate() const {
  if (sigma_x.size() != times.size() || sigma_y.size() != times.size())
    throw DataError("vol path: length mismatch");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(sigma_x[i] >= 0.0) || !(sigma_y[i] >= 0.0))
      throw DataError("vol path: negative volatility at index " + std::to_string(i));
  }
}

}  // namespace rjlt
