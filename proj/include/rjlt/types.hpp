#pragma once

#include <cstddef>
#include <vector>

namespace rjlt {

// Argument (u, v) of the joint Laplace transform; both components >= 0.
struct LaplacePoint {
  double u = 0.0;
  double v = 0.0;

  friend bool operator==(const LaplacePoint&, const LaplacePoint&) = default;
};

void validate(const LaplacePoint& p);

// One observed (log-)price series.  Times are in days, strictly increasing.
struct SamplePath {
  std::vector<double> times;
  std::vector<double> values;

  std::size_t size() const { return times.size(); }
  std::size_t n_increments() const { return times.empty() ? 0 : times.size() - 1; }

  // Throws DataError unless times are strictly increasing, start >= 0,
  // lengths agree and there are at least 3 observations.
  void validate() const;
};

// Latent spot volatilities on the simulation nodes.  sigma_*[k] is the
// left-limit value that applies over (times[k], times[k+1]].
struct VolPath {
  std::vector<double> times;
  std::vector<double> sigma_x;
  std::vector<double> sigma_y;

  std::size_t size() const { return times.size(); }
  void validate() const;
};

}  // namespace rjlt
