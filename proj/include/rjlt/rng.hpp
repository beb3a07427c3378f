#pragma once

#include <cstdint>
#include <random>

namespace rjlt {

// A seeded random stream identified by (master_seed, stream, substream).
// Two streams with the same key produce identical sequences; different keys
// are decorrelated through std::seed_seq.  Replication r of an experiment
// uses stream r, so results do not depend on scheduling.
class RngStream {
 public:
  explicit RngStream(std::uint64_t master_seed, std::uint64_t stream = 0,
                     std::uint64_t substream = 0);

  // Child stream sharing this stream's key with a different substream tag.
  RngStream child(std::uint64_t tag) const;

  double normal() { return normal_(engine_); }
  // Uniform on the open interval (0, 1).
  double uniform_open();
  double exponential() { return exponential_(engine_); }
  std::uint64_t poisson(double mean);

  std::mt19937_64& engine() { return engine_; }

  std::uint64_t master_seed() const { return master_; }
  std::uint64_t stream_id() const { return stream_; }
  std::uint64_t substream_id() const { return substream_; }

 private:
  std::uint64_t master_;
  std::uint64_t stream_;
  std::uint64_t substream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::exponential_distribution<double> exponential_{1.0};
};

}  // namespace rjlt
