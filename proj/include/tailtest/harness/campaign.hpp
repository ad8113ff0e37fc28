#pragma once

#include "tailtest/tail_inference.hpp"

#include <cstdint>
#include <functional>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tailtest::harness {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Method tag for the likelihood-ratio baseline; other tags are nuisance methods.
inline constexpr const char* kLrTag = "lr";

struct SimCampaign {
  Index k = 6;
  Index n = 200;
  int reps = 500;
  double nu0 = 5.0;
  std::vector<double> alternatives{5.0};  // true nu values
  Vector mu;                              // zero when empty
  Matrix sigma;                           // identity when empty
  std::vector<std::string> methods{"mecov"};
  double alpha = 0.05;
  Side side = Side::Two;
  std::uint64_t seed = 20240101;
  unsigned threads = 0;  // 0 = hardware concurrency
  McdOptions mcd;

  [[nodiscard]] TParams truth(double nu) const;
  void validate() const;  // throws ConfigError
};

struct CampaignCell {
  std::string method;
  double nu = 0.0;
  int reps = 0;        // replications with a valid decision
  int rejections = 0;
  int failures = 0;    // replications where the procedure threw
  double frequency = 0.0;
  double se = 0.0;     // sqrt(p (1 - p) / reps)
};

struct CampaignResult {
  SimCampaign campaign;
  std::vector<CampaignCell> cells;  // ordered by (method, nu) as configured
  double wall_seconds = 0.0;
};

/**
 * Flat `key = value` configuration, `#` comments. Keys: k, n, reps, nu0,
 * alternatives, mu, sigma, methods, alpha, side, seed, threads, mcd_starts.
 * Lists are comma separated; sigma is row-major k*k values or `identity`.
 */
[[nodiscard]] SimCampaign parse_campaign(std::istream& in);
[[nodiscard]] SimCampaign parse_campaign_file(const std::string& path);

/// Seed of the sample drawn for (nu, rep). Every method sees the same sample.
[[nodiscard]] std::uint64_t sample_seed(std::uint64_t master, double nu, int rep);

/// Run body(i) for i in [0, count) on up to `threads` workers; rethrows the first exception.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

[[nodiscard]] CampaignResult run_campaign(const SimCampaign& campaign);

}  // namespace tailtest::harness
