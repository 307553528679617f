#pragma once

// Snowball-model calibration: reviews ~ a * rating^n, installs ~ reviews^b,
// hence installs ~ a^b * rating^(n*b).

#include <cstddef>
#include <istream>
#include <optional>
#include <utility>
#include <vector>

#include "bribery/core.hpp"

namespace bribery {

class RankDeficient : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

struct Observation {
  std::optional<double> rating;
  std::optional<double> reviews;
  std::optional<double> installs;
};

struct ObservationSet {
  std::vector<Observation> rows;

  /// (rating, reviews) pairs of rows with both present.
  std::vector<std::pair<double, double>> rating_reviews() const;
  /// (reviews, installs) pairs of rows with both present.
  std::vector<std::pair<double, double>> reviews_installs() const;
};

/// CSV with header `rating,reviews,installs`; blank fields are missing.
/// Throws InvalidInput naming the line on malformed or non-positive values.
ObservationSet read_observations(std::istream& in);

struct PowerLawFit {
  double a = 0.0;
  double n = 0.0;
  double residual = 0.0;  // RMS of log residuals
  std::size_t used = 0;
};

struct LogLogFit {
  double b = 0.0;
  double residual = 0.0;
  std::size_t used = 0;
};

struct SnowballFit {
  double a = 0.0;
  double n = 0.0;
  double b = 0.0;
  double omega1 = 0.0;
  double omega2 = 0.0;
  double power_residual = 0.0;
  double loglog_residual = 0.0;
  std::size_t power_rows = 0;
  std::size_t loglog_rows = 0;
  std::size_t dropped_power_rows = 0;
  std::size_t dropped_loglog_rows = 0;
};

/// Least squares of log reviews = log a + n log rating.
PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& pairs);

/// Least squares of log installs = b log reviews, through the origin.
LogLogFit fit_loglog(const std::vector<std::pair<double, double>>& pairs);

SnowballFit compose_snowball(const PowerLawFit& power, const LogLogFit& loglog);

/// Both fits on the rows that carry the needed fields.
SnowballFit fit_snowball(const ObservationSet& data);

}  // namespace bribery
