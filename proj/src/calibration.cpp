#include "bribery/calibration.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace bribery {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidInput(std::string(what) + " must be positive and finite");
  }
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_field(const std::string& raw, std::size_t line,
                                  const char* name) {
  const std::string field = trim(raw);
  if (field.empty()) return std::nullopt;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(field, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != field.size()) {
    throw InvalidInput("line " + std::to_string(line) + ": " + name + " '" +
                       field + "' is not a number");
  }
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidInput("line " + std::to_string(line) + ": " + name +
                       " must be positive");
  }
  return v;
}

}  // namespace

std::vector<std::pair<double, double>> ObservationSet::rating_reviews() const {
  std::vector<std::pair<double, double>> out;
  for (const auto& r : rows) {
    if (r.rating && r.reviews) out.emplace_back(*r.rating, *r.reviews);
  }
  return out;
}

std::vector<std::pair<double, double>> ObservationSet::reviews_installs() const {
  std::vector<std::pair<double, double>> out;
  for (const auto& r : rows) {
    if (r.reviews && r.installs) out.emplace_back(*r.reviews, *r.installs);
  }
  return out;
}

ObservationSet read_observations(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "rating,reviews,installs") {
    throw InvalidInput("line 1: expected header 'rating,reviews,installs'");
  }
  ObservationSet data;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    if (fields.size() != 3) {
      throw InvalidInput("line " + std::to_string(number) + ": expected 3 fields, got " +
                         std::to_string(fields.size()));
    }
    Observation obs{parse_field(fields[0], number, "rating"),
                    parse_field(fields[1], number, "reviews"),
                    parse_field(fields[2], number, "installs")};
    if (obs.rating && *obs.rating > 1.0) {
      throw InvalidInput("line " + std::to_string(number) + ": rating must lie in (0, 1]");
    }
    data.rows.push_back(obs);
  }
  return data;
}

PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 2) {
    throw RankDeficient("power-law fit needs at least two observations");
  }
  double sx = 0, sy = 0;
  for (const auto& [r, rev] : pairs) {
    require_positive(r, "rating");
    require_positive(rev, "reviews");
    sx += std::log(r);
    sy += std::log(rev);
  }
  const double count = static_cast<double>(pairs.size());
  const double mx = sx / count;
  const double my = sy / count;
  double sxx = 0, sxy = 0;
  for (const auto& [r, rev] : pairs) {
    const double dx = std::log(r) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(rev) - my);
  }
  if (sxx == 0.0) {
    throw RankDeficient("power-law fit needs at least two distinct ratings");
  }
  PowerLawFit fit;
  fit.n = sxy / sxx;
  const double log_a = my - fit.n * mx;
  fit.a = std::exp(log_a);
  double ss = 0;
  for (const auto& [r, rev] : pairs) {
    const double e = std::log(rev) - (log_a + fit.n * std::log(r));
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / count);
  fit.used = pairs.size();
  return fit;
}

LogLogFit fit_loglog(const std::vector<std::pair<double, double>>& pairs) {
  double sxx = 0, sxy = 0;
  for (const auto& [rev, ins] : pairs) {
    require_positive(rev, "reviews");
    require_positive(ins, "installs");
    const double x = std::log(rev);
    sxx += x * x;
    sxy += x * std::log(ins);
  }
  if (sxx == 0.0) {
    throw RankDeficient("log-log fit needs at least one review count other than 1");
  }
  LogLogFit fit;
  fit.b = sxy / sxx;
  double ss = 0;
  for (const auto& [rev, ins] : pairs) {
    const double e = std::log(ins) - fit.b * std::log(rev);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / static_cast<double>(pairs.size()));
  fit.used = pairs.size();
  return fit;
}

SnowballFit compose_snowball(const PowerLawFit& power, const LogLogFit& loglog) {
  SnowballFit fit;
  fit.a = power.a;
  fit.n = power.n;
  fit.b = loglog.b;
  fit.omega1 = std::pow(power.a, loglog.b);
  fit.omega2 = power.n * loglog.b;
  fit.power_residual = power.residual;
  fit.loglog_residual = loglog.residual;
  fit.power_rows = power.used;
  fit.loglog_rows = loglog.used;
  return fit;
}

SnowballFit fit_snowball(const ObservationSet& data) {
  const auto rr = data.rating_reviews();
  const auto ri = data.reviews_installs();
  auto fit = compose_snowball(fit_power_law(rr), fit_loglog(ri));
  fit.dropped_power_rows = data.rows.size() - rr.size();
  fit.dropped_loglog_rows = data.rows.size() - ri.size();
  return fit;
}

}  // namespace bribery
