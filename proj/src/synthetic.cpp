#include "somchange/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace somchange {

std::string synthetic_stream_csv(std::size_t rows, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  auto gauss = [&](double sd) { return sd * noise(rng); };

  std::string csv = "P1,P2,P3,P4,P5,B1,B2,B3,B4,B5\n";
  char line[256];
  for (std::size_t r = 0; r < rows; ++r) {
    const double elevation = 800.0 + gauss(250.0);
    const double slope = std::max(0.1, 2.0 + 0.004 * (elevation - 800.0) + gauss(1.5));
    const double order = std::clamp(std::round(4.0 - 0.003 * (elevation - 800.0) + gauss(1.0)), 1.0, 7.0);
    const double embedded = std::clamp(40.0 - 5.0 * (slope - 2.0) + gauss(15.0), 0.0, 100.0);
    const double temperature = 18.0 - 0.006 * (elevation - 800.0) + 0.05 * (embedded - 40.0) + gauss(1.5);

    const double e = (embedded - 40.0) / 15.0;
    const double shredders = std::exp(2.5 - 0.6 * e - 0.1 * (temperature - 18.0) + gauss(0.25));
    const double filterers = std::exp(2.0 + 0.3 * std::tanh(e) + 0.15 * (order - 4.0) + gauss(0.25));
    const double gatherers = std::exp(2.8 + 0.35 * e + gauss(0.25));
    const double scrapers = std::exp(2.2 + 0.3 * e - 0.4 * e * e + gauss(0.25));
    const double predators = std::exp(1.5 - 0.3 * e + 0.1 * (order - 4.0) + gauss(0.25));

    std::snprintf(line, sizeof line, "%.4f,%.4f,%.0f,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f\n", elevation, slope, order,
                  embedded, temperature, shredders, filterers, gatherers, scrapers, predators);
    csv += line;
  }
  return csv;
}

}  // namespace somchange
