#include "riesz/sample_fields.hpp"

#include <cmath>
#include <random>

namespace riesz {

Field random_band_limited(const GridSpec& grid, double band, std::uint64_t seed) {
  if (!(band > 0.0)) throw UsageError("band limit must be positive");
  if (band >= grid.frequency_half_width()) throw UsageError("band limit must lie inside the frequency window");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<cplx> spectrum(grid.size());
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    const Point xi = grid.frequency_point(k);
    // Draw for every cell so the stream does not depend on the band.
    const cplx draw(normal(rng), normal(rng));
    if (std::hypot(xi[0], xi[1]) <= band) spectrum[k] = draw;
  }
  return inverse_transform(Field(grid, Domain::frequency, std::move(spectrum)));
}

Field gaussian_field(const GridSpec& grid, double width, const Point& centre) {
  if (!(width > 0.0)) throw UsageError("gaussian width must be positive");
  return Field::sample(grid, Domain::spatial, [&](std::span<const double> x) {
    double r2 = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) r2 += (x[a] - centre[a]) * (x[a] - centre[a]);
    return cplx(std::exp(-r2 / (2.0 * width * width)));
  });
}

}  // namespace riesz
