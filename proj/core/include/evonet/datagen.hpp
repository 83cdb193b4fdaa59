#ifndef EVONET_DATAGEN_HPP
#define EVONET_DATAGEN_HPP

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "evonet/rng.hpp"

namespace evonet {

enum class DistributionKind { kUniform, kQuadrant };

// Initial value layout. Quadrant data assigns one value per lattice quadrant:
// v[0] top-left, v[1] top-right, v[2] bottom-left, v[3] bottom-right, with
// the split at ceil(rows/2), ceil(cols/2).
struct DistributionSpec {
  DistributionKind kind = DistributionKind::kUniform;
  double lo = 0.0;
  double hi = 1.0;
  std::array<double, 4> quadrant{1.0, 2.0, 3.0, 4.0};

  static DistributionSpec uniform(double lo, double hi) {
    return {DistributionKind::kUniform, lo, hi, {1.0, 2.0, 3.0, 4.0}};
  }
  static DistributionSpec quadrants(std::array<double, 4> values) {
    return {DistributionKind::kQuadrant, 0.0, 1.0, values};
  }

  bool operator==(const DistributionSpec&) const = default;
};

// Throws InvalidSpec unless the generated data is guaranteed a nonzero mean:
// uniform needs 0 <= lo < hi, quadrant needs a nonzero mean of its values.
void validate(const DistributionSpec& spec);

// "uniform" / "quadrant"
std::string to_string(DistributionKind kind);

// One value per node, node (r, c) at index r * cols + c. Uniform draws are
// independent in [lo, hi) in index order.
std::vector<double> generate(const DistributionSpec& spec, std::size_t rows,
                             std::size_t cols, Rng& rng);

}  // namespace evonet

#endif  // EVONET_DATAGEN_HPP
