#include "evonet/datagen.hpp"

#include <cmath>

#include "evonet/error.hpp"

namespace evonet {

void validate(const DistributionSpec& spec) {
  switch (spec.kind) {
    case DistributionKind::kUniform:
      if (!std::isfinite(spec.lo) || !std::isfinite(spec.hi) || !(spec.lo < spec.hi)) {
        throw InvalidSpec("uniform distribution needs finite lo < hi");
      }
      if (spec.lo < 0.0) {
        throw InvalidSpec("uniform distribution needs lo >= 0 for a defined b");
      }
      return;
    case DistributionKind::kQuadrant: {
      double sum = 0.0;
      for (double v : spec.quadrant) {
        if (!std::isfinite(v)) throw InvalidSpec("quadrant values must be finite");
        sum += v;
      }
      if (sum == 0.0) throw InvalidSpec("quadrant values must have a nonzero mean");
      return;
    }
  }
}

std::string to_string(DistributionKind kind) {
  return kind == DistributionKind::kUniform ? "uniform" : "quadrant";
}

std::vector<double> generate(const DistributionSpec& spec, std::size_t rows,
                             std::size_t cols, Rng& rng) {
  validate(spec);
  std::vector<double> values(rows * cols);
  if (spec.kind == DistributionKind::kUniform) {
    const double width = spec.hi - spec.lo;
    for (double& v : values) v = spec.lo + width * rng.uniform_real();
    return values;
  }
  const std::size_t row_split = (rows + 1) / 2;
  const std::size_t col_split = (cols + 1) / 2;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t q = (r < row_split ? 0 : 2) + (c < col_split ? 0 : 1);
      values[r * cols + c] = spec.quadrant[q];
    }
  }
  return values;
}

}  // namespace evonet
