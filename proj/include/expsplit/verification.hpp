#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace expsplit {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
};

/// Dense e^{M} by Taylor series with scaling and squaring; independent of the
/// eigensolver paths, used as an oracle.
Eigen::MatrixXd dense_expm(const Eigen::MatrixXd& m);

/// Oracle and property checks on tiny grids (what `expsplit verify` runs).
std::vector<CheckResult> run_verification(std::uint64_t seed = 7);

}  // namespace expsplit
