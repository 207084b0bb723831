#pragma once

namespace spheresep {

/// Numeric thresholds shared by every floating-point check. Defaults are the
/// documented module defaults; every CLI flag --tol-* overrides one field.
struct Tolerances {
  double unit = 1e-12;         ///< |x|^2 = 1, tangency, orthonormality
  double rank = 1e-8;          ///< relative singular-value cut for nullspaces
  double commute = 1e-9;       ///< PASS threshold for verify_stackel residuals
  double nijenhuis = 1e-9;     ///< precondition threshold in stackel extraction
  double eigen_gap = 1e-8;     ///< minimal eigenvalue separation
  double orthogonal = 1e-6;    ///< PASS threshold for pulled-back metric
  double identity_span = 1e-10;///< distance of the metric form from a span
  double gap_ratio = 1e3;      ///< minimal kept/discarded singular-value ratio
};

}  // namespace spheresep
