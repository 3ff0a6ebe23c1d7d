#pragma once

#include <cstdint>

namespace sepc {

/// Run-wide parameters. Every random draw in the pipeline derives from
/// `seed`, so a run is reproducible from this struct alone.
struct Config {
  int n_imp = 0;                    // opposite-label points allowed per partition
  double tol_fit = 1e-7;            // MVE duality-gap tolerance
  double tol_qp = 1e-9;             // RCH QP duality-gap tolerance
  double tol_membership = 1e-9;     // boundary slack for containment tests
  double abstain_band = 0.05;       // abstain when |posterior - 0.5| < band
  double jitter_radius_frac = 0.01; // noise half-width for constant features
  std::uint64_t seed = 0;
  int folds = 0;                    // 0 = plain train/test split
  double test_fraction = 0.2;

  void validate() const;  // throws InvalidParam
};

}  // namespace sepc
