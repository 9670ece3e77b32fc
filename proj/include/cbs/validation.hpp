#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cbs/core_model.hpp"

namespace cbs {

/// How `actual` is compared with `expected` and `tol`.
enum class CheckMode {
  relative,  ///< |actual - expected| <= tol |expected|
  absolute,  ///< |actual - expected| <= tol
  at_most,   ///< actual <= tol
  at_least,  ///< actual >= tol
  below      ///< actual < tol
};

std::string to_string(CheckMode mode);

struct CheckRecord {
  int criterion = 0;
  std::string check;
  double expected = 0.0;
  double actual = 0.0;
  double tol = 0.0;
  CheckMode mode = CheckMode::relative;
  bool pass = false;
};

CheckRecord make_check(int criterion, std::string check, double expected, double actual, double tol, CheckMode mode);

struct ValidationOptions {
  /// Multiplies every numeric tolerance except runtime budgets and sign tests.
  double tolerance_scale = 1.0;
  std::size_t mc_samples = 100000;
  std::uint64_t mc_seed = 1;
};

/// "default" (scale 1) or "strict" (scale 1/2); throws DomainError otherwise.
ValidationOptions validation_profile(const std::string& name);

using CheckSink = std::function<void(const CheckRecord&)>;

/// Runs the full acceptance suite (criteria 1 to 13). Each record is passed to
/// `sink` as soon as it is produced and also returned.
std::vector<CheckRecord> run_validation(const ValidationOptions& options, const CheckSink& sink = {});

/// Intensities at order |g|^2 recovered from nonperturbative steady states of
/// L0 + g V+ + g* V- at |g| = `modulus`, averaged over `phases` values of arg g
/// and divided by |g|^2.
struct FourierIntensities {
  double ladder = 0.0;
  double crossed = 0.0;
};

FourierIntensities fourier_intensities(const PhysParams& params, const Configuration& cfg, double modulus = 1e-3,
                                       int phases = 8);

}  // namespace cbs
