#pragma once

#include <stdexcept>
#include <string>

namespace cbs {

/// Argument outside the domain of an operation (bad index, non-unit vector, negative s, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The generator does not have the one-dimensional stationary subspace a solve relies on.
class DegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The shift z of a resolvent coincides (numerically) with an eigenvalue of the generator.
class ResolventPoleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A frequency grid does not reach far enough into the spectral tails.
class GridCoverageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Neither the even nor the odd part of a resonance dominates its window.
class ClassificationError : public std::runtime_error {
 public:
  ClassificationError(const std::string& what, double even_fraction, double odd_fraction)
      : std::runtime_error(what), even_fraction_(even_fraction), odd_fraction_(odd_fraction) {}

  double even_fraction() const noexcept { return even_fraction_; }
  double odd_fraction() const noexcept { return odd_fraction_; }

 private:
  double even_fraction_;
  double odd_fraction_;
};

/// Filtered enhancement requested where the ladder weight vanishes.
class UndefinedEnhancementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cbs
