#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace certibif {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation was applied outside its mathematical domain
/// (division by an interval containing zero, fractional power of a negative number, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A hypothesis of a validation theorem could not be verified.
/// `stage()` names the hypothesis or inequality that broke.
class ValidationFailed : public Error {
 public:
  ValidationFailed(std::string stage, const std::string& detail)
      : Error(stage + ": " + detail), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// The inverse-bounds lemma could not show invertibility (||I - BA|| >= 1).
class NotInvertibleEvidence : public ValidationFailed {
 public:
  explicit NotInvertibleEvidence(const std::string& detail)
      : ValidationFailed("inverse_bound", detail) {}
};

class CorrectorFailed : public Error {
 public:
  using Error::Error;
};

class TangentUndefined : public Error {
 public:
  using Error::Error;
};

/// A bifurcation certificate could not be issued; `stage()` names the failing step.
class CertificationFailed : public ValidationFailed {
 public:
  using ValidationFailed::ValidationFailed;
};

class ConditionInconclusive : public ValidationFailed {
 public:
  ConditionInconclusive(const std::string& condition, const std::string& detail)
      : ValidationFailed(condition, detail) {}
};

class SpectrumInconclusive : public ValidationFailed {
 public:
  explicit SpectrumInconclusive(const std::string& detail)
      : ValidationFailed("spectrum", detail) {}
};

class OrbitDiverged : public Error {
 public:
  using Error::Error;
};

class RotationUndefined : public Error {
 public:
  using Error::Error;
};

}  // namespace certibif
