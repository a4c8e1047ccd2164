#pragma once

#include <stdexcept>
#include <string>

namespace opf {

// Root of every error the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Heap used out of protocol: double insert, unknown id, decrease on a
// node that is not queued.
class StructuralMisuseError : public Error {
 public:
  using Error::Error;
};

class RejectedUpdateError : public Error {
 public:
  using Error::Error;
};

class EmptyPopError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

// Input outside a distance's domain, or a guarded denominator/log hit in
// strict mode.
class DomainError : public Error {
 public:
  using Error::Error;
};

class DegenerateTrainingError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class VersionError : public Error {
 public:
  using Error::Error;
};

class MissingClassError : public Error {
 public:
  MissingClassError(const std::string& what, int label) : Error(what), label_(label) {}
  int label() const noexcept { return label_; }

 private:
  int label_;
};

class SplitError : public Error {
 public:
  using Error::Error;
};

class ConversionError : public Error {
 public:
  using Error::Error;
};

class DegenerateTestError : public Error {
 public:
  using Error::Error;
};

class EmptyPlanError : public Error {
 public:
  using Error::Error;
};

class EmptySummaryError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace opf
