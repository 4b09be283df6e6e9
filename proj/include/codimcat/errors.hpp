#pragma once

#include <stdexcept>
#include <string>

namespace codimcat {

// Base of every error the engine raises. The CLI layer catches Error and
// turns it into a structured report entry; nothing below should escape as
// an unhandled crash.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* code() const noexcept { return "error"; }
};

#define CODIMCAT_DEFINE_ERROR(Name, code_str)                       \
  class Name : public Error {                                       \
   public:                                                          \
    using Error::Error;                                             \
    const char* code() const noexcept override { return code_str; } \
  }

CODIMCAT_DEFINE_ERROR(StructuralError, "structural");
CODIMCAT_DEFINE_ERROR(ResourceExceeded, "resource-exceeded");
CODIMCAT_DEFINE_ERROR(NotWeakEquivalence, "not-weak-equivalence");
CODIMCAT_DEFINE_ERROR(LevelMismatch, "level-mismatch");
CODIMCAT_DEFINE_ERROR(DimensionMismatch, "dimension-mismatch");
CODIMCAT_DEFINE_ERROR(DenominatorInPrime, "denominator-in-prime");
CODIMCAT_DEFINE_ERROR(IntegralityRequired, "integrality-required");
CODIMCAT_DEFINE_ERROR(BadLocusTooBig, "bad-locus-too-big");
CODIMCAT_DEFINE_ERROR(SupportNotContained, "support-not-contained");
CODIMCAT_DEFINE_ERROR(VerificationFailed, "verification-failed");
CODIMCAT_DEFINE_ERROR(NotLocalIso, "not-local-iso");
CODIMCAT_DEFINE_ERROR(UncertifiedWitness, "uncertified-witness");
CODIMCAT_DEFINE_ERROR(PrimalityProbeFailed, "primality-probe-failed");
CODIMCAT_DEFINE_ERROR(NameError, "name-error");

#undef CODIMCAT_DEFINE_ERROR

// Parse errors carry a position in the session text.
class ParseError : public Error {
 public:
  ParseError(std::string msg, int line, int col)
      : Error(std::move(msg)), line_(line), col_(col) {}
  const char* code() const noexcept override { return "parse"; }
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

}  // namespace codimcat
