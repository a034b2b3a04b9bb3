#pragma once

#include <stdexcept>
#include <string>

namespace hilbertctl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Space or shape mismatch between operands.
class DimensionError : public Error {
 public:
  using Error::Error;
};

class NotSelfAdjointError : public Error {
 public:
  using Error::Error;
};

class NotPositiveError : public Error {
 public:
  NotPositiveError(const std::string& what, double min_eig)
      : Error(what), min_eig_(min_eig) {}
  double min_eig() const { return min_eig_; }

 private:
  double min_eig_;
};

/// The inverse exists on the truncation but its condition number exceeds the
/// configured cap, i.e. the inverse is not bounded in any useful sense.
class IllConditionedError : public Error {
 public:
  IllConditionedError(const std::string& what, double cond)
      : Error(what), cond_(cond) {}
  double cond() const { return cond_; }

 private:
  double cond_;
};

/// An error tied to one step k of a backward recursion.
class StepError : public Error {
 public:
  StepError(const std::string& what, int step) : Error(what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

/// P(k+1) is outside Dom(Pi_k): R(k) + B*XB + D*XD has no bounded inverse.
class DomainError : public StepError {
 public:
  using StepError::StepError;
};

class GameDomainError : public StepError {
 public:
  GameDomainError(const std::string& what, int step, double min_eig)
      : StepError(what, step), min_eig_(min_eig) {}
  double min_eig() const { return min_eig_; }

 private:
  double min_eig_;
};

class CouplingSingularError : public StepError {
 public:
  using StepError::StepError;
};

/// The zero-sum Riccati recursion lost one of its positivity conditions.
class DesignInfeasibleError : public StepError {
 public:
  DesignInfeasibleError(const std::string& what, int step, double min_eig)
      : StepError(what, step), min_eig_(min_eig) {}
  double min_eig() const { return min_eig_; }

 private:
  double min_eig_;
};

class EnumerationLimitError : public Error {
 public:
  using Error::Error;
};

class OracleScopeError : public Error {
 public:
  using Error::Error;
};

class BracketError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// A structural assumption on the system data is violated at step `step`.
class AssumptionError : public StepError {
 public:
  AssumptionError(const std::string& what, int step, double residual)
      : StepError(what, step), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class ResolutionError : public Error {
 public:
  using Error::Error;
};

class IOError : public Error {
 public:
  using Error::Error;
};

}  // namespace hilbertctl
