#pragma once

#include <stdexcept>
#include <string>

namespace srm {

/// Bad input: wrong dimension, index out of range, non-positive inertia, ...
class InvalidArgument : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// The inputs are well formed but violate a mathematical hypothesis the
/// computation relies on (tied inertias in the independence check, I2 >= I3
/// for the rolling curves).
class HypothesisViolated : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

/// Base for failures of a numerical procedure on valid input.
class NumericalFailure : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class StepFailure : public NumericalFailure
{
public:
  StepFailure(long step, const std::string & what)
      : NumericalFailure("step " + std::to_string(step) + ": " + what), step_(step)
  {}

  long step() const noexcept { return step_; }

private:
  long step_;
};

class UnsupportedDegree : public NumericalFailure
{
public:
  using NumericalFailure::NumericalFailure;
};

class ConditioningError : public NumericalFailure
{
public:
  using NumericalFailure::NumericalFailure;
};

class NotApplicable : public std::logic_error
{
public:
  using std::logic_error::logic_error;
};

}  // namespace srm
