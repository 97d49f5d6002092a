#pragma once

#include <stdexcept>
#include <string>

namespace sandwich {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// f returned NaN or +/-inf at a probe point (psi undefined near theta)
class NonFiniteEvaluation : public Error {
 public:
  using Error::Error;
};

class SingularJacobian : public Error {
 public:
  using Error::Error;
};

// bread failed the pivot threshold: non-identified stacked system
class SingularBread : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class RankDeficientDesign : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class DegenerateWeights : public Error {
 public:
  using Error::Error;
};

}  // namespace sandwich
