#pragma once

#include <stdexcept>
#include <string>

namespace gaussmink {

enum class ErrorKind {
  InvalidArgument,
  Infeasible,     // measure or density violates a solvability hypothesis
  NoConvergence,  // iterative solver gave up
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error invalid_argument(const std::string& what) { return Error(ErrorKind::InvalidArgument, what); }
inline Error infeasible(const std::string& what) { return Error(ErrorKind::Infeasible, what); }
inline Error no_convergence(const std::string& what) { return Error(ErrorKind::NoConvergence, what); }

}  // namespace gaussmink
