#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace odeident {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

enum class errc {
    invalid_argument,
    dimension_mismatch,
    not_a_dag,
    singular_matrix,
    numerical_failure,
    unknown_condition,
    parse_error,
    io_error,
};

/// Error type carried across the whole core; the C API maps errc to status codes.
class Error : public std::runtime_error {
  public:
    Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const { return code_; }

  private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, errc code, const std::string& what) {
    if (!ok) fail(code, what);
}

}  // namespace odeident
