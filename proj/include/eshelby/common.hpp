#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace eshelby {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

// Error taxonomy shared by all modules. The CLI maps InputError to exit code 1.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input: bad files, missing keys, unsupported option values.
struct InputError : Error {
  using Error::Error;
};

// Mathematically invalid parameters (non-positive axes, complex roots, ...).
struct DomainError : Error {
  using Error::Error;
};

// Evaluation at a singular point (e.g. a Green function at the origin).
struct SingularityError : DomainError {
  using DomainError::DomainError;
};

// Structurally broken data (asymmetric stiffness matrix, wrong sparsity).
struct StructuralError : Error {
  using Error::Error;
};

// Worker-count cap honoured by every parallel loop in the library.
void set_max_threads(int n);
int max_threads();

// Runs body(begin, end) over contiguous chunks of [0, n). Runs inline when
// only one worker is allowed or the range is small.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 1);

constexpr double pi = 3.14159265358979323846;

}  // namespace eshelby
