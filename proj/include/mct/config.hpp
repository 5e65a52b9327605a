#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace mct {

/// Error taxonomy used across the library. The CLI maps kinds to exit codes
/// (input -> 2, precondition -> 3, tolerance -> 4).
enum class ErrorKind { Input, Precondition, Tolerance };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail_input(const std::string& msg) {
  throw Error(ErrorKind::Input, msg);
}
[[noreturn]] inline void fail_precondition(const std::string& msg) {
  throw Error(ErrorKind::Precondition, msg);
}
[[noreturn]] inline void fail_tolerance(const std::string& msg) {
  throw Error(ErrorKind::Tolerance, msg);
}

/// Run-wide tolerances and knobs. Every threshold used by the pipelines is
/// pinned here; commands thread one RunConfig through all modules so a fixed
/// seed reproduces byte-identical reports.
struct RunConfig {
  double decomposition_tol = 1e-9;  // Alberti decomposition identity defect
  double lp_tol = 1e-10;            // transport-LP termination / duality slack
  double angular_tol = 1e-9;        // vector-field direction test (radians)
  double mass_tol = 1e-9;           // uncovered-mass stop in exhaustions
  double eta = 0.9;                 // efficiency threshold of mass witnesses
  double eps_pseudodual = 0.5;      // diagonal slack in the pseudodual sweep
  double delta = 0.2;               // speed threshold in cone peeling
  double cone_alpha = 1.2;          // default opening angle for axis cones
  double sigma = 0.9;               // speed parameter for cone refinement
  int truncation_M = 16;            // generating-set truncation for renorming
  double h_max = std::numeric_limits<double>::infinity();  // fragment gap cut
  double snap_tol = 1e-9;           // fill_fragment: snap-to-cloud threshold
  std::uint64_t seed = 20140416;    // fixed default seed
  int max_exhaustion_rounds = 64;
};

}  // namespace mct
