#pragma once

#include <stdexcept>
#include <string>

namespace jerkpath {

// Bad caller input: non-finite values, out-of-range queries, malformed files.
class invalid_argument_error : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

// A requested motion cannot be realized within the kinematic limits. Carries the
// smallest boundary residual that was observed while searching, for diagnostics.
class infeasible_error : public std::runtime_error {
   public:
    explicit infeasible_error(const std::string& what, double residual = 0.0) : std::runtime_error(what), residual_(residual) {}

    double residual() const noexcept {
        return residual_;
    }

   private:
    double residual_;
};

// A path without any motion (all samples equal within the position tolerance).
class degenerate_path_error : public invalid_argument_error {
   public:
    using invalid_argument_error::invalid_argument_error;
};

// Progress along a path stopped for too many consecutive steps.
class stall_error : public infeasible_error {
   public:
    using infeasible_error::infeasible_error;
};

// Something that should hold by construction did not.
class internal_error : public std::logic_error {
   public:
    using std::logic_error::logic_error;
};

}  // namespace jerkpath
