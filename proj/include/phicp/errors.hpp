#pragma once

#include <stdexcept>
#include <string>

namespace phicp {

// A requested selection is not a member of the set it was drawn from
// (e.g. 2*gamma*a < -1 for J_gamma, or a < -2*x0^2 for the quartic
// subdifferential). Kept distinct from "the set is empty": the iterative
// schemes use these as stopping signals, not as absent values.
class membership_error : public std::domain_error {
  public:
    explicit membership_error(const std::string& what) : std::domain_error(what) {}
};

// Non-finite value met during a brute-force scan; carries the offending point.
class numeric_error : public std::runtime_error {
  public:
    numeric_error(const std::string& what, double at) : std::runtime_error(what), at_(at) {}
    double at() const { return at_; }

  private:
    double at_;
};

// A problem-supplied surrogate solver reported failure. Carries the anchor
// and curvature offset of the failed subproblem plus the iteration index
// once an algorithm driver has attached it (-1 until then).
class prox_error : public std::runtime_error {
  public:
    prox_error(const std::string& what, double anchor_norm, double a0, long iteration = -1)
        : std::runtime_error(what), anchor_norm_(anchor_norm), a0_(a0), iteration_(iteration) {}
    double anchor_norm() const { return anchor_norm_; }
    double a0() const { return a0_; }
    long iteration() const { return iteration_; }
    void set_iteration(long n) { iteration_ = n; }

  private:
    double anchor_norm_;
    double a0_;
    long iteration_;
};

// The running a-schedule left the parameter region a prox formula is valid
// on (binary-penalty prox needs alpha < 1/2). Names the iteration.
class schedule_error : public std::runtime_error {
  public:
    schedule_error(const std::string& what, long iteration) : std::runtime_error(what), iteration_(iteration) {}
    long iteration() const { return iteration_; }

  private:
    long iteration_;
};

}  // namespace phicp
