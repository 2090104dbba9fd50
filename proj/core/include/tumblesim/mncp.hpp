#pragma once

// Mixed nonlinear complementarity problems
//
//   G(z) = 0,   0 <= v  _|_  F(z) >= 0,   z = [u, v]
//
// solved by semismooth Newton on the Fischer-Burmeister reformulation.

#include "tumblesim/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace tumble {

struct MncpProblem {
    int n_eq = 0;
    int n_comp = 0;
    /// Writes [G(z); F(z)] into r (length n_eq + n_comp).
    std::function<void(const VecX& z, VecX& r)> residual;
    /// Optional: writes the same residual and its Jacobian with respect to z.
    std::function<void(const VecX& z, VecX& r, MatX& jac)> jacobian;

    int size() const { return n_eq + n_comp; }
};

struct SolverConfig {
    Real tolerance = 1e-10;
    int max_iters = 100;
    Real armijo_c = 1e-4;
    Real backtrack = 0.5;
    int max_backtracks = 40;
    Real regularization = 1e-12;
    Real fd_step = 1e-7;
    int smoothing_levels = 6;    // smoothed-FB continuation after a failed plain solve
    Real smoothing_start = 1e-2;

    void validate() const;
};

enum class SolveStatus { Converged, NonConvergence, SingularJacobian, NonFinite };

std::string to_string(SolveStatus s);

struct MncpResult {
    VecX z;
    SolveStatus status = SolveStatus::NonConvergence;
    int iterations = 0;
    Real residual = 0.0; // final merit
    std::vector<Real> merit_trace;

    bool converged() const { return status == SolveStatus::Converged; }
};

/// phi(a, b) = a + b - sqrt(a^2 + b^2).
inline Real fischer_burmeister(Real a, Real b) { return a + b - std::hypot(a, b); }

/// Stacked reformulation [G; phi(v_i, F_i)].
VecX fb_residual(const MncpProblem& p, const VecX& z);

/// ||fb_residual||_inf. Throws ModelError when the residual is not finite.
Real merit(const MncpProblem& p, const VecX& z);

/// Jacobian of [G; F]: analytic when the problem provides one, otherwise
/// central differences with a step scaled to each variable.
MatX jacobian(const MncpProblem& p, const VecX& z, Real fd_step = 1e-7);

/// Central-difference Jacobian of [G; F], ignoring any analytic one.
MatX fd_jacobian(const MncpProblem& p, const VecX& z, Real fd_step = 1e-7);

MncpResult solve(const MncpProblem& p, const VecX& z0, const SolverConfig& cfg = {});

} // namespace tumble
