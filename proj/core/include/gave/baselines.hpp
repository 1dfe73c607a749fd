#pragma once

#include "gave/problem.hpp"
#include "gave/solver.hpp"

namespace gave {

/// Generalized Picard iteration  x <- x - A^+ (A x - B |x| - b).
/// Requires A of full column rank; deterministic, metrics every step.
SolveReport pim_solve(const GaveProblem& problem, const StopRule& stop,
                      const Vector& x0);

/// Generalized Newton method  x^{k+1} = (A - B D^k)^{-1} b with
/// D^k = diag(sign(x^k)) and sign(0) = 0. Requires m = n. Aborts with the
/// offending sign pattern when A - B D^k is singular, and detects cycling
/// sign patterns (the iteration then repeats without converging).
SolveReport gnm_solve(const GaveProblem& problem, const StopRule& stop,
                      const Vector& x0);

/// State of the alternating projection method on w = (u, v) in R^{2n}:
/// C1 = {w : T w = sqrt(2) b} with T = [A-B  -A-B], and C2 the complementarity
/// cone {u, v >= 0, <u, v> = 0}. x is recovered as (u - v)/sqrt(2).
struct MapState {
  Matrix T;
  Matrix T_pinv;
};

MapState make_map_state(const GaveProblem& problem);

/// Exact projection onto C1: w - T^+ (T w - sqrt(2) b).
Vector map_project_affine(const MapState& state, const GaveProblem& problem,
                          const Vector& w);

/// Componentwise projection onto C2; ties u_i = v_i take the (0, (v_i)_+)
/// branch.
Vector map_project_cone(const Vector& w);

/// Method of alternating projections  w <- P_{C1}(P_{C2}(w)). One iteration
/// costs two full passes, so full_iterations = 2k. Non-convergence surfaces
/// as MaxIters.
SolveReport map_solve(const GaveProblem& problem, const StopRule& stop,
                      const Vector& w0);

}  // namespace gave
