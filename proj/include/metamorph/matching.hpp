#pragma once

#include <span>
#include <vector>

#include "metamorph/landmark.hpp"

namespace metamorph {

struct ShootResult {
  std::vector<double> q_final;  // n x d
  Trajectory trajectory;
};

// Integrates the deterministic metamorphosis flow
//   dq_i = sum_j K(q_i - q_j) p_j + lambda^2 p_i,  dp_i = -d h_K / d q_i
// with the Heun stepper. The system must carry no noise channels.
ShootResult shoot(std::span<const double> q0, std::span<const double> p0, int n,
                  int d, const LandmarkSystem& system, double T, int steps);

struct MatchProblem {
  int n = 0;
  int d = 0;
  std::vector<double> q0;        // source positions, n x d
  std::vector<double> q_target;  // target positions, n x d
  LandmarkSystem system;         // all noise off
  double T = 1.0;
  int steps = 100;
  double tol = 1e-6;
  int max_iterations = 50;
  // > 0 switches to inexact matching with data weight 1/(2 s^2) plus the
  // path-energy regularizer; useful for ill-posed lambda = 0 problems.
  double penalty_s = 0.0;

  void validate() const;
};

struct MatchResult {
  std::vector<double> p0;  // initial momenta, n x d
  double residual = 0.0;   // |q(T; p0) - q_target| (Frobenius)
  int iterations = 0;
  bool converged = false;
  double energy_total = 0.0;
  double energy_deformation = 0.0;  // int 1/2 |u|_K^2 dt
  double energy_template = 0.0;     // int (lambda^2/2) sum |p_i|^2 dt
};

// Gauss-Newton on F(p0) = q(T; p0) - q_target with forward-difference
// Jacobian and backtracking line search. Non-convergence returns the best
// iterate with converged = false.
MatchResult match_landmarks(const MatchProblem& problem);

struct PathEnergy {
  double total = 0.0;
  double deformation = 0.0;
  double template_part = 0.0;
};

// Trapezoid quadrature along the trajectory of h_K and (lambda^2/2) sum |p|^2.
PathEnergy path_energy(const Trajectory& trajectory, const LandmarkSystem& system,
                       int n, int d);

}  // namespace metamorph
