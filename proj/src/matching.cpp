#include "metamorph/matching.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "metamorph/errors.hpp"

namespace metamorph {

ShootResult shoot(std::span<const double> q0, std::span<const double> p0, int n,
                  int d, const LandmarkSystem& system, double T, int steps) {
  if (system.u_channels() > 0 || system.has_template_noise()) {
    throw std::invalid_argument("shoot: noise channels must be empty");
  }
  const std::size_t nd = static_cast<std::size_t>(n) * d;
  if (q0.size() != nd || p0.size() != nd) {
    throw std::invalid_argument("shoot: q0/p0 shape mismatch");
  }
  const LandmarkSdeSystem adapter(system, n, d);
  std::vector<double> x0(q0.begin(), q0.end());
  x0.insert(x0.end(), p0.begin(), p0.end());
  WienerPath empty;
  empty.dt = T / steps;
  empty.steps = steps;
  ShootResult result;
  result.trajectory = integrate_path(adapter, x0, T, steps, empty, Method::heun);
  const std::vector<double>& final = result.trajectory.back();
  result.q_final.assign(final.begin(), final.begin() + nd);
  return result;
}

void MatchProblem::validate() const {
  const std::size_t nd = static_cast<std::size_t>(n) * d;
  if (n < 1 || d < 1 || q0.size() != nd || q_target.size() != nd) {
    throw std::invalid_argument("match: q0/q_target shape mismatch");
  }
  if (system.u_channels() > 0 || system.has_template_noise()) {
    throw std::invalid_argument("match: system must carry no noise");
  }
  if (!(T > 0.0) || steps < 1) throw std::invalid_argument("match: bad horizon");
  if (!(tol > 0.0)) throw std::invalid_argument("match: tol must be positive");
  if (max_iterations < 1) throw std::invalid_argument("match: max_iterations must be >= 1");
  system.validate(n, d);
}

PathEnergy path_energy(const Trajectory& trajectory, const LandmarkSystem& system,
                       int n, int d) {
  const int M = trajectory.steps();
  const std::size_t nd = static_cast<std::size_t>(n) * d;
  const double lam2 = system.lambda * system.lambda;
  PathEnergy energy;
  double prev_def = 0.0, prev_tem = 0.0;
  for (int m = 0; m <= M; ++m) {
    LandmarkState s;
    s.n = n;
    s.d = d;
    const std::vector<double>& x = trajectory.states[m];
    s.q.assign(x.begin(), x.begin() + nd);
    s.p.assign(x.begin() + nd, x.end());
    const double def = h_kernel(s, system.kernel);
    double p2 = 0.0;
    for (double v : s.p) p2 += v * v;
    const double tem = 0.5 * lam2 * p2;
    if (m > 0) {
      const double dt = trajectory.times[m] - trajectory.times[m - 1];
      energy.deformation += 0.5 * dt * (prev_def + def);
      energy.template_part += 0.5 * dt * (prev_tem + tem);
    }
    prev_def = def;
    prev_tem = tem;
  }
  energy.total = energy.deformation + energy.template_part;
  return energy;
}

namespace {

double frobenius(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

MatchResult match_landmarks(const MatchProblem& problem) {
  problem.validate();
  const int n = problem.n, d = problem.d;
  const int nd = n * d;
  const double k0 = kernel_eval(problem.system.kernel, std::vector<double>(d, 0.0));
  const double lam2 = problem.system.lambda * problem.system.lambda;
  const double speed = (k0 + lam2) * problem.T;

  auto residual_of = [&](const std::vector<double>& p0) {
    const ShootResult r =
        shoot(problem.q0, p0, n, d, problem.system, problem.T, problem.steps);
    std::vector<double> res(nd);
    for (int i = 0; i < nd; ++i) res[i] = r.q_final[i] - problem.q_target[i];
    return res;
  };

  // Row-wise warm start; exact for a single landmark.
  std::vector<double> p(nd);
  for (int i = 0; i < nd; ++i) p[i] = (problem.q_target[i] - problem.q0[i]) / speed;

  std::vector<double> res = residual_of(p);
  double res_norm = frobenius(res);
  std::vector<double> best_p = p;
  double best_norm = res_norm;
  int iterations = 0;
  bool converged = res_norm < problem.tol;

  // Path-energy Gram matrix at q0 for the penalty mode (h is conserved along
  // solutions, so T * h(q0, p0) is the path energy of the shot).
  Eigen::MatrixXd reg;
  if (problem.penalty_s > 0.0) {
    reg = Eigen::MatrixXd::Zero(nd, nd);
    std::vector<double> diff(d);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < d; ++k) {
          diff[k] = problem.q0[i * d + k] - problem.q0[j * d + k];
        }
        const double kij = kernel_eval(problem.system.kernel, diff);
        for (int k = 0; k < d; ++k) reg(i * d + k, j * d + k) += kij;
      }
      for (int k = 0; k < d; ++k) reg(i * d + k, i * d + k) += lam2;
    }
    reg *= problem.T;
  }

  while (!converged && iterations < problem.max_iterations) {
    ++iterations;
    // Forward-difference Jacobian of the endpoint map, column per momentum.
    const double h = 1e-6 * (1.0 + frobenius(p));
    Eigen::MatrixXd J(nd, nd);
    std::vector<double> pj = p;
    for (int j = 0; j < nd; ++j) {
      pj[j] += h;
      const std::vector<double> rj = residual_of(pj);
      pj[j] = p[j];
      for (int i = 0; i < nd; ++i) J(i, j) = (rj[i] - res[i]) / h;
    }

    Eigen::VectorXd F(nd);
    for (int i = 0; i < nd; ++i) F(i) = res[i];
    Eigen::VectorXd step;
    if (problem.penalty_s > 0.0) {
      const double w = 1.0 / (problem.penalty_s * problem.penalty_s);
      Eigen::VectorXd pv(nd);
      for (int i = 0; i < nd; ++i) pv(i) = p[i];
      const Eigen::MatrixXd A = w * J.transpose() * J + reg;
      const Eigen::VectorXd b = -(w * J.transpose() * F + reg * pv);
      step = A.ldlt().solve(b);
    } else {
      step = J.colPivHouseholderQr().solve(-F);
    }

    // Backtracking on the residual norm; blow-ups count as rejected trials.
    double alpha = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= 30; ++halving) {
      std::vector<double> trial = p;
      for (int i = 0; i < nd; ++i) trial[i] += alpha * step(i);
      try {
        const std::vector<double> trial_res = residual_of(trial);
        const double trial_norm = frobenius(trial_res);
        if (trial_norm < res_norm) {
          p = std::move(trial);
          res = trial_res;
          res_norm = trial_norm;
          accepted = true;
          break;
        }
      } catch (const BlowupError&) {
        // shrink and retry
      }
      alpha *= 0.5;
    }
    if (res_norm < best_norm) {
      best_p = p;
      best_norm = res_norm;
    }
    if (res_norm < problem.tol) {
      converged = true;
      break;
    }
    if (!accepted) break;  // line search stalled
  }

  MatchResult result;
  result.p0 = best_p;
  result.residual = best_norm;
  result.iterations = iterations;
  result.converged = best_norm < problem.tol;
  const ShootResult final_shot =
      shoot(problem.q0, best_p, n, d, problem.system, problem.T, problem.steps);
  const PathEnergy energy = path_energy(final_shot.trajectory, problem.system, n, d);
  result.energy_total = energy.total;
  result.energy_deformation = energy.deformation;
  result.energy_template = energy.template_part;
  return result;
}

}  // namespace metamorph
