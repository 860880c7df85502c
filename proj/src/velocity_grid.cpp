#include "hsfluct/velocity_grid.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace hsfluct {

void gauss_hermite_1d(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_hermite_1d: need at least one node");
  // Jacobi matrix of the monic probabilists' Hermite recurrence.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) J(k, k - 1) = J(k - 1, k) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  nodes.resize(static_cast<std::size_t>(n));
  weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    nodes[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    const double q = es.eigenvectors()(0, i);
    weights[static_cast<std::size_t>(i)] = q * q;
  }
}

VelocityGrid VelocityGrid::gauss_hermite(int d, int n_per_axis) {
  if (d != 2 && d != 3) throw std::invalid_argument("VelocityGrid: d must be 2 or 3");
  std::vector<double> x, w;
  gauss_hermite_1d(n_per_axis, x, w);
  VelocityGrid g;
  g.d = d;
  const std::size_t n = x.size();
  const std::size_t nz = d == 3 ? n : 1;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < nz; ++k) {
        Vec v(d);
        v[0] = x[i];
        v[1] = x[j];
        double wt = w[i] * w[j];
        if (d == 3) {
          v[2] = x[k];
          wt *= w[k];
        }
        g.nodes.push_back(v);
        g.weights.push_back(wt);
      }
  return g;
}

VelocityGrid VelocityGrid::monte_carlo(int d, std::size_t n, std::uint64_t seed) {
  if (d != 2 && d != 3) throw std::invalid_argument("VelocityGrid: d must be 2 or 3");
  if (n == 0) throw std::invalid_argument("VelocityGrid: need at least one sample");
  VelocityGrid g;
  g.d = d;
  Rng rng = make_stream(seed, 0);
  g.nodes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) g.nodes.push_back(maxwellian_sample(d, rng));
  g.weights.assign(n, 1.0 / static_cast<double>(n));
  return g;
}

double VelocityGrid::integrate(const std::function<double(const Vec&)>& f) const {
  double s = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
  return s;
}

}  // namespace hsfluct
