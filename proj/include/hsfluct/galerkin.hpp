// Deterministic semigroup oracles on a Hermite polynomial space: the
// truncated exponential series of L for velocity-only data, and a single
// Fourier mode in x with the transport multiplier -2 pi i k.v added.
#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "hsfluct/collision_operator.hpp"
#include "hsfluct/core.hpp"

namespace hsfluct {

/// Orthonormal products of normalised Hermite polynomials He_n / sqrt(n!)
/// with total degree <= P.
class HermiteBasis {
 public:
  HermiteBasis(int d, int max_degree);

  int d() const { return d_; }
  int max_degree() const { return P_; }
  std::size_t size() const { return index_.size(); }
  const std::array<int, kMaxDim>& multi_index(std::size_t i) const { return index_[i]; }

  /// Values of every basis function at v.
  void evaluate(const Vec& v, Eigen::VectorXd& out) const;

  /// L^2(M) projection of f, by a Gauss-Hermite rule exact for polynomials
  /// of degree deg(f) + P when f is a polynomial of degree deg(f).
  Eigen::VectorXd project(const VelocityFunction& f, int f_degree = -1) const;

  /// Matrix of multiplication by v_j, truncated to the basis.
  Eigen::SparseMatrix<double> velocity_multiplier(int j) const;

  /// Bound on the operator norm of any velocity_multiplier: the largest root
  /// of He_{P+1}.
  double multiplier_norm_bound() const;

 private:
  int d_, P_;
  std::vector<std::array<int, kMaxDim>> index_;
};

struct GalerkinOptions {
  int max_degree = 6;
  std::size_t samples = 400000;  // Monte Carlo points for the weak form
  int batches = 8;
  std::uint64_t seed = 20240611;
  bool collisions = true;  // false: transport only
};

/// Weak form A_ij = <phi_i, L phi_j> = -(c_d / 4) E[|w| dphi_i dphi_j] with
/// v, v* ~ M and eta cosine-weighted around w = v - v*, dphi = phi(v') +
/// phi(v*') - phi(v) - phi(v*). Symmetric and negative semidefinite.
class GalerkinModel {
 public:
  GalerkinModel(int d, const GalerkinOptions& options = {});

  const HermiteBasis& basis() const { return basis_; }
  const Eigen::MatrixXd& matrix() const { return A_; }
  const std::vector<Eigen::MatrixXd>& batch_matrices() const { return batches_; }
  /// Spectral radius of A.
  double spectral_radius() const { return rho_; }
  bool collisions() const { return options_.collisions; }
  const GalerkinOptions& options() const { return options_; }

 private:
  GalerkinOptions options_;
  HermiteBasis basis_;
  Eigen::MatrixXd A_;
  std::vector<Eigen::MatrixXd> batches_;
  double rho_ = 0.0;
};

struct SeriesResult {
  double value = 0.0;
  double imag = 0.0;
  /// Spread of the value over the independent weak-form batches.
  double stderr_ = 0.0;
  double tail_bound = 0.0;
  int terms = 0;
};

class SeriesTruncationError : public std::runtime_error {
 public:
  SeriesTruncationError(const std::string& what, int required)
      : std::runtime_error(what), required_terms(required) {}
  int required_terms;
};

/// sum_{k <= K} t^k <h, A^k g> / k! on the model. K < 0 picks the smallest
/// K whose tail bound is below tol; otherwise a tail above tol throws
/// SeriesTruncationError naming the required K.
SeriesResult duhamel_series_oracle(const VelocityFunction& h, const VelocityFunction& g, double t,
                                   int K_terms, const GalerkinModel& model, double tol = 1e-10,
                                   int h_degree = -1, int g_degree = -1);

/// Real part of <e^{2 pi i k.x} psi, e^{t(-v.grad + L)} e^{2 pi i k.x} phi>,
/// by the same truncated series with A - 2 pi i sum_j k_j V_j.
SeriesResult fourier_mode_solver(const VelocityFunction& psi, const VelocityFunction& phi,
                                 const std::array<int, kMaxDim>& k, double t,
                                 const GalerkinModel& model, int K_terms = -1, double tol = 1e-10,
                                 int psi_degree = -1, int phi_degree = -1);

/// L^2(M) norm of the truncated solution e^{tA} g (series to tolerance).
double semigroup_norm(const VelocityFunction& g, double t, const GalerkinModel& model,
                      int g_degree = -1);

}  // namespace hsfluct
