#include "hsfluct/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>

#include "hsfluct/velocity_grid.hpp"

namespace hsfluct {

using CVec = Eigen::VectorXcd;

HermiteBasis::HermiteBasis(int d, int max_degree) : d_(d), P_(max_degree) {
  if (d != 2 && d != 3) throw std::invalid_argument("HermiteBasis: d must be 2 or 3");
  if (max_degree < 0) throw std::invalid_argument("HermiteBasis: negative degree");
  for (int deg = 0; deg <= P_; ++deg) {
    if (d == 2) {
      for (int a = deg; a >= 0; --a) index_.push_back({a, deg - a, 0});
    } else {
      for (int a = deg; a >= 0; --a)
        for (int b = deg - a; b >= 0; --b) index_.push_back({a, b, deg - a - b});
    }
  }
}

void HermiteBasis::evaluate(const Vec& v, Eigen::VectorXd& out) const {
  std::array<std::vector<double>, kMaxDim> h;
  for (int c = 0; c < d_; ++c) {
    auto& hc = h[static_cast<std::size_t>(c)];
    hc.assign(static_cast<std::size_t>(P_) + 1, 0.0);
    hc[0] = 1.0;
    if (P_ >= 1) hc[1] = v[c];
    for (int n = 1; n < P_; ++n)
      hc[static_cast<std::size_t>(n) + 1] =
          (v[c] * hc[static_cast<std::size_t>(n)] -
           std::sqrt(static_cast<double>(n)) * hc[static_cast<std::size_t>(n) - 1]) /
          std::sqrt(n + 1.0);
  }
  out.resize(static_cast<Eigen::Index>(index_.size()));
  for (std::size_t i = 0; i < index_.size(); ++i) {
    double p = 1.0;
    for (int c = 0; c < d_; ++c)
      p *= h[static_cast<std::size_t>(c)][static_cast<std::size_t>(index_[i][static_cast<std::size_t>(c)])];
    out(static_cast<Eigen::Index>(i)) = p;
  }
}

Eigen::VectorXd HermiteBasis::project(const VelocityFunction& f, int f_degree) const {
  const int nodes = f_degree >= 0 ? (f_degree + P_ + 2) / 2 : P_ + 12;
  const VelocityGrid grid = VelocityGrid::gauss_hermite(d_, std::max(nodes, 1));
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size()));
  Eigen::VectorXd phi;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    evaluate(grid.nodes[i], phi);
    c += (grid.weights[i] * f(grid.nodes[i])) * phi;
  }
  return c;
}

Eigen::SparseMatrix<double> HermiteBasis::velocity_multiplier(int j) const {
  if (j < 0 || j >= d_) throw std::invalid_argument("velocity_multiplier: bad component");
  std::map<std::array<int, kMaxDim>, int> pos;
  for (std::size_t i = 0; i < index_.size(); ++i) pos[index_[i]] = static_cast<int>(i);
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t col = 0; col < index_.size(); ++col) {
    auto up = index_[col];
    const int a = up[static_cast<std::size_t>(j)];
    ++up[static_cast<std::size_t>(j)];
    if (auto it = pos.find(up); it != pos.end())
      trip.emplace_back(it->second, static_cast<int>(col), std::sqrt(a + 1.0));
    if (a > 0) {
      auto down = index_[col];
      --down[static_cast<std::size_t>(j)];
      trip.emplace_back(pos.at(down), static_cast<int>(col), std::sqrt(static_cast<double>(a)));
    }
  }
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::SparseMatrix<double> V(n, n);
  V.setFromTriplets(trip.begin(), trip.end());
  return V;
}

double HermiteBasis::multiplier_norm_bound() const {
  std::vector<double> x, w;
  gauss_hermite_1d(P_ + 1, x, w);
  return *std::max_element(x.begin(), x.end());
}

GalerkinModel::GalerkinModel(int d, const GalerkinOptions& options)
    : options_(options), basis_(d, options.max_degree) {
  if (!options_.collisions) return;
  if (options_.batches < 1 || options_.samples < static_cast<std::size_t>(options_.batches))
    throw std::invalid_argument("GalerkinModel: need samples >= batches >= 1");
  const auto n = static_cast<Eigen::Index>(basis_.size());
  const double cd = angular_factor(d);
  const std::size_t per = options_.samples / static_cast<std::size_t>(options_.batches);
  A_ = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd p1, p2, p3, p4;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int b = 0; b < options_.batches; ++b) {
    Rng rng = make_stream(options_.seed, static_cast<std::uint64_t>(b));
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t s = 0; s < per; ++s) {
      const Vec v = maxwellian_sample(d, rng);
      const Vec vs = maxwellian_sample(d, rng);
      const Vec w = v - vs;
      const double wn = norm(w);
      const double a = u01(rng), c = u01(rng);
      if (wn == 0.0) continue;
      const Vec eta = cosine_weighted_direction((1.0 / wn) * w, a, c);
      const auto [vp, vsp] = scatter(v, vs, eta);
      basis_.evaluate(vp, p1);
      basis_.evaluate(vsp, p2);
      basis_.evaluate(v, p3);
      basis_.evaluate(vs, p4);
      const Eigen::VectorXd delta = p1 + p2 - p3 - p4;
      acc.selfadjointView<Eigen::Lower>().rankUpdate(delta, wn);
    }
    Eigen::MatrixXd full = acc.selfadjointView<Eigen::Lower>();
    full *= -0.25 * cd / static_cast<double>(per);
    batches_.push_back(full);
    A_ += full;
  }
  A_ /= static_cast<double>(options_.batches);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A_, Eigen::EigenvaluesOnly);
  rho_ = es.eigenvalues().cwiseAbs().maxCoeff();
}

namespace {

using Apply = std::function<CVec(const CVec&)>;

double log_factorial(int k) { return std::lgamma(k + 1.0); }

// Per-step tail bound of the order-K Taylor polynomial of exp(hB), ||B|| <= rho.
double step_tail(double h, double rho, int K) {
  const double x = h * rho;
  if (x == 0.0) return 0.0;
  return std::exp((K + 1) * std::log(x) - log_factorial(K + 1) + x);
}

struct Plan {
  int steps = 1;
  int K = 0;
  double tail = 0.0;
};

Plan plan_series(double t, double rho, double scale, int K_terms, double tol) {
  Plan p;
  p.steps = std::max(1, static_cast<int>(std::ceil(t * rho)));
  const double h = t / p.steps;
  if (K_terms >= 0) {
    p.K = K_terms;
    p.tail = p.steps * scale * step_tail(h, rho, p.K);
    if (p.tail > tol) {
      int need = p.K;
      while (p.steps * scale * step_tail(h, rho, need) > tol && need < 10000) ++need;
      throw SeriesTruncationError("series tail bound " + format_real(p.tail) +
                                      " exceeds tolerance; K_terms = " + std::to_string(need) +
                                      " is required",
                                  need);
    }
    return p;
  }
  p.K = 0;
  while (p.steps * scale * step_tail(h, rho, p.K) > tol) {
    if (++p.K > 400)
      throw SeriesTruncationError("series does not reach the tolerance within 400 terms", p.K);
  }
  p.tail = p.steps * scale * step_tail(h, rho, p.K);
  return p;
}

CVec run_series(const Apply& B, const CVec& c, double t, const Plan& plan) {
  CVec u = c;
  const double h = t / plan.steps;
  for (int s = 0; s < plan.steps; ++s) {
    CVec term = u, sum = u;
    for (int k = 1; k <= plan.K; ++k) {
      term = (h / k) * B(term);
      sum += term;
    }
    u = sum;
  }
  return u;
}

std::vector<Eigen::SparseMatrix<double>> multipliers(const HermiteBasis& basis,
                                                     const std::array<int, kMaxDim>& k) {
  std::vector<Eigen::SparseMatrix<double>> out;
  for (int j = 0; j < basis.d(); ++j)
    if (k[static_cast<std::size_t>(j)] != 0) out.push_back(basis.velocity_multiplier(j));
  return out;
}

SeriesResult solve(const VelocityFunction& h, const VelocityFunction& g,
                   const std::array<int, kMaxDim>& k, double t, const GalerkinModel& model,
                   int K_terms, double tol, int h_degree, int g_degree) {
  if (t < 0.0) throw std::invalid_argument("semigroup oracle: t must be non-negative");
  const HermiteBasis& basis = model.basis();
  const Eigen::VectorXd ch = basis.project(h, h_degree);
  const Eigen::VectorXd cg = basis.project(g, g_degree);
  const auto mult = multipliers(basis, k);
  std::vector<double> kj;
  double ksum = 0.0;
  for (int j = 0; j < basis.d(); ++j)
    if (k[static_cast<std::size_t>(j)] != 0) {
      kj.push_back(2.0 * kPi * k[static_cast<std::size_t>(j)]);
      ksum += std::abs(kj.back());
    }
  const double rho =
      (model.collisions() ? model.spectral_radius() : 0.0) + ksum * basis.multiplier_norm_bound();
  const Plan plan = plan_series(t, rho, ch.norm() * cg.norm(), K_terms, tol);

  auto make_apply = [&](const Eigen::MatrixXd* A) -> Apply {
    return [&, A](const CVec& x) {
      CVec y = CVec::Zero(x.size());
      if (A) y = A->cast<std::complex<double>>() * x;
      for (std::size_t m = 0; m < mult.size(); ++m) {
        const Eigen::VectorXd re = mult[m] * x.real();
        const Eigen::VectorXd im = mult[m] * x.imag();
        // -i kj (re + i im) = kj im - i kj re
        y.real() += kj[m] * im;
        y.imag() -= kj[m] * re;
      }
      return y;
    };
  };
  const CVec cgc = cg.cast<std::complex<double>>();
  const CVec chc = ch.cast<std::complex<double>>();
  const Eigen::MatrixXd* A = model.collisions() ? &model.matrix() : nullptr;
  const std::complex<double> val = chc.dot(run_series(make_apply(A), cgc, t, plan));

  SeriesResult r;
  r.value = val.real();
  r.imag = val.imag();
  r.tail_bound = plan.tail;
  r.terms = plan.K;
  const auto& bm = model.batch_matrices();
  if (model.collisions() && bm.size() >= 2 && t > 0.0) {
    std::vector<double> vals;
    for (const auto& Ab : bm) vals.push_back(chc.dot(run_series(make_apply(&Ab), cgc, t, plan)).real());
    double mean = 0.0;
    for (double x : vals) mean += x;
    mean /= static_cast<double>(vals.size());
    double ss = 0.0;
    for (double x : vals) ss += (x - mean) * (x - mean);
    const double nb = static_cast<double>(vals.size());
    r.stderr_ = std::sqrt(ss / (nb - 1.0) / nb);
  }
  return r;
}

}  // namespace

SeriesResult duhamel_series_oracle(const VelocityFunction& h, const VelocityFunction& g, double t,
                                   int K_terms, const GalerkinModel& model, double tol,
                                   int h_degree, int g_degree) {
  return solve(h, g, {0, 0, 0}, t, model, K_terms, tol, h_degree, g_degree);
}

SeriesResult fourier_mode_solver(const VelocityFunction& psi, const VelocityFunction& phi,
                                 const std::array<int, kMaxDim>& k, double t,
                                 const GalerkinModel& model, int K_terms, double tol,
                                 int psi_degree, int phi_degree) {
  return solve(psi, phi, k, t, model, K_terms, tol, psi_degree, phi_degree);
}

double semigroup_norm(const VelocityFunction& g, double t, const GalerkinModel& model,
                      int g_degree) {
  const Eigen::VectorXd cg = model.basis().project(g, g_degree);
  if (!model.collisions()) return cg.norm();
  const Plan plan = plan_series(t, model.spectral_radius(), cg.norm() * cg.norm(), -1, 1e-12);
  const Eigen::MatrixXd& A = model.matrix();
  Apply B = [&](const CVec& x) -> CVec { return A.cast<std::complex<double>>() * x; };
  return run_series(B, cg.cast<std::complex<double>>(), t, plan).norm();
}

}  // namespace hsfluct
