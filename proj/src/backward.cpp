#include "hsfluct/backward.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace hsfluct {

namespace {

struct Sweep {
  std::vector<Particle> state;  // positions at the current time, velocities just below it
  double now = 0.0;
};

void drift_back(Sweep& s, double to) {
  const double dt = s.now - to;
  for (auto& p : s.state) p.x = wrap(p.x - dt * p.v);
  s.now = to;
}

void create(Sweep& s, const Creation& c, double epsilon) {
  Particle& par = s.state[static_cast<std::size_t>(c.parent)];
  Particle child;
  child.v = c.vbar;
  if (c.deflect == 1) {
    child.x = wrap(par.x - epsilon * c.eta);
    auto [w, wbar] = scatter(par.v, c.vbar, c.eta);
    par.v = w;
    child.v = wbar;
  } else {
    child.x = wrap(par.x + epsilon * c.eta);
  }
  s.state.push_back(child);
}

// Smallest |r0 + k - s u|^2 over images k and s in [0, T].
double segment_min_dist2(const Vec& r0, const Vec& u, double T, double eps) {
  const int d = r0.d;
  int lo[kMaxDim] = {0, 0, 0}, hi[kMaxDim] = {0, 0, 0};
  for (int c = 0; c < d; ++c) {
    const double reach = eps + T * std::abs(u[c]);
    lo[c] = static_cast<int>(std::ceil(-reach - r0[c]));
    hi[c] = static_cast<int>(std::floor(reach - r0[c]));
    if (lo[c] > hi[c]) return std::numeric_limits<double>::infinity();
  }
  const double uu = norm2(u);
  double best = std::numeric_limits<double>::infinity();
  int k[kMaxDim] = {lo[0], lo[1], lo[2]};
  for (;;) {
    Vec r = r0;
    for (int c = 0; c < d; ++c) r[c] += k[c];
    double s = uu > 0.0 ? dot(r, u) / uu : 0.0;
    s = std::clamp(s, 0.0, T);
    best = std::min(best, norm2(r - s * u));
    int c = 0;
    while (c < d && k[c] == hi[c]) {
      k[c] = lo[c];
      ++c;
    }
    if (c == d) break;
    ++k[c];
  }
  return best;
}

}  // namespace

std::vector<Vec> parent_velocities(const Particle& z1, const CollisionTree& tree) {
  std::vector<Vec> vel{z1.v};
  std::vector<Vec> out;
  out.reserve(tree.creations.size());
  for (const auto& c : tree.creations) {
    if (c.parent < 0 || c.parent >= static_cast<int>(vel.size()))
      throw std::invalid_argument("collision tree: parent index out of range");
    Vec& vp = vel[static_cast<std::size_t>(c.parent)];
    out.push_back(vp);
    if (c.deflect == 1) {
      auto [w, wbar] = scatter(vp, c.vbar, c.eta);
      vp = w;
      vel.push_back(wbar);
    } else {
      vel.push_back(c.vbar);
    }
  }
  return out;
}

std::string admissibility_error(const Particle& z1, const CollisionTree& tree, double t) {
  double prev = t;
  for (std::size_t k = 0; k < tree.creations.size(); ++k) {
    const auto& c = tree.creations[k];
    const std::string at = "creation " + std::to_string(k + 1) + ": ";
    if (c.parent < 0 || c.parent > static_cast<int>(k)) return at + "parent out of range";
    if (c.deflect != 1 && c.deflect != -1) return at + "deflect must be +1 or -1";
    if (!(c.time > 0.0 && c.time < prev)) return at + "times must decrease inside (0, t)";
    if (std::abs(norm(c.eta) - 1.0) > 1e-12) return at + "eta is not a unit vector";
    prev = c.time;
  }
  const auto vp = parent_velocities(z1, tree);
  for (std::size_t k = 0; k < vp.size(); ++k) {
    const auto& c = tree.creations[k];
    if (!(dot(vp[k] - c.vbar, c.eta) > 0.0))
      return "creation " + std::to_string(k + 1) + ": (v_parent - vbar) . eta is not positive";
  }
  return {};
}

bool is_admissible(const Particle& z1, const CollisionTree& tree, double t) {
  return admissibility_error(z1, tree, t).empty();
}

std::vector<Particle> backward_characteristic(const Particle& z1, const CollisionTree& tree,
                                              double epsilon, double t) {
  const std::string err = admissibility_error(z1, tree, t);
  if (!err.empty()) throw std::invalid_argument("backward_characteristic: " + err);
  Sweep s;
  s.state.push_back(z1);
  s.now = t;
  for (const auto& c : tree.creations) {
    drift_back(s, c.time);
    create(s, c, epsilon);
  }
  drift_back(s, 0.0);
  return s.state;
}

bool overlap_free(const Particle& z1, const CollisionTree& tree, double epsilon, double t) {
  const std::string err = admissibility_error(z1, tree, t);
  if (!err.empty()) throw std::invalid_argument("overlap_free: " + err);
  if (epsilon <= 0.0) return true;
  const double limit = epsilon * epsilon * (1.0 - 1e-9);
  Sweep s;
  s.state.push_back(z1);
  s.now = t;
  auto check_interval = [&](double lower) {
    const double T = s.now - lower;
    const std::size_t n = s.state.size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const Vec r0 = minimum_image(s.state[j].x, s.state[i].x);
        // backward in time the separation moves along -(v_j - v_i)
        const Vec u = s.state[j].v - s.state[i].v;
        if (segment_min_dist2(r0, u, T, epsilon) < limit) return false;
      }
    return true;
  };
  for (const auto& c : tree.creations) {
    if (!check_interval(c.time)) return false;
    drift_back(s, c.time);
    create(s, c, epsilon);
  }
  return check_interval(0.0);
}

double tree_weight(const Particle& z1, const CollisionTree& tree, double t) {
  (void)t;
  double w = maxwellian_density(z1.v);
  const auto vp = parent_velocities(z1, tree);
  for (std::size_t k = 0; k < vp.size(); ++k) {
    const auto& c = tree.creations[k];
    const double f = dot(vp[k] - c.vbar, c.eta);
    if (!(f > 0.0)) return 0.0;
    w *= f * maxwellian_density(c.vbar);
  }
  return w;
}

double characteristic_deviation(const Particle& z1, const CollisionTree& tree, double epsilon,
                                double t) {
  const auto a = backward_characteristic(z1, tree, epsilon, t);
  const auto b = backward_characteristic(z1, tree, 0.0, t);
  double s2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s2 += norm2(minimum_image(a[i].x, b[i].x));
  return std::sqrt(s2);
}

CollisionTree random_admissible_tree(const Particle& z1, int n, double t, Rng& rng) {
  if (n < 1) throw std::invalid_argument("random_admissible_tree: n must be positive");
  if (!(t > 0.0)) throw std::invalid_argument("random_admissible_tree: t must be positive");
  const int d = z1.v.d;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<double> times;
  while (static_cast<int>(times.size()) < n - 1) {
    const double s = t * u01(rng);
    if (s > 0.0 && std::find(times.begin(), times.end(), s) == times.end()) times.push_back(s);
  }
  std::sort(times.begin(), times.end(), std::greater<>());
  CollisionTree tree;
  std::vector<Vec> vel{z1.v};
  for (int k = 0; k + 1 < n; ++k) {
    Creation c;
    c.parent = std::uniform_int_distribution<int>(0, k)(rng);
    c.deflect = u01(rng) < 0.5 ? 1 : -1;
    c.time = times[static_cast<std::size_t>(k)];
    Vec& vp = vel[static_cast<std::size_t>(c.parent)];
    double cross = 0.0;
    do {
      c.vbar = maxwellian_sample(d, rng);
      c.eta = uniform_sphere(d, rng);
      cross = dot(vp - c.vbar, c.eta);
    } while (cross == 0.0);
    if (cross < 0.0) c.eta = -c.eta;
    if (c.deflect == 1) {
      auto [w, wbar] = scatter(vp, c.vbar, c.eta);
      vp = w;
      vel.push_back(wbar);
    } else {
      vel.push_back(c.vbar);
    }
    tree.creations.push_back(c);
  }
  return tree;
}

std::string tree_to_json(const CollisionTree& tree) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : tree.creations) {
    std::vector<double> vb(c.vbar.c.begin(), c.vbar.c.begin() + c.vbar.d);
    std::vector<double> et(c.eta.c.begin(), c.eta.c.begin() + c.eta.d);
    arr.push_back({{"parent", c.parent},
                   {"deflect", c.deflect},
                   {"time", c.time},
                   {"vbar", vb},
                   {"eta", et}});
  }
  return arr.dump();
}

CollisionTree tree_from_json(const std::string& text, int d) {
  const auto arr = nlohmann::json::parse(text);
  if (!arr.is_array()) throw std::invalid_argument("tree_from_json: expected an array");
  CollisionTree tree;
  auto read_vec = [d](const nlohmann::json& j) {
    const auto xs = j.get<std::vector<double>>();
    if (static_cast<int>(xs.size()) != d)
      throw std::invalid_argument("tree_from_json: vector length differs from d");
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = xs[static_cast<std::size_t>(i)];
    return v;
  };
  for (const auto& rec : arr) {
    Creation c;
    c.parent = rec.at("parent").get<int>();
    c.deflect = rec.at("deflect").get<int>();
    c.time = rec.at("time").get<double>();
    c.vbar = read_vec(rec.at("vbar"));
    c.eta = read_vec(rec.at("eta"));
    tree.creations.push_back(c);
  }
  return tree;
}

}  // namespace hsfluct
