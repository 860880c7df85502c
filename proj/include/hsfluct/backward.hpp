// Backward pseudocharacteristics: collision trees grown from a root (z1, t).
#pragma once

#include <string>
#include <vector>

#include "hsfluct/core.hpp"

namespace hsfluct {

/// Creation of particle k+1 (k = index in CollisionTree::creations).
struct Creation {
  int parent = 0;     // 0-based label of an existing particle, < k+1
  int deflect = -1;   // +1: the pair scatters at the creation time
  double time = 0.0;  // strictly decreasing along the tree
  Vec vbar;
  Vec eta;  // unit
};

struct CollisionTree {
  std::vector<Creation> creations;
  int size() const { return static_cast<int>(creations.size()) + 1; }
};

/// Velocities just after each creation time, v_parent(t_k^+), in creation
/// order. Independent of epsilon.
std::vector<Vec> parent_velocities(const Particle& z1, const CollisionTree& tree);

/// Empty string when the tree is admissible for root time t; otherwise the
/// reason. Admissible: times in (0, t) strictly decreasing, parents in
/// range, unit eta, and (v_parent(t_k^+) - vbar_k) . eta_k > 0.
std::string admissibility_error(const Particle& z1, const CollisionTree& tree, double t);
bool is_admissible(const Particle& z1, const CollisionTree& tree, double t);

/// State at time 0 of all tree particles, by label (0 is the root). The
/// child sits at x_parent + eps*eta without deflection and at
/// x_parent - eps*eta with deflection, so that the new pair separates
/// backward in time. Throws std::invalid_argument if not admissible.
std::vector<Particle> backward_characteristic(const Particle& z1, const CollisionTree& tree,
                                              double epsilon, double t);

/// True iff no two tree particles come closer than epsilon on (0, t) away
/// from creation instants. Every periodic image is checked.
bool overlap_free(const Particle& z1, const CollisionTree& tree, double epsilon, double t);

/// M(v1) * prod_k ((v_parent(t_k^+) - vbar_k) . eta_k)_+ M(vbar_k).
double tree_weight(const Particle& z1, const CollisionTree& tree, double t);

/// Euclidean norm over all tree particles of the torus displacement between
/// the time-0 positions at diameter epsilon and at diameter 0.
double characteristic_deviation(const Particle& z1, const CollisionTree& tree, double epsilon,
                                double t);

/// Admissible tree with n particles (n-1 creations): uniform ordered times
/// in (0, t), uniform parents and deflection signs, Maxwellian vbar, and eta
/// uniform on the sphere, flipped into the outgoing half.
CollisionTree random_admissible_tree(const Particle& z1, int n, double t, Rng& rng);

/// JSON array of {parent, deflect, time, vbar, eta}.
std::string tree_to_json(const CollisionTree& tree);
CollisionTree tree_from_json(const std::string& text, int d);

}  // namespace hsfluct
