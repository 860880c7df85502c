// Pseudotrajectories: hard-sphere dynamics in which a contact either
// scatters the pair (spending a recollision budget) or removes one particle.
#pragma once

#include <cstddef>
#include <vector>

#include "hsfluct/core.hpp"
#include "hsfluct/graph.hpp"

namespace hsfluct {

/// History parameters for n particles of which m must survive. Labels are
/// positions 0..n-1 in the particle list; the designated survivors are 0..m-1.
struct PseudoParams {
  int n = 0;
  int m = 0;
  std::vector<int> s;      // size n-m, entries +-1: which budget to inspect
  std::vector<int> sbar;   // size n-m, entries +-1: does the survivor scatter
  std::vector<int> kappa;  // size n, recollision budgets

  void validate() const;
};

enum class PseudoEventKind { kRecollision, kAnnihilation, kHamiltonian };

struct PseudoEvent {
  double time = 0.0;
  int q = 0, qp = 0;  // q < qp
  PseudoEventKind kind = PseudoEventKind::kHamiltonian;
  int removed = -1;
  bool survivor_scattered = false;
};

struct PseudoTrace {
  /// Final state by label; a removed particle keeps its state at removal.
  std::vector<Particle> state;
  std::vector<char> alive;
  std::vector<int> kappa;  // budgets at the final time
  int iota = 1;            // collision counter, n + 1 - #survivors
  std::vector<PseudoEvent> events;
  /// Kinetic energy of the live particles after each event (starts with t=0).
  std::vector<double> energy;
  bool accepted = false;

  /// States of labels 0..m-1, in order.
  std::vector<Particle> survivors(int m) const;
};

PseudoTrace run_pseudo(const Configuration& zn, const PseudoParams& params, double t,
                       std::size_t max_events = 1000000);

/// Collision graph of a trace (every contact is an edge).
CollisionGraph pseudo_collision_graph(const PseudoTrace& trace);

}  // namespace hsfluct
