// Event-driven hard-sphere dynamics on the unit torus.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "hsfluct/core.hpp"

namespace hsfluct {

struct Contact {
  double time = 0.0;
  Vec eta;  // unit vector from the first particle to the second at contact
};

/// Earliest tau in [0, horizon] at which some periodic image of p2 touches p1
/// while approaching. Every image within reach of the horizon is examined.
std::optional<Contact> next_pair_collision(const Particle& p1, const Particle& p2, double epsilon,
                                           double horizon);

struct CollisionEvent {
  double time = 0.0;
  int i = 0, j = 0;  // i < j
  Vec eta;           // (x_j - x_i) / epsilon at contact
  Vec vi_pre, vj_pre, vi_post, vj_post;
};

struct EventLog {
  double horizon = 0.0;
  std::vector<CollisionEvent> events;
};

void write_event_log_csv(std::ostream& os, const EventLog& log, int d);

class FlowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FlowOptions {
  std::size_t max_events = 1000000;
  std::uint64_t seed = 0;  // only used to label failures
  bool record_log = true;
};

class HardSphereFlow {
 public:
  HardSphereFlow(Configuration initial, FlowOptions options = {});

  /// Advances the state to absolute time t >= time().
  void advance_to(double t);

  double time() const { return now_; }
  const Configuration& state() const { return state_; }
  const EventLog& log() const { return log_; }
  std::size_t event_count() const { return events_; }
  /// Collisions closer than 1e-12 in time to the previous one.
  std::size_t degenerate_events() const { return degenerate_; }

 private:
  struct Pending {
    double time;
    int i, j;  // i < 0 marks a refresh of all predictions
    std::uint64_t ci, cj;
    bool operator>(const Pending& o) const {
      if (time != o.time) return time > o.time;
      if (i != o.i) return i > o.i;
      return j > o.j;
    }
  };

  void drift_to(double t);
  void predict_pair(int i, int j, bool after_collision);
  void schedule_all();
  void collide(int i, int j);
  bool valid(const Pending& p) const;

  Configuration state_;
  FlowOptions options_;
  EventLog log_;
  double now_ = 0.0;
  double next_refresh_ = 0.0;
  std::vector<std::uint64_t> counts_;
  std::priority_queue<Pending, std::vector<Pending>, std::greater<Pending>> queue_;
  std::size_t events_ = 0;
  std::size_t degenerate_ = 0;
  double last_collision_ = -1.0;
};

struct FlowResult {
  Configuration state;
  EventLog log;
  std::size_t degenerate_events = 0;
};

FlowResult run_flow(const Configuration& initial, double t, const FlowOptions& options = {});

/// Free transport of a single particle over time t (no interactions).
Particle free_flight(const Particle& p, double t);

}  // namespace hsfluct
