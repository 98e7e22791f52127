#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace vbsf::pso {

struct Interval {
  double low = 0.0;
  double high = 1.0;
};

/// Swarm hyperparameters. Defaults are the constriction-equivalent values.
struct PsoConfig {
  double omega = 0.729;
  double c1 = 1.49445;
  double c2 = 1.49445;
  std::size_t swarm_size = 30;
  std::size_t max_iterations = 50;
  std::vector<Interval> bounds;
  /// Per-dimension velocity cap; absent means uncapped.
  std::optional<std::vector<double>> vmax;
  std::uint64_t seed = 0;
  /// Positions assigned to the first particles instead of random draws.
  std::vector<std::vector<double>> seeded_positions;
  /// Worker threads for objective evaluation. Results do not depend on it.
  unsigned threads = 1;

  std::size_t dimensions() const { return bounds.size(); }
  /// Throws ValidationError on any broken invariant.
  void validate() const;
};

/// Same bounds in every dimension.
std::vector<Interval> uniform_bounds(std::size_t dimensions, double low, double high);

struct Particle {
  std::vector<double> position;
  std::vector<double> velocity;
  std::vector<double> pbest_position;
  double pbest_value = 0.0;
};

/// Deterministic 64-bit stream; draws uniform reals in [0, 1).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  /// Top 53 bits of the engine output, so the value is identical on every standard library.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double low, double high) { return low + (high - low) * uniform(); }

  friend bool operator==(const RandomStream&, const RandomStream&) = default;

 private:
  std::mt19937_64 engine_;
};

struct SwarmState {
  std::vector<Particle> particles;
  std::vector<double> gbest_position;
  double gbest_value = 0.0;
  std::size_t iteration = 0;
  RandomStream rng;
};

using Objective = std::function<double(std::span<const double>)>;

/// Velocity update:
///   v' = omega*v + c1*r1*(pbest - x) + c2*r2*(gbest - x)
/// with r1, r2 drawn per dimension, then clamped to +-vmax when configured.
std::vector<double> step_velocity(const Particle& particle, std::span<const double> gbest,
                                  const PsoConfig& config, std::span<const double> r1,
                                  std::span<const double> r2);

struct PositionUpdate {
  std::vector<double> position;
  std::vector<double> velocity;
};

/// x' = x + v', clamped into bounds. A clamped component gets zero velocity.
PositionUpdate step_position(std::span<const double> position, std::span<const double> velocity,
                             std::span<const Interval> bounds);

/// Everything random an optimize() run consumed, plus the positions it produced.
struct Trace {
  std::vector<std::vector<double>> initial_positions;
  std::vector<std::vector<double>> initial_velocities;
  struct Draws {
    std::vector<double> r1;
    std::vector<double> r2;
  };
  /// draws[iteration][particle]
  std::vector<std::vector<Draws>> draws;
  /// positions[iteration][particle], after the move
  std::vector<std::vector<std::vector<double>>> positions;
};

/// Random initial swarm with every particle evaluated once.
SwarmState initialize_swarm(const Objective& objective, const PsoConfig& config,
                            Trace* trace = nullptr);

/// One synchronous sweep: all velocities use the sweep-start gbest, then all
/// particles move, then bests refresh on strict improvement in index order.
void iterate(SwarmState& state, const Objective& objective, const PsoConfig& config,
             Trace* trace = nullptr);

struct Result {
  std::vector<double> best_position;
  double best_value = 0.0;
  /// gbest value after each sweep; non-increasing.
  std::vector<double> history;
};

/// Minimizes `objective` over the configured box. Throws NumericError if the
/// objective returns a non-finite value.
Result optimize(const Objective& objective, const PsoConfig& config, Trace* trace = nullptr);

/// CSV with header `iteration,gbest_value`, iterations counted from 1.
void write_history_csv(std::ostream& out, std::span<const double> history);

}  // namespace vbsf::pso
