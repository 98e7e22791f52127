#include "vbsf/pso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <thread>

#include "vbsf/error.hpp"

namespace vbsf::pso {
namespace {

void require_dims(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw ValidationError(std::string(what) + ": dimension mismatch (" + std::to_string(got) +
                          " vs " + std::to_string(want) + ")");
  }
}

// Evaluates every particle's current position; results land by index.
std::vector<double> evaluate_all(const std::vector<Particle>& particles, const Objective& objective,
                                 unsigned threads) {
  std::vector<double> values(particles.size());
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) values[i] = objective(particles[i].position);
  };
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1u), particles.size());
  if (workers <= 1) {
    run(0, particles.size());
    return values;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (particles.size() + workers - 1) / workers;
  for (std::size_t begin = 0; begin < particles.size(); begin += chunk) {
    pool.emplace_back(run, begin, std::min(begin + chunk, particles.size()));
  }
  pool.clear();
  return values;
}

void check_finite(std::span<const double> values, std::size_t iteration) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw NumericError("objective returned a non-finite value at iteration " +
                         std::to_string(iteration) + ", particle " + std::to_string(i));
    }
  }
}

// Ordered fold over particle index; only strict improvements replace gbest.
void refresh_gbest(SwarmState& state) {
  for (const auto& p : state.particles) {
    if (p.pbest_value < state.gbest_value) {
      state.gbest_value = p.pbest_value;
      state.gbest_position = p.pbest_position;
    }
  }
}

}  // namespace

void PsoConfig::validate() const {
  if (swarm_size < 1) throw ValidationError("swarm_size must be >= 1");
  if (max_iterations < 1) throw ValidationError("max_iterations must be >= 1");
  if (bounds.empty()) throw ValidationError("bounds must cover at least one dimension");
  for (std::size_t d = 0; d < bounds.size(); ++d) {
    const auto& b = bounds[d];
    if (!std::isfinite(b.low) || !std::isfinite(b.high) || !(b.low < b.high)) {
      throw ValidationError("bounds[" + std::to_string(d) + "] must satisfy low < high");
    }
  }
  if (!std::isfinite(omega) || !std::isfinite(c1) || !std::isfinite(c2)) {
    throw ValidationError("omega, c1 and c2 must be finite");
  }
  if (vmax) {
    require_dims(vmax->size(), bounds.size(), "vmax");
    for (double v : *vmax) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("vmax entries must be finite and >= 0");
    }
  }
  if (seeded_positions.size() > swarm_size) {
    throw ValidationError("more seeded positions than particles");
  }
  for (const auto& s : seeded_positions) require_dims(s.size(), bounds.size(), "seeded position");
}

std::vector<Interval> uniform_bounds(std::size_t dimensions, double low, double high) {
  return std::vector<Interval>(dimensions, Interval{low, high});
}

std::vector<double> step_velocity(const Particle& particle, std::span<const double> gbest,
                                  const PsoConfig& config, std::span<const double> r1,
                                  std::span<const double> r2) {
  const std::size_t n = particle.position.size();
  require_dims(particle.velocity.size(), n, "velocity");
  require_dims(particle.pbest_position.size(), n, "pbest");
  require_dims(gbest.size(), n, "gbest");
  require_dims(r1.size(), n, "r1");
  require_dims(r2.size(), n, "r2");
  if (config.vmax) require_dims(config.vmax->size(), n, "vmax");

  std::vector<double> next(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = particle.position[j];
    double v = config.omega * particle.velocity[j] +
               config.c1 * r1[j] * (particle.pbest_position[j] - x) +
               config.c2 * r2[j] * (gbest[j] - x);
    if (config.vmax) {
      const double cap = (*config.vmax)[j];
      v = std::clamp(v, -cap, cap);
    }
    next[j] = v;
  }
  return next;
}

PositionUpdate step_position(std::span<const double> position, std::span<const double> velocity,
                             std::span<const Interval> bounds) {
  const std::size_t n = position.size();
  require_dims(velocity.size(), n, "velocity");
  require_dims(bounds.size(), n, "bounds");
  PositionUpdate out{std::vector<double>(n), std::vector<double>(velocity.begin(), velocity.end())};
  for (std::size_t j = 0; j < n; ++j) {
    const double moved = position[j] + velocity[j];
    if (moved < bounds[j].low || moved > bounds[j].high) {
      out.position[j] = std::clamp(moved, bounds[j].low, bounds[j].high);
      out.velocity[j] = 0.0;
    } else {
      out.position[j] = moved;
    }
  }
  return out;
}

SwarmState initialize_swarm(const Objective& objective, const PsoConfig& config, Trace* trace) {
  config.validate();
  const std::size_t dims = config.dimensions();
  SwarmState state;
  state.rng = RandomStream(config.seed);
  state.particles.resize(config.swarm_size);
  for (std::size_t i = 0; i < config.swarm_size; ++i) {
    auto& p = state.particles[i];
    p.position.resize(dims);
    p.velocity.resize(dims);
    for (std::size_t j = 0; j < dims; ++j) {
      const auto& b = config.bounds[j];
      p.position[j] = state.rng.uniform(b.low, b.high);
      const double half = (b.high - b.low) / 2.0;
      p.velocity[j] = state.rng.uniform(-half, half);
    }
    if (i < config.seeded_positions.size()) {
      for (std::size_t j = 0; j < dims; ++j) {
        p.position[j] =
            std::clamp(config.seeded_positions[i][j], config.bounds[j].low, config.bounds[j].high);
      }
    }
    p.pbest_position = p.position;
  }
  if (trace) {
    *trace = Trace{};
    for (const auto& p : state.particles) {
      trace->initial_positions.push_back(p.position);
      trace->initial_velocities.push_back(p.velocity);
    }
  }

  const auto values = evaluate_all(state.particles, objective, config.threads);
  check_finite(values, 0);
  for (std::size_t i = 0; i < values.size(); ++i) state.particles[i].pbest_value = values[i];
  state.gbest_value = std::numeric_limits<double>::infinity();
  refresh_gbest(state);
  return state;
}

void iterate(SwarmState& state, const Objective& objective, const PsoConfig& config, Trace* trace) {
  const std::size_t dims = config.dimensions();
  const std::vector<double> gbest = state.gbest_position;
  std::vector<double> r1(dims), r2(dims);
  if (trace) trace->draws.emplace_back();

  for (auto& p : state.particles) {
    for (std::size_t j = 0; j < dims; ++j) {
      r1[j] = state.rng.uniform();
      r2[j] = state.rng.uniform();
    }
    if (trace) trace->draws.back().push_back({r1, r2});
    auto velocity = step_velocity(p, gbest, config, r1, r2);
    auto moved = step_position(p.position, velocity, config.bounds);
    p.position = std::move(moved.position);
    p.velocity = std::move(moved.velocity);
  }
  ++state.iteration;

  const auto values = evaluate_all(state.particles, objective, config.threads);
  check_finite(values, state.iteration);
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto& p = state.particles[i];
    if (values[i] < p.pbest_value) {
      p.pbest_value = values[i];
      p.pbest_position = p.position;
    }
  }
  refresh_gbest(state);

  if (trace) {
    trace->positions.emplace_back();
    for (const auto& p : state.particles) trace->positions.back().push_back(p.position);
  }
}

Result optimize(const Objective& objective, const PsoConfig& config, Trace* trace) {
  SwarmState state = initialize_swarm(objective, config, trace);
  Result result;
  result.history.reserve(config.max_iterations);
  for (std::size_t it = 0; it < config.max_iterations; ++it) {
    iterate(state, objective, config, trace);
    result.history.push_back(state.gbest_value);
  }
  result.best_position = state.gbest_position;
  result.best_value = state.gbest_value;
  return result;
}

void write_history_csv(std::ostream& out, std::span<const double> history) {
  const auto precision = out.precision(17);
  out << "iteration,gbest_value\n";
  for (std::size_t i = 0; i < history.size(); ++i) out << (i + 1) << ',' << history[i] << '\n';
  out.precision(precision);
}

}  // namespace vbsf::pso
