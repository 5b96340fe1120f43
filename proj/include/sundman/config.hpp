#pragma once

#include <cstdint>
#include <string>

namespace sundman {

struct Interval {
  double lo = 0.3;
  double hi = 2.7;
  double mid() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
};

// Shared knobs for sampling, zero testing, and integration. A flat
// key=value file (see load_config_file) or the SUNDMAN_CONFIG environment
// variable can override the defaults; CLI flags override both.
struct Config {
  Interval box_x{0.3, 2.7};
  Interval box_y{0.3, 2.7};

  double eps_abs = 1e-9;
  double eps_rel = 1e-9;
  double reject_threshold = 1e-6;
  int samples = 32;      // valid samples sought per zero test
  int min_samples = 8;   // below this the verdict is Indeterminate
  int max_draws = 400;   // sampling attempts before giving up

  std::uint64_t seed = 12345;

  // Fixed integrator step as a fraction of the span, used when no explicit
  // step is given.
  double step_fraction = 1e-3;

  void validate() const;  // throws ConfigError
};

// Parses a flat key=value file ('#' starts a comment). Unknown keys are an
// error; keys mirror the field names (box_x_lo, box_x_hi, box_y_lo,
// box_y_hi, eps_abs, eps_rel, reject_threshold, samples, min_samples,
// max_draws, seed, step_fraction).
Config load_config_file(const std::string& path, Config base);

// Applies SUNDMAN_CONFIG if set; returns base otherwise.
Config load_config_from_env(Config base);

std::string format_config(const Config& cfg);

}  // namespace sundman
