#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sundman/config.hpp"
#include "sundman/errors.hpp"

namespace sundman {

void Config::validate() const {
  if (!(box_x.lo < box_x.hi) || !(box_y.lo < box_y.hi))
    throw ConfigError("sampling box intervals must be nonempty");
  if (eps_abs < 0 || eps_rel < 0) throw ConfigError("tolerances must be nonnegative");
  if (reject_threshold < eps_abs)
    throw ConfigError("reject_threshold must not be below eps_abs");
  if (samples < 1 || min_samples < 1 || min_samples > samples)
    throw ConfigError("need 1 <= min_samples <= samples");
  if (max_draws < samples) throw ConfigError("max_draws must be at least samples");
  if (step_fraction <= 0 || step_fraction > 0.5)
    throw ConfigError("step_fraction must be in (0, 0.5]");
}

Config load_config_file(const std::string& path, Config base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      return s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    auto as_double = [&]() {
      try {
        std::size_t used = 0;
        double d = std::stod(val, &used);
        if (used != val.size()) throw std::invalid_argument(val);
        return d;
      } catch (const std::exception&) {
        throw ConfigError(path + ":" + std::to_string(lineno) + ": bad number '" + val + "'");
      }
    };
    auto as_int = [&]() { return static_cast<int>(as_double()); };
    if (key == "box_x_lo")
      base.box_x.lo = as_double();
    else if (key == "box_x_hi")
      base.box_x.hi = as_double();
    else if (key == "box_y_lo")
      base.box_y.lo = as_double();
    else if (key == "box_y_hi")
      base.box_y.hi = as_double();
    else if (key == "eps_abs")
      base.eps_abs = as_double();
    else if (key == "eps_rel")
      base.eps_rel = as_double();
    else if (key == "reject_threshold")
      base.reject_threshold = as_double();
    else if (key == "samples")
      base.samples = as_int();
    else if (key == "min_samples")
      base.min_samples = as_int();
    else if (key == "max_draws")
      base.max_draws = as_int();
    else if (key == "seed")
      base.seed = static_cast<std::uint64_t>(std::stoull(val));
    else if (key == "step_fraction")
      base.step_fraction = as_double();
    else
      throw ConfigError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  base.validate();
  return base;
}

Config load_config_from_env(Config base) {
  const char* path = std::getenv("SUNDMAN_CONFIG");
  if (path && *path) return load_config_file(path, base);
  return base;
}

std::string format_config(const Config& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "box_x_lo=" << cfg.box_x.lo << "\n"
     << "box_x_hi=" << cfg.box_x.hi << "\n"
     << "box_y_lo=" << cfg.box_y.lo << "\n"
     << "box_y_hi=" << cfg.box_y.hi << "\n"
     << "eps_abs=" << cfg.eps_abs << "\n"
     << "eps_rel=" << cfg.eps_rel << "\n"
     << "reject_threshold=" << cfg.reject_threshold << "\n"
     << "samples=" << cfg.samples << "\n"
     << "min_samples=" << cfg.min_samples << "\n"
     << "max_draws=" << cfg.max_draws << "\n"
     << "seed=" << cfg.seed << "\n"
     << "step_fraction=" << cfg.step_fraction << "\n";
  return os.str();
}

}  // namespace sundman
