#include "sparsedom/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "sparsedom/detail/text.hpp"
#include "sparsedom/kernels.hpp"

namespace sparsedom {

namespace {
using i64 = std::int64_t;
}

GridFunction build_test_function(const Window& window, const Cube& support,
                                 const FunctionSpec& spec, std::uint64_t seed) {
  GridFunction f = GridFunction::zero(window);
  const Window::Span sp = window.span(support);
  const i64 cells = sp.count();
  if (cells == 0)
    throw PreconditionError("support cube has no cells in the window");

  if (spec.name == "indicator") {
    window.for_each(sp, [&](i64 i) { f[i] = 1.0; });
    return f;
  }
  if (spec.name == "spike") {
    i64 offset = spec.spike_cell >= 0 ? spec.spike_cell : cells / 2;
    if (offset >= cells)
      throw ConfigError("spike_cell", "outside the support cube");
    const i64 w = sp.hi[0] - sp.lo[0];
    const i64 gi = window.index(sp.lo[0] + offset % w, sp.lo[1] + offset / w);
    f[gi] = static_cast<double>(cells);
    return f;
  }
  if (spec.name == "random-step") {
    if (spec.blocks < 1 || cells % spec.blocks != 0)
      throw ConfigError("blocks", "must divide the support cell count");
    DeterministicRng rng(seed);
    std::vector<double> vals(static_cast<std::size_t>(spec.blocks));
    for (auto& v : vals) v = rng.uniform01();
    const i64 per = cells / spec.blocks;
    i64 k = 0;
    window.for_each(sp, [&](i64 i) {
      f[i] = vals[static_cast<std::size_t>(k / per)];
      ++k;
    });
    return f;
  }
  if (spec.name == "bump") {
    const double c0 = support.center_coord(0);
    const double c1 = support.dim() == 2 ? support.center_coord(1) : 0.0;
    const double half = support.side_length() / 2.0;
    window.for_each(sp, [&](i64 i) {
      const auto x = window.center(i);
      double d2 = (x[0] - c0) * (x[0] - c0);
      if (window.dim() == 2) d2 += (x[1] - c1) * (x[1] - c1);
      f[i] = std::max(0.0, 1.0 - d2 / (half * half));
    });
    return f;
  }
  throw ConfigError("function", "unknown test function '" + spec.name + "'");
}

Cube ExperimentConfig::support_cube() const {
  const i64 f = i64{1} << level;
  return Cube(dim, {support_corner * f, support_corner * f}, support_side * f,
              level);
}

Cube ExperimentConfig::window_cube() const {
  if (window_corner && window_side) {
    const i64 f = i64{1} << level;
    return Cube(dim, {*window_corner * f, *window_corner * f},
                *window_side * f, level);
  }
  i64 scale = 1;
  for (int k = 0; k < rings; ++k) scale *= 3;
  const Cube s = support_cube();
  return scale == 1 ? s : dilate(s, scale);
}

ExperimentConfig ExperimentConfig::parse_file(
    const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open config file " + path.string());
  return parse(is);
}

ExperimentConfig ExperimentConfig::parse(std::istream& is) {
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string key, eq;
    if (!(ls >> key)) continue;
    if (!(ls >> eq) || eq != "=")
      throw ConfigError(key, "expected 'key = value' on line " +
                                 std::to_string(lineno));
    std::string value;
    std::getline(ls, value);
    const auto first = value.find_first_not_of(" \t");
    value = first == std::string::npos ? "" : value.substr(first);
    const auto last = value.find_last_not_of(" \t\r");
    if (last != std::string::npos) value = value.substr(0, last + 1);
    if (value.empty()) throw ConfigError(key, "empty value");

    const auto as_int = [&](i64 lo, i64 hi) {
      i64 v = 0;
      try {
        v = detail::parse_int(value);
      } catch (const ParseError&) {
        throw ConfigError(key, "not an integer: '" + value + "'");
      }
      if (v < lo || v > hi)
        throw ConfigError(key, "value " + value + " out of range");
      return v;
    };
    const auto as_double = [&]() {
      try {
        return detail::parse_double(value);
      } catch (const ParseError&) {
        throw ConfigError(key, "not a number: '" + value + "'");
      }
    };

    if (key == "kernel") {
      cfg.kernel = value;
    } else if (key == "dim") {
      cfg.dim = static_cast<int>(as_int(1, 2));
    } else if (key == "level") {
      cfg.level = static_cast<int>(as_int(1, 14));
    } else if (key == "support_corner") {
      cfg.support_corner = as_int(-1000, 1000);
    } else if (key == "support_side") {
      cfg.support_side = as_int(1, 1000);
    } else if (key == "window_corner") {
      cfg.window_corner = as_int(-1000, 1000);
    } else if (key == "window_side") {
      cfg.window_side = as_int(1, 1000);
    } else if (key == "r") {
      cfg.r = as_double();
      if (!(cfg.r >= 1.0))
        throw ConfigError("r", "must be >= 1, got " + value);
    } else if (key == "rings") {
      cfg.rings = static_cast<int>(as_int(0, 6));
    } else if (key == "max_depth") {
      cfg.max_depth = static_cast<int>(as_int(0, 256));
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(as_int(0, INT64_MAX));
    } else if (key == "function") {
      cfg.function.name = value;
    } else if (key == "blocks") {
      cfg.function.blocks = as_int(1, 1 << 20);
    } else if (key == "spike_cell") {
      cfg.function.spike_cell = as_int(-1, i64{1} << 40);
    } else if (key == "family") {
      if (value != "shifted" && value != "exhaustive")
        throw ConfigError("family", "must be 'shifted' or 'exhaustive'");
      cfg.family = value;
    } else if (key == "sweep_p") {
      cfg.sweep_p = as_double();
    } else if (key == "sweep_r") {
      cfg.sweep_r = as_double();
    } else if (key == "alphas") {
      cfg.alphas.clear();
      std::string item;
      std::istringstream as(value);
      while (std::getline(as, item, ',')) {
        try {
          cfg.alphas.push_back(detail::parse_double(item));
        } catch (const ParseError&) {
          throw ConfigError("alphas", "bad entry '" + item + "'");
        }
      }
      if (cfg.alphas.empty()) throw ConfigError("alphas", "empty list");
    } else if (key == "weight_center") {
      cfg.weight_center = as_int(-1000000, 1000000);
    } else if (key == "trials") {
      cfg.trials = static_cast<int>(as_int(1, 100000));
    } else if (key == "out") {
      cfg.out_dir = value;
    } else {
      throw ConfigError(key, "unknown key");
    }
  }

  // cross-field validation
  try {
    builtin_kernel(cfg.kernel);
  } catch (const ConfigError&) {
    throw ConfigError("kernel", "unknown kernel '" + cfg.kernel + "'");
  }
  if (static_cast<bool>(cfg.window_corner) != static_cast<bool>(cfg.window_side))
    throw ConfigError("window_side",
                      "window_corner and window_side must appear together");
  return cfg;
}

}  // namespace sparsedom
