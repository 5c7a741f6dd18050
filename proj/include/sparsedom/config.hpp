#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sparsedom/grid_function.hpp"

namespace sparsedom {

/// All randomness in the project flows through this generator: mt19937_64
/// with explicit 53-bit uniforms, so runs are bit-reproducible from the seed
/// across platforms.
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : gen_(seed) {}
  std::uint64_t next() { return gen_(); }
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1p-53; }
  std::int64_t uniform_int(std::int64_t n) {
    return static_cast<std::int64_t>(gen_() % static_cast<std::uint64_t>(n));
  }

 private:
  std::mt19937_64 gen_;
};

/// Named test functions; part of the reproducibility contract.
///   indicator    1 on the support cube
///   spike        one tall cell (value = support cell count) at spike_cell
///   random-step  `blocks` equal blocks with uniform01 values
///   bump         1 - (2(x-c)/side)^2 clipped at 0, sampled at centers
struct FunctionSpec {
  std::string name = "indicator";
  std::int64_t blocks = 16;
  std::int64_t spike_cell = -1;  // support-relative; -1 = center
};

GridFunction build_test_function(const Window& window, const Cube& support,
                                 const FunctionSpec& spec, std::uint64_t seed);

struct ExperimentConfig {
  std::string kernel = "hilbert";
  int dim = 1;
  int level = 10;
  std::int64_t support_corner = 0;  // unit scale
  std::int64_t support_side = 1;
  std::optional<std::int64_t> window_corner;  // unit scale; defaults to the
  std::optional<std::int64_t> window_side;    // ring-partition window
  double r = 1.0;
  int rings = 2;
  int max_depth = 64;
  std::uint64_t seed = 42;
  FunctionSpec function;
  std::string family = "shifted";  // or "exhaustive"
  // weight sweep
  double sweep_p = 2.0;
  double sweep_r = 1.0;
  std::vector<double> alphas{0.0};
  std::int64_t weight_center = 0;  // unit scale lattice point
  int trials = 24;
  std::string out_dir = "out";

  Cube support_cube() const;
  Cube window_cube() const;  // explicit window or 3^rings * support
  Window window() const { return Window(window_cube()); }

  static ExperimentConfig parse_file(const std::filesystem::path& path);
  static ExperimentConfig parse(std::istream& is);
};

}  // namespace sparsedom
