#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <numbers>
#include <type_traits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "nlosbound/geometry.hpp"
#include "nlosbound/rng.hpp"

namespace nlosbound {

// Nonnegative range-error laws. Parameters are in meters (rate in 1/m).
struct ExponentialNoise {
  double rate = 1.0;
};
struct UniformNoise {
  double upper = 1.0;
};
struct PositiveGaussianNoise {
  double mean = 1.0;
  double stddev = 1.0;
};

using NoiseModel = std::variant<ExponentialNoise, UniformNoise, PositiveGaussianNoise>;

inline void validate(const NoiseModel& model) {
  std::visit(
      [](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, ExponentialNoise>) {
          if (!(m.rate > 0.0) || !std::isfinite(m.rate)) throw std::invalid_argument("exponential rate must be > 0");
        } else if constexpr (std::is_same_v<M, UniformNoise>) {
          if (!(m.upper > 0.0) || !std::isfinite(m.upper)) throw std::invalid_argument("uniform upper must be > 0");
        } else {
          if (!(m.mean > 0.0) || !std::isfinite(m.mean)) throw std::invalid_argument("gaussian mean must be > 0");
          if (!(m.stddev > 0.0) || !std::isfinite(m.stddev)) throw std::invalid_argument("gaussian stddev must be > 0");
        }
      },
      model);
}

/// Exponential draw by inverse CDF from a given u in (0,1].
inline double exponential_from_uniform(double rate, double u) { return -std::log(u) / rate; }

inline double sample_noise(const NoiseModel& model, SplitMix64& rng) {
  validate(model);
  return std::visit(
      [&rng](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, ExponentialNoise>) {
          return exponential_from_uniform(m.rate, rng.uniform_positive());
        } else if constexpr (std::is_same_v<M, UniformNoise>) {
          return m.upper * rng.uniform();
        } else {
          // Box-Muller, one variate per pair; rejected until nonnegative.
          for (;;) {
            const double u1 = rng.uniform_positive();
            const double u2 = rng.uniform();
            const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
            const double eps = m.mean + m.stddev * z;
            if (eps >= 0.0) return eps;
          }
        }
      },
      model);
}

namespace detail {
inline std::string format_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse " + what + " from '" + text + "'");
  }
  if (used != text.size()) throw std::invalid_argument("trailing characters in " + what + ": '" + text + "'");
  return v;
}
}  // namespace detail

/// `exp:RATE`, `uni:UPPER` or `posgauss:MEAN,STD`.
inline std::string to_string(const NoiseModel& model) {
  return std::visit(
      [](const auto& m) -> std::string {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, ExponentialNoise>) {
          return "exp:" + detail::format_g(m.rate);
        } else if constexpr (std::is_same_v<M, UniformNoise>) {
          return "uni:" + detail::format_g(m.upper);
        } else {
          return "posgauss:" + detail::format_g(m.mean) + "," + detail::format_g(m.stddev);
        }
      },
      model);
}

inline NoiseModel parse_noise(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("noise must look like exp:RATE, uni:UPPER or posgauss:MEAN,STD");
  const std::string kind = spec.substr(0, colon);
  const std::string args = spec.substr(colon + 1);
  NoiseModel model;
  if (kind == "exp") {
    model = ExponentialNoise{detail::parse_double(args, "exponential rate")};
  } else if (kind == "uni") {
    model = UniformNoise{detail::parse_double(args, "uniform upper")};
  } else if (kind == "posgauss") {
    const auto comma = args.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("posgauss needs MEAN,STD");
    model = PositiveGaussianNoise{detail::parse_double(args.substr(0, comma), "gaussian mean"),
                                  detail::parse_double(args.substr(comma + 1), "gaussian stddev")};
  } else {
    throw std::invalid_argument("unknown noise kind '" + kind + "'");
  }
  validate(model);
  return model;
}

struct ScenarioConfig {
  int dim = 3;
  int num_anchors = 10;
  double cube_side = 10.0;
  NoiseModel noise = ExponentialNoise{1.0};

  void validate() const {
    if (dim < 1) throw std::invalid_argument("dim must be >= 1");
    if (num_anchors < 1) throw std::invalid_argument("num_anchors must be >= 1");
    if (!(cube_side > 0.0) || !std::isfinite(cube_side)) throw std::invalid_argument("cube_side must be > 0");
    nlosbound::validate(noise);
  }
};

/// Anchors, measured ranges and (for simulated data) the true target.
struct Scenario {
  std::vector<Point> anchors;
  std::vector<double> ranges;
  std::optional<Point> target;

  std::size_t dim() const { return anchors.empty() ? 0 : anchors.front().dim(); }

  Region region() const {
    if (anchors.size() != ranges.size()) throw std::invalid_argument("anchors and ranges differ in length");
    std::vector<Ball> balls;
    balls.reserve(anchors.size());
    for (std::size_t i = 0; i < anchors.size(); ++i) balls.emplace_back(anchors[i], ranges[i]);
    return Region(std::move(balls));
  }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

inline Point uniform_point(SplitMix64& rng, std::size_t dim, double side) {
  Point p(dim);
  for (std::size_t i = 0; i < dim; ++i) p[i] = rng.uniform(0.0, side);
  return p;
}

/// Anchors and target i.i.d. uniform in [0, L]^n, ranges = distance + noise.
/// Anchors, target and noise each draw from their own sub-stream of `seed`.
inline Scenario generate_scenario(const ScenarioConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(cfg.dim);
  SplitMix64 anchor_rng(derive_seed(seed, Stream::kAnchors));
  SplitMix64 target_rng(derive_seed(seed, Stream::kTarget));
  SplitMix64 noise_rng(derive_seed(seed, Stream::kNoise));

  Scenario s;
  s.anchors.reserve(cfg.num_anchors);
  for (int i = 0; i < cfg.num_anchors; ++i) s.anchors.push_back(uniform_point(anchor_rng, n, cfg.cube_side));
  s.target = uniform_point(target_rng, n, cfg.cube_side);
  s.ranges.reserve(cfg.num_anchors);
  for (const Point& a : s.anchors) s.ranges.push_back(distance(a, *s.target) + sample_noise(cfg.noise, noise_rng));
  return s;
}

}  // namespace nlosbound
