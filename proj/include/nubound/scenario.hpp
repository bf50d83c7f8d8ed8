#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nubound/errors.hpp"
#include "nubound/mapping.hpp"
#include "nubound/norm.hpp"
#include "nubound/num.hpp"
#include "nubound/random.hpp"
#include "nubound/vector.hpp"

namespace nubound {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point2&) const = default;
};

inline double distance(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct Geometry {
  std::vector<Point2> transmitters;
  std::vector<Point2> receivers;
  bool operator==(const Geometry&) const = default;
};

/// Point-to-point links: transmitter j, receiver i, gain G(i, j) from j to i.
struct NetworkScenario {
  std::size_t num_links = 0;
  /// Linear power gains, G(i, j) from transmitter j to receiver i.
  Matrix gain;
  /// Receiver noise powers in watts.
  std::vector<double> noise_power;
  /// Linear SINR weights gamma_i.
  std::vector<double> sinr_targets;
  std::optional<Geometry> geometry;
  std::uint64_t seed = 0;

  void validate() const {
    const std::size_t n = num_links;
    if (n == 0) throw std::invalid_argument("scenario: num_links must be at least 1");
    if (gain.rows() != n || gain.cols() != n)
      throw DimensionMismatch("scenario gain matrix", n, gain.rows() != n ? gain.rows() : gain.cols());
    if (noise_power.size() != n) throw DimensionMismatch("scenario noise_power", n, noise_power.size());
    if (sinr_targets.size() != n) throw DimensionMismatch("scenario sinr_targets", n, sinr_targets.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (!(gain(i, i) > 0.0) || !std::isfinite(gain(i, i)))
        throw std::invalid_argument("scenario: non-positive direct gain G[" + std::to_string(i) + "][" +
                                    std::to_string(i) + "]");
      for (std::size_t j = 0; j < n; ++j)
        if (!(gain(i, j) >= 0.0) || !std::isfinite(gain(i, j)))
          throw std::invalid_argument("scenario: negative or non-finite gain G[" + std::to_string(i) + "][" +
                                      std::to_string(j) + "]");
      if (!(noise_power[i] > 0.0) || !std::isfinite(noise_power[i]))
        throw std::invalid_argument("scenario: noise power must be positive (link " + std::to_string(i) + ")");
      if (!(sinr_targets[i] > 0.0) || !std::isfinite(sinr_targets[i]))
        throw std::invalid_argument("scenario: SINR target must be positive (link " + std::to_string(i) + ")");
    }
    if (geometry && (geometry->transmitters.size() != n || geometry->receivers.size() != n))
      throw DimensionMismatch("scenario geometry", n, geometry->transmitters.size());
  }

  bool operator==(const NetworkScenario&) const = default;
};

struct ScenarioConfig {
  std::size_t num_links = 2;
  /// Side of the square deployment area in meters.
  double area_side = 1000.0;
  /// Receivers are dropped uniformly in a disc of this radius around their transmitter.
  double max_link_distance = 50.0;
  double path_loss_exponent = 3.7;
  /// Path loss at the 1 m reference distance, dB.
  double reference_loss_db = 30.0;
  double noise_psd_dbm_per_hz = -154.0;
  double bandwidth_hz = 1e7;
  double target_sinr_db = 0.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (num_links < 2) throw std::invalid_argument("ScenarioConfig: num_links must be at least 2");
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string("ScenarioConfig: ") + name + " must be positive");
    };
    positive(area_side, "area_side");
    positive(max_link_distance, "max_link_distance");
    positive(path_loss_exponent, "path_loss_exponent");
    positive(bandwidth_hz, "bandwidth_hz");
    if (!std::isfinite(reference_loss_db) || !std::isfinite(noise_psd_dbm_per_hz) || !std::isfinite(target_sinr_db))
      throw std::invalid_argument("ScenarioConfig: dB quantities must be finite");
  }
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Log-distance path gain with the distance clamped to the 1 m reference.
inline double path_gain(double distance_m, double reference_loss_db, double exponent) {
  return db_to_linear(-reference_loss_db) * std::pow(std::max(distance_m, 1.0), -exponent);
}

/// Noise power in watts from a PSD in dBm/Hz over a bandwidth in Hz.
inline double noise_power_watts(double psd_dbm_per_hz, double bandwidth_hz) {
  return db_to_linear(psd_dbm_per_hz - 30.0) * bandwidth_hz;
}

/**
 * Random deployment: transmitters uniform in the square, each receiver
 * uniform in a disc of radius max_link_distance around its transmitter
 * (clamped to the square). Reproducible for a given config.
 */
inline NetworkScenario generate_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.num_links;
  Rng rng(cfg.seed);
  Geometry geo;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 tx{rng.uniform(0.0, cfg.area_side), rng.uniform(0.0, cfg.area_side)};
    const double r = cfg.max_link_distance * std::sqrt(rng.uniform());
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    const Point2 rx{std::clamp(tx.x + r * std::cos(theta), 0.0, cfg.area_side),
                    std::clamp(tx.y + r * std::sin(theta), 0.0, cfg.area_side)};
    geo.transmitters.push_back(tx);
    geo.receivers.push_back(rx);
  }

  NetworkScenario s;
  s.num_links = n;
  s.gain = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      s.gain(i, j) = path_gain(distance(geo.receivers[i], geo.transmitters[j]), cfg.reference_loss_db,
                               cfg.path_loss_exponent);
  s.noise_power.assign(n, noise_power_watts(cfg.noise_psd_dbm_per_hz, cfg.bandwidth_hz));
  s.sinr_targets.assign(n, db_to_linear(cfg.target_sinr_db));
  s.geometry = std::move(geo);
  s.seed = cfg.seed;
  return s;
}

/// Weighted SINR mapping t_i(p) = gamma_i (sigma_i + sum_{j != i} G_ij p_j) / G_ii.
inline InterferenceMapping build_mapping(const NetworkScenario& s) {
  s.validate();
  const std::size_t n = s.num_links;
  Matrix a(n, n);
  std::vector<double> b(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double scale = s.sinr_targets[i] / s.gain(i, i);
    for (std::size_t j = 0; j < n; ++j) a(i, j) = i == j ? 0.0 : scale * s.gain(i, j);
    b[i] = scale * s.noise_power[i];
  }
  return InterferenceMapping::affine(std::move(a), std::move(b));
}

/// Spectral radius of the scenario's normalized gain matrix (= lambda_inf).
inline double scenario_spectral_radius(const NetworkScenario& s) {
  return lambda_infinity(build_mapping(s), MonotoneNorm::linf(s.num_links)).lambda_inf;
}

} // namespace nubound
