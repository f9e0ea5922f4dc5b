#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "starpdd/errors.hpp"
#include "starpdd/numerics.hpp"
#include "starpdd/rng.hpp"

namespace starpdd {

enum class Side { Transmit, Reflect };

struct SystemConfig {
  int m = 8;    // BS antennas
  int n = 20;   // surface elements
  int k = 6;    // users, half per side
  double pt_dbm = 20.0;
  double noise_dbm = -110.0;
  double rician_db = 3.0;
  double path_loss_exponent = 2.2;
  double pl0_db = 30.0;  // path loss at 1 m
  double bs_distance_m = 50.0;
  double bs_angle_deg = 20.0;
  double user_radius_m = 3.0;
  std::uint64_t seed = 1;

  void validate() const {
    if (m < 1 || n < 1 || k < 1) {
      throw InvalidInputError("SystemConfig: m, n, k must be >= 1");
    }
    if (k % 2 != 0) {
      throw InvalidInputError("SystemConfig: k must be even");
    }
    if (!std::isfinite(pt_dbm) || !std::isfinite(noise_dbm) ||
        !std::isfinite(rician_db) || !std::isfinite(path_loss_exponent) ||
        !std::isfinite(pl0_db)) {
      throw InvalidInputError("SystemConfig: non-finite parameter");
    }
    if (bs_distance_m <= 0.0 || user_radius_m <= 0.0) {
      throw InvalidInputError("SystemConfig: distances must be positive");
    }
  }

  double pt_watts() const { return std::pow(10.0, (pt_dbm - 30.0) / 10.0); }
  double noise_watts() const {
    return std::pow(10.0, (noise_dbm - 30.0) / 10.0);
  }
  double rician_linear() const { return std::pow(10.0, rician_db / 10.0); }
};

struct ChannelSet {
  ComplexMatrix g;                 // N x M, BS to surface
  std::vector<ComplexVector> h;    // K vectors of length N, surface to user
  RealVector sigma2;               // per-user noise power, watts
  std::vector<Side> side;          // first K/2 transmit, rest reflect
};

inline double pathloss_linear(double d_m, const SystemConfig& config) {
  if (!(d_m > 0.0) || !std::isfinite(d_m)) {
    throw InvalidInputError("pathloss_linear: distance must be positive");
  }
  return std::pow(10.0, -config.pl0_db / 10.0) *
         std::pow(d_m, -config.path_loss_exponent);
}

/// Half-wavelength ULA steering vector, element n gets e^{j pi n cos(a)}.
inline ComplexVector steering_vector(int n, double angle_rad) {
  ComplexVector a(n);
  const double c = std::cos(angle_rad);
  for (int i = 0; i < n; ++i) {
    a[i] = std::polar(1.0, kPi * static_cast<double>(i) * c);
  }
  return a;
}

/// Azimuth of user u (0-based) as seen from the surface, radians. Users on
/// each side sit equally spaced inside (15, 165) degrees on a half-circle;
/// the reflect side is offset by 180 degrees.
inline double user_angle_rad(const SystemConfig& config, int user) {
  const int half = config.k / 2;
  const bool reflect = user >= half;
  const int slot = reflect ? user - half : user;
  const double deg =
      15.0 + 150.0 * static_cast<double>(slot + 1) / (half + 1) +
      (reflect ? 180.0 : 0.0);
  return deg * kPi / 180.0;
}

/// Draws one Rician channel realization. Entries come out of the stream in
/// a pinned order (G row-major, then h_0..h_{K-1}) so results depend only
/// on (config, realization).
inline ChannelSet generate_channels(const SystemConfig& config,
                                    std::uint64_t realization = 0) {
  config.validate();
  const int m = config.m;
  const int n = config.n;
  const int k = config.k;
  Rng rng(config.seed + realization);

  const double kappa = config.rician_linear();
  const double w_los = std::sqrt(kappa / (1.0 + kappa));
  const double w_nlos = std::sqrt(1.0 / (1.0 + kappa));

  ChannelSet cs;
  cs.g.resize(n, m);
  const double bs_rad = config.bs_angle_deg * kPi / 180.0;
  const ComplexVector a_ris = steering_vector(n, bs_rad);
  const ComplexVector a_bs = steering_vector(m, bs_rad);
  const double amp_g = std::sqrt(pathloss_linear(config.bs_distance_m, config));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      const Complex los = a_ris[i] * std::conj(a_bs[j]);
      cs.g(i, j) = amp_g * (w_los * los + w_nlos * rng.complex_normal());
    }
  }

  const double amp_h = std::sqrt(pathloss_linear(config.user_radius_m, config));
  cs.h.resize(k);
  for (int u = 0; u < k; ++u) {
    const ComplexVector a_u = steering_vector(n, user_angle_rad(config, u));
    cs.h[u].resize(n);
    for (int i = 0; i < n; ++i) {
      cs.h[u][i] = amp_h * (w_los * a_u[i] + w_nlos * rng.complex_normal());
    }
  }

  cs.sigma2 = RealVector::Constant(k, config.noise_watts());
  cs.side.resize(k);
  for (int u = 0; u < k; ++u) {
    cs.side[u] = u < k / 2 ? Side::Transmit : Side::Reflect;
  }
  return cs;
}

}  // namespace starpdd
