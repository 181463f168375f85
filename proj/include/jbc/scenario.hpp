#pragma once

#include "jbc/types.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

namespace jbc {

// Multi-cell layout: relays at the centers of a hexagonal cluster (7 or 19
// sites) with wrap-around at the cluster boundary, single-antenna users
// dropped uniformly over the covered area, distance-law pathloss with
// Rayleigh fading, channels normalized to unit noise power.
struct Scenario {
  int num_relays = 7;  // 7 or 19
  int num_users = 8;
  double inter_site_distance = 150.0;  // meters
  double relay_height = 30.0;          // meters
  double pathloss_a = 140.7;           // dB at 1 km
  double pathloss_b = 36.7;            // dB per decade of km
  double noise_psd_dbm_hz = -169.0;
  double bandwidth_hz = 2e7;
  std::uint64_t seed = 1;
};

// Site coordinates on the hexagonal lattice, cluster center first, rings
// ordered by radius then angle. Throws ParseError for unsupported sizes.
std::vector<Eigen::Vector2d> relay_positions(const Scenario& sc);

// The identity shift plus the six cluster translations that implement the
// wrap-around; every point-to-site distance is taken as the minimum over
// these images.
std::vector<Eigen::Vector2d> wrap_translations(const Scenario& sc);

double pathloss_db(const Scenario& sc, double distance_m);

double noise_power_watts(const Scenario& sc);

// Wrap-around 3-D distance between a ground-level user and an elevated
// relay.
double link_distance(const Scenario& sc, const Eigen::Vector2d& user,
                     const Eigen::Vector2d& relay);

// Per-draw geometry, exposed for statistical checks.
struct InstanceGeometry {
  std::vector<Eigen::Vector2d> users;
  Eigen::MatrixXd gains;  // K x M normalized pathloss gains
};

// Draws user positions and fading and assembles a unit-noise instance with
// uniform SINR targets (dB) and fronthaul caps. Deterministic in sc.seed.
ProblemInstance generate_instance(const Scenario& sc, double gamma_db = 4.0,
                                  double cbar = 3.0,
                                  InstanceGeometry* geometry = nullptr);

// Deterministic stream of uniforms and complex normals used by the
// generator; Box-Muller on top of a 64-bit Mersenne engine so draws do not
// depend on library internals.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
  double uniform();         // [0, 1)
  Complex complex_normal(); // circularly symmetric, unit variance
 private:
  std::mt19937_64 engine_;
};

}  // namespace jbc
