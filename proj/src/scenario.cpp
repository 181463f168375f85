#include "jbc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace jbc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::Vector2d lattice_point(const Scenario& sc, int i, int j) {
  const double d = sc.inter_site_distance;
  return {d * (i + 0.5 * j), d * (std::numbers::sqrt3 / 2.0) * j};
}

Eigen::Vector2d rotate60(const Eigen::Vector2d& v, int steps) {
  const double a = steps * (std::numbers::pi / 3.0);
  const double c = std::cos(a);
  const double s = std::sin(a);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

void check_layout(const Scenario& sc) {
  if (sc.num_relays != 7 && sc.num_relays != 19) {
    std::ostringstream os;
    os << "unsupported layout size " << sc.num_relays << " (7 or 19)";
    throw ParseError(os.str());
  }
  if (sc.num_users <= 0) throw ParseError("scenario needs at least one user");
  if (!(sc.inter_site_distance > 0.0)) throw ParseError("inter_site_distance must be positive");
  if (!(sc.bandwidth_hz > 0.0)) throw ParseError("bandwidth_hz must be positive");
  if (sc.relay_height < 0.0) throw ParseError("relay_height must be nonnegative");
}

// Voronoi membership around the origin site: closer to the origin than to
// each of its six lattice neighbors.
bool inside_cell(const Scenario& sc, const Eigen::Vector2d& q) {
  static const int neighbor_ij[6][2] = {{1, 0},  {0, 1},  {-1, 1},
                                        {-1, 0}, {0, -1}, {1, -1}};
  const double qq = q.squaredNorm();
  for (const auto& ij : neighbor_ij) {
    const Eigen::Vector2d n = lattice_point(sc, ij[0], ij[1]);
    if (qq > (q - n).squaredNorm()) return false;
  }
  return true;
}

}  // namespace

double RandomStream::uniform() {
  return (engine_() >> 11) * 0x1.0p-53;
}

Complex RandomStream::complex_normal() {
  double u1 = uniform();
  while (u1 == 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-std::log(u1));  // already scaled for unit |z|^2
  return {r * std::cos(kTwoPi * u2), r * std::sin(kTwoPi * u2)};
}

std::vector<Eigen::Vector2d> relay_positions(const Scenario& sc) {
  check_layout(sc);
  struct Site {
    Eigen::Vector2d pos;
    double radius;
    double angle;
  };
  std::vector<Site> sites;
  for (int i = -2; i <= 2; ++i) {
    for (int j = -2; j <= 2; ++j) {
      const Eigen::Vector2d p = lattice_point(sc, i, j);
      double angle = std::atan2(p.y(), p.x());
      if (angle < -1e-12) angle += kTwoPi;
      sites.push_back({p, p.norm(), angle});
    }
  }
  std::sort(sites.begin(), sites.end(), [&](const Site& a, const Site& b) {
    const double tol = 1e-9 * sc.inter_site_distance;
    if (std::abs(a.radius - b.radius) > tol) return a.radius < b.radius;
    return a.angle < b.angle;
  });
  std::vector<Eigen::Vector2d> out;
  out.reserve(sc.num_relays);
  for (int n = 0; n < sc.num_relays; ++n) out.push_back(sites[n].pos);
  return out;
}

std::vector<Eigen::Vector2d> wrap_translations(const Scenario& sc) {
  check_layout(sc);
  const Eigen::Vector2d shift = sc.num_relays == 7 ? lattice_point(sc, 2, 1)
                                                   : lattice_point(sc, 3, 2);
  std::vector<Eigen::Vector2d> out;
  out.reserve(7);
  out.push_back(Eigen::Vector2d::Zero());
  for (int s = 0; s < 6; ++s) out.push_back(rotate60(shift, s));
  return out;
}

double pathloss_db(const Scenario& sc, double distance_m) {
  return sc.pathloss_a + sc.pathloss_b * std::log10(distance_m / 1000.0);
}

double noise_power_watts(const Scenario& sc) {
  return std::pow(10.0, (sc.noise_psd_dbm_hz - 30.0) / 10.0) * sc.bandwidth_hz;
}

double link_distance(const Scenario& sc, const Eigen::Vector2d& user,
                     const Eigen::Vector2d& relay) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& t : wrap_translations(sc)) {
    best = std::min(best, (user - (relay + t)).squaredNorm());
  }
  return std::sqrt(best + sc.relay_height * sc.relay_height);
}

ProblemInstance generate_instance(const Scenario& sc, double gamma_db,
                                  double cbar, InstanceGeometry* geometry) {
  check_layout(sc);
  if (!(cbar > 0.0)) throw ParseError("cbar must be positive");
  const auto sites = relay_positions(sc);
  const auto shifts = wrap_translations(sc);
  const double noise_w = noise_power_watts(sc);
  const int M = sc.num_relays;
  const int K = sc.num_users;

  RandomStream rng(sc.seed);

  // Cell picked uniformly, then rejection sampling inside its hexagon.
  const double circumradius = sc.inter_site_distance / std::numbers::sqrt3;
  std::vector<Eigen::Vector2d> users;
  users.reserve(K);
  for (int k = 0; k < K; ++k) {
    const int cell = std::min<int>(M - 1, static_cast<int>(rng.uniform() * M));
    Eigen::Vector2d local;
    do {
      local.x() = (2.0 * rng.uniform() - 1.0) * circumradius;
      local.y() = (2.0 * rng.uniform() - 1.0) * circumradius;
    } while (!inside_cell(sc, local));
    users.push_back(sites[cell] + local);
  }

  Eigen::MatrixXd gains(K, M);
  std::vector<CVec> channels(K, CVec(M));
  for (int k = 0; k < K; ++k) {
    for (int m = 0; m < M; ++m) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& t : shifts) {
        best = std::min(best, (users[k] - (sites[m] + t)).squaredNorm());
      }
      const double dist = std::sqrt(best + sc.relay_height * sc.relay_height);
      const double gain_db = -pathloss_db(sc, dist);
      const double gain = std::pow(10.0, gain_db / 10.0) / noise_w;
      gains(k, m) = gain;
      channels[k][m] = std::sqrt(gain) * rng.complex_normal();
    }
  }

  if (geometry != nullptr) {
    geometry->users = users;
    geometry->gains = gains;
  }
  return ProblemInstance::from_db(std::move(channels), Vec::Ones(K),
                                  Vec::Constant(K, gamma_db),
                                  Vec::Constant(M, cbar));
}

}  // namespace jbc
