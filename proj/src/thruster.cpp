#include "pubsim/thruster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "pubsim/error.hpp"

namespace pubsim {

void GasIonParams::validate() const {
  const double fields[] = {ion_mass_m, neutral_mass_M, temperature_T, ion_charge_q,
                           collision_cross_section, n_ion, n_air};
  for (double f : fields) {
    if (!(f > 0.0) || !std::isfinite(f)) {
      throw Error(ErrorCode::InvalidArgument, "gas/ion parameters must be finite and positive");
    }
  }
}

GasIonParams nitrogen_like_gas() {
  GasIonParams p;
  p.ion_mass_m = 4.65e-26;
  p.neutral_mass_M = 4.65e-26;
  p.temperature_T = 300.0;
  p.ion_charge_q = kElementaryCharge;
  p.collision_cross_section = 1e-19;
  p.n_ion = 1e15;
  p.n_air = 2.5e25;
  return p;
}

namespace {

double reduced_mass(const GasIonParams& p) {
  return p.ion_mass_m * p.neutral_mass_M / (p.ion_mass_m + p.neutral_mass_M);
}

}  // namespace

Vec3 collision_force_density(const GasIonParams& p, const Vec3& slip_u) {
  p.validate();
  const double kt = kBoltzmann * p.temperature_T;
  const double coeff = 64.0 / 9.0 * p.collision_cross_section * std::sqrt(kt / (2.0 * kPi)) *
                       std::sqrt(reduced_mass(p)) * p.n_ion * p.n_air;
  return coeff * slip_u;
}

MonteCarloEstimate collision_force_density_monte_carlo(const GasIonParams& p,
                                                       const Vec3& slip_u,
                                                       std::size_t sample_pairs,
                                                       std::uint64_t seed,
                                                       simd::Backend backend) {
  p.validate();
  if (sample_pairs < 2) {
    throw Error(ErrorCode::InvalidArgument, "Monte-Carlo needs at least two sample pairs");
  }
  const double kt = kBoltzmann * p.temperature_T;
  const double sigma_air = std::sqrt(kt / p.neutral_mass_M);
  const double sigma_ion = std::sqrt(kt / p.ion_mass_m);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  constexpr std::size_t kBlock = 4096;
  std::vector<double> buf(6 * kBlock);
  const double slip[3] = {slip_u.x(), slip_u.y(), slip_u.z()};
  simd::MomentSums sums;

  for (std::size_t done = 0; done < sample_pairs;) {
    const std::size_t n = std::min(kBlock, sample_pairs - done);
    double* ax = buf.data();
    double* ay = ax + kBlock;
    double* az = ay + kBlock;
    double* ix = az + kBlock;
    double* iy = ix + kBlock;
    double* iz = iy + kBlock;
    for (std::size_t i = 0; i < n; ++i) {
      ax[i] = sigma_air * normal(rng);
      ay[i] = sigma_air * normal(rng);
      az[i] = sigma_air * normal(rng);
      ix[i] = sigma_ion * normal(rng);
      iy[i] = sigma_ion * normal(rng);
      iz[i] = sigma_ion * normal(rng);
    }
    const simd::VelocityBlock block{{ax, n}, {ay, n}, {az, n}, {ix, n}, {iy, n}, {iz, n}};
    simd::accumulate_collision_moments(backend, block, slip, sums);
    done += n;
  }

  // Hard-sphere momentum transfer: Omega_D |g| (4/3) mu g, both densities.
  const double prefactor =
      p.collision_cross_section * 4.0 / 3.0 * reduced_mass(p) * p.n_air * p.n_ion;
  const double count = static_cast<double>(sums.count);
  MonteCarloEstimate out;
  out.sample_pairs = sums.count;
  for (int c = 0; c < 3; ++c) {
    const double mean = sums.sum[c] / count;
    const double var = std::max(0.0, sums.sum_sq[c] / count - mean * mean) * count / (count - 1.0);
    out.force_density[c] = prefactor * mean;
    out.standard_error[c] = prefactor * std::sqrt(var / count);
  }
  return out;
}

double ion_mobility(const GasIonParams& p, std::optional<double> override_mobility) {
  if (override_mobility) {
    if (!(*override_mobility > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "mobility override must be positive");
    }
    return *override_mobility;
  }
  p.validate();
  const double kt = kBoltzmann * p.temperature_T;
  return 9.0 / 64.0 * (p.ion_charge_q / p.n_air) * std::sqrt(2.0 * kPi / kt) *
         std::sqrt(1.0 / p.ion_mass_m + 1.0 / p.neutral_mass_M) * p.collision_cross_section;
}

double ion_mobility_force_balance(const GasIonParams& p) {
  p.validate();
  const double kt = kBoltzmann * p.temperature_T;
  return 9.0 / 64.0 * (p.ion_charge_q / p.n_air) * std::sqrt(2.0 * kPi / kt) *
         std::sqrt(1.0 / p.ion_mass_m + 1.0 / p.neutral_mass_M) / p.collision_cross_section;
}

double einstein_diffusivity(double mobility, double temperature, double charge) {
  if (!(mobility >= 0.0 && temperature > 0.0 && charge > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "diffusivity needs mu >= 0, T > 0, q > 0");
  }
  return mobility * kBoltzmann * temperature / charge;
}

double thrust_magnitude_from_current(double gap, double current, double mobility) {
  if (!(gap > 0.0 && current >= 0.0 && mobility > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "thrust law needs l > 0, I >= 0, mu > 0");
  }
  return gap * current / mobility;
}

Vec3 thrust_from_current(const Vec3& gap_vector, double current, double mobility) {
  const double gap = gap_vector.norm();
  const double magnitude = thrust_magnitude_from_current(gap, current, mobility);
  return -magnitude * gap_vector / gap;
}

double thrust_to_weight(double thrust, double dry_mass) {
  if (!(dry_mass > 0.0)) throw Error(ErrorCode::InvalidArgument, "dry mass must be positive");
  return thrust / dry_mass;
}

ThrusterPreset quad_ring_thruster() {
  return ThrusterPreset{"quad_ring", ThrusterGeometry{0.030, 4, 9.44e-3, 0.1e-3, 40e-3, 19.64e-3},
                        0.051};
}

ThrusterPreset dual_ring_thruster() {
  return ThrusterPreset{"dual_ring", ThrusterGeometry{0.030, 2, 9.44e-3, 0.1e-3, 40e-3, 16.00e-3},
                        grams_force_to_newtons(1.16)};
}

ThrustMap::ThrustMap(std::string name, std::vector<std::pair<double, double>> samples,
                     Interpolation mode)
    : name_(std::move(name)), samples_(std::move(samples)), mode_(mode) {
  if (samples_.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "thrust map '" + name_ + "' needs two samples");
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i].first) || !std::isfinite(samples_[i].second) ||
        samples_[i].second < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "thrust map '" + name_ + "' has a bad sample");
    }
    if (i > 0 && !(samples_[i].first > samples_[i - 1].first)) {
      throw Error(ErrorCode::InvalidArgument,
                  "thrust map '" + name_ + "' inputs must be strictly increasing");
    }
  }
}

ThrustMap ThrustMap::parse(const std::string& name, const std::string& text) {
  std::vector<std::pair<double, double>> samples;
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    fields.imbue(std::locale::classic());
    double x = 0.0, y = 0.0;
    if (!(fields >> x)) continue;  // blank line
    std::string extra;
    if (!(fields >> y) || (fields >> extra)) {
      throw Error(ErrorCode::ConfigError,
                  name + ":" + std::to_string(lineno) + ": expected two numeric columns");
    }
    samples.emplace_back(x, y);
  }
  return ThrustMap(name, std::move(samples));
}

ThrustMap ThrustMap::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open thrust map " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(path.stem().string(), buf.str());
}

double ThrustMap::grams_at(double input) const {
  if (!(input >= min_input() && input <= max_input())) {
    throw Error(ErrorCode::OutOfRange, "input outside thrust map '" + name_ + "' range");
  }
  auto hi = std::lower_bound(samples_.begin(), samples_.end(), input,
                             [](const auto& s, double x) { return s.first < x; });
  if (hi->first == input) return hi->second;
  auto lo = hi - 1;
  switch (mode_) {
    case Interpolation::Linear: {
      const double f = (input - lo->first) / (hi->first - lo->first);
      return lo->second + f * (hi->second - lo->second);
    }
  }
  return hi->second;
}

ThrustMap dual_ring_throttle_map() {
  return ThrustMap("dual_ring_throttle", {{0.20, 0.00}, {0.30, 0.06}, {0.40, 0.12},
                                          {0.50, 0.31}, {0.60, 0.45}, {0.70, 0.58},
                                          {0.80, 0.70}, {0.90, 1.16}, {1.00, 1.20}});
}

// Thrust is stored against spacing in metres.
ThrustMap dual_ring_spacing_map() {
  return ThrustMap("dual_ring_spacing", {{0.030, 1.16}, {0.035, 1.10}, {0.040, 0.99},
                                         {0.045, 0.90}, {0.050, 0.80}});
}

double throttle_to_thrust(const ThrustMap& map, double throttle) {
  if (!(throttle >= 0.0 && throttle <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "throttle must lie in [0, 1]");
  }
  if (throttle < map.min_input()) return 0.0;
  if (throttle > map.max_input()) {
    throw Error(ErrorCode::OutOfRange, "throttle beyond map '" + map.name() + "'");
  }
  return grams_force_to_newtons(map.grams_at(throttle));
}

SpacingThrust spacing_to_thrust(const ThrustMap& map, double spacing, double puncture_spacing) {
  if (!(spacing > 0.0)) throw Error(ErrorCode::InvalidArgument, "spacing must be positive");
  if (spacing <= puncture_spacing) {
    throw Error(ErrorCode::PunctureFault,
                "electrode spacing at or below the foil puncture limit");
  }
  if (spacing < map.min_input()) {
    const auto& s = map.samples();
    const double slope = (s[1].second - s[0].second) / (s[1].first - s[0].first);
    const double grams = s[0].second + slope * (spacing - s[0].first);
    return SpacingThrust{grams_force_to_newtons(grams), true};
  }
  return SpacingThrust{grams_force_to_newtons(map.grams_at(spacing)), false};
}

ThrustMap thrust_map_preset(const std::string& name) {
  if (name == "dual_ring_throttle") return dual_ring_throttle_map();
  if (name == "dual_ring_spacing") return dual_ring_spacing_map();
  throw Error(ErrorCode::ConfigError, "unknown thrust map preset '" + name + "'");
}

}  // namespace pubsim
