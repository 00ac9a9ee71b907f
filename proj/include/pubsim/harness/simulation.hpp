#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "pubsim/format.hpp"
#include "pubsim/harness/scenario.hpp"

namespace pubsim {

enum SimFlag : std::uint32_t {
  kFlagNone = 0,
  kFlagServoSaturated = 1u << 0,
  kFlagSlewLimited = 1u << 1,
  kFlagThrustSaturated = 1u << 2,
  kFlagAllocationResidual = 1u << 3,
  kFlagPuncture = 1u << 4,
  kFlagExtrapolatedMap = 1u << 5,
  kFlagGroundContact = 1u << 6,
  kFlagFlowClipped = 1u << 7,
};

struct SimRecord {
  double t = 0.0;
  BodyState state;
  ThrusterCommand command;  // as applied to the plant
  ServoPositions servo;
  Vec3 sliding = Vec3::Zero();
  Vec3 lyapunov = Vec3::Zero();
  Vec3 lyapunov_rate = Vec3::Zero();  // s * s_dot from the plant response
  Vec3 generalized_force = Vec3::Zero();
  Vec3 residual = Vec3::Zero();
  std::uint32_t flags = kFlagNone;
};

struct SimSummary {
  std::size_t steps = 0;
  double duration = 0.0;
  double max_speed = 0.0;
  double final_speed = 0.0;
  double final_altitude = 0.0;
  double min_altitude = 0.0;
  double final_heading = 0.0;
  double final_heading_error = 0.0;
  double final_position_error = 0.0;
  double initial_sliding_norm = 0.0;
  double final_sliding_norm = 0.0;
  double sliding_reach_time = -1.0;   // first t with |s|_inf < 1e-3, -1 if never
  double reaching_time_bound = -1.0;
  double initial_sliding_energy = 0.0;
  double final_sliding_energy = 0.0;
  double speed_time_constant = -1.0;  // 63.2 % rise time of du, inner loop only
  double final_speed_perturbation = 0.0;
  std::size_t flagged_records = 0;
  std::uint32_t flags_seen = kFlagNone;
};

struct SimResult {
  std::vector<SimRecord> records;
  SimSummary summary;
};

/// Runs the scenario with a fixed-step RK4 loop. Deterministic for a fixed
/// scenario and seed.
SimResult run_scenario(const Scenario& scenario);

/// Fixed CSV column order, '.' decimal separator, shortest round-trip digits.
void write_csv(std::ostream& out, const std::vector<SimRecord>& records);
void write_summary(std::ostream& out, const SimSummary& summary);

std::string csv_header();

/// RK4 integration of the closed speed loop y_dot = -rate y + numerator
/// driven by a unit step reference.
std::vector<StepSample> simulate_speed_loop(const FirstOrderLoop& loop, double duration,
                                            double dt);

/// Time of the first 63.2 % crossing of the final value, interpolated
/// between samples. -1 if never reached.
double first_order_time_constant(const std::vector<StepSample>& response, double final_value);

}  // namespace pubsim
