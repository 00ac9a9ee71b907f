#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pubsim/error.hpp"
#include "pubsim/format.hpp"
#include "pubsim/harness/scenario.hpp"
#include "pubsim/harness/simulation.hpp"
#include "pubsim/inner_loop.hpp"
#include "pubsim/thruster.hpp"

using namespace pubsim;

namespace {

constexpr int kExitError = 1;
constexpr int kExitNotCertified = 2;

void write_to(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

int cmd_simulate(const std::string& file, const std::string& csv_opt,
                 const std::string& summary_opt) {
  const Scenario sc = load_scenario(file);
  const SimResult res = run_scenario(sc);

  std::ostringstream csv;
  write_csv(csv, res.records);
  std::ostringstream summary;
  summary << "scenario=" << file << '\n'
          << "model=" << to_string(sc.model) << '\n'
          << "controller=" << to_string(sc.controller) << '\n';
  write_summary(summary, res.summary);

  const auto csv_path = !csv_opt.empty() ? std::optional<std::filesystem::path>(csv_opt)
                                         : sc.output_csv;
  const auto summary_path = !summary_opt.empty()
                                ? std::optional<std::filesystem::path>(summary_opt)
                                : sc.output_summary;
  if (csv_path) write_to(*csv_path, csv.str());
  if (summary_path) write_to(*summary_path, summary.str());
  std::cout << summary.str();
  return 0;
}

int cmd_linearize(const std::string& file, std::optional<double> speed,
                  std::optional<double> thrust) {
  ParamsFile params = parse_params(read_text_file(file));
  if (speed) params.trim.speed = *speed;
  if (thrust) params.trim.thrust = *thrust;
  const LinearModel model = linearize(params.airship, params.trim.speed, params.trim.thrust);
  std::cout << format_report(model);
  std::cout << "speed_loop_pole=" << format_number(-model.A(0, 0)) << '\n'
            << "speed_loop_numerator=" << format_number(model.B(0, 0)) << '\n';
  if (params.trim.thrust > 0.0) {
    std::cout << "k_w_lower_bound="
              << format_number(kw_lower_bound(params.airship, params.trim.speed, params.trim.thrust))
              << '\n';
  }
  return 0;
}

int cmd_certify_single(const Eigen::Matrix2d& a_cl, double k1, double k2) {
  const LyapunovCertificate cert = lyapunov_certify(a_cl);
  std::cout << format_report(cert, k1, k2);
  return cert.valid() ? 0 : kExitNotCertified;
}

int cmd_certify(const std::string& params_file, const std::string& gains_file,
                const std::vector<double>& matrix) {
  if (!matrix.empty()) {
    if (matrix.size() != 4) {
      throw Error(ErrorCode::InvalidArgument, "--matrix takes a11 a12 a21 a22");
    }
    Eigen::Matrix2d a;
    a << matrix[0], matrix[1], matrix[2], matrix[3];
    return cmd_certify_single(a, 0.0, 0.0);
  }
  if (params_file.empty() || gains_file.empty()) {
    throw Error(ErrorCode::InvalidArgument, "certify-gains needs <params> <gains> or --matrix");
  }
  const ParamsFile params = parse_params(read_text_file(params_file));
  const GainSpec spec = parse_gain_spec(read_text_file(gains_file));
  const LinearModel model = linearize(params.airship, params.trim.speed, params.trim.thrust);
  if (spec.pair) {
    const auto [k1, k2] = *spec.pair;
    return cmd_certify_single(closed_loop_vr(model, k1, k2), k1, k2);
  }
  const auto found = search_vr_gains(model, *spec.grid);
  if (!found) {
    std::cout << "certified=false\n";
    return kExitNotCertified;
  }
  std::cout << "candidates_tried=" << found->candidates_tried << '\n'
            << format_report(found->certificate, found->k1, found->k2);
  return 0;
}

int cmd_thruster_map(const std::string& name, std::optional<double> at) {
  ThrustMap map = [&] {
    try {
      return thrust_map_preset(name);
    } catch (const Error&) {
      return ThrustMap::load(name);
    }
  }();
  const bool spacing = map.name().find("spacing") != std::string::npos;
  if (at) {
    if (spacing) {
      const SpacingThrust st = spacing_to_thrust(map, *at);
      std::cout << "input=" << format_number(*at) << '\n'
                << "thrust_N=" << format_number(st.thrust) << '\n'
                << "thrust_gf=" << format_number(newtons_to_grams_force(st.thrust)) << '\n'
                << "extrapolated=" << (st.extrapolated ? "true" : "false") << '\n';
    } else {
      const double thrust = throttle_to_thrust(map, *at);
      std::cout << "input=" << format_number(*at) << '\n'
                << "thrust_N=" << format_number(thrust) << '\n'
                << "thrust_gf=" << format_number(newtons_to_grams_force(thrust)) << '\n';
    }
    return 0;
  }
  std::cout << "# " << map.name() << ": input thrust_gf\n";
  for (const auto& [input, grams] : map.samples()) {
    std::cout << format_number(input) << ' ' << format_number(grams) << '\n';
  }
  return 0;
}

int cmd_step_response(double k_u, double numerator, double pole, double duration, double dt,
                      const std::string& csv_path) {
  FirstOrderLoop loop{numerator, pole, k_u};
  if (!(loop.rate() > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "closed speed loop is not stable for this k_u");
  }
  const auto response = simulate_speed_loop(loop, duration, dt);
  const double final_value = response.back().y;
  std::cout << "k_u=" << format_number(k_u) << '\n'
            << "dc_gain=" << format_number(loop.dc_gain()) << '\n'
            << "time_constant_analytic=" << format_number(1.0 / loop.rate()) << '\n'
            << "time_constant=" << format_number(first_order_time_constant(response, final_value))
            << '\n'
            << "final_value=" << format_number(final_value) << '\n';
  if (!csv_path.empty()) {
    std::ostringstream out;
    out << "t,y\n";
    for (const auto& s : response) out << format_number(s.t) << ',' << format_number(s.y) << '\n';
    write_to(csv_path, out.str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pubsim: indoor ionic-thruster blimp simulator"};
  app.require_subcommand(1);

  std::string scenario, csv_out, summary_out;
  auto* sim = app.add_subcommand("simulate", "Run a scenario file");
  sim->add_option("scenario", scenario, "Scenario YAML")->required();
  sim->add_option("--csv", csv_out, "Time-series CSV output (overrides the scenario)");
  sim->add_option("--summary", summary_out, "Summary output (overrides the scenario)");

  std::string params_file;
  std::optional<double> trim_speed, trim_thrust;
  auto* lin = app.add_subcommand("linearize", "Small-perturbation A, B about trim");
  lin->add_option("params", params_file, "Parameter YAML")->required();
  lin->add_option("--speed", trim_speed, "Trim speed override (m/s)");
  lin->add_option("--thrust", trim_thrust, "Trim thrust override (N)");

  std::string cert_params, gains_file;
  std::vector<double> matrix;
  auto* cert = app.add_subcommand("certify-gains", "Lyapunov certificate for the v-r loop");
  cert->add_option("params", cert_params, "Parameter YAML");
  cert->add_option("gains", gains_file, "Gain pair or grid YAML");
  cert->add_option("--matrix", matrix, "Certify an explicit closed-loop matrix a11 a12 a21 a22")
      ->expected(4);

  std::string map_name;
  std::optional<double> map_at;
  auto* tmap = app.add_subcommand("thruster-map", "Print or evaluate a thrust map");
  tmap->add_option("preset", map_name, "dual_ring_throttle, dual_ring_spacing or a file")
      ->required();
  tmap->add_option("--at", map_at, "Evaluate at this throttle fraction or spacing (m)");

  double k_u = 0.0, numerator = kSpeedLoopNumerator, pole = kSpeedLoopPole;
  double duration = 5.0, dt = 1e-3;
  std::string step_csv;
  auto* step = app.add_subcommand("step-response", "Closed speed-loop unit step");
  step->add_option("k_u", k_u, "Speed feedback gain")->required();
  step->add_option("--numerator", numerator, "Loop numerator")->capture_default_str();
  step->add_option("--pole", pole, "Open-loop pole")->capture_default_str();
  step->add_option("--duration", duration, "Seconds")->capture_default_str();
  step->add_option("--dt", dt, "Step (s)")->capture_default_str();
  step->add_option("--csv", step_csv, "Write t,y samples");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return cmd_simulate(scenario, csv_out, summary_out);
    if (*lin) return cmd_linearize(params_file, trim_speed, trim_thrust);
    if (*cert) return cmd_certify(cert_params, gains_file, matrix);
    if (*tmap) return cmd_thruster_map(map_name, map_at);
    if (*step) return cmd_step_response(k_u, numerator, pole, duration, dt, step_csv);
  } catch (const Error& e) {
    std::cerr << "error: code=" << to_string(e.code()) << " message=" << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: code=Internal message=" << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
