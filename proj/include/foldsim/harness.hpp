#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "foldsim/controller.hpp"
#include "foldsim/estimator.hpp"
#include "foldsim/scenario.hpp"
#include "foldsim/simulator.hpp"

namespace foldsim {

enum class RunStatus { Done, Fault, TimedOut };

inline const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Done: return "done";
    case RunStatus::Fault: return "fault";
    case RunStatus::TimedOut: return "timed_out";
  }
  return "?";
}

/// CSV encodings for the enum columns.
inline int csv_code(ContactMode m) {
  switch (m) {
    case ContactMode::Sliding: return 0;
    case ContactMode::Fixed: return 1;
    case ContactMode::Broken: return 2;
  }
  return -1;
}
inline int csv_code(Phase p) {
  switch (p) {
    case Phase::Slide: return 0;
    case Phase::RotateOnly: return 1;
    case Phase::Done: return 2;
  }
  return -1;
}

/// One 100 Hz control tick of telemetry. The CSV schema is the documented
/// subset; the extra fields support tests and summaries.
struct TickRecord {
  double t = 0.0;
  Vec3 p1{Vec3::Zero()};
  double theta_true = 0.0;
  double theta_est = 0.0;
  Vec3 pc_true{Vec3::Zero()};
  Vec3 pc_est{Vec3::Zero()};
  double fn_raw = 0.0;
  double fn_filt = 0.0;
  double fe = 0.0;
  Vec3 v1_cmd{Vec3::Zero()};
  Vec3 w1_cmd{Vec3::Zero()};
  ContactMode mode = ContactMode::Fixed;
  Phase phase = Phase::Slide;
  // Beyond the CSV schema:
  bool est_valid = false;
  Vec3 vc_true{Vec3::Zero()};  // interval-average ground-truth contact velocity
  double r2_true_norm = 0.0;
  double r2_est_norm = 0.0;
  double penetration = 0.0;
};

struct RunLog {
  ScenarioConfig config{};
  std::vector<TickRecord> records;
  RunStatus status = RunStatus::TimedOut;
};

/// Physical frame plus the controller's (possibly tilted) belief of it.
struct TaskFrame {
  Vec3 n_true, t_true;
  Vec3 n_bel, t_bel;
  Vec3 rot_axis;
};

inline TaskFrame make_task_frame(const ScenarioConfig& cfg) {
  TaskFrame f;
  f.n_true = cfg.geometry.surface_normal;
  f.t_true = cfg.geometry.surface_tangent;
  const double tilt = cfg.estimator.normal_tilt;
  f.n_bel = std::cos(tilt) * f.n_true + std::sin(tilt) * f.t_true;
  f.t_bel = std::cos(tilt) * f.t_true - std::sin(tilt) * f.n_true;
  f.rot_axis = static_cast<double>(cfg.controller.rot_axis_sign) * f.t_bel.cross(f.n_bel);
  return f;
}

inline PlantModel make_plant(const ScenarioConfig& cfg, const TaskFrame& frame) {
  PlantModel plant;
  plant.rod.length = cfg.geometry.rod_length;
  const double th = cfg.geometry.initial_theta;
  plant.rod.tip_offset = cfg.geometry.rod_length * (std::cos(th) * frame.t_true + std::sin(th) * frame.n_true);
  plant.surface.anchor = cfg.geometry.surface_anchor;
  plant.surface.normal = frame.n_true;
  plant.surface.tangent = frame.t_true;
  plant.surface.wall_offset = cfg.geometry.wall_offset;
  plant.surface.extent = cfg.geometry.surface_extent;
  plant.contact = cfg.contact;
  plant.actuator_tau = cfg.actuator.tau;
  return plant;
}

/// Initial world: tip on the configured contact spot, pressed in far enough
/// that the spring already carries the force setpoint (parts fed into
/// contact before the controller starts).
inline SimState make_initial_state(const ScenarioConfig& cfg, const TaskFrame& frame,
                                   const PlantModel& plant) {
  SimState st;
  st.pose2.position = cfg.geometry.surface_anchor;
  const double pen0 = cfg.gains.f_d / cfg.contact.k_n;
  const Vec3 tip0 = cfg.geometry.surface_anchor +
                    cfg.geometry.initial_contact_offset * frame.t_true - pen0 * frame.n_true;
  st.pose1.position = tip0 - plant.rod.tip_offset;
  st.tip = tip0;
  st.tip_velocity = Vec3::Zero();
  st.time = 0.0;
  detail::resolve_contact(st, plant);
  return st;
}

inline ControllerConfig make_controller_config(const ScenarioConfig& cfg, const TaskFrame& frame) {
  ControllerConfig c;
  c.normal = frame.n_bel;
  c.tangent = frame.t_bel;
  c.rot_axis = frame.rot_axis;
  c.surface_anchor = cfg.geometry.surface_anchor;
  c.wall_offset = cfg.geometry.wall_offset;
  c.wall_rule = cfg.controller.wall_rule == "force" ? WallRule::Force : WallRule::Geometric;
  c.wall_margin = cfg.controller.wall_margin;
  c.wall_force_threshold = cfg.controller.wall_force_threshold;
  c.wall_force_ticks = cfg.controller.wall_force_ticks;
  c.theta_target = cfg.gains.theta_target;
  c.theta_tol = cfg.gains.theta_tol;
  c.hold_limit = cfg.controller.hold_limit;
  return c;
}

inline ControllerGains make_gains(const ScenarioConfig& cfg) {
  return ControllerGains{cfg.gains.k_f, cfg.gains.f_d, cfg.gains.v_d_mag, cfg.gains.omega_d_mag};
}

/// Ground-truth rod inclination in the physical frame.
inline double ground_truth_theta(const SimState& st, const TaskFrame& frame) {
  const Vec3 r1 = st.p_c_true - st.pose1.position;
  const Vec3 r2 = st.p_c_true - st.pose2.position;
  if (r2.norm() < 1e-9) {
    return std::atan2(frame.n_true.dot(r1), frame.t_true.dot(r1));
  }
  return estimate_theta(r1, r2, frame.n_true);
}

/// Runs physics at the configured rate with the controller sampled on top of
/// it; the command is held between control ticks. The wrench filter consumes
/// sensor-rate samples. Terminates on Done, fault, or the configured duration.
inline RunLog run_loop(const ScenarioConfig& cfg) {
  cfg.validate();
  const TaskFrame frame = make_task_frame(cfg);
  const PlantModel plant = make_plant(cfg, frame);
  const ControllerConfig ctl_cfg = make_controller_config(cfg, frame);
  const ControllerGains gains = make_gains(cfg);

  SimState st = make_initial_state(cfg, frame, plant);
  WrenchSensor sensor(SensorModel{cfg.sensor.sigma_f, cfg.sensor.sigma_tau, cfg.sensor.seed});
  WrenchFilter filter(static_cast<std::size_t>(cfg.sensor.filter_window));

  ControllerState ctl;
  ctl.held.p_c = cfg.geometry.surface_anchor + cfg.geometry.initial_contact_offset * frame.t_true;
  ctl.held.r2 = ctl.held.p_c - st.pose2.position;
  ctl.held.theta_c = estimate_theta(ctl.held.p_c - st.pose1.position, ctl.held.r2, frame.n_bel);
  ctl.held.valid = true;

  RunLog log;
  log.config = cfg;
  log.status = RunStatus::TimedOut;

  const int steps_per_tick = cfg.rates.physics_hz / cfg.rates.control_hz;
  const double dt = 1.0 / cfg.rates.physics_hz;
  const double tick_dt = 1.0 / cfg.rates.control_hz;
  const long total_steps = std::lround(cfg.run.duration * cfg.rates.physics_hz);

  Wrench w_raw = sensor.sense(st);
  Wrench w_filt = filter.step(w_raw);
  CommandTwist cmd{};
  Vec3 prev_pc = st.p_c_true;
  bool have_prev_pc = false;

  for (long step = 0; step < total_steps; ++step) {
    if (step % steps_per_tick == 0) {
      // The averaging filter smooths the force feedback; the lever-arm
      // estimate uses the current sample so it carries no group delay while
      // the contact slides.
      const ContactEstimate est = estimate_contact(w_raw, st.pose2, frame.n_bel,
                                                   st.pose1.position, cfg.estimator.f_min,
                                                   &ctl.held);
      const ControllerStepResult res = controller_step(ctl, est, w_filt, st.pose1, gains, ctl_cfg);
      cmd = res.command;
      ctl = res.state;

      TickRecord rec;
      rec.t = st.time;
      rec.p1 = st.pose1.position;
      rec.theta_true = ground_truth_theta(st, frame);
      rec.theta_est = ctl.held.theta_c;
      rec.pc_true = st.p_c_true;
      rec.pc_est = ctl.held.p_c;
      rec.fn_raw = std::abs(frame.n_bel.dot(w_raw.force));
      rec.fn_filt = std::abs(frame.n_bel.dot(w_filt.force));
      rec.fe = cfg.gains.f_d - rec.fn_filt;
      rec.v1_cmd = cmd.twist1.linear;
      rec.w1_cmd = cmd.twist1.angular;
      rec.mode = st.mode;
      rec.phase = ctl.phase;
      rec.est_valid = est.valid;
      rec.vc_true = have_prev_pc ? Vec3((st.p_c_true - prev_pc) / tick_dt) : Vec3(Vec3::Zero());
      rec.r2_true_norm = (st.p_c_true - st.pose2.position).norm();
      rec.r2_est_norm = ctl.held.r2.norm();
      rec.penetration = st.penetration;
      log.records.push_back(rec);

      prev_pc = st.p_c_true;
      have_prev_pc = true;

      if (ctl.phase == Phase::Done) {
        log.status = ctl.fault ? RunStatus::Fault : RunStatus::Done;
        return log;
      }
    }
    st = physics_step(st, cmd, plant, dt);
    w_raw = sensor.sense(st);
    w_filt = filter.step(w_raw);
  }
  return log;
}

// ---------------------------------------------------------------------------
// Telemetry serialization

inline std::string format_csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

inline constexpr const char* k_csv_header =
    "t,p1x,p1y,p1z,theta_true,theta_est,pcx_true,pcz_true,pcx_est,pcz_est,"
    "fn_raw,fn_filt,fe,v1x,v1z,w1y,mode,phase";

/// The planar telemetry schema; y-columns of the contact are omitted.
inline std::string to_csv(const RunLog& log) {
  std::string out(k_csv_header);
  out += "\n";
  for (const TickRecord& r : log.records) {
    const double cols[] = {r.t,
                           r.p1.x(), r.p1.y(), r.p1.z(),
                           r.theta_true, r.theta_est,
                           r.pc_true.x(), r.pc_true.z(),
                           r.pc_est.x(), r.pc_est.z(),
                           r.fn_raw, r.fn_filt, r.fe,
                           r.v1_cmd.x(), r.v1_cmd.z(), r.w1_cmd.y()};
    for (double c : cols) {
      out += format_csv_number(c);
      out += ",";
    }
    out += std::to_string(csv_code(r.mode));
    out += ",";
    out += std::to_string(csv_code(r.phase));
    out += "\n";
  }
  return out;
}

struct RunSummary {
  RunStatus status = RunStatus::TimedOut;
  double t_end = 0.0;
  double rotate_start_time = -1.0;  // <0 when the phase was never reached
  double done_time = -1.0;
  double force_band_lo = 0.0;   // filtered normal force over the settled slide
  double force_band_hi = 0.0;
  double mean_force_error = 0.0;
  double max_abs_force_error = 0.0;
  double slide_speed_mean = 0.0;  // ground-truth tangential contact speed
  double max_pc_error = 0.0;
  double max_theta_error = 0.0;
  double wall_drift = 0.0;  // ground-truth contact drift after the wall switch
  bool contact_broken = false;
  /// Transient skipped before force statistics, s.
  static constexpr double k_transient_skip = 1.0;
};

class empty_log_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline RunSummary summarize(const RunLog& log) {
  if (log.records.empty()) {
    throw empty_log_error("cannot summarize an empty run log");
  }
  const Vec3 tangent = log.config.geometry.surface_tangent;

  RunSummary s;
  s.status = log.status;
  s.t_end = log.records.back().t;

  bool band_init = false;
  const TickRecord* first_slide = nullptr;
  const TickRecord* last_slide = nullptr;
  const TickRecord* wall_switch = nullptr;
  double err_sum = 0.0;
  long err_count = 0;

  for (const TickRecord& r : log.records) {
    if (r.phase == Phase::Slide) {
      if (!first_slide) first_slide = &r;
      last_slide = &r;
      if (r.t >= RunSummary::k_transient_skip) {
        const double e = r.fn_filt - log.config.gains.f_d;
        if (!band_init) {
          s.force_band_lo = s.force_band_hi = r.fn_filt;
          band_init = true;
        } else {
          s.force_band_lo = std::min(s.force_band_lo, r.fn_filt);
          s.force_band_hi = std::max(s.force_band_hi, r.fn_filt);
        }
        err_sum += e;
        ++err_count;
        s.max_abs_force_error = std::max(s.max_abs_force_error, std::abs(e));
      }
    }
    if (r.phase == Phase::RotateOnly) {
      if (!wall_switch) {
        wall_switch = &r;
        s.rotate_start_time = r.t;
      }
      s.wall_drift = std::max(s.wall_drift, (r.pc_true - wall_switch->pc_true).norm());
    }
    if (r.phase == Phase::Done && s.done_time < 0.0) {
      s.done_time = r.t;
    }
    s.max_pc_error = std::max(s.max_pc_error, (r.pc_est - r.pc_true).norm());
    s.max_theta_error = std::max(s.max_theta_error, std::abs(r.theta_est - r.theta_true));
    if (r.mode == ContactMode::Broken) {
      s.contact_broken = true;
    }
  }
  if (err_count > 0) {
    s.mean_force_error = err_sum / static_cast<double>(err_count);
  }
  if (first_slide && last_slide && last_slide->t > first_slide->t) {
    s.slide_speed_mean = tangent.dot(last_slide->pc_true - first_slide->pc_true) /
                         (last_slide->t - first_slide->t);
  }
  return s;
}

inline nlohmann::json to_json(const RunSummary& s) {
  return nlohmann::json{
      {"status", to_string(s.status)},
      {"t_end", s.t_end},
      {"rotate_start_time", s.rotate_start_time},
      {"done_time", s.done_time},
      {"force_band", {s.force_band_lo, s.force_band_hi}},
      {"mean_force_error", s.mean_force_error},
      {"max_abs_force_error", s.max_abs_force_error},
      {"slide_speed_mean", s.slide_speed_mean},
      {"max_pc_error", s.max_pc_error},
      {"max_theta_error", s.max_theta_error},
      {"wall_drift", s.wall_drift},
      {"contact_broken", s.contact_broken},
  };
}

/// Runs one scenario and writes run.csv plus summary.json into out_dir.
/// Rerunning with the same config and seed reproduces the files byte for byte.
inline RunStatus run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir,
                              bool summary_only = false) {
  const RunLog log = run_loop(cfg);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory: " + out_dir.string());
  }

  if (!summary_only) {
    const std::filesystem::path csv_path = out_dir / "run.csv";
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) {
      throw std::runtime_error("cannot write telemetry file: " + csv_path.string());
    }
    csv << to_csv(log);
  }

  nlohmann::json summary;
  if (log.records.empty()) {
    summary = nlohmann::json{{"status", to_string(log.status)}, {"empty", true}};
  } else {
    summary = to_json(summarize(log));
  }
  const std::filesystem::path json_path = out_dir / "summary.json";
  std::ofstream js(json_path, std::ios::binary);
  if (!js) {
    throw std::runtime_error("cannot write summary file: " + json_path.string());
  }
  js << summary.dump(2) << "\n";

  return log.status;
}

}  // namespace foldsim
