#include "vharv/sim.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <utility>

#include "vharv/errors.hpp"
#include "vharv/feasibility.hpp"
#include "vharv/runtime.hpp"
#include "vharv/transducer.hpp"

namespace vharv {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t v, int k) {
  return (v << k) | (v >> (64 - k));
}

struct Vec4 {
  double x, v, d, a;
};

}  // namespace

GaussianStream::GaussianStream(std::uint64_t seed) {
  std::uint64_t sm = seed;
  for (auto& s : s_) s = splitmix64(sm);
}

double GaussianStream::uniform() {
  // xoshiro256++
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  // 53-bit mantissa, shifted into (0,1) so log() below stays finite.
  return (static_cast<double>(result >> 11) + 0.5) * 0x1.0p-53;
}

double GaussianStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * M_PI * u2;
  spare_ = r * std::sin(phi);
  has_spare_ = true;
  return r * std::cos(phi);
}

std::vector<double> white_noise_sequence(double dt, std::size_t n_steps,
                                         std::uint64_t seed) {
  if (!(dt > 0.0)) throw ValidationError("white_noise_sequence: dt must be > 0");
  GaussianStream g(seed);
  const double scale = 1.0 / std::sqrt(dt);
  std::vector<double> w(n_steps);
  for (auto& v : w) v = scale * g.next();
  return w;
}

std::vector<double> running_average_power(const std::vector<double>& pgen,
                                          double dt) {
  if (pgen.empty())
    throw ValidationError("running_average_power: empty series");
  std::vector<double> out(pgen.size());
  out[0] = pgen[0];
  double integral = 0.0;
  for (std::size_t k = 1; k < pgen.size(); ++k) {
    integral += 0.5 * dt * (pgen[k - 1] + pgen[k]);
    out[k] = integral / (static_cast<double>(k) * dt);
  }
  return out;
}

namespace {

SimulationResult simulate_impl(const PlantParams& params, const ControllerQ& K,
                               const SimConfig& cfg,
                               const std::vector<double>* noise_override) {
  params.validate();
  if (!(cfg.dt > 0.0)) throw ValidationError("simulate: dt must be > 0");
  const double min_duration = 10.0 * 2.0 * M_PI / params.disturbance.omega_a;
  if (!(cfg.duration >= min_duration)) {
    std::ostringstream msg;
    msg << "simulate: duration must cover at least ten disturbance periods ("
        << min_duration << " s)";
    throw ValidationError(msg.str());
  }
  if (cfg.record_decimation < 1)
    throw ValidationError("simulate: record_decimation must be >= 1");

  const MechParams& mech = params.mech;
  const TransducerParams& tr = params.transducer;
  const DisturbanceParams& dist = params.disturbance;
  const double dt = cfg.dt;
  const std::uint64_t n_steps = static_cast<std::uint64_t>(cfg.duration / dt);
  const double kt = force_constant(tr);
  const double g_w = 2.0 * dist.sigma_a * std::sqrt(dist.zeta_a * dist.omega_a);
  const double wa2 = dist.omega_a * dist.omega_a;
  const double two_zw = 2.0 * dist.zeta_a * dist.omega_a;
  const double theta_coef = tr.n_p / (2.0 * tr.lead);
  const double sigma_n = std::sqrt(params.measurement.phi_n / dt);

  GaussianStream wproc(cfg.seed);
  GaussianStream wmeas(cfg.seed ^ 0x5DEECE66DULL);
  const double inv_sqrt_dt = 1.0 / std::sqrt(dt);
  if (noise_override && noise_override->size() < n_steps)
    throw ValidationError("simulate: noise override shorter than the run");

  VectorController ctl(K, tr, params.bus, dt, cfg.f_lp_hz);

  auto drift = [&](const Vec4& s, double f_e, double w) -> Vec4 {
    const double phi = transducer_force(s.x, s.v, f_e, s.a, mech, tr);
    return {s.v, (-mech.k * s.x - mech.c * s.v + phi) / mech.m - s.a, s.a,
            -wa2 * s.d - two_zw * s.a + g_w * w};
  };

  SimulationResult res;
  const std::size_t n_rec = static_cast<std::size_t>(n_steps / cfg.record_decimation) + 1;
  for (auto* v : {&res.t, &res.x, &res.xdot, &res.a, &res.iq_star, &res.iq, &res.id,
                  &res.vd, &res.vq, &res.pgen, &res.pbar})
    v->reserve(n_rec);

  Vec4 s{0.0, 0.0, 0.0, 0.0};
  bool stuck = false;
  double integral = 0.0, prev_pgen = 0.0;
  double sum_id2_full = 0.0;
  std::uint64_t n_stat = 0;
  double sum_iq2 = 0.0, sum_id2 = 0.0, sum_xdot2 = 0.0, sum_pgen = 0.0;
  std::uint64_t n_sat = 0, n_weak = 0, n_stuck = 0, n_backdrive = 0, n_feas_xdot = 0;
  double min_margin_xhat = std::numeric_limits<double>::infinity();
  std::size_t peaks_below = 0;
  double prev2_absiq = 0.0, prev1_absiq = 0.0;
  bool have_two = false;
  const std::uint64_t warmup_steps = static_cast<std::uint64_t>(cfg.warmup / dt);
  const std::uint64_t batch_len =
      std::max<std::uint64_t>(1, static_cast<std::uint64_t>(cfg.batch_seconds / dt));
  double batch_acc = 0.0;
  std::uint64_t batch_n = 0;

  for (std::uint64_t k = 0; k <= n_steps; ++k) {
    const double t_now = static_cast<double>(k) * dt;

    double y = s.v;
    if (cfg.noise_on_measurement) y += sigma_n * wmeas.next();
    const ControlOutput u = ctl.full_step(y, theta_coef * s.x);
    if (!std::isfinite(u.i_q) || !std::isfinite(u.i_d))
      throw NumericalBlowup("simulate: controller output diverged at t=" +
                            std::to_string(t_now));

    const auto [v_d, v_q] = dq_steady_voltages(u.i_d, u.i_q, s.v, tr);
    const double pgen = -1.5 * (v_d * u.i_d + v_q * u.i_q);

    if (k > 0) integral += 0.5 * dt * (prev_pgen + pgen);
    prev_pgen = pgen;
    const double pbar = (k == 0) ? pgen : integral / t_now;
    sum_id2_full += u.i_d * u.i_d;

    if (k >= warmup_steps) {
      ++n_stat;
      sum_iq2 += u.i_q * u.i_q;
      sum_id2 += u.i_d * u.i_d;
      sum_xdot2 += s.v * s.v;
      sum_pgen += pgen;
      if (u.saturated) ++n_sat;
      if (u.weakening) ++n_weak;
      if (stuck) ++n_stuck;
      const double f_e = kt * u.i_q;
      if (nut_power(s.x, s.v, f_e, s.a, mech, tr) < 0.0) ++n_backdrive;
      min_margin_xhat =
          std::min(min_margin_xhat, dq_feasible(u.i_d, u.i_q, u.xhat, tr, params.bus).margin);
      if (dq_feasible(u.i_d, u.i_q, s.v, tr, params.bus).margin >= -1e-12)
        ++n_feas_xdot;
      const double absiq = std::abs(u.i_q);
      if (have_two && prev1_absiq >= prev2_absiq && prev1_absiq > absiq) {
        ++res.peak_count;
        if (prev1_absiq < tr.i_cont) ++peaks_below;
      }
      prev2_absiq = prev1_absiq;
      prev1_absiq = absiq;
      have_two = true;
      batch_acc += pgen;
      if (++batch_n == batch_len) {
        res.pgen_batch_means.push_back(batch_acc / static_cast<double>(batch_len));
        batch_acc = 0.0;
        batch_n = 0;
      }
    }

    if (k % static_cast<std::uint64_t>(cfg.record_decimation) == 0) {
      res.t.push_back(t_now);
      res.x.push_back(s.x);
      res.xdot.push_back(s.v);
      res.a.push_back(s.a);
      res.iq_star.push_back(u.i_q_star);
      res.iq.push_back(u.i_q);
      res.id.push_back(u.i_d);
      res.vd.push_back(v_d);
      res.vq.push_back(v_q);
      res.pgen.push_back(pgen);
      res.pbar.push_back(pbar);
    }
    if (k == n_steps) {
      res.p_gen_bar = pbar;
      break;
    }

    // Advance the plant with the noise sample held over the step.
    const double w =
        noise_override ? (*noise_override)[k] : wproc.next() * inv_sqrt_dt;
    const double f_e = kt * u.i_q;
    if (stuck) {
      if (sticking_holds(s.x, f_e, s.a, mech, tr)) {
        // Friction pins the mass; only the disturbance filter evolves.
        auto fda = [&](double d, double a) {
          return std::pair<double, double>{a, -wa2 * d - two_zw * a + g_w * w};
        };
        const auto k1 = fda(s.d, s.a);
        const auto k2 = fda(s.d + 0.5 * dt * k1.first, s.a + 0.5 * dt * k1.second);
        const auto k3 = fda(s.d + 0.5 * dt * k2.first, s.a + 0.5 * dt * k2.second);
        const auto k4 = fda(s.d + dt * k3.first, s.a + dt * k3.second);
        s.d += dt / 6.0 * (k1.first + 2.0 * k2.first + 2.0 * k3.first + k4.first);
        s.a += dt / 6.0 * (k1.second + 2.0 * k2.second + 2.0 * k3.second + k4.second);
      } else {
        stuck = false;
      }
    }
    if (!stuck) {
      const double v_prev = s.v;
      const Vec4 k1 = drift(s, f_e, w);
      const Vec4 s2{s.x + 0.5 * dt * k1.x, s.v + 0.5 * dt * k1.v,
                    s.d + 0.5 * dt * k1.d, s.a + 0.5 * dt * k1.a};
      const Vec4 k2 = drift(s2, f_e, w);
      const Vec4 s3{s.x + 0.5 * dt * k2.x, s.v + 0.5 * dt * k2.v,
                    s.d + 0.5 * dt * k2.d, s.a + 0.5 * dt * k2.a};
      const Vec4 k3 = drift(s3, f_e, w);
      const Vec4 s4{s.x + dt * k3.x, s.v + dt * k3.v, s.d + dt * k3.d,
                    s.a + dt * k3.a};
      const Vec4 k4 = drift(s4, f_e, w);
      s.x += dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
      s.v += dt / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
      s.d += dt / 6.0 * (k1.d + 2.0 * k2.d + 2.0 * k3.d + k4.d);
      s.a += dt / 6.0 * (k1.a + 2.0 * k2.a + 2.0 * k3.a + k4.a);
      const bool crossed = v_prev * s.v < 0.0 || std::abs(s.v) < kStickVelocityEps;
      if (crossed && tr.f_c > 0.0 && sticking_holds(s.x, f_e, s.a, mech, tr)) {
        s.v = 0.0;
        stuck = true;
      }
    }
    if (!(std::abs(s.x) < cfg.blowup_limit) || !(std::abs(s.v) < cfg.blowup_limit) ||
        !(std::abs(s.d) < cfg.blowup_limit) || !(std::abs(s.a) < cfg.blowup_limit)) {
      std::ostringstream msg;
      msg << "simulate: state exceeded " << cfg.blowup_limit << " at t=" << t_now
          << " (x=" << s.x << ", xdot=" << s.v << ", d=" << s.d << ", a=" << s.a
          << ")";
      throw NumericalBlowup(msg.str());
    }
  }

  res.steps = n_steps + 1;
  res.id_loss_mean = 1.5 * tr.R * sum_id2_full / static_cast<double>(res.steps);
  if (n_stat > 0) {
    const double n = static_cast<double>(n_stat);
    res.sat_fraction = n_sat / n;
    res.weaken_fraction = n_weak / n;
    res.stuck_fraction = n_stuck / n;
    res.backdrive_fraction = n_backdrive / n;
    res.feasible_fraction_at_xdot = n_feas_xdot / n;
    res.mean_iq2 = sum_iq2 / n;
    res.mean_id2 = sum_id2 / n;
    res.mean_xdot2 = sum_xdot2 / n;
    res.mean_pgen = sum_pgen / n;
  }
  res.min_margin_at_xhat = min_margin_xhat;
  res.peak_fraction_below_icont =
      res.peak_count == 0 ? 1.0
                          : static_cast<double>(peaks_below) /
                                static_cast<double>(res.peak_count);
  return res;
}

}  // namespace

SimulationResult simulate(const PlantParams& params, const ControllerQ& K,
                          const SimConfig& cfg) {
  return simulate_impl(params, K, cfg, nullptr);
}

SimulationResult simulate(const PlantParams& params, const ControllerQ& K,
                          const SimConfig& cfg,
                          const std::vector<double>& process_noise) {
  return simulate_impl(params, K, cfg, &process_noise);
}

}  // namespace vharv
