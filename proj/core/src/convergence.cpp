#include "slsfem/convergence.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numbers>
#include <thread>

#include "slsfem/errors.hpp"

namespace slsfem {

namespace {

constexpr double kPi = std::numbers::pi;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Preset {
  enum Kind { paper, zero, mode } kind = paper;
  int mode_j = 0;
};

Preset parse_preset(const std::string& name) {
  if (name == "paper") return {Preset::paper, 0};
  if (name == "zero") return {Preset::zero, 0};
  if (name.rfind("mode:", 0) == 0) {
    int j = 0;
    try {
      j = std::stoi(name.substr(5));
    } catch (const std::exception&) {
      j = 0;
    }
    if (j >= 1) return {Preset::mode, j};
  }
  throw ValidationError("unknown initial data preset '" + name +
                        "'; valid presets: paper, zero, mode:<j>");
}

}  // namespace

int ExperimentConfig::n_steps() const {
  if (dt <= 0.0) throw ValidationError("ExperimentConfig: dt must be > 0");
  if (t_final <= 0.0) throw ValidationError("ExperimentConfig: T must be > 0");
  const long n = std::lround(t_final / dt);
  if (n < 1 || std::abs(static_cast<double>(n) * dt - t_final) >
                   1e-9 * std::max(1.0, t_final))
    throw ValidationError(
        "ExperimentConfig: dt must divide T (dt * n_steps = T)");
  return static_cast<int>(n);
}

void ExperimentConfig::validate(bool stochastic) const {
  if (levels.size() < 2)
    throw ValidationError(
        "ExperimentConfig: need at least 2 mesh levels to fit a rate");
  for (int lvl : levels)
    if (lvl < 1) throw ValidationError("ExperimentConfig: levels must be >= 1");
  if (reference == ReferenceKind::fine_mesh) {
    for (int lvl : levels)
      if (lvl >= reference_level)
        throw ValidationError(
            "ExperimentConfig: every study level must be below the "
            "fine_mesh reference level " +
            std::to_string(reference_level));
  }
  (void)n_steps();
  (void)parse_preset(initial);
  if (oracle_modes < 1)
    throw ValidationError("ExperimentConfig: oracle_modes must be >= 1");
  if (stochastic) {
    if (!noise.enabled)
      throw ValidationError("stochastic study requires noise to be on");
    if (reference != ReferenceKind::fine_mesh)
      throw ValidationError(
          "stochastic study requires a fine_mesh reference (the mild "
          "solution has no closed form)");
    if (n_samples < 1)
      throw ValidationError("stochastic study requires n_samples >= 1");
    if (!allow_divergent_noise) {
      // Throws a ValidationError naming beta < s - 1/2 when violated.
      (void)hs_norm_squared(CovarianceSpec{noise.s1, 1}, beta_target, 1);
      (void)hs_norm_squared(CovarianceSpec{noise.s2, 2}, beta_target, 1);
    }
  } else {
    if (noise.enabled)
      throw ValidationError("deterministic study requires noise = off");
  }
}

SpectralField initial_modal(const std::string& preset, int n_modes) {
  const Preset p = parse_preset(preset);
  SpectralField f = SpectralField::zero(n_modes);
  switch (p.kind) {
    case Preset::zero:
      break;
    case Preset::paper:
      // sin(2 pi x) = e_2 / sqrt(2);  (x(1-x), e_j) = 4 sqrt(2)/(j pi)^3
      // for odd j.
      if (n_modes >= 2) f.coeffs1[1] = 1.0 / std::sqrt(2.0);
      for (int j = 1; j <= n_modes; j += 2) {
        const double a = static_cast<double>(j) * kPi;
        f.coeffs2[j - 1] = 4.0 * std::sqrt(2.0) / (a * a * a);
      }
      break;
    case Preset::mode:
      if (p.mode_j > n_modes)
        throw ValidationError("initial_modal: mode preset exceeds n_modes");
      f.coeffs1[p.mode_j - 1] = 1.0;
      break;
  }
  return f;
}

StateVector initial_fem(const std::string& preset, const Mesh1D& mesh) {
  const Preset p = parse_preset(preset);
  StateVector s;
  s.mesh_level = mesh.level;
  const int n = mesh.n_interior;
  switch (p.kind) {
    case Preset::zero:
      s.u1 = Eigen::VectorXd::Zero(n);
      s.u2 = Eigen::VectorXd::Zero(n);
      break;
    case Preset::paper: {
      const Eigen::VectorXd b1 = sine_load(mesh, 2) / std::sqrt(2.0);
      s.u1 = solve_spd_tridiagonal(assemble_mass(mesh), b1);
      s.u2 = l2_project(mesh, [](double x) { return x * (1.0 - x); });
      break;
    }
    case Preset::mode:
      s.u1 = solve_spd_tridiagonal(assemble_mass(mesh),
                                   sine_load(mesh, p.mode_j));
      s.u2 = Eigen::VectorXd::Zero(n);
      break;
  }
  return s;
}

std::pair<double, double> error_l2(const FemOperators& fine_ops,
                                   const StateVector& coarse,
                                   const StateVector& reference_on_fine) {
  if (reference_on_fine.mesh_level != fine_ops.mesh.level)
    throw ValidationError("error_l2: reference does not live on the fine mesh");
  if (coarse.mesh_level > fine_ops.mesh.level)
    throw ValidationError("error_l2: state is finer than the reference mesh");
  const Mesh1D coarse_mesh = Mesh1D::uniform(coarse.mesh_level);
  const Eigen::VectorXd d1 =
      prolong(coarse_mesh, fine_ops.mesh, coarse.u1) - reference_on_fine.u1;
  const Eigen::VectorXd d2 =
      prolong(coarse_mesh, fine_ops.mesh, coarse.u2) - reference_on_fine.u2;
  return {mass_norm(fine_ops.mass, d1), mass_norm(fine_ops.mass, d2)};
}

std::pair<double, double> error_vs_spectral(const FemOperators& ops,
                                            const Eigen::MatrixXd& modal_loads,
                                            const StateVector& state,
                                            const SpectralField& field) {
  if (modal_loads.cols() != field.modes() ||
      modal_loads.rows() != ops.mesh.n_interior)
    throw ValidationError("error_vs_spectral: modal load matrix shape mismatch");
  const auto one = [&](const Eigen::VectorXd& c, const Eigen::VectorXd& a) {
    const double quad = c.dot(ops.mass.apply(c)) -
                        2.0 * c.dot(modal_loads * a) + a.squaredNorm();
    return std::sqrt(std::max(quad, 0.0));
  };
  return {one(state.u1, field.coeffs1), one(state.u2, field.coeffs2)};
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& h_error) {
  const int n = static_cast<int>(h_error.size());
  if (n < 2) throw ValidationError("fit_rate: need at least 2 points");
  std::vector<double> x(n), y(n);
  for (int i = 0; i < n; ++i) {
    if (h_error[i].first <= 0.0 || h_error[i].second <= 0.0)
      throw ValidationError("fit_rate: h and error must be positive");
    x[i] = std::log2(h_error[i].first);
    y[i] = std::log2(h_error[i].second);
  }
  const double x_min = *std::min_element(x.begin(), x.end());
  const double x_max = *std::max_element(x.begin(), x.end());
  if (x_max - x_min < 1e-12)
    throw ValidationError("fit_rate: degenerate data (all h equal)");
  double xm = 0.0, ym = 0.0;
  for (int i = 0; i < n; ++i) {
    xm += x[i];
    ym += y[i];
  }
  xm /= n;
  ym /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  RateFit fit;
  fit.rate = sxy / sxx;
  fit.intercept = ym - fit.rate * xm;
  fit.residual = 0.0;
  for (int i = 0; i < n; ++i)
    fit.residual =
        std::max(fit.residual, std::abs(y[i] - (fit.rate * x[i] + fit.intercept)));
  return fit;
}

namespace {

std::map<std::string, std::string> echo_config(const ExperimentConfig& c,
                                               const std::string& study) {
  std::map<std::string, std::string> echo;
  echo["study"] = study;
  std::string lv;
  for (std::size_t i = 0; i < c.levels.size(); ++i) {
    if (i) lv += ',';
    lv += std::to_string(c.levels[i]);
  }
  echo["levels"] = lv;
  echo["reference"] = (c.reference == ReferenceKind::spectral_oracle)
                          ? "oracle"
                          : "fine:" + std::to_string(c.reference_level);
  echo["dt"] = format_double(c.dt);
  echo["T"] = format_double(c.t_final);
  echo["initial"] = c.initial;
  echo["mode"] = (c.mode == TimeScheme::backward_euler) ? "be" : "exact";
  echo["samples"] = std::to_string(c.n_samples);
  echo["seed"] = std::to_string(c.seed);
  echo["workers"] = std::to_string(c.workers);
  echo["beta"] = format_double(c.beta_target);
  echo["oracle_modes"] = std::to_string(c.oracle_modes);
  echo["noise"] = c.noise.enabled ? "on" : "off";
  if (c.noise.enabled) {
    echo["noise.s1"] = format_double(c.noise.s1);
    echo["noise.s2"] = format_double(c.noise.s2);
    echo["noise.J"] = c.noise.J ? std::to_string(*c.noise.J) : "auto";
    echo["allow_divergent_noise"] = c.allow_divergent_noise ? "true" : "false";
  }
  return echo;
}

}  // namespace

ConvergenceReport run_deterministic_study(const ExperimentConfig& config) {
  config.validate(false);
  const SchemeConfig scheme{config.dt, config.n_steps(), config.mode};
  const bool need_eig = config.mode == TimeScheme::exact_semidiscrete;

  ConvergenceReport report;
  report.study = "deterministic";
  report.seed = config.seed;
  report.config_echo = echo_config(config, "deterministic");

  std::vector<std::pair<double, double>> pts1, pts2;

  const auto record = [&](int level, double h, double e1, double e2) {
    LevelRecord rec;
    rec.level = level;
    rec.h = h;
    rec.error_u1 = e1;
    rec.error_u2 = e2;
    rec.n_samples = 1;
    report.levels.push_back(rec);
    pts1.emplace_back(h, e1);
    pts2.emplace_back(h, e2);
  };

  if (config.reference == ReferenceKind::spectral_oracle) {
    const SpectralField x0 = initial_modal(config.initial, config.oracle_modes);
    const SpectralField x_t = semigroup_apply(config.t_final, x0);
    for (int level : config.levels) {
      const Mesh1D mesh = Mesh1D::uniform(level);
      const FemOperators ops = assemble_operators(mesh, need_eig);
      const StateVector final_state =
          evolve(ops, scheme, initial_fem(config.initial, mesh));
      const Eigen::MatrixXd loads = modal_load_matrix(mesh, config.oracle_modes);
      const auto [e1, e2] = error_vs_spectral(ops, loads, final_state, x_t);
      record(level, mesh.h, e1, e2);
    }
  } else {
    const Mesh1D ref_mesh = Mesh1D::uniform(config.reference_level);
    const FemOperators ref_ops = assemble_operators(ref_mesh, need_eig);
    const StateVector ref_final =
        evolve(ref_ops, scheme, initial_fem(config.initial, ref_mesh));
    for (int level : config.levels) {
      const Mesh1D mesh = Mesh1D::uniform(level);
      const FemOperators ops = assemble_operators(mesh, need_eig);
      const StateVector final_state =
          evolve(ops, scheme, initial_fem(config.initial, mesh));
      const auto [e1, e2] = error_l2(ref_ops, final_state, ref_final);
      record(level, mesh.h, e1, e2);
    }
  }

  report.fit_u1 = fit_rate(pts1);
  report.fit_u2 = fit_rate(pts2);
  return report;
}

namespace {

// Everything one mesh needs to evolve a noise sample; immutable after
// construction, shared read-only by all workers.
struct LevelDriver {
  Mesh1D mesh;
  FemOperators ops;
  NoiseAssembler assembler;
  StateVector initial;
  std::optional<BackwardEulerStepper> stepper;  // backward_euler mode

  LevelDriver(const Mesh1D& m, const NoiseModel& model,
              const std::string& preset, TimeScheme mode)
      : mesh(m),
        ops(assemble_operators(m, mode == TimeScheme::exact_semidiscrete)),
        assembler(m, model),
        initial(initial_fem(preset, m)) {
    if (mode == TimeScheme::backward_euler) stepper.emplace(ops, model.dt);
  }

  StateVector run_sample(const IncrementBlock& block,
                         const SchemeConfig& scheme) const {
    const auto [b1, b2] = assembler.loads_all_steps(block);
    if (stepper) {
      StateVector state = initial;
      for (int n = 0; n < scheme.n_steps; ++n) {
        const Eigen::VectorXd c1 = b1.col(n), c2 = b2.col(n);
        state = stepper->step(state, &c1, &c2);
      }
      return state;
    }
    const StepLoads loads =
        [&](int step, double) -> std::optional<
                                  std::pair<Eigen::VectorXd, Eigen::VectorXd>> {
      return std::make_pair(Eigen::VectorXd(b1.col(step - 1)),
                            Eigen::VectorXd(b2.col(step - 1)));
    };
    return evolve(ops, scheme, initial, loads);
  }
};

}  // namespace

ConvergenceReport run_stochastic_study(const ExperimentConfig& config,
                                       const ProgressFn& progress) {
  config.validate(true);
  const int n_steps = config.n_steps();
  const SchemeConfig scheme{config.dt, n_steps, config.mode};

  ConvergenceReport report;
  report.study = "stochastic";
  report.seed = config.seed;
  report.config_echo = echo_config(config, "stochastic");

  const Mesh1D ref_mesh = Mesh1D::uniform(config.reference_level);
  TruncationPolicy policy;
  policy.override_J = config.noise.J;
  const TruncationChoice trunc = truncation_level(ref_mesh, policy);
  if (!trunc.warning.empty()) report.warnings.push_back(trunc.warning);

  NoiseModel model;
  model.spec1 = CovarianceSpec{config.noise.s1, 1};
  model.spec2 = CovarianceSpec{config.noise.s2, 2};
  model.J = trunc.J;
  model.seed = config.seed;
  model.dt = config.dt;
  model.n_steps = n_steps;

  const LevelDriver ref_driver(ref_mesh, model, config.initial, config.mode);
  std::vector<LevelDriver> drivers;
  drivers.reserve(config.levels.size());
  for (int level : config.levels)
    drivers.emplace_back(Mesh1D::uniform(level), model, config.initial,
                         config.mode);

  const int n_levels = static_cast<int>(drivers.size());
  const int total = config.n_samples;
  // Squared errors per (sample, level, component); indexed storage keeps
  // the reduction order fixed for any worker count.
  std::vector<std::array<double, 2>> squares(
      static_cast<std::size_t>(total) * n_levels);

  std::atomic<int> next{0};
  std::atomic<int> done{0};
  std::mutex progress_mutex;
  std::exception_ptr first_error;
  std::mutex error_mutex;

  const auto worker = [&]() {
    try {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= total) break;
        const IncrementBlock block =
            sample_increments(model, static_cast<std::uint64_t>(i));
        const StateVector ref_state = ref_driver.run_sample(block, scheme);
        for (int l = 0; l < n_levels; ++l) {
          const StateVector state = drivers[l].run_sample(block, scheme);
          const auto [e1, e2] = error_l2(ref_driver.ops, state, ref_state);
          squares[static_cast<std::size_t>(i) * n_levels + l] = {e1 * e1,
                                                                 e2 * e2};
        }
        const int d = done.fetch_add(1) + 1;
        if (progress) {
          std::lock_guard<std::mutex> lock(progress_mutex);
          progress(d, total);
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };

  int n_workers = config.workers > 0
                      ? config.workers
                      : static_cast<int>(std::thread::hardware_concurrency());
  n_workers = std::clamp(n_workers, 1, std::max(total, 1));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  std::vector<std::pair<double, double>> pts1, pts2;
  for (int l = 0; l < n_levels; ++l) {
    // Compensated mean of squared errors, then delta-method RMS bars.
    double mean[2], var[2];
    for (int comp = 0; comp < 2; ++comp) {
      double sum = 0.0, c = 0.0;
      for (int i = 0; i < total; ++i) {
        const double y = squares[static_cast<std::size_t>(i) * n_levels + l]
                                [comp] -
                         c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
      }
      mean[comp] = sum / total;
      double ss = 0.0;
      for (int i = 0; i < total; ++i) {
        const double d =
            squares[static_cast<std::size_t>(i) * n_levels + l][comp] -
            mean[comp];
        ss += d * d;
      }
      var[comp] = (total > 1) ? ss / (total - 1) : 0.0;
    }
    LevelRecord rec;
    rec.level = drivers[l].mesh.level;
    rec.h = drivers[l].mesh.h;
    rec.n_samples = total;
    rec.error_u1 = std::sqrt(mean[0]);
    rec.error_u2 = std::sqrt(mean[1]);
    const double se1 = std::sqrt(var[0] / total);
    const double se2 = std::sqrt(var[1] / total);
    rec.stderr_u1 = (rec.error_u1 > 0.0) ? se1 / (2.0 * rec.error_u1) : 0.0;
    rec.stderr_u2 = (rec.error_u2 > 0.0) ? se2 / (2.0 * rec.error_u2) : 0.0;
    report.levels.push_back(rec);
    pts1.emplace_back(rec.h, rec.error_u1);
    pts2.emplace_back(rec.h, rec.error_u2);
  }

  report.fit_u1 = fit_rate(pts1);
  report.fit_u2 = fit_rate(pts2);
  return report;
}

}  // namespace slsfem
