#include "podmci/fom.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace podmci {

namespace {

// nu-weighted fission production coefficient into sigma_f units. Materials
// without separate prompt data (sphere tables) carry everything in nu_sigma_f.
double prompt_production(const MultiGroupMaterial& m, int g) {
  if (!m.is_fissile) return 0.0;
  if (m.precursors.empty()) return m.nu_sigma_f[g];
  return m.nu_p[g] * m.sigma_f[g];
}

double delayed_production(const MultiGroupMaterial& m, int g) {
  if (!m.is_fissile || m.precursors.empty()) return 0.0;
  return m.nu_d[g] * m.sigma_f[g];
}

double total_production(const MultiGroupMaterial& m, int g) {
  return prompt_production(m, g) + delayed_production(m, g);
}

double effective_removal(const DiscreteSystem& system, int cell, int g, double t,
                         const Vector& temperature) {
  const MultiGroupMaterial& m = system.material(cell);
  double base;
  if (!m.sigma_t.empty()) {
    base = m.sigma_t[g];
  } else {
    double sa = m.sigma_a[g];
    const int region = system.mesh.cells[cell].region_id;
    for (const XsModifier& mod : system.modifiers) {
      if (mod.group != g) continue;
      if (std::find(mod.region_ids.begin(), mod.region_ids.end(), region) ==
          mod.region_ids.end()) {
        continue;
      }
      if (mod.kind == ModifierKind::absorption_ramp) {
        sa = ramped_absorption(sa, t, mod.delta, mod.t_ramp);
      } else {
        sa = feedback_absorption(sa, temperature[cell], mod.t0, mod.gamma_fb);
      }
    }
    double out_scatter = 0.0;
    for (int to = 0; to < m.n_groups; ++to) out_scatter += m.scattering(g, to);
    base = sa + out_scatter;
  }
  return base + m.buckling * m.diffusion[g];
}

// Assembles the volume-scaled system terms. dt_star > 0 adds the mass
// diagonal and the eliminated delayed-precursor coupling for that stage.
SparseMatrix assemble(const DiscreteSystem& system, double t, const Vector& temperature,
                      double k_norm, double dt_star, bool include_fission) {
  const int n = system.n_unknowns();
  const int G = system.n_groups;
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(n) * (G + 5));

  // Streaming: one pass per face, symmetric contributions.
  for (const Face& f : system.mesh.faces) {
    if (f.tag == BoundaryTag::reflective) continue;
    const int i = f.owner;
    const MultiGroupMaterial& mi = system.material(i);
    for (int g = 0; g < G; ++g) {
      const double d_i = mi.diffusion[g];
      if (d_i <= 0.0) {
        throw std::runtime_error("assemble_operator: non-positive diffusion in cell " +
                                 std::to_string(i));
      }
      if (f.tag == BoundaryTag::zero_flux) {
        triplets.emplace_back(system.index(i, g), system.index(i, g),
                              f.area * d_i / f.d_if);
      } else {
        const int nb = f.neighbor;
        const double d_n = system.material(nb).diffusion[g];
        const double w = f.d_if / f.d_in;
        const double d_f = 1.0 / (w / d_i + (1.0 - w) / d_n);
        const double coeff = f.area * d_f / f.d_in;
        triplets.emplace_back(system.index(i, g), system.index(i, g), coeff);
        triplets.emplace_back(system.index(i, g), system.index(nb, g), -coeff);
        triplets.emplace_back(system.index(nb, g), system.index(nb, g), coeff);
        triplets.emplace_back(system.index(nb, g), system.index(i, g), -coeff);
      }
    }
  }

  for (int i = 0; i < system.n_cells(); ++i) {
    const MultiGroupMaterial& m = system.material(i);
    const double vol = system.mesh.cells[i].volume;
    for (int g = 0; g < G; ++g) {
      double diag = effective_removal(system, i, g, t, temperature) * vol;
      if (dt_star > 0.0) diag += vol / (m.velocity[g] * dt_star);
      triplets.emplace_back(system.index(i, g), system.index(i, g), diag);
      // In-scatter from every source group.
      for (int from = 0; from < G; ++from) {
        const double s = m.scattering(from, g);
        if (s != 0.0) {
          triplets.emplace_back(system.index(i, g), system.index(i, from), -s * vol);
        }
      }
      if (include_fission && m.is_fissile) {
        for (int from = 0; from < G; ++from) {
          double production = m.chi_p[g] * prompt_production(m, from);
          if (dt_star > 0.0) {
            for (std::size_t j = 0; j < m.precursors.size(); ++j) {
              const double lambda = m.precursors[j].lambda;
              const double elim = lambda * m.precursors[j].gamma * dt_star /
                                  (1.0 + lambda * dt_star);
              production += m.chi_d[g][j] * elim * delayed_production(m, from);
            }
          }
          if (production != 0.0) {
            triplets.emplace_back(system.index(i, g), system.index(i, from),
                                  -production / k_norm * vol);
          }
        }
      }
    }
  }

  SparseMatrix a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

// Fission production operator chi_g * nu Sigma_f,g' * V (total nu for the
// eigenproblem; delayed emission weighted by species yields).
SparseMatrix assemble_fission(const DiscreteSystem& system) {
  const int G = system.n_groups;
  std::vector<Triplet> triplets;
  for (int i = 0; i < system.n_cells(); ++i) {
    const MultiGroupMaterial& m = system.material(i);
    if (!m.is_fissile) continue;
    const double vol = system.mesh.cells[i].volume;
    for (int g = 0; g < G; ++g) {
      for (int from = 0; from < G; ++from) {
        double production = m.chi_p[g] * prompt_production(m, from);
        for (std::size_t j = 0; j < m.precursors.size(); ++j) {
          production += m.chi_d[g][j] * m.precursors[j].gamma * delayed_production(m, from);
        }
        if (production != 0.0) {
          triplets.emplace_back(system.index(i, g), system.index(i, from), production * vol);
        }
      }
    }
  }
  SparseMatrix f(system.n_unknowns(), system.n_unknowns());
  f.setFromTriplets(triplets.begin(), triplets.end());
  return f;
}

Vector default_temperature(const DiscreteSystem& system) {
  double t0 = 300.0;
  for (const XsModifier& mod : system.modifiers) {
    if (mod.kind == ModifierKind::sqrt_temperature_feedback) t0 = mod.t0;
  }
  return Vector::Constant(system.n_cells(), t0);
}

}  // namespace

DiscreteSystem make_system(FVMesh mesh,
                           const std::map<int, MultiGroupMaterial>& region_materials,
                           std::vector<XsModifier> modifiers) {
  DiscreteSystem system;
  system.mesh = std::move(mesh);
  system.modifiers = std::move(modifiers);

  std::map<int, int> region_index;
  for (const auto& [region, mat] : region_materials) {
    mat.validate();
    region_index[region] = static_cast<int>(system.materials.size());
    system.materials.push_back(mat);
  }
  if (system.materials.empty()) throw std::invalid_argument("make_system: no materials");
  system.n_groups = system.materials.front().n_groups;
  for (const auto& m : system.materials) {
    if (m.n_groups != system.n_groups) {
      throw std::invalid_argument("make_system: inconsistent group counts");
    }
    system.n_precursors = std::max(system.n_precursors, static_cast<int>(m.precursors.size()));
  }

  system.cell_material.resize(system.mesh.cells.size());
  for (const Cell& c : system.mesh.cells) {
    auto it = region_index.find(c.region_id);
    if (it == region_index.end()) {
      std::ostringstream msg;
      msg << "make_system: no material for region " << c.region_id << " (cell " << c.id
          << " at " << c.centroid[0] << ", " << c.centroid[1] << ")";
      throw std::runtime_error(msg.str());
    }
    system.cell_material[c.id] = it->second;
  }
  return system;
}

SparseMatrix assemble_operator(const DiscreteSystem& system, double t,
                               const Vector& temperature, double k_norm) {
  if (k_norm <= 0.0) throw std::invalid_argument("assemble_operator: k_norm must be positive");
  return assemble(system, t, temperature, k_norm, 0.0, true);
}

Vector mass_diagonal(const DiscreteSystem& system) {
  Vector m(system.n_unknowns());
  for (int i = 0; i < system.n_cells(); ++i) {
    const auto& mat = system.material(i);
    for (int g = 0; g < system.n_groups; ++g) {
      m[system.index(i, g)] = system.mesh.cells[i].volume / mat.velocity[g];
    }
  }
  return m;
}

KEigenResult solve_k_eigenvalue(const DiscreteSystem& system) {
  bool any_fissile = false;
  for (int i = 0; i < system.n_cells(); ++i) any_fissile |= system.material(i).is_fissile;
  if (!any_fissile) throw std::invalid_argument("solve_k_eigenvalue: no fissile region");

  const Vector t0 = default_temperature(system);
  const SparseMatrix loss = assemble(system, 0.0, t0, 1.0, 0.0, false);
  const SparseMatrix fission = assemble_fission(system);
  SparseSolver solver(loss, 1e-12);

  Vector flux = Vector::Ones(system.n_unknowns());
  Vector source = fission * flux;
  double production = source.sum();
  source /= production;

  double k = 1.0;
  constexpr int max_iterations = 20000;
  std::vector<double> history;
  for (int it = 0; it < max_iterations; ++it) {
    const Vector flux_new = solver.solve(source);
    Vector source_new = fission * flux_new;
    const double k_new = source_new.sum();
    source_new /= k_new;

    const double dk = std::abs(k_new - k) / std::abs(k_new);
    const double dflux = (flux_new / flux_new.norm() - flux / flux.norm())
                             .cwiseAbs()
                             .maxCoeff();
    flux = flux_new;
    source = source_new;
    k = k_new;
    history.push_back(k);
    if (dk <= 1e-10 && dflux <= 1e-8) {
      return {k, flux / flux.norm(), it + 1};
    }
  }
  std::ostringstream msg;
  msg << "solve_k_eigenvalue: no convergence after " << max_iterations
      << " iterations; last k values:";
  for (std::size_t i = history.size() > 5 ? history.size() - 5 : 0; i < history.size(); ++i) {
    msg << " " << history[i];
  }
  throw std::runtime_error(msg.str());
}

Vector precursor_update(const DiscreteSystem& system, const Vector& c_prev,
                        const Vector& flux_star, double dt_star, double k_norm) {
  if (dt_star <= 0.0) throw std::invalid_argument("precursor_update: dt_star must be positive");
  const int J = system.n_precursors;
  Vector c_new(c_prev.size());
  for (int i = 0; i < system.n_cells(); ++i) {
    const MultiGroupMaterial& m = system.material(i);
    double fission_rate = 0.0;
    for (int g = 0; g < system.n_groups; ++g) {
      fission_rate += delayed_production(m, g) * flux_star[system.index(i, g)];
    }
    fission_rate /= k_norm;
    for (int j = 0; j < J; ++j) {
      const int idx = i * J + j;
      if (j < static_cast<int>(m.precursors.size())) {
        const auto& sp = m.precursors[j];
        c_new[idx] = (c_prev[idx] + sp.gamma * dt_star * fission_rate) /
                     (1.0 + sp.lambda * dt_star);
      } else {
        c_new[idx] = c_prev[idx];
      }
    }
  }
  return c_new;
}

Vector temperature_update(const DiscreteSystem& system, const Vector& t_prev,
                          const Vector& flux_stage, double dt_star, double alpha) {
  if (alpha < 0.0) throw std::invalid_argument("temperature_update: alpha must be >= 0");
  Vector t_new = t_prev;
  if (alpha == 0.0) return t_new;
  for (int i = 0; i < system.n_cells(); ++i) {
    const MultiGroupMaterial& m = system.material(i);
    if (!m.is_fissile || m.sigma_f.empty()) continue;
    double fission_rate = 0.0;
    for (int g = 0; g < system.n_groups; ++g) {
      fission_rate += m.sigma_f[g] * flux_stage[system.index(i, g)];
    }
    t_new[i] += dt_star * alpha * fission_rate;
  }
  return t_new;
}

Vector initial_condition_parabolic(const FVMesh& mesh, const MultiGroupMaterial& mat) {
  if (mesh.dimension != 1) {
    throw std::invalid_argument("initial_condition_parabolic: spherical mesh required");
  }
  const int G = mat.n_groups;
  const double r_b = mesh.cells.back().centroid[0] + mesh.faces.back().d_if;
  Vector flux = Vector::Zero(static_cast<Eigen::Index>(mesh.cells.size()) * G);
  double power = 0.0;
  for (const Cell& c : mesh.cells) {
    const double r = c.centroid[0];
    const double shape = 1.0 - r * r / (r_b * r_b);
    for (int g = 0; g < std::min(G, 2); ++g) {
      flux[c.id * G + g] = shape;
      power += mat.nu_sigma_f[g] * shape * c.volume;
    }
  }
  if (power <= 0.0) {
    throw std::runtime_error("initial_condition_parabolic: zero fission power");
  }
  return flux / power;
}

Vector power_density(const DiscreteSystem& system, const Vector& flux,
                     const TransientConfig& config) {
  Vector p = Vector::Zero(system.n_cells());
  for (int i = 0; i < system.n_cells(); ++i) {
    const MultiGroupMaterial& m = system.material(i);
    if (!m.is_fissile) continue;
    double rate = 0.0;
    for (int g = 0; g < system.n_groups; ++g) {
      const double coeff = config.power_model == PowerModel::energy_per_fission
                               ? config.e_fission * m.sigma_f[g]
                               : m.nu_sigma_f[g];
      rate += coeff * flux[system.index(i, g)];
    }
    p[i] = rate;
  }
  return p;
}

double core_average_power(const DiscreteSystem& system, const Vector& power) {
  double num = 0.0;
  double core_volume = 0.0;
  for (int i = 0; i < system.n_cells(); ++i) {
    if (!system.material(i).is_fissile) continue;
    num += power[i] * system.mesh.cells[i].volume;
    core_volume += system.mesh.cells[i].volume;
  }
  if (core_volume <= 0.0) throw std::runtime_error("core_average_power: no fissile volume");
  return num / core_volume;
}

double total_power(const DiscreteSystem& system, const Vector& power) {
  double sum = 0.0;
  for (int i = 0; i < system.n_cells(); ++i) {
    sum += power[i] * system.mesh.cells[i].volume;
  }
  return sum;
}

Vector normalize_to_average_power(const DiscreteSystem& system, const Vector& flux,
                                  double target, double e_fission) {
  TransientConfig pcfg;
  pcfg.power_model = PowerModel::energy_per_fission;
  pcfg.e_fission = e_fission;
  const double current = core_average_power(system, power_density(system, flux, pcfg));
  if (current <= 0.0) {
    throw std::runtime_error("normalize_to_average_power: zero fission rate");
  }
  return flux * (target / current);
}

namespace {

struct Stage {
  double dt_star;    // effective fully implicit step
  double t_target;   // time the operator is evaluated at
};

class Tbdf2Stepper {
 public:
  Tbdf2Stepper(const DiscreteSystem& system, const TransientConfig& config, double k_norm)
      : system_(system), config_(config), k_norm_(k_norm) {
    is_static_ = system.modifiers.empty();
    mass_ = mass_diagonal(system);
  }

  // One stage solve of (M/dt* + A - F_d) phi = M h / dt* + decay(c_hist).
  Vector stage_solve(const Stage& stage, const Vector& temperature,
                     const Vector& flux_hist, const Vector& c_hist) {
    Vector rhs = mass_.cwiseProduct(flux_hist) / stage.dt_star;
    const int J = system_.n_precursors;
    if (J > 0) {
      for (int i = 0; i < system_.n_cells(); ++i) {
        const MultiGroupMaterial& m = system_.material(i);
        const double vol = system_.mesh.cells[i].volume;
        for (std::size_t j = 0; j < m.precursors.size(); ++j) {
          const double lambda = m.precursors[j].lambda;
          const double decay = lambda / (1.0 + lambda * stage.dt_star) * c_hist[i * J + j] * vol;
          for (int g = 0; g < system_.n_groups; ++g) {
            rhs[system_.index(i, g)] += m.chi_d[g][j] * decay;
          }
        }
      }
    }
    SparseSolver* solver = factorized(stage, temperature);
    return solver->solve(rhs);
  }

  TransientState step(const TransientState& state, double dt) {
    const int J = system_.n_precursors;
    const Stage stage1{dt / 4.0, state.t + dt / 4.0};
    const Stage stage2{dt / 3.0, state.t + dt};

    // Crank-Nicolson quarter step, extrapolated to the half step.
    const Vector flux_q = stage_solve(stage1, state.temperature, state.flux, state.precursors);
    const Vector flux_h = 2.0 * flux_q - state.flux;
    Vector c_h, t_h;
    if (J > 0) {
      const Vector c_q = precursor_update(system_, state.precursors, flux_q, stage1.dt_star, k_norm_);
      c_h = 2.0 * c_q - state.precursors;
    }
    if (config_.feedback) {
      const Vector t_q = temperature_update(system_, state.temperature, flux_q,
                                            stage1.dt_star, config_.alpha);
      t_h = 2.0 * t_q - state.temperature;
    } else {
      t_h = state.temperature;
    }

    // BDF2 over the second half with weighted history.
    const Vector flux_hist = (4.0 * flux_h - state.flux) / 3.0;
    Vector c_hist;
    if (J > 0) c_hist = (4.0 * c_h - state.precursors) / 3.0;

    TransientState next;
    next.t = state.t + dt;
    next.flux = stage_solve(stage2, t_h, flux_hist, c_hist);
    if (J > 0) next.precursors = precursor_update(system_, c_hist, next.flux, stage2.dt_star, k_norm_);
    if (config_.feedback) {
      const Vector t_hist = (4.0 * t_h - state.temperature) / 3.0;
      next.temperature = temperature_update(system_, t_hist, next.flux, stage2.dt_star, config_.alpha);
    } else {
      next.temperature = state.temperature;
    }
    return next;
  }

 private:
  SparseSolver* factorized(const Stage& stage, const Vector& temperature) {
    if (is_static_) {
      auto it = static_cache_.find(stage.dt_star);
      if (it == static_cache_.end()) {
        SparseMatrix a = assemble(system_, stage.t_target, temperature, k_norm_,
                                  stage.dt_star, true);
        it = static_cache_.emplace(stage.dt_star, SparseSolver(a, 1e-12)).first;
      }
      return &it->second;
    }
    SparseMatrix a = assemble(system_, stage.t_target, temperature, k_norm_,
                              stage.dt_star, true);
    scratch_.emplace(a, 1e-12);
    return &*scratch_;
  }

  const DiscreteSystem& system_;
  const TransientConfig& config_;
  double k_norm_;
  bool is_static_;
  Vector mass_;
  std::map<double, SparseSolver> static_cache_;
  std::optional<SparseSolver> scratch_;
};

}  // namespace

TransientState tbdf2_step(const DiscreteSystem& system, const TransientState& state,
                          double dt, const TransientConfig& config, double k_norm) {
  if (!state.flux.allFinite()) throw std::invalid_argument("tbdf2_step: non-finite state");
  Tbdf2Stepper stepper(system, config, k_norm);
  return stepper.step(state, dt);
}

SimulationRecord run_transient(const DiscreteSystem& system, const TransientConfig& config) {
  if (config.dt <= 0.0) throw std::invalid_argument("run_transient: dt must be positive");
  const double steps_real = config.t_end / config.dt;
  const int n_steps = static_cast<int>(std::lround(steps_real));
  if (n_steps < 1 || std::abs(steps_real - n_steps) > 1e-9 * steps_real) {
    throw std::invalid_argument("run_transient: t_end must be an integer number of steps");
  }

  TransientState state;
  state.t = 0.0;
  state.temperature = Vector::Constant(system.n_cells(), config.initial_temperature);
  double k_norm = 1.0;

  if (config.ic == InitialConditionKind::parabolic_sphere) {
    state.flux = initial_condition_parabolic(system.mesh, system.materials.front());
  } else {
    const KEigenResult eig = solve_k_eigenvalue(system);
    k_norm = eig.k;
    state.flux = normalize_to_average_power(system, eig.flux, config.target_avg_power,
                                            config.e_fission);
  }

  const int J = system.n_precursors;
  if (J > 0) {
    // Equilibrium concentrations consistent with the k-normalized source.
    state.precursors = Vector::Zero(static_cast<Eigen::Index>(system.n_cells()) * J);
    for (int i = 0; i < system.n_cells(); ++i) {
      const MultiGroupMaterial& m = system.material(i);
      if (!m.is_fissile) continue;
      double fission_rate = 0.0;
      for (int g = 0; g < system.n_groups; ++g) {
        fission_rate += delayed_production(m, g) * state.flux[system.index(i, g)];
      }
      fission_rate /= k_norm;
      for (std::size_t j = 0; j < m.precursors.size(); ++j) {
        state.precursors[i * J + j] = m.precursors[j].gamma * fission_rate / m.precursors[j].lambda;
      }
    }
  }

  SimulationRecord record;
  auto snapshot = [&](const TransientState& s) {
    record.times.push_back(s.t);
    record.flux.push_back(s.flux);
    if (J > 0) record.precursors.push_back(s.precursors);
    if (config.feedback) record.temperature.push_back(s.temperature);
    Vector p = power_density(system, s.flux, config);
    record.total_power.push_back(total_power(system, p));
    record.average_power.push_back(core_average_power(system, p));
    record.power_density.push_back(std::move(p));
  };

  snapshot(state);
  Tbdf2Stepper stepper(system, config, k_norm);
  for (int n = 0; n < n_steps; ++n) {
    try {
      state = stepper.step(state, config.dt);
    } catch (const std::exception& err) {
      throw std::runtime_error("run_transient: step failed at t = " +
                               std::to_string(state.t + config.dt) + ": " + err.what());
    }
    // Keep the time grid exact for snapshot stacking.
    state.t = (n + 1) * config.dt;
    snapshot(state);
  }
  return record;
}

}  // namespace podmci
