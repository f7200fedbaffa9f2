#pragma once

#include "podmci/materials.hpp"
#include "podmci/mesh.hpp"
#include "podmci/numerics.hpp"

#include <map>
#include <optional>
#include <vector>

namespace podmci {

// Discrete multi-group diffusion system on a FV mesh. Unknown ordering is
// cell-major, group-minor: phi_{g,i} lives at index i * G + g.
struct DiscreteSystem {
  FVMesh mesh;
  std::vector<MultiGroupMaterial> materials;
  std::vector<int> cell_material;  // cell id -> materials index
  int n_groups = 0;
  int n_precursors = 0;
  std::vector<XsModifier> modifiers;

  int n_cells() const { return static_cast<int>(mesh.cells.size()); }
  int n_unknowns() const { return n_cells() * n_groups; }
  int index(int cell, int group) const { return cell * n_groups + group; }

  const MultiGroupMaterial& material(int cell) const {
    return materials[cell_material[cell]];
  }
};

// Resolves region ids to materials; throws naming the cell when a region has
// no material.
DiscreteSystem make_system(FVMesh mesh,
                           const std::map<int, MultiGroupMaterial>& region_materials,
                           std::vector<XsModifier> modifiers = {});

// Spatial operator (volume-scaled): streaming + removal - scattering -
// prompt fission / k_norm, with ramp and feedback modifiers evaluated at time
// t and the given temperature field. The time-derivative mass term and the
// eliminated delayed-precursor coupling are added by the stepper.
SparseMatrix assemble_operator(const DiscreteSystem& system, double t,
                               const Vector& temperature, double k_norm);

// Diagonal mass entries V_i / v_g.
Vector mass_diagonal(const DiscreteSystem& system);

struct KEigenResult {
  double k = 0.0;
  Vector flux;  // unit L2 norm
  int iterations = 0;
};

// Power iteration on loss^{-1} * fission to a relative k-change of 1e-10 and
// flux change of 1e-8.
KEigenResult solve_k_eigenvalue(const DiscreteSystem& system);

// Implicitly discretized precursor update,
// C* = (C_prev + gamma_j dt* sum_g nu_d sigma_f phi*_g / k) / (1 + lambda_j dt*).
// Layout: cell-major, species-minor.
Vector precursor_update(const DiscreteSystem& system, const Vector& c_prev,
                        const Vector& flux_star, double dt_star,
                        double k_norm = 1.0);

// Adiabatic heat-up: T* = T_prev + dt* alpha sum_g sigma_f,g phi_g in fissile
// cells; non-fissile cells are unchanged.
Vector temperature_update(const DiscreteSystem& system, const Vector& t_prev,
                          const Vector& flux_stage, double dt_star, double alpha);

enum class InitialConditionKind { parabolic_sphere, k_eigenvalue_normalized };
enum class PowerModel { fission_rate, energy_per_fission };

struct TransientConfig {
  double t_end = 0.0;  // s
  double dt = 0.0;     // s
  InitialConditionKind ic = InitialConditionKind::parabolic_sphere;
  std::vector<XsModifier> modifiers;
  bool feedback = false;
  PowerModel power_model = PowerModel::fission_rate;
  double target_avg_power = 1e-6;       // W/cm^3 (k-eigenvalue IC)
  double e_fission = 3.204e-11;         // J per fission
  double alpha = 0.0;                   // K cm^3, adiabatic heat-up
  double initial_temperature = 300.0;   // K
};

struct TransientState {
  double t = 0.0;
  Vector flux;
  Vector precursors;   // empty when the system has no precursor species
  Vector temperature;  // per cell
};

struct SimulationRecord {
  std::vector<double> times;
  std::vector<Vector> flux;
  std::vector<Vector> precursors;
  std::vector<Vector> temperature;
  std::vector<Vector> power_density;  // per cell
  std::vector<double> total_power;
  std::vector<double> average_power;  // over fissile cells

  int n_steps() const { return static_cast<int>(times.size()) - 1; }
};

// One TBDF-2 step: Crank-Nicolson quarter step extrapolated to the half step,
// then BDF2 over the second half. k_norm scales all nu-production terms.
TransientState tbdf2_step(const DiscreteSystem& system, const TransientState& state,
                          double dt, const TransientConfig& config,
                          double k_norm = 1.0);

SimulationRecord run_transient(const DiscreteSystem& system, const TransientConfig& config);

// Parabolic start-up flux C (1 - r^2 / r_b^2) in groups 0 and 1, zero
// elsewhere, with C normalizing the fission-rate power to one.
Vector initial_condition_parabolic(const FVMesh& mesh, const MultiGroupMaterial& mat);

// Scales the flux so the core-average power density matches the target.
Vector normalize_to_average_power(const DiscreteSystem& system, const Vector& flux,
                                  double target, double e_fission);

// Per-cell power density for the configured power model.
Vector power_density(const DiscreteSystem& system, const Vector& flux,
                     const TransientConfig& config);

double core_average_power(const DiscreteSystem& system, const Vector& power);
double total_power(const DiscreteSystem& system, const Vector& power);

}  // namespace podmci
