#pragma once

#include "podmci/numerics.hpp"

#include <string>
#include <vector>

namespace podmci {

struct PrecursorSpecies {
  double lambda = 0.0;  // decay constant, 1/s
  double gamma = 0.0;   // yield fraction, normalized so the species sum is 1
};

// Group constants for one material region. Scattering is stored as
// sigma_s[from][to]; the removal term folds absorption, out-scatter, and the
// axial-buckling pseudo-absorption B^2 D_g.
struct MultiGroupMaterial {
  std::string name;
  int n_groups = 0;

  std::vector<double> sigma_t;          // cm^-1 (empty when built from sigma_a)
  std::vector<double> sigma_a;          // cm^-1 (empty when built from sigma_t)
  std::vector<std::vector<double>> sigma_s;  // [from][to], cm^-1
  std::vector<double> sigma_f;          // cm^-1 (0 when only nu*sigma_f known)
  std::vector<double> nu_sigma_f;       // cm^-1
  std::vector<double> nu;               // neutrons per fission
  std::vector<double> nu_p;
  std::vector<double> nu_d;
  std::vector<double> chi_p;
  std::vector<std::vector<double>> chi_d;  // [group][species]
  std::vector<double> diffusion;        // cm
  std::vector<double> velocity;         // cm/s
  double buckling = 0.0;                // B^2_a, cm^-2
  std::vector<PrecursorSpecies> precursors;
  bool is_fissile = false;

  // Total interaction coefficient for the removal term: sigma_t when given,
  // otherwise sigma_a + out-scatter. Buckling is added separately as B^2 D_g.
  double removal(int g) const;
  double scattering(int from, int to) const;

  void validate() const;
};

enum class ModifierKind { absorption_ramp, sqrt_temperature_feedback };

// Time (ramp) and temperature (feedback) cross-section modifiers. The ramp
// scales the base value by 1 + min(t / t_ramp, 1) * delta; the feedback by
// 1 + gamma_fb * (sqrt(T) - sqrt(T0)).
struct XsModifier {
  ModifierKind kind = ModifierKind::absorption_ramp;
  int group = 0;
  std::vector<int> region_ids;  // regions the modifier applies to
  double delta = 0.0;           // ramp fraction
  double t_ramp = 0.0;          // s
  double gamma_fb = 0.0;        // K^{1/2}
  double t0 = 0.0;              // K
};

double ramped_absorption(double base_sigma_a, double t, double delta, double t_ramp);
double feedback_absorption(double sigma_ref, double temperature, double t0, double gamma_fb);

// Macroscopic material from microscopic cross sections in barns at a given
// atom density (atoms/(b cm)); D_g = 1 / (3 rho sigma_t,g).
struct MicroscopicSphereData {
  std::vector<double> sigma_t;               // b
  std::vector<double> nu_sigma_f;            // b
  std::vector<double> chi;
  std::vector<double> velocity;              // cm/s
  std::vector<std::vector<double>> sigma_s;  // [from][to], b
};

MultiGroupMaterial from_microscopic(const MicroscopicSphereData& micro, double density);

// Material library loaded from the hierarchical key-value file in data/.
struct MaterialLibrary {
  MicroscopicSphereData sphere;
  double sphere_density = 0.0;
  std::vector<MultiGroupMaterial> lra_regions;  // index 0 -> region id 1
  double lra_alpha = 0.0;       // adiabatic heat-up conversion, K cm^3
  double lra_e_fission = 0.0;   // J per fission
  double lra_ramp_delta = 0.0;
  double lra_ramp_duration = 0.0;  // s
  double lra_feedback_gamma = 0.0; // K^{1/2}
  double lra_t0 = 0.0;             // K
};

// use_printed_scattering keeps the 0.2617 value the source table prints for
// regions 3/4 instead of the canonical 0.02617.
MaterialLibrary load_material_library(const std::string& path,
                                      bool use_printed_scattering = false);

std::string default_data_dir();

}  // namespace podmci
