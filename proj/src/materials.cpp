#include "podmci/materials.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace podmci {

using nlohmann::json;

double MultiGroupMaterial::removal(int g) const {
  double base;
  if (!sigma_t.empty()) {
    base = sigma_t[g];
  } else {
    double out_scatter = 0.0;
    for (int to = 0; to < n_groups; ++to) out_scatter += scattering(g, to);
    base = sigma_a[g] + out_scatter;
  }
  return base;
}

double MultiGroupMaterial::scattering(int from, int to) const {
  if (sigma_s.empty()) return 0.0;
  return sigma_s[from][to];
}

void MultiGroupMaterial::validate() const {
  if (n_groups < 1) throw std::invalid_argument(name + ": n_groups must be >= 1");
  auto check_len = [&](const auto& v, const char* what) {
    if (!v.empty() && static_cast<int>(v.size()) != n_groups) {
      throw std::invalid_argument(name + ": " + what + " has wrong group count");
    }
  };
  check_len(sigma_t, "sigma_t");
  check_len(sigma_a, "sigma_a");
  check_len(nu_sigma_f, "nu_sigma_f");
  check_len(diffusion, "diffusion");
  check_len(velocity, "velocity");
  if (sigma_t.empty() && sigma_a.empty()) {
    throw std::invalid_argument(name + ": need sigma_t or sigma_a");
  }
  for (int g = 0; g < n_groups; ++g) {
    if (!sigma_t.empty() && sigma_t[g] < 0.0) throw std::invalid_argument(name + ": negative sigma_t");
    if (!sigma_a.empty() && sigma_a[g] < 0.0) throw std::invalid_argument(name + ": negative sigma_a");
    if (diffusion.empty() || diffusion[g] <= 0.0) {
      throw std::invalid_argument(name + ": diffusion coefficient must be positive");
    }
    if (velocity.empty() || velocity[g] <= 0.0) {
      throw std::invalid_argument(name + ": velocity must be positive");
    }
  }
  if (is_fissile) {
    const double chi_sum = std::accumulate(chi_p.begin(), chi_p.end(), 0.0);
    if (std::abs(chi_sum - 1.0) > 1e-10) {
      throw std::invalid_argument(name + ": chi_p must sum to 1");
    }
    for (std::size_t j = 0; j < precursors.size(); ++j) {
      double chid_sum = 0.0;
      for (int g = 0; g < n_groups; ++g) chid_sum += chi_d[g][j];
      if (std::abs(chid_sum - 1.0) > 1e-10) {
        throw std::invalid_argument(name + ": chi_d species " + std::to_string(j) +
                                    " must sum to 1");
      }
    }
  }
}

double ramped_absorption(double base_sigma_a, double t, double delta, double t_ramp) {
  if (t < 0.0) throw std::invalid_argument("ramped_absorption: t must be >= 0");
  if (t_ramp <= 0.0) throw std::invalid_argument("ramped_absorption: t_ramp must be positive");
  const double s = t < t_ramp ? t / t_ramp : 1.0;
  return base_sigma_a * (1.0 + s * delta);
}

double feedback_absorption(double sigma_ref, double temperature, double t0, double gamma_fb) {
  if (temperature <= 0.0) throw std::invalid_argument("feedback_absorption: temperature must be positive");
  if (t0 <= 0.0) throw std::invalid_argument("feedback_absorption: T0 must be positive");
  return sigma_ref * (1.0 + gamma_fb * (std::sqrt(temperature) - std::sqrt(t0)));
}

MultiGroupMaterial from_microscopic(const MicroscopicSphereData& micro, double density) {
  if (density <= 0.0) throw std::invalid_argument("from_microscopic: density must be positive");
  const int g_count = static_cast<int>(micro.sigma_t.size());
  for (double s : micro.sigma_t) {
    if (s < 0.0) throw std::invalid_argument("from_microscopic: negative sigma_t");
  }
  for (double s : micro.nu_sigma_f) {
    if (s < 0.0) throw std::invalid_argument("from_microscopic: negative nu_sigma_f");
  }

  MultiGroupMaterial mat;
  mat.name = "sphere-fuel";
  mat.n_groups = g_count;
  mat.sigma_t.resize(g_count);
  mat.nu_sigma_f.resize(g_count);
  mat.diffusion.resize(g_count);
  mat.velocity = micro.velocity;
  mat.chi_p = micro.chi;
  mat.sigma_s.assign(g_count, std::vector<double>(g_count, 0.0));
  for (int g = 0; g < g_count; ++g) {
    mat.sigma_t[g] = density * micro.sigma_t[g];
    mat.nu_sigma_f[g] = density * micro.nu_sigma_f[g];
    mat.diffusion[g] = 1.0 / (3.0 * density * micro.sigma_t[g]);
    for (int to = 0; to < g_count; ++to) {
      if (micro.sigma_s[g][to] < 0.0) {
        throw std::invalid_argument("from_microscopic: negative sigma_s");
      }
      mat.sigma_s[g][to] = density * micro.sigma_s[g][to];
    }
  }
  mat.is_fissile = true;
  mat.validate();
  return mat;
}

namespace {

std::vector<double> as_doubles(const json& j) {
  return j.get<std::vector<double>>();
}

}  // namespace

MaterialLibrary load_material_library(const std::string& path, bool use_printed_scattering) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_material_library: cannot open " + path);
  json root = json::parse(in);

  MaterialLibrary lib;

  // Sphere tables: microscopic data in barns plus the nominal density.
  const json& sp = root.at("sphere");
  lib.sphere.sigma_t = as_doubles(sp.at("sigma_t_b"));
  lib.sphere.nu_sigma_f = as_doubles(sp.at("nu_sigma_f_b"));
  lib.sphere.chi = as_doubles(sp.at("chi"));
  lib.sphere.velocity = as_doubles(sp.at("velocity_cm_per_s"));
  lib.sphere.sigma_s.clear();
  for (const auto& row : sp.at("sigma_s_b")) lib.sphere.sigma_s.push_back(as_doubles(row));
  lib.sphere_density = sp.at("density_atoms_per_b_cm").get<double>();

  // LRA tables: per-region macroscopic data plus common constants.
  const json& lra = root.at("lra");
  const json& common = lra.at("common");
  const double nu = common.at("nu").get<double>();
  const double nu_p = common.at("nu_p").get<double>();
  const double nu_d = common.at("nu_d").get<double>();
  const double buckling = common.at("axial_buckling_cm2").get<double>();
  const std::vector<double> velocity = as_doubles(common.at("velocity_cm_per_s"));
  const std::vector<double> chi_p = as_doubles(common.at("chi_p"));
  const std::vector<double> chi_d_spectrum = as_doubles(common.at("chi_d"));

  std::vector<PrecursorSpecies> precursors;
  double yield_sum = 0.0;
  for (const auto& p : lra.at("precursors")) {
    yield_sum += p.at("yield").get<double>();
  }
  for (const auto& p : lra.at("precursors")) {
    PrecursorSpecies sp2;
    sp2.lambda = p.at("lambda_per_s").get<double>();
    sp2.gamma = p.at("yield").get<double>() / yield_sum;
    precursors.push_back(sp2);
  }

  for (const auto& region : lra.at("regions")) {
    MultiGroupMaterial mat;
    mat.name = region.at("name").get<std::string>();
    mat.n_groups = 2;
    mat.diffusion = as_doubles(region.at("diffusion_cm"));
    mat.sigma_a = as_doubles(region.at("sigma_a_per_cm"));
    double s01 = region.at("sigma_s_0_to_1_per_cm").get<double>();
    if (use_printed_scattering && region.contains("sigma_s_0_to_1_printed")) {
      s01 = region.at("sigma_s_0_to_1_printed").get<double>();
    }
    mat.sigma_s.assign(2, std::vector<double>(2, 0.0));
    mat.sigma_s[0][1] = s01;
    mat.velocity = velocity;
    mat.buckling = buckling;
    if (region.contains("nu_sigma_f_per_cm")) {
      mat.nu_sigma_f = as_doubles(region.at("nu_sigma_f_per_cm"));
      mat.is_fissile = true;
      mat.nu.assign(2, nu);
      mat.nu_p.assign(2, nu_p);
      mat.nu_d.assign(2, nu_d);
      mat.chi_p = chi_p;
      mat.sigma_f.resize(2);
      for (int g = 0; g < 2; ++g) mat.sigma_f[g] = mat.nu_sigma_f[g] / nu;
      mat.chi_d.assign(2, std::vector<double>(precursors.size()));
      for (int g = 0; g < 2; ++g) {
        for (std::size_t j = 0; j < precursors.size(); ++j) {
          mat.chi_d[g][j] = chi_d_spectrum[g];
        }
      }
      mat.precursors = precursors;
    }
    mat.validate();
    lib.lra_regions.push_back(std::move(mat));
  }

  const json& transient = lra.at("transient");
  lib.lra_alpha = transient.at("alpha_K_cm3").get<double>();
  lib.lra_e_fission = transient.at("e_fission_J").get<double>();
  lib.lra_ramp_delta = transient.at("ramp_delta").get<double>();
  lib.lra_ramp_duration = transient.at("ramp_duration_s").get<double>();
  lib.lra_feedback_gamma = transient.at("feedback_gamma_sqrtK").get<double>();
  lib.lra_t0 = transient.at("initial_temperature_K").get<double>();
  return lib;
}

std::string default_data_dir() {
#ifdef PODMCI_DATA_DIR
  return PODMCI_DATA_DIR;
#else
  return "data";
#endif
}

}  // namespace podmci
