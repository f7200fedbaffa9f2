#pragma once

#include "podmci/fom.hpp"
#include "podmci/rom.hpp"
#include "podmci/validation.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace podmci {

enum class QoiSelector {
  full_field,
  final_power_profile,
  total_power_series,
  peak_power_profile,
  scalar_peak_power,
};

QoiSelector qoi_selector_from_string(const std::string& name);
std::string to_string(QoiSelector selector);

QoiTensor extract_qoi(const SimulationRecord& record, QoiSelector selector);

// Experiment configuration: problem selection, parameter space, sampling
// plan, QoI/truncation choices, and the cross-validation plan. Parsed from a
// JSON file and schema-validated before any run.
struct SamplingPlan {
  enum class Kind { tensor, random } kind = Kind::tensor;
  int points_per_dim = 2;          // tensor
  int count = 0;                   // random
  std::uint64_t seed = 0;          // random
};

struct CvPlan {
  enum class Kind { loocv, kfold } kind = Kind::loocv;
  int k = 0;
  int repeats = 1;
  std::uint64_t seed = 0;
};

struct SphereSettings {
  int n_cells = 100;
  double radius_cm = 6.1612;
  double density = 0.05;                 // atoms/(b cm)
  double sigma_s01_b = 1.46;             // down-scatter 0 -> 1, barns
  double t_end_s = 1e-7;
  double dt_s = 2e-9;
};

struct LraSettings {
  int cells_per_assembly = 2;            // 22x22 cells at 7.5 cm
  double t_end_s = 3.0;
  double dt_s = 0.01;
  bool feedback = true;
  std::vector<int> ramp_regions = {4};   // regions starting rodded and ramping
  bool use_printed_scattering = false;
  double ramp_delta = -0.1212369;
  double ramp_duration_s = 2.0;
  double feedback_gamma = 3.034e-3;      // K^{1/2}
  double target_avg_power = 1e-6;        // W/cm^3
};

struct ExperimentConfig {
  std::string study;
  enum class Problem { sphere, lra } problem = Problem::sphere;
  SphereSettings sphere;
  LraSettings lra;
  ParameterSpace space;
  SamplingPlan sampling;
  QoiSelector qoi = QoiSelector::full_field;
  TruncationRule truncation = TruncationRule::energy(1e-8);
  CvPlan cv;
  std::string output_dir;
  std::uint64_t seed = 0;
  std::string data_dir;  // defaults to the repo data directory

  void validate() const;
};

ExperimentConfig load_experiment_config(const std::string& path);
std::string experiment_config_to_json(const ExperimentConfig& config);

// Directory of binary records plus a JSON manifest. Records are bit-exact
// 64-bit little-endian float payloads with a magic/version header.
class SnapshotStore {
 public:
  struct Entry {
    std::string file;
    Vector params;
    bool present = false;
  };

  static SnapshotStore create(const std::filesystem::path& dir, const ExperimentConfig& config,
                              const DenseMatrix& sample_points);
  static SnapshotStore open(const std::filesystem::path& dir);

  const std::filesystem::path& dir() const { return dir_; }
  const ExperimentConfig& config() const { return config_; }
  int n_points() const { return static_cast<int>(entries_.size()); }
  const Entry& entry(int index) const { return entries_.at(index); }
  DenseMatrix sample_points() const;
  bool complete() const;

  void write_record(int index, const SimulationRecord& record);
  SimulationRecord read_record(int index) const;

 private:
  void save_manifest() const;

  std::filesystem::path dir_;
  ExperimentConfig config_;
  std::vector<Entry> entries_;
  std::vector<int> record_shape_;  // {n_times, n_flux, n_prec, n_temp, n_power}
};

void write_record_file(const std::filesystem::path& path, const Vector& params,
                       const SimulationRecord& record);
SimulationRecord read_record_file(const std::filesystem::path& path, Vector* params = nullptr);

void save_rom(const std::filesystem::path& path, const RomModel& model);
RomModel load_rom(const std::filesystem::path& path);

// CSV helpers for the plottable series.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
void write_scree_csv(const std::filesystem::path& path, const Vector& singular_values);
void write_cv_report_csv(const std::filesystem::path& path, const CrossValidationReport& report);
void write_histogram_csv(const std::filesystem::path& path, const std::vector<double>& values,
                         int bins);

}  // namespace podmci
