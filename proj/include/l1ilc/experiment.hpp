#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "l1ilc/design.hpp"
#include "l1ilc/ilc.hpp"
#include "l1ilc/l1_controller.hpp"
#include "l1ilc/plant.hpp"
#include "l1ilc/signal.hpp"

namespace l1ilc {

enum class ControllerKind { L1Ilc, PdIlc };
enum class ScenarioKind { Learning, RepeatAfterDisturbance, LearnThroughDisturbance };

std::string  to_string(ControllerKind k);
std::string  to_string(ScenarioKind k);
ControllerKind controller_kind_from_string(const std::string& s);
ScenarioKind   scenario_kind_from_string(const std::string& s);

// Smooth closed 3D curve: horizontal figure-eight with sinusoidal altitude.
// Explicit per-axis sample arrays override the generator when present.
struct TrajectoryConfig {
    double duration = 6.0;
    int    samples  = 300;
    double amp_x    = 0.8;
    double amp_y    = 0.5;
    double amp_z    = 0.3;

    std::optional<std::array<std::vector<double>, 3>> explicit_samples;
};

std::array<SampledSignal, 3> build_trajectory(const TrajectoryConfig& cfg);

// Adaptive-controller design shared by the three axes (diagonal extension).
struct L1AxisConfig {
    double m          = 3.0;
    double omega_c    = 50.0;  // C(s) = omega_c/(s+omega_c)
    double gamma      = 1000.0;
    double sigma_max  = 10.0;
    double epsilon    = 0.1;
    double k_outer    = 2.0;
    double lyapunov_z = 1.0;   // P = Z/(2m)
};

struct IlcScalarConfig {
    double q                 = 1.0;
    double s                 = 1e-4;
    double r                 = 1e-3;
    double a_max             = 5.0;
    double process_noise     = 1e-4;
    double measurement_noise = 1e-2;
    double p0                = 1.0;
};

struct ExperimentConfig {
    ControllerKind controller  = ControllerKind::L1Ilc;
    ScenarioKind   scenario    = ScenarioKind::Learning;
    int            iterations  = 10;

    std::string disturbance          = "none";
    int         activation_iteration = 11;  // 1-based iteration at which the preset turns on

    TrajectoryConfig trajectory;
    int              substeps = 20;  // control steps per trajectory sample

    std::string surrogate      = "first_order";  // preset name or explicit "num: ... / den: ..."
    double      surrogate_pole = 3.0;
    double      vehicle_mass   = 0.42;

    L1AxisConfig    l1;
    PdConfig        pd;
    IlcScalarConfig ilc;

    bool     noise_enabled = false;
    double   noise_sigma   = 0.002;
    std::uint64_t seed     = 1;

    double start_tolerance = 0.02;
    double settle_timeout  = 20.0;
    double trim_rate       = 0.5;

    bool trace = false;

    double sample_dt() const { return trajectory.duration / trajectory.samples; }
    double control_dt() const { return sample_dt() / substeps; }
};

void validate(const ExperimentConfig& cfg);

std::string      config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& text);

TransferFunction build_surrogate(const ExperimentConfig& cfg);
DesignSet        build_design_set(const ExperimentConfig& cfg, double lipschitz_l,
                                  double lipschitz_l0);

struct IterationRecord {
    int                            iteration = 0;
    std::array<SampledSignal, 3>   actual;      // realized position per axis
    std::array<SampledSignal, 3>   reference;   // applied reference per axis
    std::array<Eigen::VectorXd, 3> d_hat;       // estimate after this iteration
    double                         error       = 0.0;
    double                         wall_time_s = 0.0;
};

// Mean over samples of the Euclidean deviation across the three axes.
double error_metric(const std::array<SampledSignal, 3>& desired,
                    const std::array<SampledSignal, 3>& actual);

struct TraceRow {
    int    iteration;
    int    axis;
    double t;
    double y_tilde;
    double sigma_hat;
    double u;
    double r1;
};

struct ScenarioResult {
    std::vector<IterationRecord> records;
    std::array<SampledSignal, 3> desired;
    std::optional<Certificate>   certificate;  // present for the adaptive controller
    std::vector<TraceRow>        trace;
};

// Owns the per-axis plants, controllers and learning state of one scenario
// execution. Iterations settle the plant into the start-tolerance ball under
// pure feedback (with a slow integral trim, frozen during the trajectory),
// execute the trajectory, then update the learning state when enabled.
class ExperimentRunner {
  public:
    explicit ExperimentRunner(ExperimentConfig cfg);

    IterationRecord run_iteration(int iteration);  // 1-based
    ScenarioResult  run_all();

    const std::array<SampledSignal, 3>& desired() const { return desired_; }
    const std::optional<Certificate>&   certificate() const { return certificate_; }

  private:
    void   settle(int iteration, bool disturbance_active);
    double measure(double truth);
    bool   learning_enabled(int iteration) const;
    bool   disturbance_active(int iteration) const;

    ExperimentConfig             cfg_;
    std::array<SampledSignal, 3> desired_;
    std::vector<AxisPlant>       plants_;
    std::vector<L1Controller>    l1_;
    Disturbance                  disturbance_;
    std::optional<Certificate>   certificate_;

    LiftedModel                      lifted_;
    IlcWeights                       weights_;
    std::array<DisturbanceEstimate, 3> estimates_;
    std::array<Eigen::VectorXd, 3>     r_bar_;

    std::array<double, 3> trim_{};
    std::array<double, 3> prev_y1_{};
    std::array<double, 3> accel_{};
    std::mt19937_64       rng_;
    std::normal_distribution<double> gauss_{0.0, 1.0};

    std::vector<TraceRow> trace_;
    int                   current_iteration_ = 0;
};

ScenarioResult run_scenario(const ExperimentConfig& cfg);

struct BatchSummary {
    std::vector<int>    iteration;
    std::vector<double> mean_error;
    std::vector<double> std_error;
};

struct BatchResult {
    std::vector<ScenarioResult> sets;
    BatchSummary                summary;
};

// Runs `sets` scenario executions with seeds seed, seed+1, ... and aggregates
// the per-iteration error mean and standard deviation across sets.
BatchResult run_batch(const ExperimentConfig& cfg, int sets);

BatchSummary summarize(const std::vector<ScenarioResult>& sets);

// Per-run directory artifacts: config.json, iterations.csv
// (iteration,axis,sample,time,desired,actual,reference_input,d_hat),
// summary.json and, when tracing, trace.csv.
void write_run(const std::string& dir, const ExperimentConfig& cfg, const ScenarioResult& result);
void write_batch(const std::string& dir, const ExperimentConfig& cfg, const BatchResult& result);

std::string iterations_csv(const ScenarioResult& result);
std::string summary_json(const BatchSummary& summary);

// Re-executes the run stored in `dir` from its config and compares the
// regenerated iterations.csv byte for byte. Returns true when identical.
bool replay_run(const std::string& dir, std::string* diagnostic = nullptr);

}  // namespace l1ilc
