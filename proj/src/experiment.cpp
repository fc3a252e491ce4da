#include "l1ilc/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace l1ilc {

namespace {

constexpr std::array<const char*, 3> kAxisNames{"x", "y", "z"};

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << content;
}

}  // namespace

std::string to_string(ControllerKind k) {
    return k == ControllerKind::L1Ilc ? "l1-ilc" : "pd-ilc";
}

std::string to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::Learning: return "learning";
        case ScenarioKind::RepeatAfterDisturbance: return "repeat-after-disturbance";
        case ScenarioKind::LearnThroughDisturbance: return "learn-through-disturbance";
    }
    return "learning";
}

ControllerKind controller_kind_from_string(const std::string& s) {
    if (s == "l1-ilc") {
        return ControllerKind::L1Ilc;
    }
    if (s == "pd-ilc") {
        return ControllerKind::PdIlc;
    }
    throw std::invalid_argument("unknown controller kind '" + s + "'");
}

ScenarioKind scenario_kind_from_string(const std::string& s) {
    if (s == "learning") {
        return ScenarioKind::Learning;
    }
    if (s == "repeat-after-disturbance") {
        return ScenarioKind::RepeatAfterDisturbance;
    }
    if (s == "learn-through-disturbance") {
        return ScenarioKind::LearnThroughDisturbance;
    }
    throw std::invalid_argument("unknown scenario kind '" + s + "'");
}

std::array<SampledSignal, 3> build_trajectory(const TrajectoryConfig& cfg) {
    if (!(cfg.duration > 0.0)) {
        throw std::invalid_argument("trajectory duration must be positive");
    }
    if (cfg.explicit_samples) {
        const auto& raw = *cfg.explicit_samples;
        const std::size_t n = raw[0].size();
        if (n < 3 || raw[1].size() != n || raw[2].size() != n) {
            throw std::invalid_argument("explicit trajectory axes must share a length of at least 3");
        }
        const double dt = cfg.duration / static_cast<double>(n);
        return {SampledSignal(raw[0], dt), SampledSignal(raw[1], dt), SampledSignal(raw[2], dt)};
    }
    if (cfg.samples < 10) {
        throw std::invalid_argument("trajectory needs at least 10 samples");
    }
    const int    n  = cfg.samples;
    const double dt = cfg.duration / n;
    const double w  = 2.0 * M_PI / cfg.duration;
    std::vector<double> x(n), y(n), z(n);
    for (int k = 0; k < n; ++k) {
        const double t = k * dt;
        x[static_cast<std::size_t>(k)] = cfg.amp_x * std::sin(w * t);
        y[static_cast<std::size_t>(k)] = cfg.amp_y * std::sin(2.0 * w * t);
        z[static_cast<std::size_t>(k)] = 0.5 * cfg.amp_z * (1.0 - std::cos(2.0 * w * t));
    }
    return {SampledSignal(x, dt), SampledSignal(y, dt), SampledSignal(z, dt)};
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.iterations < 1) {
        throw std::invalid_argument("ExperimentConfig: iterations must be >= 1");
    }
    if (cfg.substeps < 1) {
        throw std::invalid_argument("ExperimentConfig: substeps must be >= 1");
    }
    if (cfg.activation_iteration < 1) {
        throw std::invalid_argument("ExperimentConfig: activation iteration must be >= 1");
    }
    if (!(cfg.start_tolerance > 0.0)) {
        throw std::invalid_argument("ExperimentConfig: start tolerance must be positive");
    }
    if (cfg.noise_sigma < 0.0) {
        throw std::invalid_argument("ExperimentConfig: noise sigma must be nonnegative");
    }
    if (!(cfg.trim_rate >= 0.0)) {
        throw std::invalid_argument("ExperimentConfig: trim rate must be nonnegative");
    }
    build_trajectory(cfg.trajectory);
    build_surrogate(cfg);
}

TransferFunction build_surrogate(const ExperimentConfig& cfg) {
    const double a = cfg.surrogate_pole;
    if (!(a > 0.0)) {
        throw std::invalid_argument("ExperimentConfig: surrogate pole must be positive");
    }
    if (cfg.surrogate.find("num:") != std::string::npos) {
        return TransferFunction::parse(cfg.surrogate);
    }
    if (cfg.surrogate == "first_order") {
        return TransferFunction({a}, {1.0, a});
    }
    if (cfg.surrogate == "second_order") {
        // Unit-DC two-pole lag with the second pole well above the first.
        return TransferFunction({4.0 * a * a}, poly::multiply({1.0, a}, {1.0, 4.0 * a}));
    }
    if (cfg.surrogate == "motor_degraded") {
        return TransferFunction({0.75 * a}, {1.0, a});
    }
    throw std::invalid_argument("ExperimentConfig: unknown surrogate '" + cfg.surrogate + "'");
}

DesignSet build_design_set(const ExperimentConfig& cfg, double lipschitz_l, double lipschitz_l0) {
    DesignSet d;
    d.plant        = build_surrogate(cfg);
    d.m            = cfg.l1.m;
    d.filter       = TransferFunction({cfg.l1.omega_c}, {1.0, cfg.l1.omega_c});
    d.k_outer      = cfg.l1.k_outer;
    d.lipschitz_l  = lipschitz_l;
    d.lipschitz_l0 = lipschitz_l0;
    return d;
}

std::string config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["controller"]           = to_string(cfg.controller);
    j["scenario"]             = to_string(cfg.scenario);
    j["iterations"]           = cfg.iterations;
    j["disturbance"]          = cfg.disturbance;
    j["activation_iteration"] = cfg.activation_iteration;

    nlohmann::json traj;
    traj["duration"] = cfg.trajectory.duration;
    traj["samples"]  = cfg.trajectory.samples;
    traj["amp_x"]    = cfg.trajectory.amp_x;
    traj["amp_y"]    = cfg.trajectory.amp_y;
    traj["amp_z"]    = cfg.trajectory.amp_z;
    if (cfg.trajectory.explicit_samples) {
        traj["x"] = (*cfg.trajectory.explicit_samples)[0];
        traj["y"] = (*cfg.trajectory.explicit_samples)[1];
        traj["z"] = (*cfg.trajectory.explicit_samples)[2];
    }
    j["trajectory"] = traj;

    j["substeps"]       = cfg.substeps;
    j["surrogate"]      = cfg.surrogate;
    j["surrogate_pole"] = cfg.surrogate_pole;
    j["vehicle_mass"]   = cfg.vehicle_mass;

    j["l1"] = {{"m", cfg.l1.m},
               {"omega_c", cfg.l1.omega_c},
               {"gamma", cfg.l1.gamma},
               {"sigma_max", cfg.l1.sigma_max},
               {"epsilon", cfg.l1.epsilon},
               {"k_outer", cfg.l1.k_outer},
               {"lyapunov_z", cfg.l1.lyapunov_z}};
    j["pd"] = {{"kp", cfg.pd.kp}, {"kd", cfg.pd.kd}};
    j["ilc"] = {{"q", cfg.ilc.q},
                {"s", cfg.ilc.s},
                {"r", cfg.ilc.r},
                {"a_max", cfg.ilc.a_max},
                {"process_noise", cfg.ilc.process_noise},
                {"measurement_noise", cfg.ilc.measurement_noise},
                {"p0", cfg.ilc.p0}};

    j["noise"]           = {{"enabled", cfg.noise_enabled}, {"sigma", cfg.noise_sigma}};
    j["seed"]            = cfg.seed;
    j["start_tolerance"] = cfg.start_tolerance;
    j["settle_timeout"]  = cfg.settle_timeout;
    j["trim_rate"]       = cfg.trim_rate;
    j["trace"]           = cfg.trace;
    return j.dump(2);
}

ExperimentConfig config_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    ExperimentConfig     cfg;

    cfg.controller = controller_kind_from_string(j.value("controller", to_string(cfg.controller)));
    cfg.scenario   = scenario_kind_from_string(j.value("scenario", to_string(cfg.scenario)));
    cfg.iterations = j.value("iterations", cfg.iterations);
    cfg.disturbance          = j.value("disturbance", cfg.disturbance);
    cfg.activation_iteration = j.value("activation_iteration", cfg.activation_iteration);

    if (j.contains("trajectory")) {
        const auto& traj        = j.at("trajectory");
        cfg.trajectory.duration = traj.value("duration", cfg.trajectory.duration);
        cfg.trajectory.samples  = traj.value("samples", cfg.trajectory.samples);
        cfg.trajectory.amp_x    = traj.value("amp_x", cfg.trajectory.amp_x);
        cfg.trajectory.amp_y    = traj.value("amp_y", cfg.trajectory.amp_y);
        cfg.trajectory.amp_z    = traj.value("amp_z", cfg.trajectory.amp_z);
        if (traj.contains("x") || traj.contains("y") || traj.contains("z")) {
            std::array<std::vector<double>, 3> samples;
            samples[0] = traj.at("x").get<std::vector<double>>();
            samples[1] = traj.at("y").get<std::vector<double>>();
            samples[2] = traj.at("z").get<std::vector<double>>();
            cfg.trajectory.explicit_samples = samples;
            cfg.trajectory.samples          = static_cast<int>(samples[0].size());
        }
    }

    cfg.substeps       = j.value("substeps", cfg.substeps);
    cfg.surrogate      = j.value("surrogate", cfg.surrogate);
    cfg.surrogate_pole = j.value("surrogate_pole", cfg.surrogate_pole);
    cfg.vehicle_mass   = j.value("vehicle_mass", cfg.vehicle_mass);

    if (j.contains("l1")) {
        const auto& l1    = j.at("l1");
        cfg.l1.m          = l1.value("m", cfg.l1.m);
        cfg.l1.omega_c    = l1.value("omega_c", cfg.l1.omega_c);
        cfg.l1.gamma      = l1.value("gamma", cfg.l1.gamma);
        cfg.l1.sigma_max  = l1.value("sigma_max", cfg.l1.sigma_max);
        cfg.l1.epsilon    = l1.value("epsilon", cfg.l1.epsilon);
        cfg.l1.k_outer    = l1.value("k_outer", cfg.l1.k_outer);
        cfg.l1.lyapunov_z = l1.value("lyapunov_z", cfg.l1.lyapunov_z);
    }
    if (j.contains("pd")) {
        cfg.pd.kp = j.at("pd").value("kp", cfg.pd.kp);
        cfg.pd.kd = j.at("pd").value("kd", cfg.pd.kd);
    }
    if (j.contains("ilc")) {
        const auto& ilc           = j.at("ilc");
        cfg.ilc.q                 = ilc.value("q", cfg.ilc.q);
        cfg.ilc.s                 = ilc.value("s", cfg.ilc.s);
        cfg.ilc.r                 = ilc.value("r", cfg.ilc.r);
        cfg.ilc.a_max             = ilc.value("a_max", cfg.ilc.a_max);
        cfg.ilc.process_noise     = ilc.value("process_noise", cfg.ilc.process_noise);
        cfg.ilc.measurement_noise = ilc.value("measurement_noise", cfg.ilc.measurement_noise);
        cfg.ilc.p0                = ilc.value("p0", cfg.ilc.p0);
    }
    if (j.contains("noise")) {
        cfg.noise_enabled = j.at("noise").value("enabled", cfg.noise_enabled);
        cfg.noise_sigma   = j.at("noise").value("sigma", cfg.noise_sigma);
    }
    cfg.seed            = j.value("seed", cfg.seed);
    cfg.start_tolerance = j.value("start_tolerance", cfg.start_tolerance);
    cfg.settle_timeout  = j.value("settle_timeout", cfg.settle_timeout);
    cfg.trim_rate       = j.value("trim_rate", cfg.trim_rate);
    cfg.trace           = j.value("trace", cfg.trace);
    return cfg;
}

double error_metric(const std::array<SampledSignal, 3>& desired,
                    const std::array<SampledSignal, 3>& actual) {
    const std::size_t n = desired[0].size();
    for (int axis = 0; axis < 3; ++axis) {
        if (desired[static_cast<std::size_t>(axis)].size() != n ||
            actual[static_cast<std::size_t>(axis)].size() != n) {
            throw std::invalid_argument("error_metric: signal length mismatch");
        }
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double sq = 0.0;
        for (int axis = 0; axis < 3; ++axis) {
            const double e = desired[static_cast<std::size_t>(axis)].values[k] -
                             actual[static_cast<std::size_t>(axis)].values[k];
            sq += e * e;
        }
        sum += std::sqrt(sq);
    }
    return sum / static_cast<double>(n);
}

ExperimentRunner::ExperimentRunner(ExperimentConfig cfg) : cfg_(std::move(cfg)) {
    validate(cfg_);
    desired_ = build_trajectory(cfg_.trajectory);
    const int    n       = static_cast<int>(desired_[0].size());
    const double dt_ctrl = desired_[0].dt / cfg_.substeps;

    const TransferFunction surrogate = build_surrogate(cfg_);
    for (int axis = 0; axis < 3; ++axis) {
        plants_.emplace_back(surrogate, dt_ctrl);
    }

    disturbance_ =
        Disturbance::make(cfg_.disturbance, dt_ctrl, cfg_.vehicle_mass, cfg_.surrogate_pole);

    if (cfg_.controller == ControllerKind::L1Ilc) {
        L1Config lc;
        lc.m          = cfg_.l1.m;
        lc.gamma      = cfg_.l1.gamma;
        lc.sigma_max  = cfg_.l1.sigma_max;
        lc.epsilon    = cfg_.l1.epsilon;
        lc.filter     = TransferFunction({cfg_.l1.omega_c}, {1.0, cfg_.l1.omega_c});
        lc.k_outer    = cfg_.l1.k_outer;
        lc.lyapunov_p = default_lyapunov_p(cfg_.l1.m, cfg_.l1.lyapunov_z);
        lc.dt         = dt_ctrl;
        for (int axis = 0; axis < 3; ++axis) {
            l1_.emplace_back(lc);
        }

        // Refuse scenarios whose small-gain margin fails for this disturbance.
        const DesignSet design =
            build_design_set(cfg_, disturbance_.lipschitz_l(), disturbance_.lipschitz_l0());
        certificate_ = certify(design);
        if (!certificate_->satisfied()) {
            throw std::runtime_error(
                "scenario refused: the design does not satisfy the small-gain condition for "
                "disturbance '" + cfg_.disturbance + "'");
        }
    }

    // Nominal model seen by the learning layer: the certified reference
    // behavior of the adaptive loop, or the PD closed loop.
    TransferFunction nominal;
    if (cfg_.controller == ControllerKind::L1Ilc) {
        const double k = cfg_.l1.k_outer;
        const double m = cfg_.l1.m;
        nominal        = TransferFunction({k * m}, {1.0, m, k * m});
    } else {
        const TransferFunction a = surrogate;
        const std::vector<double> den = poly::add(
            poly::multiply({1.0, 0.0}, a.den), poly::multiply(a.num, {cfg_.pd.kd, cfg_.pd.kp}));
        nominal = TransferFunction(poly::scale(a.num, cfg_.pd.kp), den);
    }
    lifted_ = build_lifted(discretize_zoh(to_state_space(nominal), desired_[0].dt), n);

    weights_ = IlcWeights::scalar(n, cfg_.ilc.q, cfg_.ilc.s, cfg_.ilc.r, cfg_.ilc.a_max,
                                  cfg_.ilc.process_noise, cfg_.ilc.measurement_noise);
    for (int axis = 0; axis < 3; ++axis) {
        estimates_[static_cast<std::size_t>(axis)] = initial_estimate(n, cfg_.ilc.p0);
        r_bar_[static_cast<std::size_t>(axis)]     = Eigen::VectorXd::Zero(n);
    }
    rng_.seed(cfg_.seed);
}

double ExperimentRunner::measure(double truth) {
    if (!cfg_.noise_enabled || cfg_.noise_sigma <= 0.0) {
        return truth;
    }
    return truth + cfg_.noise_sigma * gauss_(rng_);
}

bool ExperimentRunner::learning_enabled(int iteration) const {
    if (cfg_.scenario == ScenarioKind::RepeatAfterDisturbance) {
        return iteration < cfg_.activation_iteration;
    }
    return true;
}

bool ExperimentRunner::disturbance_active(int iteration) const {
    return !disturbance_.is_none() && iteration >= cfg_.activation_iteration;
}

void ExperimentRunner::settle(int iteration, bool active) {
    const double dt_ctrl = desired_[0].dt / cfg_.substeps;
    const double tol     = cfg_.start_tolerance;
    double       t       = 0.0;
    while (t < cfg_.settle_timeout) {
        for (int axis = 0; axis < 3; ++axis) {
            auto&        plant = plants_[static_cast<std::size_t>(axis)];
            const double y1m   = measure(plant.velocity());
            const double y2m   = measure(plant.position());
            double       u     = 0.0;
            if (cfg_.controller == ControllerKind::L1Ilc) {
                u = l1_[static_cast<std::size_t>(axis)].step(0.0, y1m, y2m);
            } else {
                u = pd_step(cfg_.pd, 0.0, y2m, y1m);
            }
            trim_[static_cast<std::size_t>(axis)] += cfg_.trim_rate * (0.0 - y2m) * dt_ctrl;
            u += trim_[static_cast<std::size_t>(axis)];

            double d = 0.0;
            if (active) {
                d = disturbance_.apply(axis, t, plant.velocity(),
                                       accel_[static_cast<std::size_t>(axis)]);
            }
            const double y1_prev = plant.velocity();
            plant.step(u, d);
            accel_[static_cast<std::size_t>(axis)] = (plant.velocity() - y1_prev) / dt_ctrl;
        }
        t += dt_ctrl;

        bool inside = true;
        for (int axis = 0; axis < 3; ++axis) {
            const auto& plant = plants_[static_cast<std::size_t>(axis)];
            if (std::abs(plant.position()) > tol || std::abs(plant.velocity()) > tol) {
                inside = false;
                break;
            }
        }
        if (inside && t > 1.0) {
            return;
        }
    }
    throw std::runtime_error("iteration " + std::to_string(iteration) +
                             ": failed to settle into the start-tolerance ball within timeout");
}

IterationRecord ExperimentRunner::run_iteration(int iteration) {
    const auto start = std::chrono::steady_clock::now();
    current_iteration_ = iteration;

    const bool active = disturbance_active(iteration);
    if (active && iteration == cfg_.activation_iteration) {
        disturbance_.reset();  // the mass is attached at rest
    }
    settle(iteration, active);

    // The identical-initial-condition assumption of the learning layer.
    for (const auto& plant : plants_) {
        if (std::abs(plant.position()) > cfg_.start_tolerance ||
            std::abs(plant.velocity()) > cfg_.start_tolerance) {
            throw std::runtime_error("iteration start outside the start-tolerance ball");
        }
    }

    const int    n       = static_cast<int>(desired_[0].size());
    const double dt      = desired_[0].dt;
    const double dt_ctrl = dt / cfg_.substeps;

    std::array<std::vector<double>, 3> actual;
    std::array<std::vector<double>, 3> reference;
    std::array<Eigen::VectorXd, 3>     measured;
    for (int axis = 0; axis < 3; ++axis) {
        actual[static_cast<std::size_t>(axis)].resize(static_cast<std::size_t>(n));
        reference[static_cast<std::size_t>(axis)].resize(static_cast<std::size_t>(n));
        measured[static_cast<std::size_t>(axis)] = Eigen::VectorXd::Zero(n);
    }

    for (int k = 0; k < n; ++k) {
        std::array<double, 3> r2cmd{};
        for (int axis = 0; axis < 3; ++axis) {
            const auto a = static_cast<std::size_t>(axis);
            actual[a][static_cast<std::size_t>(k)] = plants_[a].position();
            measured[a](k)                         = measure(plants_[a].position());
            r2cmd[a] = desired_[a].values[static_cast<std::size_t>(k)] + r_bar_[a](k);
            reference[a][static_cast<std::size_t>(k)] = r2cmd[a];
        }
        for (int sub = 0; sub < cfg_.substeps; ++sub) {
            const double t = k * dt + sub * dt_ctrl;
            for (int axis = 0; axis < 3; ++axis) {
                const auto   a     = static_cast<std::size_t>(axis);
                auto&        plant = plants_[a];
                const double y1m   = measure(plant.velocity());
                const double y2m   = measure(plant.position());
                double       u     = 0.0;
                double       y_tilde = 0.0;
                double       sigma   = 0.0;
                double       r1      = 0.0;
                if (cfg_.controller == ControllerKind::L1Ilc) {
                    auto& ctrl = l1_[a];
                    u          = ctrl.step(r2cmd[a], y1m, y2m);
                    y_tilde    = ctrl.last_y_tilde();
                    sigma      = ctrl.state().sigma_hat;
                    r1         = ctrl.last_r1();
                } else {
                    u  = pd_step(cfg_.pd, r2cmd[a], y2m, y1m);
                    r1 = r2cmd[a];
                }
                u += trim_[a];

                double d = 0.0;
                if (active) {
                    d = disturbance_.apply(axis, t, plant.velocity(), accel_[a]);
                }
                const double y1_prev = plant.velocity();
                plant.step(u, d);
                accel_[a] = (plant.velocity() - y1_prev) / dt_ctrl;

                if (cfg_.trace) {
                    trace_.push_back({iteration, axis, t, y_tilde, sigma, u, r1});
                }
            }
        }
    }

    IterationRecord record;
    record.iteration = iteration;
    for (int axis = 0; axis < 3; ++axis) {
        const auto a    = static_cast<std::size_t>(axis);
        record.actual[a]    = SampledSignal(actual[a], dt);
        record.reference[a] = SampledSignal(reference[a], dt);
    }
    record.error = error_metric(desired_, record.actual);

    if (learning_enabled(iteration)) {
        for (int axis = 0; axis < 3; ++axis) {
            const auto      a     = static_cast<std::size_t>(axis);
            Eigen::VectorXd y_bar = measured[a];
            for (int k = 0; k < n; ++k) {
                y_bar(k) -= desired_[a].values[static_cast<std::size_t>(k)];
            }
            estimates_[a] = kalman_update(estimates_[a], lifted_, r_bar_[a], y_bar, weights_);
            r_bar_[a]     = ilc_update(lifted_, estimates_[a], weights_).r_bar;
        }
    }
    for (int axis = 0; axis < 3; ++axis) {
        record.d_hat[static_cast<std::size_t>(axis)] =
            estimates_[static_cast<std::size_t>(axis)].d_hat;
    }

    record.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return record;
}

ScenarioResult ExperimentRunner::run_all() {
    ScenarioResult result;
    result.desired     = desired_;
    result.certificate = certificate_;
    for (int j = 1; j <= cfg_.iterations; ++j) {
        result.records.push_back(run_iteration(j));
    }
    result.trace = std::move(trace_);
    return result;
}

ScenarioResult run_scenario(const ExperimentConfig& cfg) {
    ExperimentRunner runner(cfg);
    return runner.run_all();
}

BatchSummary summarize(const std::vector<ScenarioResult>& sets) {
    BatchSummary summary;
    if (sets.empty()) {
        return summary;
    }
    const std::size_t iterations = sets[0].records.size();
    for (std::size_t j = 0; j < iterations; ++j) {
        double mean = 0.0;
        for (const auto& set : sets) {
            mean += set.records[j].error;
        }
        mean /= static_cast<double>(sets.size());
        double var = 0.0;
        for (const auto& set : sets) {
            const double d = set.records[j].error - mean;
            var += d * d;
        }
        var = sets.size() > 1 ? var / static_cast<double>(sets.size() - 1) : 0.0;
        summary.iteration.push_back(static_cast<int>(j) + 1);
        summary.mean_error.push_back(mean);
        summary.std_error.push_back(std::sqrt(var));
    }
    return summary;
}

BatchResult run_batch(const ExperimentConfig& cfg, int sets) {
    if (sets < 1) {
        throw std::invalid_argument("run_batch: at least one set required");
    }
    BatchResult result;
    for (int i = 0; i < sets; ++i) {
        ExperimentConfig set_cfg = cfg;
        set_cfg.seed             = cfg.seed + static_cast<std::uint64_t>(i);
        result.sets.push_back(run_scenario(set_cfg));
    }
    result.summary = summarize(result.sets);
    return result;
}

std::string iterations_csv(const ScenarioResult& result) {
    std::ostringstream out;
    out.precision(17);
    out << "iteration,axis,sample,time,desired,actual,reference_input,d_hat\n";
    for (const auto& record : result.records) {
        for (int axis = 0; axis < 3; ++axis) {
            const auto a = static_cast<std::size_t>(axis);
            const auto& des = result.desired[a];
            for (std::size_t k = 0; k < des.size(); ++k) {
                out << record.iteration << "," << kAxisNames[a] << "," << (k + 1) << ","
                    << des.time_of(k) << "," << des.values[k] << ","
                    << record.actual[a].values[k] << "," << record.reference[a].values[k] << ","
                    << record.d_hat[a](static_cast<Eigen::Index>(k)) << "\n";
            }
        }
    }
    return out.str();
}

std::string summary_json(const BatchSummary& summary) {
    nlohmann::json j;
    j["iteration"]  = summary.iteration;
    j["mean_error"] = summary.mean_error;
    j["std_error"]  = summary.std_error;
    return j.dump(2);
}

namespace {

std::string trace_csv(const std::vector<TraceRow>& trace) {
    std::ostringstream out;
    out.precision(17);
    out << "iteration,axis,time,y_tilde,sigma_hat,u,r1\n";
    for (const auto& row : trace) {
        out << row.iteration << "," << kAxisNames[static_cast<std::size_t>(row.axis)] << ","
            << row.t << "," << row.y_tilde << "," << row.sigma_hat << "," << row.u << ","
            << row.r1 << "\n";
    }
    return out.str();
}

}  // namespace

void write_run(const std::string& dir, const ExperimentConfig& cfg, const ScenarioResult& result) {
    const std::filesystem::path root(dir);
    std::filesystem::create_directories(root);
    write_file(root / "config.json", config_to_json(cfg));
    write_file(root / "iterations.csv", iterations_csv(result));
    write_file(root / "summary.json", summary_json(summarize({result})));
    if (result.certificate) {
        // Re-derive the preset's Lipschitz constants for the report.
        const Disturbance d = Disturbance::make(cfg.disturbance, cfg.control_dt(),
                                                cfg.vehicle_mass, cfg.surrogate_pole);
        const DesignSet full = build_design_set(cfg, d.lipschitz_l(), d.lipschitz_l0());
        write_file(root / "certificate.json", certificate_to_json(*result.certificate, full));
    }
    if (!result.trace.empty()) {
        write_file(root / "trace.csv", trace_csv(result.trace));
    }
}

void write_batch(const std::string& dir, const ExperimentConfig& cfg, const BatchResult& result) {
    const std::filesystem::path root(dir);
    std::filesystem::create_directories(root);
    write_file(root / "config.json", config_to_json(cfg));
    for (std::size_t i = 0; i < result.sets.size(); ++i) {
        const std::filesystem::path set_dir = root / ("set" + std::to_string(i + 1));
        std::filesystem::create_directories(set_dir);
        write_file(set_dir / "iterations.csv", iterations_csv(result.sets[i]));
        write_file(set_dir / "summary.json", summary_json(summarize({result.sets[i]})));
    }
    write_file(root / "summary.json", summary_json(result.summary));
}

bool replay_run(const std::string& dir, std::string* diagnostic) {
    const std::filesystem::path root(dir);
    const ExperimentConfig      cfg = config_from_json(read_file(root / "config.json"));
    const ScenarioResult        result = run_scenario(cfg);
    const std::string           fresh  = iterations_csv(result);
    const std::string           stored = read_file(root / "iterations.csv");
    if (fresh == stored) {
        if (diagnostic) {
            *diagnostic = "replay identical (" + std::to_string(result.records.size()) +
                          " iterations)";
        }
        return true;
    }
    if (diagnostic) {
        *diagnostic = "replay differs from stored run";
    }
    return false;
}

}  // namespace l1ilc
