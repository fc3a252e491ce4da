#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "l1ilc/experiment.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

l1ilc::ExperimentConfig load_config(const std::string& path) {
    return l1ilc::config_from_json(read_file(path));
}

void print_summary(const l1ilc::BatchSummary& summary) {
    std::cout << "iteration  mean_error  std_error\n";
    for (std::size_t i = 0; i < summary.iteration.size(); ++i) {
        std::cout << summary.iteration[i] << "  " << summary.mean_error[i] << "  "
                  << summary.std_error[i] << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adaptive-plus-learning trajectory tracking experiment harness"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    int         sets    = 5;
    bool        trace   = false;

    auto* certify_cmd = app.add_subcommand("certify", "evaluate the small-gain certificate");
    certify_cmd->add_option("--config", config_path, "experiment config JSON")->required();
    certify_cmd->add_option("--out", out_dir, "directory for certificate.json (optional)");

    auto* run_cmd = app.add_subcommand("run", "run one scenario");
    run_cmd->add_option("--config", config_path, "experiment config JSON")->required();
    run_cmd->add_option("--out", out_dir, "output directory")->required();
    run_cmd->add_flag("--trace", trace, "record per-step controller traces");

    auto* batch_cmd = app.add_subcommand("batch", "run seeded scenario sets");
    batch_cmd->add_option("--config", config_path, "experiment config JSON")->required();
    batch_cmd->add_option("--sets", sets, "number of seeded sets");
    batch_cmd->add_option("--out", out_dir, "output directory")->required();

    std::string record_dir;
    auto* replay_cmd = app.add_subcommand("replay", "re-run a stored record and compare");
    replay_cmd->add_option("--record", record_dir, "directory of a previous run")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (certify_cmd->parsed()) {
            const auto cfg = load_config(config_path);
            const auto d   = l1ilc::Disturbance::make(cfg.disturbance, cfg.control_dt(),
                                                      cfg.vehicle_mass, cfg.surrogate_pole);
            const auto design = l1ilc::build_design_set(cfg, d.lipschitz_l(), d.lipschitz_l0());
            const auto cert   = l1ilc::certify(design);
            const auto json   = l1ilc::certificate_to_json(cert, design);
            std::cout << json << "\n";
            if (certify_cmd->count("--out") > 0) {
                std::filesystem::create_directories(out_dir);
                std::ofstream out(std::filesystem::path(out_dir) / "certificate.json");
                out << json;
            }
            return cert.satisfied() ? 0 : 2;
        }
        if (run_cmd->parsed()) {
            auto cfg  = load_config(config_path);
            cfg.trace = cfg.trace || trace;
            const auto result = l1ilc::run_scenario(cfg);
            l1ilc::write_run(out_dir, cfg, result);
            print_summary(l1ilc::summarize({result}));
            std::cout << "wrote " << out_dir << "\n";
            return 0;
        }
        if (batch_cmd->parsed()) {
            const auto cfg    = load_config(config_path);
            const auto result = l1ilc::run_batch(cfg, sets);
            l1ilc::write_batch(out_dir, cfg, result);
            print_summary(result.summary);
            std::cout << "wrote " << out_dir << "\n";
            return 0;
        }
        if (replay_cmd->parsed()) {
            std::string diagnostic;
            const bool  ok = l1ilc::replay_run(record_dir, &diagnostic);
            std::cout << diagnostic << "\n";
            return ok ? 0 : 3;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
