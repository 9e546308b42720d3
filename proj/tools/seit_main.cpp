// Command-line driver: simulate / noise / reconstruct / validate / preset.
// Exit codes: 0 success, 1 contract or configuration error, 2 numerical
// failure.

#include <CLI11.hpp>
#include <filesystem>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "seit/pipeline.hpp"

namespace {

struct CommonFlags {
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = -1;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--out", flags.out, "Output directory (overrides the config)");
    cmd->add_option("--seed", flags.seed, "Master seed (overrides the config)")
        ->each([&](const std::string&) { flags.seed_set = true; });
    cmd->add_option("--threads", flags.threads, "Worker threads (0 = hardware)");
}

seit::ExperimentConfig load_with_overrides(const std::string& path,
                                           const CommonFlags& flags) {
    seit::ExperimentConfig cfg = seit::load_config(path);
    if (!flags.out.empty()) cfg.out_dir = flags.out;
    if (flags.seed_set) cfg.master_seed = flags.seed;
    if (flags.threads >= 0) cfg.threads = flags.threads;
    return cfg;
}

void print_artifacts(const seit::RunArtifacts& artifacts) {
    std::printf("wrote %zu artifacts to %s\n", artifacts.files.size(),
                artifacts.dir.c_str());
    for (const auto& f : artifacts.files) std::printf("  %s/%s\n", artifacts.dir.c_str(), f.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic-inclusion EIT: simulate expected boundary data and "
                 "reconstruct anomaly supports"};
    app.require_subcommand(1);

    std::string config_path, matrix_path, preset_name;
    CommonFlags flags;

    CLI::App* simulate = app.add_subcommand("simulate", "Mesh, SFEM expectation matrix, optional noise");
    simulate->add_option("config", config_path, "Experiment config file")->required();
    add_common(simulate, flags);

    CLI::App* noise = app.add_subcommand("noise", "Add spectral-norm-scaled noise to a matrix file");
    noise->add_option("config", config_path)->required();
    noise->add_option("matrix", matrix_path, "ntd-diff v1 matrix file")->required();
    add_common(noise, flags);

    CLI::App* reconstruct = app.add_subcommand("reconstruct", "Factorization indicator / monotonicity mask");
    reconstruct->add_option("config", config_path)->required();
    reconstruct->add_option("matrix", matrix_path)->required();
    add_common(reconstruct, flags);

    CLI::App* validate = app.add_subcommand("validate", "Run the invariant suites and write a report");
    validate->add_option("config", config_path)->required();
    validate->add_option("matrix", matrix_path, "Optional matrix file to check");
    add_common(validate, flags);

    CLI::App* preset_cmd = app.add_subcommand("preset", "Emit a built-in experiment config");
    preset_cmd->add_option("name", preset_name, "test1 | test2 | test3 | test4")->required();
    preset_cmd->add_option("--out", flags.out, "Write <out>/<name>.cfg instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (preset_cmd->parsed()) {
            seit::ExperimentConfig cfg = seit::preset(preset_name);
            std::string text = seit::serialize_config(cfg);
            if (flags.out.empty()) {
                std::fputs(text.c_str(), stdout);
            } else {
                std::filesystem::create_directories(flags.out);
                std::string path = flags.out + "/" + preset_name + ".cfg";
                std::ofstream out(path);
                out << text;
                if (!out) throw seit::NumericError("cannot write " + path);
                std::printf("wrote %s\n", path.c_str());
            }
            return 0;
        }
        if (simulate->parsed()) {
            print_artifacts(seit::run_simulate(load_with_overrides(config_path, flags)));
            return 0;
        }
        if (noise->parsed()) {
            print_artifacts(
                seit::run_noise(load_with_overrides(config_path, flags), matrix_path));
            return 0;
        }
        if (reconstruct->parsed()) {
            print_artifacts(seit::run_reconstruct(load_with_overrides(config_path, flags),
                                                  matrix_path));
            return 0;
        }
        if (validate->parsed()) {
            seit::ExperimentConfig cfg = load_with_overrides(config_path, flags);
            seit::ValidationReport report = seit::run_validate(cfg, matrix_path);
            std::filesystem::create_directories(cfg.out_dir);
            std::string path = cfg.out_dir + "/validation_report.txt";
            seit::write_report(path, report);
            std::ifstream in(path);
            std::cout << in.rdbuf();
            std::printf("report written to %s\n", path.c_str());
            return 0;  // failing checks are report entries, not process errors
        }
    } catch (const seit::ContractError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const seit::NumericError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
