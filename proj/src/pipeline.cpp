#include "seit/pipeline.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>

#include "seit/chaos.hpp"
#include "seit/fem.hpp"
#include "seit/sfem.hpp"

namespace seit {

namespace fs = std::filesystem;

namespace {

// Atomic write: producers write to <path>.tmp which is then renamed.
void atomic_write(const std::string& path, const std::function<void(const std::string&)>& writer) {
    std::string tmp = path + ".tmp";
    writer(tmp);
    fs::rename(tmp, path);
}

void write_manifest(const std::string& dir, const std::string& stage,
                    const ExperimentConfig& cfg, const std::vector<std::string>& files) {
    std::string path = dir + "/manifest_" + stage + ".txt";
    atomic_write(path, [&](const std::string& tmp) {
        std::ofstream out(tmp);
        char buf[64];
        std::snprintf(buf, sizeof buf, "%016llx",
                      static_cast<unsigned long long>(config_hash(cfg)));
        out << "stage " << stage << "\n";
        out << "config_hash " << buf << "\n";
        out << "master_seed " << cfg.master_seed << "\n";
        out << "sampling_seed " << cfg.seeds().sampling() << "\n";
        out << "noise_seed " << cfg.seeds().noise() << "\n";
        for (const auto& f : files) out << "artifact " << f << "\n";
        if (!out) throw NumericError("failed writing manifest: " + tmp);
    });
}

struct Stage {
    ExperimentConfig cfg;
    RunArtifacts artifacts;

    explicit Stage(const ExperimentConfig& config) : cfg(config) {
        validate_config(cfg);
        if (cfg.threads > 0) set_thread_count(cfg.threads);
        fs::create_directories(cfg.out_dir);
        artifacts.dir = cfg.out_dir;
        artifacts.hash = config_hash(cfg);
    }

    std::string path(const std::string& file) { return cfg.out_dir + "/" + file; }

    void emit(const std::string& file, const std::function<void(const std::string&)>& writer) {
        atomic_write(path(file), writer);
        artifacts.files.push_back(file);
    }

    void finish(const std::string& stage_name) {
        emit("config_" + stage_name + ".cfg", [&](const std::string& tmp) {
            std::ofstream out(tmp);
            out << serialize_config(cfg);
        });
        write_manifest(cfg.out_dir, stage_name, cfg, artifacts.files);
        artifacts.files.push_back("manifest_" + stage_name + ".txt");
    }
};

Eigen::VectorXd mean_contrast(const PixelAnomaly& anomaly) {
    return expected_sigma(anomaly).array() - 1.0;
}

double tau_error_estimate(const NtDDifferenceMatrix& m) {
    if (m.noise_level > 0.0) return m.noise_level * spectral_norm(m.L);
    return 0.0;
}

int pick_tau(const ExperimentConfig& cfg, const NtDDifferenceMatrix& m,
             const SvdTriplets& svd) {
    switch (cfg.method.tau_policy) {
        case TauPolicy::fixed:
            return cfg.method.tau;
        case TauPolicy::max:
            return 2 * cfg.T;
        case TauPolicy::automatic:
        default:
            return select_cutoff(svd.lambda, tau_error_estimate(m));
    }
}

double pick_epsilon(const ExperimentConfig& cfg, const NtDDifferenceMatrix& m) {
    if (cfg.method.epsilon_policy == EpsilonPolicy::fixed) return cfg.method.epsilon;
    double norm = spectral_norm(m.L);
    return m.noise_level > 0.0 ? m.noise_level * norm : 1e-6 * norm;
}

double pick_beta(const ExperimentConfig& cfg, const ContrastClassification& cls) {
    if (cfg.method.beta_policy == BetaPolicy::fixed) return cfg.method.beta;
    return cls.kind == ContrastCase::case_a ? cls.alpha_max / (1.0 + cls.alpha_max)
                                            : 0.5 * cls.alpha_max;
}

}  // namespace

RunArtifacts run_simulate(const ExperimentConfig& config) {
    Stage stage(config);
    auto mesh = std::make_shared<const DiskMesh>([&] {
        MeshOptions opt;
        opt.disk_sides = config.disk_sides;
        return build_disk_mesh(config.refinement_level, config.anomaly.pixels, opt);
    }());
    stage.emit("mesh.diskmesh",
               [&](const std::string& tmp) { save_diskmesh(tmp, *mesh); });

    StiffnessDecomposition decomp = assemble(mesh, CurrentBasis{config.T});
    ChaosBasis basis = build_basis(config.anomaly, config.chaos_degree);
    NtDDifferenceMatrix clean = sfem_expectation_matrix(decomp, config.anomaly, basis);
    stage.emit("L_clean.ntd", [&](const std::string& tmp) { save_ntd(tmp, clean); });

    if (config.validation_samples > 0) {
        MonteCarloExpectation mc = monte_carlo_expectation(
            decomp, config.anomaly, config.validation_samples,
            config.seeds().sampling());
        stage.emit("L_mc.ntd",
                   [&](const std::string& tmp) { save_ntd(tmp, mc.matrix); });
        NtDDifferenceMatrix se;
        se.T = config.T;
        se.provenance = "monte-carlo-stderr";
        se.L = mc.standard_error;
        stage.emit("L_mc_stderr.ntd",
                   [&](const std::string& tmp) { save_ntd(tmp, se); });
    }

    if (config.noise_level > 0.0) {
        NtDDifferenceMatrix noisy =
            add_noise(clean, config.noise_level, config.seeds().noise());
        stage.emit("L_noisy.ntd", [&](const std::string& tmp) { save_ntd(tmp, noisy); });
    }
    stage.finish("simulate");
    return stage.artifacts;
}

RunArtifacts run_noise(const ExperimentConfig& config, const std::string& matrix_file) {
    Stage stage(config);
    if (!(config.noise_level > 0.0))
        throw ContractError("noise: config noise level must be positive");
    NtDDifferenceMatrix m = load_ntd(matrix_file);
    if (m.T != config.T)
        throw ContractError("noise: matrix dimension does not match config T");
    NtDDifferenceMatrix noisy = add_noise(m, config.noise_level, config.seeds().noise());
    stage.emit("L_noisy.ntd", [&](const std::string& tmp) { save_ntd(tmp, noisy); });
    stage.finish("noise");
    return stage.artifacts;
}

RunArtifacts run_reconstruct(const ExperimentConfig& config,
                             const std::string& matrix_file) {
    Stage stage(config);
    NtDDifferenceMatrix m = load_ntd(matrix_file);
    if (m.T != config.T)
        throw ContractError("reconstruct: matrix dimension does not match config T");

    if (config.method.kind == Method::fm || config.method.kind == Method::both) {
        SvdTriplets svd = svd_of(m.L);
        int tau = pick_tau(config, m, svd);
        if (tau < 1 || tau > 2 * config.T)
            throw ContractError("reconstruct: tau out of range");
        IndicatorGrid grid = scan(m.L, config.grid, tau);
        stage.emit("fm_indicator.csv",
                   [&](const std::string& tmp) { save_grid_csv(tmp, grid); });
        stage.emit("fm_indicator.pgm",
                   [&](const std::string& tmp) { save_grid_pgm(tmp, grid); });
        stage.emit("fm_params.txt", [&](const std::string& tmp) {
            std::ofstream out(tmp);
            out << "tau " << tau << "\n";
            out << "grid_n " << config.grid.n << "\n";
            out << "grid_clip " << config.grid.clip << "\n";
            out << "degenerate " << (grid.degenerate ? 1 : 0) << "\n";
        });
    }
    if (config.method.kind == Method::mm || config.method.kind == Method::both) {
        ContrastClassification cls = classify_contrast(config.anomaly);
        if (cls.kind == ContrastCase::neither)
            throw ContractError(
                "reconstruct: anomaly satisfies neither monotonicity contrast condition");
        double beta = pick_beta(config, cls);
        double eps = pick_epsilon(config, m);
        IndicatorGrid mask = reconstruct_mask(m.L, config.method.lattice, cls.kind,
                                              cls.alpha_max, beta, eps, config.grid);
        stage.emit("mm_mask.csv",
                   [&](const std::string& tmp) { save_grid_csv(tmp, mask); });
        stage.emit("mm_mask.pgm",
                   [&](const std::string& tmp) { save_grid_pgm(tmp, mask); });
        stage.emit("mm_params.txt", [&](const std::string& tmp) {
            std::ofstream out(tmp);
            out << "case " << (cls.kind == ContrastCase::case_a ? "a" : "b") << "\n";
            out << "alpha " << cls.alpha_max << "\n";
            out << "beta " << beta << "\n";
            out << "epsilon " << eps << "\n";
            out << "ball_n " << config.method.lattice.n << "\n";
            out << "ball_radius " << config.method.lattice.radius << "\n";
        });
    }
    stage.finish("reconstruct");
    return stage.artifacts;
}

ValidationReport run_validate(const ExperimentConfig& config,
                              const std::string& matrix_file) {
    validate_config(config);
    if (config.threads > 0) set_thread_count(config.threads);
    ValidationReport report;
    auto add = [&](const std::string& name, double value, double tol, bool pass,
                   const std::string& note = "") {
        report.checks.push_back({name, value, tol, pass, note});
    };

    if (!matrix_file.empty()) {
        NtDDifferenceMatrix m = load_ntd(matrix_file);
        double norm = spectral_norm(m.L);
        double sym = norm > 0 ? spectral_norm(m.L - m.L.transpose()) / norm : 0.0;
        bool clean = m.noise_level == 0.0;
        add("matrix_dimension", m.L.rows(), 2.0 * config.T, m.T == config.T,
            "rows vs 2T");
        add("symmetry_defect", sym, 1e-6, !clean || sym <= 1e-6,
            clean ? "clean matrix" : "noisy matrix, not symmetrized");
        SvdTriplets svd = svd_of(m.L);
        double decay = svd.lambda[svd.lambda.size() - 1] > 0.0
                           ? svd.lambda[0] / svd.lambda[svd.lambda.size() - 1]
                           : std::numeric_limits<double>::infinity();
        add("singular_value_decay", decay, 1e3, decay >= 1e3,
            "lambda_1 / lambda_2T");
        return report;
    }

    auto mesh = std::make_shared<const DiskMesh>([&] {
        MeshOptions opt;
        opt.disk_sides = config.disk_sides;
        return build_disk_mesh(config.refinement_level, config.anomaly.pixels, opt);
    }());
    StiffnessDecomposition decomp = assemble(mesh, CurrentBasis{config.T});

    // Lambda(1) spectrum against the analytic 1/t eigenvalues.
    Eigen::MatrixXd lambda1 =
        ntd_matrix(decomp, Eigen::VectorXd::Zero(decomp.pixel_count()));
    double norm1 = spectral_norm(lambda1);
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            0.5 * (lambda1 + lambda1.transpose()));
        Eigen::VectorXd ev = es.eigenvalues().reverse();
        double worst10 = 0.0, worst25 = 0.0;
        for (int t = 1; t <= std::min(config.T, 25); ++t) {
            double err = std::max(std::abs(ev[2 * t - 2] * t - 1.0),
                                  std::abs(ev[2 * t - 1] * t - 1.0));
            if (t <= 10) worst10 = std::max(worst10, err);
            worst25 = std::max(worst25, err);
        }
        add("lambda1_spectrum_t10", worst10, 0.01, worst10 <= 0.01,
            "max rel err of 1/t eigenvalues, t <= 10");
        if (config.T > 10)
            add("lambda1_spectrum_t25", worst25, 0.05, worst25 <= 0.05,
                "max rel err of 1/t eigenvalues, t <= 25");
    }

    // Jensen per pixel.
    if (config.anomaly.count() > 0) {
        Eigen::VectorXd direct = expected_sigma(config.anomaly);
        Eigen::VectorXd harmonic = expected_inverse_sigma(config.anomaly).cwiseInverse();
        double min_gap = (direct - harmonic).minCoeff();
        add("jensen_gap", min_gap, 0.0, min_gap >= -1e-14,
            "min_q E(sigma) - E(sigma^-1)^-1");
    }

    // Clean SFEM matrix: symmetry, sandwich, Monte Carlo agreement.
    ChaosBasis basis = build_basis(config.anomaly, config.chaos_degree);
    NtDDifferenceMatrix clean = sfem_expectation_matrix(decomp, config.anomaly, basis);
    double norm_clean = spectral_norm(clean.L);
    double sym = norm_clean > 0
                     ? spectral_norm(clean.L - clean.L.transpose()) / norm_clean
                     : 0.0;
    add("sfem_symmetry_defect", sym, 1e-6, sym <= 1e-6, "clean matrix");

    if (config.anomaly.count() > 0) {
        auto lam_max = [](const Eigen::MatrixXd& M) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()));
            return es.eigenvalues().maxCoeff();
        };
        Eigen::MatrixXd d_mean = ntd_difference_matrix(decomp, mean_contrast(config.anomaly));
        Eigen::VectorXd inv_theta =
            expected_inverse_sigma(config.anomaly).cwiseInverse().array() - 1.0;
        Eigen::MatrixXd d_inv = ntd_difference_matrix(decomp, inv_theta);
        double eps = 1e-6 * norm1;
        double lower = lam_max(d_mean - clean.L);
        double upper = lam_max(clean.L - d_inv);
        add("sandwich_lower", lower, eps, lower <= eps,
            "lambda_max(L(E sigma) - E(L))");
        add("sandwich_upper", upper, eps, upper <= eps,
            "lambda_max(E(L) - L(E(sigma^-1)^-1))");

        int n_mc = config.validation_samples > 0 ? config.validation_samples : 200;
        MonteCarloExpectation mc = monte_carlo_expectation(decomp, config.anomaly, n_mc,
                                                           config.seeds().sampling());
        double worst = 0.0;
        for (int i = 0; i < clean.L.rows(); ++i)
            for (int j = 0; j < clean.L.cols(); ++j) {
                double gap = std::abs(clean.L(i, j) - mc.matrix.L(i, j));
                double scale = 4.0 * mc.standard_error(i, j) + 1e-14;
                worst = std::max(worst, gap / scale);
            }
        add("sfem_mc_agreement", worst, 1.0, worst <= 1.0,
            "max |L_sfem - L_mc| / (4 stderr), N = " + std::to_string(n_mc));
    }

    // Noise-norm exactness.
    {
        double level = config.noise_level > 0.0 ? config.noise_level : 1e-3;
        if (norm_clean > 0.0) {
            NtDDifferenceMatrix noisy = add_noise(clean, level, config.seeds().noise());
            double got = spectral_norm(noisy.L - clean.L) / norm_clean;
            add("noise_norm_exactness", std::abs(got - level), 1e-12 * level,
                std::abs(got - level) <= 1e-12 * level,
                "||L_eps - L||_2 relative deviation from level");
        }
    }

    // Dipole trace against the mollified FEM oracle (tolerance depends on
    // the oracle's own mesh resolution).
    {
        MeshLocator locator(*mesh);
        int probe_T = std::min(config.T, 20);
        Eigen::VectorXd exact = dipole_trace(Vec2(0.4, 0.2), Vec2(1, 0), probe_T).coeffs;
        Eigen::VectorXd load = Eigen::VectorXd::Zero(mesh->vertex_count());
        const double h = 1e-3;
        auto add_src = [&](Vec2 p, double w) {
            int t = locator.locate(p);
            if (t < 0) throw NumericError("validate: dipole point left the mesh");
            const auto& tr = mesh->triangles[t];
            const Vec2& a = mesh->vertices[tr[0]];
            const Vec2& b = mesh->vertices[tr[1]];
            const Vec2& c = mesh->vertices[tr[2]];
            double area2 = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
            double l0 = ((b - p).x() * (c - p).y() - (b - p).y() * (c - p).x()) / area2;
            double l1 = ((c - p).x() * (a - p).y() - (c - p).y() * (a - p).x()) / area2;
            load[tr[0]] += w * l0;
            load[tr[1]] += w * l1;
            load[tr[2]] += w * (1.0 - l0 - l1);
        };
        add_src(Vec2(0.4, 0.2) + Vec2(h / 2, 0), 1.0 / h);
        add_src(Vec2(0.4, 0.2) - Vec2(h / 2, 0), -1.0 / h);
        load.array() -= load.sum() / load.size();
        FemSolver solver(decomp, Eigen::VectorXd::Zero(decomp.pixel_count()));
        Eigen::VectorXd coeffs =
            fourier_project(boundary_trace(*mesh, solver.solve(load)), config.T);
        double rel =
            (coeffs.head(2 * probe_T) - exact).norm() / exact.norm();
        double tol = config.refinement_level >= 4 ? 0.01
                     : config.refinement_level == 3 ? 0.02
                                                    : 0.08;
        add("dipole_oracle", rel, tol, rel <= tol,
            "rel L2 gap, z=(0.4,0.2), t <= " + std::to_string(probe_T));
    }
    return report;
}

void write_report(const std::string& path, const ValidationReport& report) {
    atomic_write(path, [&](const std::string& tmp) {
        std::ofstream out(tmp);
        char buf[160];
        for (const auto& c : report.checks) {
            std::snprintf(buf, sizeof buf, "check %-24s value %.6e tol %.6e %s",
                          c.name.c_str(), c.value, c.tolerance,
                          c.pass ? "pass" : "FAIL");
            out << buf;
            if (!c.note.empty()) out << "  # " << c.note;
            out << "\n";
        }
        out << "overall " << (report.all_pass() ? "pass" : "FAIL") << "\n";
        if (!out) throw NumericError("failed writing report: " + tmp);
    });
}

}  // namespace seit
