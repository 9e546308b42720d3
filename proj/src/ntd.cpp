#include "seit/ntd.hpp"

#include <unsupported/Eigen/FFT>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <vector>

namespace seit {

namespace {
const double kSqrtPi = std::sqrt(std::numbers::pi);
}

Eigen::VectorXd fourier_project(const Eigen::VectorXd& trace, int T) {
    const int n = static_cast<int>(trace.size());
    if (T < 1) throw ContractError("fourier_project: need T >= 1");
    if (n < 4 * T)
        throw ContractError("fourier_project: fewer than 4T boundary samples (aliasing)");
    std::vector<double> samples(trace.data(), trace.data() + n);
    std::vector<std::complex<double>> spectrum;
    Eigen::FFT<double> fft;
    fft.fwd(spectrum, samples);
    Eigen::VectorXd coef(2 * T);
    for (int t = 1; t <= T; ++t) {
        double a = 2.0 * spectrum[t].real() / n;   // cos(t gamma) amplitude
        double b = -2.0 * spectrum[t].imag() / n;  // sin(t gamma) amplitude
        coef[2 * t - 2] = kSqrtPi * b;
        coef[2 * t - 1] = kSqrtPi * a;
    }
    return coef;
}

NtDDifferenceMatrix assemble_L(const Eigen::MatrixXd& traces, int T,
                               const std::string& provenance) {
    NtDDifferenceMatrix out;
    out.T = T;
    out.provenance = provenance;
    out.L.resize(2 * T, 2 * T);
    if (traces.cols() != 2 * T)
        throw ContractError("assemble_L: need one trace column per pattern");
    for (int p = 0; p < 2 * T; ++p) out.L.col(p) = fourier_project(traces.col(p), T);
    return out;
}

double spectral_norm(const Eigen::MatrixXd& M) {
    if (M.size() == 0) return 0.0;
    if (!M.allFinite()) throw ContractError("spectral_norm: non-finite entries");
    const int n = static_cast<int>(M.cols());
    const int k = std::min(4, n);
    // Deterministic start block; subspace iteration on M^T M handles
    // clustered leading singular values.
    Eigen::MatrixXd V(n, k);
    std::uint64_t s = 0x9E3779B97F4A7C15ULL;
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < n; ++i) {
            s = s * 6364136223846793005ULL + 1442695040888963407ULL;
            V(i, j) = static_cast<double>(s >> 11) * 0x1.0p-53 - 0.5;
        }
    double prev = 0.0;
    for (int iter = 0; iter < 500; ++iter) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(V);
        Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
        Eigen::MatrixXd W = M * Q;
        double sigma = 0.0;
        for (int j = 0; j < k; ++j) sigma = std::max(sigma, W.col(j).norm());
        // Rayleigh estimate of the top singular value within the block.
        Eigen::JacobiSVD<Eigen::MatrixXd> blk(W.transpose() * W);
        sigma = std::sqrt(blk.singularValues()(0));
        if (iter > 2 && std::abs(sigma - prev) <= 1e-12 * std::max(sigma, 1e-300))
            return sigma;
        prev = sigma;
        V = M.transpose() * W;
        if (V.norm() == 0.0) return 0.0;  // zero matrix
    }
    return prev;
}

NtDDifferenceMatrix add_noise(const NtDDifferenceMatrix& m, double level,
                              std::uint64_t seed) {
    if (level < 0.0) throw ContractError("add_noise: negative noise level");
    NtDDifferenceMatrix out = m;
    if (level == 0.0) return out;
    double norm_l = spectral_norm(m.L);
    if (norm_l == 0.0)
        throw ContractError("add_noise: zero matrix has no spectral-norm scale");
    const int n = static_cast<int>(m.L.rows());
    Eigen::MatrixXd E(n, n);
    UniformSampler rng(seed);
    for (int i = 0; i < n; ++i)          // row-major draw order
        for (int j = 0; j < static_cast<int>(m.L.cols()); ++j)
            E(i, j) = rng.next(-1.0, 1.0);
    out.L = m.L + (level * norm_l / spectral_norm(E)) * E;
    out.noise_level = level;
    out.noise_seed = seed;
    return out;
}

void save_ntd(const std::string& path, const NtDDifferenceMatrix& m) {
    std::ofstream out(path);
    if (!out) throw NumericError("cannot open matrix file for writing: " + path);
    out << "ntd-diff v1\n";
    char head[128];
    std::snprintf(head, sizeof head, "T %d noise %.17g seed %llu\n", m.T, m.noise_level,
                  static_cast<unsigned long long>(m.noise_seed));
    out << head;
    char buf[32];
    for (int i = 0; i < m.L.rows(); ++i) {
        for (int j = 0; j < m.L.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m.L(i, j));
            out << buf << (j + 1 == m.L.cols() ? "\n" : " ");
        }
    }
    if (!out) throw NumericError("failed writing matrix file: " + path);
}

NtDDifferenceMatrix load_ntd(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NumericError("cannot open matrix file: " + path);
    std::string header;
    std::getline(in, header);
    if (header != "ntd-diff v1") throw NumericError("bad matrix file header: " + path);
    std::string t_tag, noise_tag, seed_tag;
    NtDDifferenceMatrix m;
    unsigned long long seed = 0;
    in >> t_tag >> m.T >> noise_tag >> m.noise_level >> seed_tag >> seed;
    if (!in || t_tag != "T" || noise_tag != "noise" || seed_tag != "seed" || m.T < 1)
        throw NumericError("bad matrix file metadata: " + path);
    m.noise_seed = seed;
    m.provenance = "file";
    m.L.resize(2 * m.T, 2 * m.T);
    for (int i = 0; i < m.L.rows(); ++i)
        for (int j = 0; j < m.L.cols(); ++j) in >> m.L(i, j);
    if (!in) throw NumericError("truncated matrix file: " + path);
    return m;
}

}  // namespace seit
