#include "seit/chaos.hpp"

#include <cmath>
#include <map>

namespace seit {

namespace {
void enumerate_degree(int Q, int total, std::vector<int>& current,
                      std::vector<std::vector<int>>& out) {
    if (static_cast<int>(current.size()) == Q - 1) {
        current.push_back(total);
        out.push_back(current);
        current.pop_back();
        return;
    }
    for (int k = total; k >= 0; --k) {
        current.push_back(k);
        enumerate_degree(Q, total - k, current, out);
        current.pop_back();
    }
}
}  // namespace

ChaosBasis build_basis(const PixelAnomaly& anomaly, int m) {
    if (m < 0) throw ContractError("build_basis: need m >= 0");
    ChaosBasis basis;
    basis.Q = anomaly.count();
    basis.degree = m;
    basis.mid.resize(basis.Q);
    basis.half.resize(basis.Q);
    for (int q = 0; q < basis.Q; ++q) {
        double a = anomaly.pixels[q].contrast_lo;
        double b = anomaly.pixels[q].contrast_hi;
        basis.mid[q] = 0.5 * (a + b);
        basis.half[q] = 0.5 * (b - a);
    }
    if (basis.Q == 0) {
        basis.indices.push_back({});
        return basis;
    }
    for (int total = 0; total <= m; ++total) {
        std::vector<int> current;
        enumerate_degree(basis.Q, total, current, basis.indices);
    }
    return basis;
}

double chaos_eval(const ChaosBasis& basis, int i, const Eigen::VectorXd& theta) {
    if (i < 0 || i >= basis.size()) throw ContractError("chaos_eval: index out of range");
    if (theta.size() != basis.Q) throw ContractError("chaos_eval: theta size mismatch");
    double v = 1.0;
    for (int q = 0; q < basis.Q; ++q) {
        int k = basis.indices[i][q];
        if (k == 0) continue;
        double xi = basis.half[q] == 0.0 ? 0.0 : (theta[q] - basis.mid[q]) / basis.half[q];
        double p0 = 1.0, p1 = xi;
        for (int d = 1; d < k; ++d) {
            double p2 = ((2 * d + 1) * xi * p1 - d * p0) / (d + 1);
            p0 = p1;
            p1 = p2;
        }
        v *= std::sqrt(2.0 * k + 1.0) * p1;
    }
    return v;
}

CouplingMatrices coupling_matrices(const ChaosBasis& basis) {
    const int M = basis.size();
    CouplingMatrices out;
    out.G.reserve(basis.Q);

    // Position lookup for neighbor multi-indices.
    std::map<std::vector<int>, int> pos;
    for (int i = 0; i < M; ++i) pos[basis.indices[i]] = i;

    for (int q = 0; q < basis.Q; ++q) {
        std::vector<Eigen::Triplet<double>> trip;
        for (int i = 0; i < M; ++i) {
            trip.emplace_back(i, i, basis.mid[q]);  // E[theta_q] on the diagonal part
            if (basis.half[q] == 0.0) continue;
            // Off-diagonal coupling from xi P_k = ((k+1)P_{k+1} + k P_{k-1})/(2k+1):
            // E[xi psihat_k psihat_{k+1}] = (k+1)/sqrt((2k+1)(2k+3)).
            std::vector<int> up = basis.indices[i];
            int k = up[q];
            up[q] = k + 1;
            auto it = pos.find(up);
            if (it == pos.end()) continue;
            double w = basis.half[q] * (k + 1.0) /
                       std::sqrt((2.0 * k + 1.0) * (2.0 * k + 3.0));
            trip.emplace_back(i, it->second, w);
            trip.emplace_back(it->second, i, w);
        }
        Eigen::SparseMatrix<double> G(M, M);
        G.setFromTriplets(trip.begin(), trip.end());
        out.G.push_back(std::move(G));
    }
    return out;
}

}  // namespace seit
