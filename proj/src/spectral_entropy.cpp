#include "latent/spectral_entropy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "latent/parallel.hpp"

namespace latent {

Eigen::MatrixXd bipartite_adjacency(const ModeGraph& mode, bool use_counts) {
    const Eigen::Index g = static_cast<Eigen::Index>(mode.n_groups());
    const Eigen::Index e = static_cast<Eigen::Index>(mode.n_entities());
    Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(g + e, g + e);
    const Eigen::MatrixXd block =
        use_counts ? mode.incidence() : (mode.incidence().array() > 0.0).cast<double>().matrix();
    adj.topRightCorner(g, e) = block;
    adj.bottomLeftCorner(e, g) = block.transpose();
    return adj;
}

Eigen::MatrixXd normalized_laplacian(const Eigen::MatrixXd& adjacency) {
    if (adjacency.rows() != adjacency.cols()) throw ValidationError("adjacency matrix must be square");
    const Eigen::MatrixXd sym = (adjacency + adjacency.transpose()) / 2.0;
    const Eigen::Index n = sym.rows();
    Eigen::VectorXd inv_sqrt(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = sym.row(i).sum();
        inv_sqrt(i) = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
    }
    Eigen::MatrixXd lap(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double degree_term = (i == j && inv_sqrt(i) > 0.0) ? 1.0 : 0.0;
            lap(i, j) = degree_term - inv_sqrt(i) * sym(i, j) * inv_sqrt(j);
        }
    }
    return lap;
}

double entropy_from_spectrum(const std::vector<double>& eigenvalues, std::size_t n_vertices) {
    if (n_vertices == 0) return 0.0;
    const double nv = static_cast<double>(n_vertices);
    double h = 0.0;
    for (double lambda : eigenvalues) {
        const double p = lambda / nv;
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

ModeEntropy von_neumann_entropy(const ModeGraph& mode, bool use_counts) {
    ModeEntropy out;
    out.mode_name = mode.mode_name();
    out.n_vertices = mode.n_groups() + mode.n_entities();
    if (out.n_vertices == 0) return out;

    const Eigen::MatrixXd lap = normalized_laplacian(bipartite_adjacency(mode, use_counts));
    const double non_isolated = lap.diagonal().sum();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw DataError("eigendecomposition failed for mode '" + mode.mode_name() + "'");

    out.eigenvalues.resize(out.n_vertices);
    for (std::size_t i = 0; i < out.n_vertices; ++i) {
        double lambda = solver.eigenvalues()(static_cast<Eigen::Index>(i));
        if (lambda < -kEigenClip || lambda > 2.0 + kEigenClip) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "normalized Laplacian eigenvalue " << lambda << " outside [0,2] for mode '" << mode.mode_name()
                << "'";
            throw DataError(msg.str());
        }
        out.eigenvalues[i] = std::clamp(lambda, 0.0, 2.0);
    }
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
    double trace = 0.0;
    for (double lambda : out.eigenvalues) trace += lambda;
    if (std::abs(trace - non_isolated) > 1e-8)
        throw DataError("spectrum of mode '" + mode.mode_name() + "' violates the trace identity");
    out.entropy = entropy_from_spectrum(out.eigenvalues, out.n_vertices);
    return out;
}

std::vector<ModeEntropy> mode_entropies(const MultiPartiteNetwork& network, bool use_counts, unsigned threads) {
    std::vector<ModeEntropy> out(network.modes().size());
    parallel_for(out.size(), threads,
                 [&](std::size_t i) { out[i] = von_neumann_entropy(network.modes()[i], use_counts); });
    return out;
}

ModeWeights mode_weights(const std::vector<ModeEntropy>& entropies, WeightingScheme scheme) {
    ModeWeights w;
    if (scheme == WeightingScheme::Uniform) {
        for (const auto& e : entropies) w[e.mode_name] = 1.0;
        return w;
    }
    if (scheme != WeightingScheme::Entropy) throw ValidationError("custom weights are supplied directly");
    bool any_positive = false;
    for (const auto& e : entropies) {
        w[e.mode_name] = e.entropy;
        any_positive = any_positive || e.entropy > 0.0;
    }
    if (!any_positive) throw DataError("every mode entropy is zero; entropy weights would nullify the similarity");
    return w;
}

ModeWeights mode_weights(const MultiPartiteNetwork& network, WeightingScheme scheme, bool use_counts,
                         unsigned threads) {
    if (scheme == WeightingScheme::Uniform) {
        ModeWeights w;
        for (const auto& m : network.modes()) w[m.mode_name()] = 1.0;
        return w;
    }
    return mode_weights(mode_entropies(network, use_counts, threads), scheme);
}

}  // namespace latent
