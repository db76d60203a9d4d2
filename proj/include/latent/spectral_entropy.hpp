#pragma once

// Normalized Laplacians, Von Neumann entropies of mode graphs, and entropy mode weights.

#include <string>
#include <vector>

#include "latent/core_model.hpp"

namespace latent {

struct ModeEntropy {
    std::string mode_name;
    std::size_t n_vertices = 0;
    std::vector<double> eigenvalues;  // ascending, clipped to [0, 2]
    double entropy = 0.0;

    friend bool operator==(const ModeEntropy&, const ModeEntropy&) = default;
};

// Eigenvalues within this distance outside [0, 2] are clipped; larger violations throw.
inline constexpr double kEigenClip = 1e-10;

// Square block matrix [[0, B], [B^T, 0]] over groups then entities. Uses the
// binarized incidence unless `use_counts` is set.
Eigen::MatrixXd bipartite_adjacency(const ModeGraph& mode, bool use_counts = false);

// D^{-1/2} (D - A) D^{-1/2}, with D^{-1/2} = 0 on isolated vertices. The input
// is symmetrized as (A + A^T) / 2 first.
Eigen::MatrixXd normalized_laplacian(const Eigen::MatrixXd& adjacency);

// -sum (l_i/|V|) ln(l_i/|V|) over normalized-Laplacian eigenvalues l_i (0 ln 0 = 0).
double entropy_from_spectrum(const std::vector<double>& eigenvalues, std::size_t n_vertices);

ModeEntropy von_neumann_entropy(const ModeGraph& mode, bool use_counts = false);

ModeWeights mode_weights(const MultiPartiteNetwork& network, WeightingScheme scheme, bool use_counts = false,
                         unsigned threads = 1);
ModeWeights mode_weights(const std::vector<ModeEntropy>& entropies, WeightingScheme scheme);

// Entropies for every mode of the network, in network order.
std::vector<ModeEntropy> mode_entropies(const MultiPartiteNetwork& network, bool use_counts = false,
                                        unsigned threads = 1);

}  // namespace latent
