#include "latent/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "latent/parallel.hpp"
#include "latent/simd/gower_kernels.hpp"
#include "latent/spectral_entropy.hpp"

namespace latent {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string variable_label(const VariableSpec& v) { return v.mode + "/" + v.key; }

std::vector<double> resolve_block_weights(const GowerTable& table, const ModeWeights& weights) {
    std::vector<double> out;
    out.reserve(table.blocks().size());
    for (const auto& block : table.blocks()) {
        const auto& mode = table.modes()[block.mode];
        const auto it = weights.find(mode);
        if (it == weights.end()) throw ValidationError("no weight supplied for mode '" + mode + "'");
        if (!(it->second >= 0.0) || !std::isfinite(it->second))
            throw ValidationError("weight for mode '" + mode + "' must be finite and non-negative");
        out.push_back(it->second);
    }
    return out;
}

// Numerator and denominator accumulate block by block in a fixed order so the
// result is independent of scheduling and of the kernel variant.
std::optional<double> pair_score(std::size_t i, std::size_t j, const GowerTable& table,
                                 const std::vector<double>& block_weights, const GowerOptions& options,
                                 const simd::GowerKernels& kernels) {
    const std::uint8_t* ci = table.codes(i);
    const std::uint8_t* cj = table.codes(j);
    const double* ni = table.numerics(i);
    const double* nj = table.numerics(j);
    double numerator = 0.0;
    double denominator = 0.0;
    for (std::size_t b = 0; b < table.blocks().size(); ++b) {
        const auto& block = table.blocks()[b];
        const double w = block_weights[b];
        double score = 0.0;
        std::uint32_t comparable = 0;
        if (block.kind == VariableKind::Numerical) {
            const auto r = kernels.range_sum(ni + block.offset, nj + block.offset, table.ranges() + block.offset,
                                             block.length);
            score = r.sum;
            comparable = r.comparable;
        } else {
            const bool skip_dz = block.kind == VariableKind::Binary && options.asymmetric_binary;
            const auto c = kernels.count_codes(ci + block.offset, cj + block.offset, block.length, skip_dz);
            score = static_cast<double>(c.matches);
            comparable = c.comparable;
        }
        numerator += w * score;
        denominator += w * static_cast<double>(comparable);
    }
    if (!(denominator > 0.0)) return std::nullopt;
    return numerator / denominator;
}

}  // namespace

VariableSimilarity variable_similarity(std::optional<double> x_i, std::optional<double> x_j, const VariableSpec& spec,
                                       const GowerOptions& options) {
    if (!x_i || !x_j || std::isnan(*x_i) || std::isnan(*x_j)) return {0.0, false};
    switch (spec.kind) {
        case VariableKind::Categorical: return {*x_i == *x_j ? 1.0 : 0.0, true};
        case VariableKind::Binary:
            if (options.asymmetric_binary && *x_i == 0.0 && *x_j == 0.0) return {0.0, false};
            return {*x_i == *x_j ? 1.0 : 0.0, true};
        case VariableKind::Numerical: {
            if (!(spec.range > 0.0))
                throw ValidationError("numerical variable '" + variable_label(spec) + "' has no positive range");
            const double tol = 1e-12 * std::max(1.0, spec.range);
            for (double x : {*x_i, *x_j})
                if (x < spec.min - tol || x > spec.min + spec.range + tol)
                    throw ValidationError("value outside the frozen range of '" + variable_label(spec) + "'");
            const double dist = std::fabs(*x_i - *x_j);
            return {1.0 - dist / spec.range, true};
        }
    }
    return {0.0, false};
}

GowerTable::GowerTable(std::vector<VariableSpec> variables, const Eigen::MatrixXd& values)
    : n_groups_(static_cast<std::size_t>(values.rows())) {
    if (static_cast<std::size_t>(values.cols()) != variables.size())
        throw ValidationError("observation matrix does not match the variable list");

    for (const auto& v : variables)
        if (std::find(modes_.begin(), modes_.end(), v.mode) == modes_.end()) modes_.push_back(v.mode);

    // Freeze numerical ranges and drop constants.
    std::vector<bool> keep(variables.size(), true);
    for (std::size_t k = 0; k < variables.size(); ++k) {
        auto& v = variables[k];
        const auto col = values.col(static_cast<Eigen::Index>(k));
        if (v.kind == VariableKind::Numerical) {
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (Eigen::Index g = 0; g < col.size(); ++g) {
                if (std::isnan(col(g))) continue;
                if (!std::isfinite(col(g))) throw DataError("non-finite value in '" + variable_label(v) + "'");
                lo = std::min(lo, col(g));
                hi = std::max(hi, col(g));
            }
            if (!(hi > lo)) {
                keep[k] = false;
                dropped_.push_back(variable_label(v));
                continue;
            }
            v.min = lo;
            v.range = std::abs(hi - lo);
        } else {
            for (Eigen::Index g = 0; g < col.size(); ++g) {
                const double x = col(g);
                if (std::isnan(x)) continue;
                const bool ok = v.kind == VariableKind::Binary ? (x == 0.0 || x == 1.0)
                                                               : (x >= 0.0 && x <= 254.0 && x == std::floor(x));
                if (!ok) throw DataError("invalid code in '" + variable_label(v) + "'");
            }
        }
    }

    std::vector<std::size_t> code_cols, numeric_cols;
    for (std::size_t m = 0; m < modes_.size(); ++m) {
        for (VariableKind kind : {VariableKind::Categorical, VariableKind::Binary, VariableKind::Numerical}) {
            Block block{m, kind, 0, 0};
            auto& cols = kind == VariableKind::Numerical ? numeric_cols : code_cols;
            block.offset = cols.size();
            for (std::size_t k = 0; k < variables.size(); ++k) {
                if (!keep[k] || variables[k].mode != modes_[m] || variables[k].kind != kind) continue;
                cols.push_back(k);
                ++block.length;
            }
            if (block.length > 0) blocks_.push_back(block);
        }
    }
    // Packed order: blocks in sequence.
    for (const auto& block : blocks_) {
        const auto& cols = block.kind == VariableKind::Numerical ? numeric_cols : code_cols;
        for (std::size_t s = block.offset; s < block.offset + block.length; ++s) {
            variables_.push_back(variables[cols[s]]);
            packed_slot_.push_back(s);
        }
    }

    code_stride_ = code_cols.size();
    numeric_stride_ = numeric_cols.size();
    codes_.assign(n_groups_ * code_stride_, simd::kMissingCode);
    numerics_.assign(n_groups_ * numeric_stride_, kNaN);
    for (std::size_t g = 0; g < n_groups_; ++g) {
        for (std::size_t s = 0; s < code_stride_; ++s) {
            const double x = values(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(code_cols[s]));
            if (!std::isnan(x)) codes_[g * code_stride_ + s] = static_cast<std::uint8_t>(x);
        }
        for (std::size_t s = 0; s < numeric_stride_; ++s)
            numerics_[g * numeric_stride_ + s] =
                values(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(numeric_cols[s]));
    }
    ranges_.resize(numeric_stride_);
    for (std::size_t s = 0; s < numeric_stride_; ++s) ranges_[s] = variables[numeric_cols[s]].range;
}

std::optional<double> GowerTable::value(std::size_t group, std::size_t packed_index) const {
    const auto slot = packed_slot_.at(packed_index);
    if (variables_[packed_index].kind == VariableKind::Numerical) {
        const double x = numerics(group)[slot];
        if (std::isnan(x)) return std::nullopt;
        return x;
    }
    const std::uint8_t c = codes(group)[slot];
    if (c == simd::kMissingCode) return std::nullopt;
    return static_cast<double>(c);
}

double gower_pair(std::size_t i, std::size_t j, const GowerTable& table, const ModeWeights& weights,
                  const GowerOptions& options) {
    if (i >= table.n_groups() || j >= table.n_groups()) throw ValidationError("group index out of range");
    const auto score = pair_score(i, j, table, resolve_block_weights(table, weights), options, simd::active_kernels());
    if (!score)
        throw UndefinedPairError("groups " + std::to_string(i) + " and " + std::to_string(j) +
                                     " share no comparable weighted variable",
                                 {{i, j}});
    return *score;
}

AffinityMatrix affinity_from_table(const GowerTable& table, const ModeWeights& weights, WeightingScheme scheme,
                                   const GowerOptions& options, unsigned threads) {
    const auto block_weights = resolve_block_weights(table, weights);
    const auto& kernels = simd::active_kernels();
    const std::size_t n = table.n_groups();
    Eigen::MatrixXd values = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> undefined(n);

    // Row i fills the strict upper triangle; the lower triangle is mirrored after.
    parallel_for(n, threads, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto s = pair_score(i, j, table, block_weights, options, kernels);
            if (!s) {
                undefined[i].emplace_back(i, j);
                continue;
            }
            values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = *s;
        }
    });

    std::vector<std::pair<std::size_t, std::size_t>> all_undefined;
    for (const auto& row : undefined) all_undefined.insert(all_undefined.end(), row.begin(), row.end());
    if (!all_undefined.empty()) {
        std::ostringstream msg;
        msg << all_undefined.size() << " group pair(s) share no comparable weighted variable, e.g.";
        for (std::size_t k = 0; k < std::min<std::size_t>(5, all_undefined.size()); ++k)
            msg << " (" << all_undefined[k].first << "," << all_undefined[k].second << ")";
        throw UndefinedPairError(msg.str(), std::move(all_undefined));
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j)
            values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));

    ModeWeights used;
    for (const auto& m : table.modes())
        if (const auto it = weights.find(m); it != weights.end()) used[m] = it->second;
    return AffinityMatrix(std::move(values), scheme, std::move(used));
}

GowerTable variables_from_network(const MultiPartiteNetwork& network, bool use_counts) {
    std::size_t total = 0;
    for (const auto& m : network.modes()) total += m.n_entities();
    std::vector<VariableSpec> specs;
    specs.reserve(total);
    Eigen::MatrixXd values(static_cast<Eigen::Index>(network.n_groups()), static_cast<Eigen::Index>(total));
    Eigen::Index col = 0;
    for (const auto& m : network.modes()) {
        for (std::size_t e = 0; e < m.n_entities(); ++e, ++col) {
            specs.push_back({m.mode_name(), m.entity_labels()[e],
                             use_counts ? VariableKind::Numerical : VariableKind::Binary, 0.0, 0.0});
            const auto src = m.incidence().col(static_cast<Eigen::Index>(e));
            if (use_counts)
                values.col(col) = src;
            else
                values.col(col) = (src.array() > 0.0).cast<double>().matrix();
        }
    }
    return GowerTable(std::move(specs), values);
}

AffinityMatrix affinity_matrix(const MultiPartiteNetwork& network, WeightingScheme scheme,
                               const AffinityOptions& options) {
    ModeWeights weights;
    if (scheme == WeightingScheme::Custom) {
        if (!options.custom_weights) throw ValidationError("custom scheme requires explicit mode weights");
        weights = *options.custom_weights;
    } else {
        weights = mode_weights(network, scheme, options.use_counts, options.threads);
    }
    const GowerTable table = variables_from_network(network, options.use_counts);
    return affinity_from_table(table, weights, scheme, options.gower, options.threads);
}

}  // namespace latent
