#include "hipmark/tgcn/tgcn.hpp"

#include <cmath>
#include <string>

#include "hipmark/error.hpp"

namespace hipmark::tgcn {

void TopologySpec::validate() const {
    std::vector<bool> used(nodes, false);
    for (const auto& [a, b] : edges) {
        if (a >= nodes || b >= nodes) {
            throw ConfigError("topology: edge (" + std::to_string(a) + ", " + std::to_string(b) +
                              ") outside " + std::to_string(nodes) + " nodes");
        }
        if (a == b) throw ConfigError("topology: self-loop on node " + std::to_string(a));
        if (used[a] || used[b]) {
            throw ConfigError("topology: overlapping pair (" + std::to_string(a) + ", " +
                              std::to_string(b) + ")");
        }
        used[a] = used[b] = true;
    }
}

template <typename T>
BasicTensor<T> build_adjacency(const TopologySpec& spec) {
    spec.validate();
    BasicTensor<T> a(Shape{spec.nodes, spec.nodes});
    auto d = a.data();
    for (const auto& [i, j] : spec.edges) {
        d[i * spec.nodes + j] = T(1);
        d[j * spec.nodes + i] = T(1);
    }
    return a;
}

template <typename T>
BasicTensor<T> normalize_adjacency(const BasicTensor<T>& adjacency) {
    if (adjacency.ndim() != 2 || adjacency.dim(0) != adjacency.dim(1)) {
        throw DimensionError("normalize_adjacency: expected a square matrix, got " +
                             shape_str(adjacency.shape()));
    }
    const std::size_t k = adjacency.dim(0);
    auto a = adjacency.data();
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (a[i * k + j] != a[j * k + i]) throw ContractError("normalize_adjacency: matrix is not symmetric");
    std::vector<T> tilde(a.begin(), a.end());
    for (std::size_t i = 0; i < k; ++i) tilde[i * k + i] += T(1);
    std::vector<T> deg(k, T(0));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) deg[i] += tilde[i * k + j];
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) tilde[i * k + j] /= std::sqrt(deg[i] * deg[j]);
    return BasicTensor<T>(Shape{k, k}, std::move(tilde));
}

template <typename T>
BasicTensor<T> build_node_features(const BasicTensor<T>& heatmaps, std::size_t expected_nodes) {
    if (heatmaps.ndim() != 3 || heatmaps.dim(0) != expected_nodes) {
        throw DimensionError("build_node_features: expected " + std::to_string(expected_nodes) +
                             " heatmaps of [h, w], got " + shape_str(heatmaps.shape()));
    }
    return reshape(heatmaps, Shape{heatmaps.dim(0), heatmaps.dim(1) * heatmaps.dim(2)});
}

template <typename T>
BasicTensor<T> unflatten_nodes(const BasicTensor<T>& nodes, std::size_t h, std::size_t w) {
    if (nodes.ndim() != 2 || nodes.dim(1) != h * w) {
        throw DimensionError("unflatten_nodes: " + shape_str(nodes.shape()) + " cannot become " +
                             std::to_string(h) + "x" + std::to_string(w) + " maps");
    }
    return reshape(nodes, Shape{nodes.dim(0), h, w});
}

template <typename T>
BasicTensor<T> gcn_layer(const BasicTensor<T>& features, const BasicTensor<T>& a_hat,
                         const BasicTensor<T>& weight, bool activate) {
    if (features.ndim() != 2 || a_hat.ndim() != 2 || a_hat.dim(0) != features.dim(0) ||
        a_hat.dim(1) != features.dim(0) || weight.ndim() != 2 || weight.dim(0) != features.dim(1)) {
        throw DimensionError("gcn_layer: incompatible shapes G " + shape_str(features.shape()) +
                             ", A " + shape_str(a_hat.shape()) + ", W " + shape_str(weight.shape()));
    }
    BasicTensor<T> pre = matmul(matmul(a_hat, features), weight);
    return activate ? relu(pre) : pre;
}

template <typename T>
BasicTensor<T> refine_heatmaps(const BasicTensor<T>& last, std::size_t h, std::size_t w) {
    return sigmoid(unflatten_nodes(last, h, w));
}

template <typename T>
BasicTensor<T> refine_heatmaps(const BasicTensor<T>& last, std::size_t h, std::size_t w,
                               const BasicTensor<T>& icf_logits) {
    return sigmoid(add(icf_logits, unflatten_nodes(last, h, w)));
}

template <typename T>
BasicTensor<T> classify(const BasicTensor<T>& last, const BasicTensor<T>& w0, const BasicTensor<T>& w1) {
    if (last.ndim() != 2 || w0.ndim() != 2 || w1.ndim() != 2 || w0.dim(1) != last.dim(1) ||
        w1.dim(1) != w0.dim(0)) {
        throw DimensionError("classify: incompatible shapes G " + shape_str(last.shape()) + ", W0 " +
                             shape_str(w0.shape()) + ", W1 " + shape_str(w1.shape()));
    }
    BasicTensor<T> hidden = matmul(last, transpose(w0));     // [k, d_m]
    BasicTensor<T> per_node = matmul(hidden, transpose(w1));  // [k, d_c]
    return mean_axis(per_node, 0);
}

template <typename T>
BasicTgcnHead<T>::BasicTgcnHead(std::size_t h, std::size_t w, const TgcnConfig& config,
                                BasicParameterSet<T>& params, Rng& rng)
    : config_(config), h_(h), w_(w) {
    if (config.layers == 0) throw ConfigError("tgcn: at least one GCN layer is required");
    if (config.class_hidden == 0) throw ConfigError("tgcn: class_hidden must be positive");
    a_hat_ = normalize_adjacency(build_adjacency<T>(config.topology));
    const std::size_t d = h * w;
    for (std::size_t l = 0; l < config.layers; ++l) {
        BasicTensor<T> wl(Shape{d, d});
        glorot_uniform(wl, d, d, rng);
        weights_.push_back(params.add("tgcn.gcn" + std::to_string(l) + ".weight", wl));
    }
    BasicTensor<T> w0(Shape{config.class_hidden, d});
    glorot_uniform(w0, d, config.class_hidden, rng);
    w0_ = params.add("tgcn.classifier.w0", w0);
    BasicTensor<T> w1(Shape{1, config.class_hidden});
    glorot_uniform(w1, config.class_hidden, 1, rng);
    w1_ = params.add("tgcn.classifier.w1", w1);
}

template <typename T>
BasicTgcnOutput<T> BasicTgcnHead<T>::forward(const BasicTensor<T>& heatmaps,
                                             const BasicTensor<T>& icf_logits) const {
    BasicTensor<T> g = build_node_features(heatmaps, config_.topology.nodes);
    for (const auto& wl : weights_) g = gcn_layer(g, a_hat_, wl);
    BasicTensor<T> refined = config_.residual ? refine_heatmaps(g, h_, w_, icf_logits) : refine_heatmaps(g, h_, w_);
    return {refined, classify(g, w0_, w1_)};
}

#define HIPMARK_INSTANTIATE_TGCN(T)                                                                    \
    template BasicTensor<T> build_adjacency<T>(const TopologySpec&);                                   \
    template BasicTensor<T> normalize_adjacency(const BasicTensor<T>&);                                \
    template BasicTensor<T> build_node_features(const BasicTensor<T>&, std::size_t);                   \
    template BasicTensor<T> unflatten_nodes(const BasicTensor<T>&, std::size_t, std::size_t);          \
    template BasicTensor<T> gcn_layer(const BasicTensor<T>&, const BasicTensor<T>&,                    \
                                      const BasicTensor<T>&, bool);                                    \
    template BasicTensor<T> refine_heatmaps(const BasicTensor<T>&, std::size_t, std::size_t);          \
    template BasicTensor<T> refine_heatmaps(const BasicTensor<T>&, std::size_t, std::size_t,           \
                                            const BasicTensor<T>&);                                    \
    template BasicTensor<T> classify(const BasicTensor<T>&, const BasicTensor<T>&, const BasicTensor<T>&);

HIPMARK_INSTANTIATE_TGCN(float)
HIPMARK_INSTANTIATE_TGCN(double)

template class BasicTgcnHead<float>;
template class BasicTgcnHead<double>;

#undef HIPMARK_INSTANTIATE_TGCN

}  // namespace hipmark::tgcn
