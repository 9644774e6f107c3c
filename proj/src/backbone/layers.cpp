#include "hipmark/backbone/layers.hpp"

namespace hipmark {

template <typename T>
BasicConv2d<T>::BasicConv2d(BasicParameterSet<T>& params, const std::string& name, std::size_t in_channels,
                            std::size_t out_channels, std::size_t kernel, Rng& rng, Conv2dOptions options)
    : options_(options) {
    BasicTensor<T> w(Shape{out_channels, in_channels, kernel, kernel});
    glorot_uniform(w, in_channels * kernel * kernel, out_channels * kernel * kernel, rng);
    weight_ = params.add(name + ".weight", w);
    bias_ = params.add(name + ".bias", BasicTensor<T>(Shape{out_channels}));
}

template <typename T>
BasicTransposeConv2d<T>::BasicTransposeConv2d(BasicParameterSet<T>& params, const std::string& name,
                                              std::size_t in_channels, std::size_t out_channels,
                                              std::size_t kernel, std::size_t stride, Rng& rng)
    : stride_(stride) {
    BasicTensor<T> w(Shape{in_channels, out_channels, kernel, kernel});
    glorot_uniform(w, in_channels * kernel * kernel, out_channels * kernel * kernel, rng);
    weight_ = params.add(name + ".weight", w);
    bias_ = params.add(name + ".bias", BasicTensor<T>(Shape{out_channels}));
}

template <typename T>
BasicLinear<T>::BasicLinear(BasicParameterSet<T>& params, const std::string& name, std::size_t in,
                            std::size_t out, Rng& rng) {
    BasicTensor<T> w(Shape{in, out});
    glorot_uniform(w, in, out, rng);
    weight_ = params.add(name + ".weight", w);
    bias_ = params.add(name + ".bias", BasicTensor<T>(Shape{out}));
}

template <typename T>
BasicLayerNorm<T>::BasicLayerNorm(BasicParameterSet<T>& params, const std::string& name, std::size_t dim) {
    gamma_ = params.add(name + ".gamma", BasicTensor<T>::full(Shape{dim}, T(1)));
    beta_ = params.add(name + ".beta", BasicTensor<T>(Shape{dim}));
}

template class BasicConv2d<float>;
template class BasicConv2d<double>;
template class BasicTransposeConv2d<float>;
template class BasicTransposeConv2d<double>;
template class BasicLinear<float>;
template class BasicLinear<double>;
template class BasicLayerNorm<float>;
template class BasicLayerNorm<double>;

}  // namespace hipmark
