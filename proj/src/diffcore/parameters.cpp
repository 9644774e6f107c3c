#include "hipmark/diffcore/parameters.hpp"

#include "hipmark/error.hpp"

namespace hipmark {

template <typename T>
BasicTensor<T> BasicParameterSet<T>::add(const std::string& name, BasicTensor<T> t) {
    if (find(name)) throw ContractError("duplicate parameter name '" + name + "'");
    t.set_requires_grad(true);
    entries_.push_back({name, t});
    return t;
}

template <typename T>
std::size_t BasicParameterSet<T>::scalar_count() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.tensor.numel();
    return n;
}

template <typename T>
const BasicTensor<T>* BasicParameterSet<T>::find(const std::string& name) const {
    for (const auto& e : entries_)
        if (e.name == name) return &e.tensor;
    return nullptr;
}

template <typename T>
void BasicParameterSet<T>::zero_grad() {
    for (auto& e : entries_) {
        BasicTensor<T> t = e.tensor;
        t.zero_grad();
    }
}

template class BasicParameterSet<float>;
template class BasicParameterSet<double>;

}  // namespace hipmark
