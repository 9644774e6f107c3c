#include "hipmark/diffcore/tensor.hpp"

#include <sstream>
#include <unordered_set>
#include <utility>

#include "hipmark/error.hpp"

namespace hipmark {

std::size_t shape_numel(const Shape& shape) {
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    return n;
}

std::string shape_str(const Shape& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << 'x';
        os << shape[i];
    }
    os << ']';
    return os.str();
}

namespace {
thread_local bool g_grad_enabled = true;
}

bool GradMode::enabled() { return g_grad_enabled; }
void GradMode::set_enabled(bool enabled) { g_grad_enabled = enabled; }

template <typename T>
BasicTensor<T>::BasicTensor(Shape shape, bool requires_grad)
    : BasicTensor(shape, std::vector<T>(shape_numel(shape), T(0)), requires_grad) {}

template <typename T>
BasicTensor<T>::BasicTensor(Shape shape, std::vector<T> values, bool requires_grad) {
    for (auto d : shape) {
        if (d == 0) throw DimensionError("tensor dims must be positive, got " + shape_str(shape));
    }
    if (shape_numel(shape) != values.size()) {
        throw DimensionError("shape " + shape_str(shape) + " needs " +
                             std::to_string(shape_numel(shape)) + " values, got " +
                             std::to_string(values.size()));
    }
    node_ = std::make_shared<detail::Node<T>>();
    node_->shape = std::move(shape);
    node_->data = std::move(values);
    node_->requires_grad = requires_grad;
}

template <typename T>
BasicTensor<T> BasicTensor<T>::full(Shape shape, T value, bool requires_grad) {
    auto n = shape_numel(shape);
    return BasicTensor(std::move(shape), std::vector<T>(n, value), requires_grad);
}

template <typename T>
BasicTensor<T> BasicTensor<T>::scalar(T value, bool requires_grad) {
    return BasicTensor(Shape{1}, std::vector<T>{value}, requires_grad);
}

template <typename T>
const Shape& BasicTensor<T>::shape() const {
    if (!node_) throw ContractError("use of an undefined tensor");
    return node_->shape;
}

template <typename T>
std::size_t BasicTensor<T>::dim(std::size_t axis) const {
    const auto& s = shape();
    if (axis >= s.size()) {
        throw DimensionError("axis " + std::to_string(axis) + " out of range for " + shape_str(s));
    }
    return s[axis];
}

template <typename T>
std::size_t BasicTensor<T>::numel() const {
    return shape_numel(shape());
}

template <typename T>
std::span<T> BasicTensor<T>::data() {
    shape();
    return node_->data;
}

template <typename T>
std::span<const T> BasicTensor<T>::data() const {
    shape();
    return node_->data;
}

template <typename T>
T BasicTensor<T>::item() const {
    if (numel() != 1) throw ContractError("item() on non-scalar tensor " + shape_str(shape()));
    return node_->data[0];
}

template <typename T>
bool BasicTensor<T>::requires_grad() const {
    return node_ && node_->requires_grad;
}

template <typename T>
BasicTensor<T>& BasicTensor<T>::set_requires_grad(bool value) {
    shape();
    node_->requires_grad = value;
    return *this;
}

template <typename T>
bool BasicTensor<T>::has_grad() const {
    return node_ && node_->grad.size() == node_->data.size();
}

template <typename T>
std::span<const T> BasicTensor<T>::grad() const {
    if (!has_grad()) throw ContractError("tensor has no gradient; call backward() first");
    return node_->grad;
}

template <typename T>
std::span<T> BasicTensor<T>::mutable_grad() {
    shape();
    return {node_->grad_buffer(), node_->data.size()};
}

template <typename T>
void BasicTensor<T>::zero_grad() {
    if (node_) node_->grad.clear();
}

template <typename T>
void BasicTensor<T>::backward() const {
    if (numel() != 1) {
        throw ContractError("backward() needs a scalar loss, got shape " + shape_str(shape()));
    }
    if (!node_->requires_grad) {
        throw ContractError("backward() on a tensor that does not require grad");
    }

    using NodeT = detail::Node<T>;
    // Iterative post-order DFS gives a topological order (inputs first).
    std::vector<NodeT*> order;
    std::unordered_set<NodeT*> visited;
    std::vector<std::pair<NodeT*, std::size_t>> stack;
    stack.emplace_back(node_.get(), 0);
    visited.insert(node_.get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->inputs.size()) {
            NodeT* child = node->inputs[next++].get();
            if (child->requires_grad && visited.insert(child).second) stack.emplace_back(child, 0);
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    for (NodeT* n : order) {
        if (!n->is_leaf()) n->grad.assign(n->data.size(), T(0));
    }
    node_->grad_buffer()[0] += T(1);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        NodeT* n = *it;
        if (!n->is_leaf()) n->backward_fn(*n);
    }
}

template <typename T>
BasicTensor<T> BasicTensor<T>::detach() const {
    return BasicTensor(shape(), node_->data, false);
}

template <typename T>
const char* BasicTensor<T>::op_name() const {
    return node_ ? node_->op : "undefined";
}

template class BasicTensor<float>;
template class BasicTensor<double>;

}  // namespace hipmark
