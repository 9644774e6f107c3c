#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace hipmark {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

// Graph recording switch. Thread-local, so inference workers can disable
// recording without affecting a training thread.
class GradMode {
   public:
    static bool enabled();
    static void set_enabled(bool enabled);
};

class NoGradGuard {
   public:
    NoGradGuard() : previous_(GradMode::enabled()) { GradMode::set_enabled(false); }
    ~NoGradGuard() { GradMode::set_enabled(previous_); }
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

   private:
    bool previous_;
};

namespace detail {

template <typename T>
struct Node {
    Shape shape;
    std::vector<T> data;
    std::vector<T> grad;  // empty until first written
    bool requires_grad = false;
    const char* op = "leaf";
    std::vector<std::shared_ptr<Node>> inputs;
    // Reads this node's grad and accumulates into the inputs' grads.
    std::function<void(Node&)> backward_fn;

    T* grad_buffer() {
        if (grad.size() != data.size()) grad.assign(data.size(), T(0));
        return grad.data();
    }
    bool is_leaf() const { return !backward_fn; }
};

}  // namespace detail

/// Handle to a node of the reverse-mode tape. Copies share storage.
template <typename T>
class BasicTensor {
   public:
    using value_type = T;
    using NodePtr = std::shared_ptr<detail::Node<T>>;

    BasicTensor() = default;
    explicit BasicTensor(Shape shape, bool requires_grad = false);
    BasicTensor(Shape shape, std::vector<T> values, bool requires_grad = false);

    static BasicTensor full(Shape shape, T value, bool requires_grad = false);
    static BasicTensor scalar(T value, bool requires_grad = false);
    static BasicTensor from_node(NodePtr node) {
        BasicTensor t;
        t.node_ = std::move(node);
        return t;
    }

    bool defined() const { return static_cast<bool>(node_); }
    const Shape& shape() const;
    std::size_t ndim() const { return shape().size(); }
    std::size_t dim(std::size_t axis) const;
    std::size_t numel() const;

    std::span<T> data();
    std::span<const T> data() const;
    T item() const;

    bool requires_grad() const;
    BasicTensor& set_requires_grad(bool value);
    bool has_grad() const;
    std::span<const T> grad() const;
    std::span<T> mutable_grad();
    void zero_grad();

    /// Reverse sweep from a scalar. Leaf grads accumulate across calls;
    /// intermediate grads are recomputed from scratch each call.
    void backward() const;

    /// Fresh leaf holding a copy of the values.
    BasicTensor detach() const;
    const char* op_name() const;
    const NodePtr& node() const { return node_; }

   private:
    NodePtr node_;
};

using Tensor = BasicTensor<float>;
using Tensor64 = BasicTensor<double>;

extern template class BasicTensor<float>;
extern template class BasicTensor<double>;

}  // namespace hipmark
