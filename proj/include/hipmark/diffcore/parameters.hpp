#pragma once

#include <string>
#include <vector>

#include "hipmark/diffcore/tensor.hpp"
#include "hipmark/diffcore/tensor_io.hpp"

namespace hipmark {

/// Ordered registry of trainable tensors. Entries share storage with the
/// layers that own them, so writing through the registry updates the model.
template <typename T>
class BasicParameterSet {
   public:
    using Entry = BasicNamedTensor<T>;

    /// Registers `t` (marked requires_grad) under `name` and returns the handle.
    BasicTensor<T> add(const std::string& name, BasicTensor<T> t);
    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    std::size_t scalar_count() const;
    const BasicTensor<T>* find(const std::string& name) const;
    void zero_grad();

   private:
    std::vector<Entry> entries_;
};

using ParameterSet = BasicParameterSet<float>;

extern template class BasicParameterSet<float>;
extern template class BasicParameterSet<double>;

}  // namespace hipmark
