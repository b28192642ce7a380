// Copyright 2026 The sphnet Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <unordered_set>
#include <vector>

#include "sphnet/ad/tensor.hpp"

namespace sphnet::ad {

/// One vertex of a reverse-mode graph. Graphs are rebuilt per step (dynamic);
/// leaves (parameters, constants) persist across steps.
template <class T>
struct Node {
  Tensor<T> value;
  Tensor<T> grad;  // allocated on first use
  bool requires_grad = false;
  std::string name;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void()> backprop;  // accumulates this->grad into the parents

  void ensure_grad() {
    if (grad.v.empty()) grad = Tensor<T>::zeros(value.shape);
  }
  void clear_grad() { grad = Tensor<T>(); }
};

template <class T>
using NodeP = std::shared_ptr<Node<T>>;

template <class T>
NodeP<T> make_param(Tensor<T> value, std::string name = "") {
  auto n = std::make_shared<Node<T>>();
  n->value = std::move(value);
  n->requires_grad = true;
  n->name = std::move(name);
  return n;
}

template <class T>
NodeP<T> make_const(Tensor<T> value) {
  auto n = std::make_shared<Node<T>>();
  n->value = std::move(value);
  return n;
}

/// Reverse pass from a scalar root: seeds d(root)/d(root) = 1 and runs every
/// node's rule in reverse topological order. Gradients accumulate, so call
/// clear_grad on leaves between steps.
template <class T>
void backward(const NodeP<T>& root) {
  check_arg(root != nullptr, "backward: null root");
  check_arg(root->value.numel() == 1, "backward: root must be a scalar");

  std::vector<Node<T>*> order;
  std::unordered_set<Node<T>*> seen;
  std::vector<std::pair<Node<T>*, std::size_t>> stack;
  stack.emplace_back(root.get(), 0);
  seen.insert(root.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node<T>* parent = node->parents[next++].get();
      if (parent->requires_grad && seen.insert(parent).second) stack.emplace_back(parent, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  root->ensure_grad();
  root->grad.v[0] += T(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if ((*it)->backprop) (*it)->backprop();
}

template <class T>
void zero_grad(const std::vector<NodeP<T>>& params) {
  for (const auto& p : params) p->clear_grad();
}

}  // namespace sphnet::ad
