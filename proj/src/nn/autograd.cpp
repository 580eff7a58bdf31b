// Copyright 2026 The cfpower Authors.
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

#include "cfpower/nn/autograd.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <unordered_set>

namespace cfpower::nn {

namespace {

std::atomic<std::uint64_t> g_next_order{1};
thread_local bool t_grad_enabled = true;

}  // namespace

Tensor& Node::grad_buffer() {
  if (grad.empty() && !value.empty()) grad = Tensor(value.shape(), std::vector<double>(value.size(), 0.0));
  return grad;
}

Var::Var(Tensor value, bool requires_grad) : node_(std::make_shared<Node>()) {
  node_->value = std::move(value);
  node_->requires_grad = requires_grad;
  node_->order = g_next_order++;
}

const Tensor& Var::grad() const {
  if (!node_) throw std::logic_error("grad of an undefined Var");
  return node_->grad_buffer();
}

void Var::zero_grad() {
  if (node_ && !node_->grad.empty()) node_->grad.fill(0.0);
}

Var make_op(Tensor value, const char* op, std::vector<Var> inputs,
            std::function<void(Node&)> backward_fn) {
  Var out(std::move(value), false);
  out.node_->op = op;
  if (!t_grad_enabled) return out;
  const bool needs = std::any_of(inputs.begin(), inputs.end(),
                                 [](const Var& v) { return v.requires_grad(); });
  if (!needs) return out;
  out.node_->requires_grad = true;
  out.node_->leaf = false;
  out.node_->parents.reserve(inputs.size());
  for (auto& v : inputs) out.node_->parents.push_back(v.node());
  out.node_->backward_fn = std::move(backward_fn);
  return out;
}

void backward(const Var& loss) {
  if (!loss.defined()) throw std::invalid_argument("backward: undefined loss");
  if (loss.value().size() != 1) throw std::invalid_argument("backward: loss must be a scalar");
  if (!loss.requires_grad())
    throw std::logic_error("backward: loss is detached from every parameter");

  // Collect the subgraph that leads to the loss.
  std::vector<Node*> nodes;
  std::unordered_set<Node*> seen;
  std::vector<Node*> stack{loss.node().get()};
  while (!stack.empty()) {
    Node* n = stack.back();
    stack.pop_back();
    if (!n->requires_grad || !seen.insert(n).second) continue;
    nodes.push_back(n);
    for (const auto& p : n->parents) stack.push_back(p.get());
  }
  std::sort(nodes.begin(), nodes.end(), [](const Node* a, const Node* b) { return a->order > b->order; });

  for (Node* n : nodes)
    if (!n->leaf) n->grad_buffer().fill(0.0);
  loss.node()->grad_buffer()[0] += 1.0;
  for (Node* n : nodes)
    if (!n->leaf && n->backward_fn) n->backward_fn(*n);
}

bool grad_enabled() { return t_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(t_grad_enabled) { t_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { t_grad_enabled = previous_; }

}  // namespace cfpower::nn
