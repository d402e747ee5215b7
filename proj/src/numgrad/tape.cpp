// Licensed under the Apache License, Version 2.0 (the "License"); you
// may not use this file except in compliance with the License.  You
// may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied.  See the License for the specific language governing
// permissions and limitations under the License.

#include "atlbp/numgrad/tape.hpp"

#include <cmath>
#include <string>

#include "atlbp/error.hpp"
#include "atlbp/numgrad/ops.hpp"

namespace atlbp::numgrad {

namespace {

void axpy(std::span<double> y, std::span<const double> x, double a) noexcept {
  double* py = y.data();
  const double* px = x.data();
  const std::size_t n = y.size();
  for (std::size_t i = 0; i < n; ++i) py[i] += a * px[i];
}

void require_same_size(const Vector& a, const Vector& b, const char* op) {
  if (a.size() != b.size()) {
    fail(ErrorKind::dimension, std::string(op) + ": operand lengths " + std::to_string(a.size()) +
                                   " and " + std::to_string(b.size()) + " differ");
  }
}

}  // namespace

GradTape::GradTape(const ParameterSet& params) : params_(&params) {}

NodeId GradTape::push(Node node) {
  nodes_.push_back(std::move(node));
  return NodeId{nodes_.size() - 1};
}

const GradTape::Node& GradTape::node(NodeId id) const {
  if (id.index >= nodes_.size()) {
    fail(ErrorKind::usage, "tape node " + std::to_string(id.index) + " does not exist");
  }
  return nodes_[id.index];
}

bool GradTape::inputs_need_grad(const std::vector<std::size_t>& inputs) const {
  for (std::size_t i : inputs) {
    if (nodes_[i].needs_grad) return true;
  }
  return false;
}

NodeId GradTape::constant(std::span<const double> values) {
  Node n;
  n.op = Op::constant;
  n.value = Vector(values);
  return push(std::move(n));
}

NodeId GradTape::variable(std::span<const double> values) {
  Node n;
  n.op = Op::variable;
  n.value = Vector(values);
  n.needs_grad = true;
  return push(std::move(n));
}

NodeId GradTape::affine(ParamId weight, std::optional<ParamId> bias, NodeId x) {
  const Matrix& w = (*params_)[weight];
  const Vector& xv = node(x).value;
  Node n;
  n.op = Op::affine;
  n.weight = weight;
  n.bias = bias;
  n.inputs = {x.index};
  n.needs_grad = true;
  n.value = apply_affine(w, bias ? (*params_)[*bias].span() : std::span<const double>{}, xv);
  return push(std::move(n));
}

NodeId GradTape::concat(std::span<const NodeId> parts) {
  Node n;
  n.op = Op::concat;
  std::size_t total = 0;
  for (NodeId p : parts) total += node(p).value.size();
  std::vector<double> out;
  out.reserve(total);
  for (NodeId p : parts) {
    const Vector& v = nodes_[p.index].value;
    out.insert(out.end(), v.begin(), v.end());
    n.inputs.push_back(p.index);
  }
  n.value = Vector(std::move(out));
  n.needs_grad = inputs_need_grad(n.inputs);
  return push(std::move(n));
}

NodeId GradTape::slice(NodeId x, std::size_t offset, std::size_t length) {
  const Vector& xv = node(x).value;
  if (offset + length > xv.size()) {
    fail(ErrorKind::dimension, "slice [" + std::to_string(offset) + ", " +
                                   std::to_string(offset + length) + ") exceeds length " +
                                   std::to_string(xv.size()));
  }
  Node n;
  n.op = Op::slice;
  n.inputs = {x.index};
  n.offset = offset;
  n.value = Vector(xv.span().subspan(offset, length));
  n.needs_grad = nodes_[x.index].needs_grad;
  return push(std::move(n));
}

NodeId GradTape::sigmoid(NodeId x) {
  const Vector& xv = node(x).value;
  Node n;
  n.op = Op::sigmoid;
  n.inputs = {x.index};
  n.value = Vector(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) n.value[i] = numgrad::sigmoid(xv[i]);
  n.needs_grad = nodes_[x.index].needs_grad;
  return push(std::move(n));
}

NodeId GradTape::tanh(NodeId x) {
  const Vector& xv = node(x).value;
  Node n;
  n.op = Op::tanh;
  n.inputs = {x.index};
  n.value = Vector(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) n.value[i] = std::tanh(xv[i]);
  n.needs_grad = nodes_[x.index].needs_grad;
  return push(std::move(n));
}

NodeId GradTape::mul(NodeId a, NodeId b) {
  const Vector& av = node(a).value;
  const Vector& bv = node(b).value;
  require_same_size(av, bv, "mul");
  Node n;
  n.op = Op::mul;
  n.inputs = {a.index, b.index};
  n.value = Vector(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) n.value[i] = av[i] * bv[i];
  n.needs_grad = inputs_need_grad(n.inputs);
  return push(std::move(n));
}

NodeId GradTape::add(NodeId a, NodeId b) {
  const Vector& av = node(a).value;
  const Vector& bv = node(b).value;
  require_same_size(av, bv, "add");
  Node n;
  n.op = Op::add;
  n.inputs = {a.index, b.index};
  n.value = Vector(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) n.value[i] = av[i] + bv[i];
  n.needs_grad = inputs_need_grad(n.inputs);
  return push(std::move(n));
}

NodeId GradTape::scale(NodeId x, double factor) {
  const Vector& xv = node(x).value;
  Node n;
  n.op = Op::scale;
  n.inputs = {x.index};
  n.factor = factor;
  n.value = Vector(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) n.value[i] = factor * xv[i];
  n.needs_grad = nodes_[x.index].needs_grad;
  return push(std::move(n));
}

NodeId GradTape::mean(std::span<const NodeId> parts) {
  if (parts.empty()) fail(ErrorKind::usage, "mean of zero nodes");
  Node n;
  n.op = Op::mean;
  n.value = Vector(node(parts.front()).value.size());
  for (NodeId p : parts) {
    const Vector& v = node(p).value;
    require_same_size(n.value, v, "mean");
    for (std::size_t i = 0; i < v.size(); ++i) n.value[i] += v[i];
    n.inputs.push_back(p.index);
  }
  n.factor = 1.0 / static_cast<double>(parts.size());
  for (double& v : n.value) v *= n.factor;
  n.needs_grad = inputs_need_grad(n.inputs);
  return push(std::move(n));
}

NodeId GradTape::softmax_cross_entropy(NodeId logits, std::size_t label) {
  const Vector& z = node(logits).value;
  Node n;
  n.op = Op::softmax_xent;
  n.inputs = {logits.index};
  n.label = label;
  n.aux = softmax(z);
  n.value = Vector{cross_entropy(n.aux, label)};
  n.needs_grad = nodes_[logits.index].needs_grad;
  return push(std::move(n));
}

const Vector& GradTape::value(NodeId id) const { return node(id).value; }

const Vector& GradTape::probabilities(NodeId loss) const {
  const Node& n = node(loss);
  if (n.op != Op::softmax_xent) fail(ErrorKind::usage, "node is not a softmax_cross_entropy node");
  return n.aux;
}

void GradTape::clear() noexcept {
  nodes_.clear();
  adjoints_.clear();
}

Gradients GradTape::backward(NodeId loss) {
  if (nodes_.empty()) fail(ErrorKind::usage, "backward called on an empty tape");
  const Node& root = node(loss);
  if (root.value.size() != 1) {
    fail(ErrorKind::usage, "backward requires a scalar loss node, got length " +
                               std::to_string(root.value.size()));
  }

  Gradients grads = params_->zeros_like();
  adjoints_.assign(nodes_.size(), Vector{});
  adjoints_[loss.index] = Vector{1.0};

  auto adjoint_of = [this](std::size_t i) -> Vector& {
    if (adjoints_[i].empty()) adjoints_[i] = Vector(nodes_[i].value.size());
    return adjoints_[i];
  };

  for (std::size_t idx = loss.index + 1; idx-- > 0;) {
    const Node& n = nodes_[idx];
    if (adjoints_[idx].empty() || !n.needs_grad) continue;
    const Vector& dy = adjoints_[idx];

    switch (n.op) {
      case Op::constant:
      case Op::variable:
        break;
      case Op::affine: {
        const Matrix& w = (*params_)[n.weight];
        const Vector& x = nodes_[n.inputs[0]].value;
        Matrix& dw = grads[n.weight];
        for (std::size_t r = 0; r < w.rows(); ++r) {
          if (dy[r] != 0.0) axpy(dw.row(r), x, dy[r]);
        }
        if (n.bias) {
          Matrix& db = grads[*n.bias];
          for (std::size_t r = 0; r < w.rows(); ++r) db.span()[r] += dy[r];
        }
        if (nodes_[n.inputs[0]].needs_grad) {
          Vector& dx = adjoint_of(n.inputs[0]);
          for (std::size_t r = 0; r < w.rows(); ++r) {
            if (dy[r] != 0.0) axpy(dx.span(), w.row(r), dy[r]);
          }
        }
        break;
      }
      case Op::concat: {
        std::size_t offset = 0;
        for (std::size_t in : n.inputs) {
          const std::size_t len = nodes_[in].value.size();
          if (nodes_[in].needs_grad) {
            Vector& dx = adjoint_of(in);
            for (std::size_t i = 0; i < len; ++i) dx[i] += dy[offset + i];
          }
          offset += len;
        }
        break;
      }
      case Op::slice: {
        Vector& dx = adjoint_of(n.inputs[0]);
        for (std::size_t i = 0; i < dy.size(); ++i) dx[n.offset + i] += dy[i];
        break;
      }
      case Op::sigmoid: {
        Vector& dx = adjoint_of(n.inputs[0]);
        for (std::size_t i = 0; i < dy.size(); ++i) {
          const double s = n.value[i];
          dx[i] += dy[i] * s * (1.0 - s);
        }
        break;
      }
      case Op::tanh: {
        Vector& dx = adjoint_of(n.inputs[0]);
        for (std::size_t i = 0; i < dy.size(); ++i) {
          const double t = n.value[i];
          dx[i] += dy[i] * (1.0 - t * t);
        }
        break;
      }
      case Op::mul: {
        const std::size_t a = n.inputs[0];
        const std::size_t b = n.inputs[1];
        if (nodes_[a].needs_grad) {
          Vector& da = adjoint_of(a);
          const Vector& bv = nodes_[b].value;
          for (std::size_t i = 0; i < dy.size(); ++i) da[i] += dy[i] * bv[i];
        }
        if (nodes_[b].needs_grad) {
          Vector& db = adjoint_of(b);
          const Vector& av = nodes_[a].value;
          for (std::size_t i = 0; i < dy.size(); ++i) db[i] += dy[i] * av[i];
        }
        break;
      }
      case Op::add: {
        for (std::size_t in : n.inputs) {
          if (!nodes_[in].needs_grad) continue;
          Vector& dx = adjoint_of(in);
          for (std::size_t i = 0; i < dy.size(); ++i) dx[i] += dy[i];
        }
        break;
      }
      case Op::scale: {
        Vector& dx = adjoint_of(n.inputs[0]);
        for (std::size_t i = 0; i < dy.size(); ++i) dx[i] += n.factor * dy[i];
        break;
      }
      case Op::mean: {
        for (std::size_t in : n.inputs) {
          if (!nodes_[in].needs_grad) continue;
          Vector& dx = adjoint_of(in);
          for (std::size_t i = 0; i < dy.size(); ++i) dx[i] += n.factor * dy[i];
        }
        break;
      }
      case Op::softmax_xent: {
        Vector& dz = adjoint_of(n.inputs[0]);
        for (std::size_t i = 0; i < n.aux.size(); ++i) {
          const double target = (i == n.label) ? 1.0 : 0.0;
          dz[i] += dy[0] * (n.aux[i] - target);
        }
        break;
      }
    }
  }
  return grads;
}

Vector GradTape::adjoint(NodeId id) const {
  const Node& n = node(id);
  if (id.index < adjoints_.size() && !adjoints_[id.index].empty()) return adjoints_[id.index];
  return Vector(n.value.size());
}

}  // namespace atlbp::numgrad
