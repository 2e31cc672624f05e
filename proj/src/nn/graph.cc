#include "corank/nn/graph.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace corank::nn {

namespace {

void require_vector(const Tensor& t, const char* what) {
  if (t.ndim() != 1) throw std::invalid_argument(std::string(what) + " expects a vector, got shape " + t.shape_str());
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (a.shape != b.shape)
    throw std::invalid_argument(std::string(what) + " shape mismatch: " + a.shape_str() + " vs " + b.shape_str());
}

}  // namespace

int Graph::check(int id) const {
  if (id < 0 || id >= size()) throw std::out_of_range("graph node id out of range");
  return id;
}

int Graph::push(Node n) {
  for (int i : n.in) check(i);
  nodes_.push_back(std::move(n));
  return size() - 1;
}

double Graph::scalar_value(int id) const {
  const Tensor& t = value(id);
  if (t.size() != 1) throw std::logic_error("scalar_value on tensor of shape " + t.shape_str());
  return t.v[0];
}

int Graph::constant(Tensor t) {
  Node n;
  n.op = Op::kConstant;
  n.val = std::move(t);
  return push(std::move(n));
}

int Graph::scalar(double x) { return constant(Tensor::scalar(x)); }
int Graph::vec(std::vector<double> x) { return constant(Tensor::vec(std::move(x))); }

int Graph::param(Param& p) {
  auto it = param_nodes_.find(&p);
  if (it != param_nodes_.end()) return it->second;
  Node n;
  n.op = Op::kParam;
  n.p = &p;
  n.val = p.value;
  int id = push(std::move(n));
  param_nodes_[&p] = id;
  return id;
}

int Graph::lookup(Param& table, int row) {
  if (table.value.ndim() != 2)
    throw std::invalid_argument("lookup expects a 2-d table, got " + table.value.shape_str() + " for " + table.name);
  if (row < 0 || row >= table.value.rows())
    throw std::out_of_range("lookup row " + std::to_string(row) + " out of range for " + table.name + " " +
                            table.value.shape_str());
  Node n;
  n.op = Op::kLookup;
  n.p = &table;
  n.row = row;
  int d = table.value.cols();
  n.val = Tensor::zeros({d});
  for (int j = 0; j < d; ++j) n.val.at(j) = table.value.at(row, j);
  return push(std::move(n));
}

int Graph::affine(int w, int x, int b) {
  const Tensor& W = value(w);
  const Tensor& X = value(x);
  if (W.ndim() != 2) throw std::invalid_argument("affine weight must be 2-d, got " + W.shape_str());
  require_vector(X, "affine");
  if (W.cols() != X.shape[0])
    throw std::invalid_argument("affine shape mismatch: weight " + W.shape_str() + " vs input " + X.shape_str());
  int m = W.rows(), k = W.cols();
  Node n;
  n.op = Op::kAffine;
  n.in = {w, x};
  n.val = Tensor::zeros({m});
  const double* wp = W.v.data();
  const double* xp = X.v.data();
  for (int i = 0; i < m; ++i) {
    double acc = 0.0;
    const double* wrow = wp + static_cast<size_t>(i) * k;
    for (int j = 0; j < k; ++j) acc += wrow[j] * xp[j];
    n.val.at(i) = acc;
  }
  if (b >= 0) {
    const Tensor& B = value(b);
    if (B.shape != std::vector<int>{m})
      throw std::invalid_argument("affine bias shape " + B.shape_str() + " does not match output [" +
                                  std::to_string(m) + "]");
    n.in.push_back(b);
    for (int i = 0; i < m; ++i) n.val.at(i) += B.at(i);
  }
  return push(std::move(n));
}

int Graph::add(int a, int b) {
  require_same_shape(value(a), value(b), "add");
  Node n;
  n.op = Op::kAdd;
  n.in = {a, b};
  n.val = value(a);
  for (int i = 0; i < n.val.size(); ++i) n.val.at(i) += value(b).at(i);
  return push(std::move(n));
}

int Graph::sub(int a, int b) {
  require_same_shape(value(a), value(b), "sub");
  Node n;
  n.op = Op::kSub;
  n.in = {a, b};
  n.val = value(a);
  for (int i = 0; i < n.val.size(); ++i) n.val.at(i) -= value(b).at(i);
  return push(std::move(n));
}

int Graph::cmul(int a, int b) {
  require_same_shape(value(a), value(b), "cmul");
  Node n;
  n.op = Op::kCMul;
  n.in = {a, b};
  n.val = value(a);
  for (int i = 0; i < n.val.size(); ++i) n.val.at(i) *= value(b).at(i);
  return push(std::move(n));
}

int Graph::smul(int x, double c) {
  Node n;
  n.op = Op::kSMul;
  n.in = {x};
  n.c = c;
  n.val = value(x);
  for (double& v : n.val.v) v *= c;
  return push(std::move(n));
}

int Graph::concat(const std::vector<int>& xs) {
  if (xs.empty()) throw std::invalid_argument("concat of zero inputs");
  Node n;
  n.op = Op::kConcat;
  n.in = xs;
  int total = 0;
  for (int x : xs) {
    require_vector(value(x), "concat");
    total += value(x).size();
  }
  n.val = Tensor::zeros({total});
  int off = 0;
  for (int x : xs) {
    const Tensor& t = value(x);
    std::copy(t.v.begin(), t.v.end(), n.val.v.begin() + off);
    off += t.size();
  }
  return push(std::move(n));
}

int Graph::slice(int x, int offset, int len) {
  const Tensor& t = value(x);
  require_vector(t, "slice");
  if (offset < 0 || len <= 0 || offset + len > t.size())
    throw std::out_of_range("slice [" + std::to_string(offset) + "," + std::to_string(offset + len) +
                            ") out of range for " + t.shape_str());
  Node n;
  n.op = Op::kSlice;
  n.in = {x};
  n.row = offset;
  n.len = len;
  n.val = Tensor::zeros({len});
  std::copy(t.v.begin() + offset, t.v.begin() + offset + len, n.val.v.begin());
  return push(std::move(n));
}

int Graph::relu(int x) {
  Node n;
  n.op = Op::kRelu;
  n.in = {x};
  n.val = value(x);
  for (double& v : n.val.v) v = v > 0.0 ? v : 0.0;
  return push(std::move(n));
}

int Graph::tanh(int x) {
  Node n;
  n.op = Op::kTanh;
  n.in = {x};
  n.val = value(x);
  for (double& v : n.val.v) v = std::tanh(v);
  return push(std::move(n));
}

int Graph::sigmoid(int x) {
  Node n;
  n.op = Op::kSigmoid;
  n.in = {x};
  n.val = value(x);
  for (double& v : n.val.v) v = 1.0 / (1.0 + std::exp(-v));
  return push(std::move(n));
}

int Graph::softmax(int x) {
  const Tensor& t = value(x);
  require_vector(t, "softmax");
  if (t.size() == 0) throw std::invalid_argument("softmax over empty input");
  Node n;
  n.op = Op::kSoftmax;
  n.in = {x};
  n.val = Tensor::vec(softmax_values(t.v));
  return push(std::move(n));
}

int Graph::logsumexp(int x) {
  const Tensor& t = value(x);
  require_vector(t, "logsumexp");
  if (t.size() == 0) throw std::invalid_argument("logsumexp over empty input");
  Node n;
  n.op = Op::kLogSumExp;
  n.in = {x};
  n.val = Tensor::scalar(logsumexp_values(t.v));
  return push(std::move(n));
}

int Graph::pick(int x, int index) {
  const Tensor& t = value(x);
  require_vector(t, "pick");
  if (index < 0 || index >= t.size()) throw std::out_of_range("pick index out of range");
  Node n;
  n.op = Op::kPick;
  n.in = {x};
  n.row = index;
  n.val = Tensor::scalar(t.at(index));
  return push(std::move(n));
}

int Graph::dot(int a, int b) {
  require_same_shape(value(a), value(b), "dot");
  require_vector(value(a), "dot");
  Node n;
  n.op = Op::kDot;
  n.in = {a, b};
  double acc = 0.0;
  for (int i = 0; i < value(a).size(); ++i) acc += value(a).at(i) * value(b).at(i);
  n.val = Tensor::scalar(acc);
  return push(std::move(n));
}

int Graph::weighted_sum(const std::vector<int>& vecs, int w) {
  if (vecs.empty()) throw std::invalid_argument("weighted_sum of zero vectors");
  const Tensor& W = value(w);
  require_vector(W, "weighted_sum weights");
  if (W.size() != static_cast<int>(vecs.size()))
    throw std::invalid_argument("weighted_sum: " + std::to_string(vecs.size()) + " vectors but " +
                                std::to_string(W.size()) + " weights");
  int d = value(vecs[0]).size();
  Node n;
  n.op = Op::kWeightedSum;
  n.in = vecs;
  n.in.push_back(w);
  n.val = Tensor::zeros({d});
  for (size_t k = 0; k < vecs.size(); ++k) {
    const Tensor& v = value(vecs[k]);
    require_same_shape(v, value(vecs[0]), "weighted_sum");
    double wk = W.at(static_cast<int>(k));
    for (int i = 0; i < d; ++i) n.val.at(i) += wk * v.at(i);
  }
  return push(std::move(n));
}

int Graph::vmax(const std::vector<int>& xs) {
  if (xs.empty()) throw std::invalid_argument("vmax of zero inputs");
  int d = value(xs[0]).size();
  Node n;
  n.op = Op::kVMax;
  n.in = xs;
  n.val = value(xs[0]);
  n.argmax.assign(d, 0);
  for (size_t k = 1; k < xs.size(); ++k) {
    const Tensor& v = value(xs[k]);
    require_same_shape(v, value(xs[0]), "vmax");
    for (int i = 0; i < d; ++i) {
      if (v.at(i) > n.val.at(i)) {
        n.val.at(i) = v.at(i);
        n.argmax[i] = static_cast<int>(k);
      }
    }
  }
  return push(std::move(n));
}

int Graph::sum(const std::vector<int>& scalars) {
  if (scalars.empty()) throw std::invalid_argument("sum of zero inputs");
  Node n;
  n.op = Op::kSum;
  n.in = scalars;
  double acc = 0.0;
  for (int x : scalars) {
    if (value(x).size() != 1) throw std::invalid_argument("sum expects scalars, got " + value(x).shape_str());
    acc += value(x).v[0];
  }
  n.val = Tensor::scalar(acc);
  return push(std::move(n));
}

int Graph::dropout(int x, double rate) {
  if (rate < 0.0 || rate >= 1.0) throw std::invalid_argument("dropout rate must be in [0,1)");
  if (!training_ || rate == 0.0) return x;
  if (!rng_) throw std::logic_error("dropout in training mode requires a graph rng");
  Node n;
  n.op = Op::kDropout;
  n.in = {x};
  n.val = value(x);
  n.mask.resize(n.val.v.size());
  std::bernoulli_distribution keep(1.0 - rate);
  double scale = 1.0 / (1.0 - rate);
  for (size_t i = 0; i < n.mask.size(); ++i) {
    n.mask[i] = keep(*rng_) ? scale : 0.0;
    n.val.v[i] *= n.mask[i];
  }
  return push(std::move(n));
}

void Graph::backward(int loss) {
  check(loss);
  if (value(loss).size() != 1)
    throw std::invalid_argument("backward requires a scalar loss, got shape " + value(loss).shape_str());
  for (int i = 0; i <= loss; ++i) nodes_[i].grad = Tensor::zeros(nodes_[i].val.shape);
  nodes_[loss].grad.v[0] = 1.0;
  for (int i = loss; i >= 0; --i) backprop(nodes_[i]);
  // clear grads of nodes past the loss so grad() reads are well defined
  for (int i = loss + 1; i < size(); ++i) nodes_[i].grad = Tensor::zeros(nodes_[i].val.shape);
}

void Graph::backprop(Node& n) {
  const Tensor& g = n.grad;
  switch (n.op) {
    case Op::kConstant:
      break;
    case Op::kParam:
      if (n.p->trainable)
        for (int i = 0; i < g.size(); ++i) n.p->grad.at(i) += g.at(i);
      break;
    case Op::kLookup:
      if (n.p->trainable)
        for (int j = 0; j < g.size(); ++j) n.p->grad.at(n.row, j) += g.at(j);
      break;
    case Op::kAffine: {
      Tensor& wg = nodes_[n.in[0]].grad;
      Tensor& xg = nodes_[n.in[1]].grad;
      const Tensor& W = nodes_[n.in[0]].val;
      const Tensor& X = nodes_[n.in[1]].val;
      int m = W.rows(), k = W.cols();
      for (int i = 0; i < m; ++i) {
        double gi = g.at(i);
        if (gi == 0.0) continue;
        for (int j = 0; j < k; ++j) {
          wg.at(i, j) += gi * X.at(j);
          xg.at(j) += gi * W.at(i, j);
        }
      }
      if (n.in.size() == 3) {
        Tensor& bg = nodes_[n.in[2]].grad;
        for (int i = 0; i < m; ++i) bg.at(i) += g.at(i);
      }
      break;
    }
    case Op::kAdd:
      for (int i = 0; i < g.size(); ++i) {
        nodes_[n.in[0]].grad.at(i) += g.at(i);
        nodes_[n.in[1]].grad.at(i) += g.at(i);
      }
      break;
    case Op::kSub:
      for (int i = 0; i < g.size(); ++i) {
        nodes_[n.in[0]].grad.at(i) += g.at(i);
        nodes_[n.in[1]].grad.at(i) -= g.at(i);
      }
      break;
    case Op::kCMul:
      for (int i = 0; i < g.size(); ++i) {
        nodes_[n.in[0]].grad.at(i) += g.at(i) * nodes_[n.in[1]].val.at(i);
        nodes_[n.in[1]].grad.at(i) += g.at(i) * nodes_[n.in[0]].val.at(i);
      }
      break;
    case Op::kSMul:
      for (int i = 0; i < g.size(); ++i) nodes_[n.in[0]].grad.at(i) += g.at(i) * n.c;
      break;
    case Op::kConcat: {
      int off = 0;
      for (int x : n.in) {
        Tensor& xg = nodes_[x].grad;
        for (int i = 0; i < xg.size(); ++i) xg.at(i) += g.at(off + i);
        off += xg.size();
      }
      break;
    }
    case Op::kSlice:
      for (int i = 0; i < n.len; ++i) nodes_[n.in[0]].grad.at(n.row + i) += g.at(i);
      break;
    case Op::kRelu:
      for (int i = 0; i < g.size(); ++i)
        if (nodes_[n.in[0]].val.at(i) > 0.0) nodes_[n.in[0]].grad.at(i) += g.at(i);
      break;
    case Op::kTanh:
      for (int i = 0; i < g.size(); ++i) nodes_[n.in[0]].grad.at(i) += g.at(i) * (1.0 - n.val.at(i) * n.val.at(i));
      break;
    case Op::kSigmoid:
      for (int i = 0; i < g.size(); ++i)
        nodes_[n.in[0]].grad.at(i) += g.at(i) * n.val.at(i) * (1.0 - n.val.at(i));
      break;
    case Op::kSoftmax: {
      // dx_i = y_i * (g_i - sum_j g_j y_j)
      double dotgy = 0.0;
      for (int i = 0; i < g.size(); ++i) dotgy += g.at(i) * n.val.at(i);
      for (int i = 0; i < g.size(); ++i)
        nodes_[n.in[0]].grad.at(i) += n.val.at(i) * (g.at(i) - dotgy);
      break;
    }
    case Op::kLogSumExp: {
      const Tensor& x = nodes_[n.in[0]].val;
      double lse = n.val.v[0];
      for (int i = 0; i < x.size(); ++i)
        nodes_[n.in[0]].grad.at(i) += g.v[0] * std::exp(x.at(i) - lse);
      break;
    }
    case Op::kPick:
      nodes_[n.in[0]].grad.at(n.row) += g.v[0];
      break;
    case Op::kDot:
      for (int i = 0; i < nodes_[n.in[0]].val.size(); ++i) {
        nodes_[n.in[0]].grad.at(i) += g.v[0] * nodes_[n.in[1]].val.at(i);
        nodes_[n.in[1]].grad.at(i) += g.v[0] * nodes_[n.in[0]].val.at(i);
      }
      break;
    case Op::kWeightedSum: {
      int nv = static_cast<int>(n.in.size()) - 1;
      const Tensor& W = nodes_[n.in[nv]].val;
      Tensor& wg = nodes_[n.in[nv]].grad;
      for (int k = 0; k < nv; ++k) {
        const Tensor& v = nodes_[n.in[k]].val;
        Tensor& vg = nodes_[n.in[k]].grad;
        double acc = 0.0;
        for (int i = 0; i < g.size(); ++i) {
          vg.at(i) += W.at(k) * g.at(i);
          acc += v.at(i) * g.at(i);
        }
        wg.at(k) += acc;
      }
      break;
    }
    case Op::kVMax:
      for (int i = 0; i < g.size(); ++i) nodes_[n.in[n.argmax[i]]].grad.at(i) += g.at(i);
      break;
    case Op::kSum:
      for (int x : n.in) nodes_[x].grad.v[0] += g.v[0];
      break;
    case Op::kDropout:
      for (int i = 0; i < g.size(); ++i) nodes_[n.in[0]].grad.at(i) += g.at(i) * n.mask[i];
      break;
  }
}

}  // namespace corank::nn
