#pragma once

#include <random>
#include <unordered_map>
#include <vector>

#include "corank/nn/params.h"
#include "corank/nn/tensor.h"

namespace corank::nn {

// Dynamic computation tape. Values are computed eagerly when a node is
// created; backward() sweeps the tape once in reverse creation order, which
// is a valid reverse topological order because every input of a node was
// created before the node itself.
//
// A graph is built per document (or per test case) and thrown away after
// the step. Parameter nodes alias entries of a ParamStore; backward()
// accumulates their gradients into Param::grad.
class Graph {
 public:
  explicit Graph(bool training = false, std::mt19937_64* rng = nullptr)
      : training_(training), rng_(rng) {}

  bool training() const { return training_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const Tensor& value(int id) const { return nodes_[check(id)].val; }
  const Tensor& grad(int id) const { return nodes_[check(id)].grad; }
  double scalar_value(int id) const;

  // leaves
  int constant(Tensor t);
  int scalar(double x);
  int vec(std::vector<double> x);
  int param(Param& p);                    // memoized per graph
  int lookup(Param& table, int row);      // one row of a 2-d parameter

  // vector/matrix ops
  int affine(int w, int x, int b = -1);   // w [m,n] * x [n] (+ b [m])
  int add(int a, int b);
  int sub(int a, int b);
  int cmul(int a, int b);                 // elementwise product
  int smul(int x, double c);
  int concat(const std::vector<int>& xs);
  int slice(int x, int offset, int len);
  int relu(int x);
  int tanh(int x);
  int sigmoid(int x);
  int softmax(int x);
  int logsumexp(int x);                   // vector -> scalar
  int pick(int x, int index);             // vector -> scalar
  int dot(int a, int b);
  int weighted_sum(const std::vector<int>& vecs, int w);  // sum_k w[k]*vecs[k]
  int vmax(const std::vector<int>& xs);   // elementwise max over equal-shaped vectors
  int sum(const std::vector<int>& scalars);
  int dropout(int x, double rate);        // identity outside training

  // Seeds d(loss)/d(loss)=1 and accumulates gradients down the tape.
  // Hard error if the loss node is not a scalar.
  void backward(int loss);

 private:
  enum class Op {
    kConstant, kParam, kLookup, kAffine, kAdd, kSub, kCMul, kSMul, kConcat,
    kSlice, kRelu, kTanh, kSigmoid, kSoftmax, kLogSumExp, kPick, kDot,
    kWeightedSum, kVMax, kSum, kDropout
  };

  struct Node {
    Op op;
    std::vector<int> in;
    Tensor val;
    Tensor grad;
    Param* p = nullptr;
    int row = -1;        // lookup row / pick index / slice offset
    int len = 0;         // slice length
    double c = 0.0;      // smul factor
    std::vector<double> mask;  // dropout multipliers
    std::vector<int> argmax;   // vmax winners
  };

  int check(int id) const;
  int push(Node n);
  void backprop(Node& n);

  std::vector<Node> nodes_;
  std::unordered_map<const Param*, int> param_nodes_;
  bool training_;
  std::mt19937_64* rng_;
};

}  // namespace corank::nn
