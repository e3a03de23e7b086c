// Dense f64 tensor primitives with reverse-mode gradient accumulation.
//
// A Tape records vector-valued operations; backward() walks the record in
// reverse and accumulates exact analytic gradients, either directly into each
// Parameter's grad tensor or into a detached GradBuffers (used for ordered
// cross-example reduction). Matrices only ever appear as Parameters; every
// intermediate value is a column vector (scalars are length-1 vectors).
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace msri {

// Row-major so that serialized bytes are row-major f64 as documented.
using Tensor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

struct Parameter {
  std::string name;
  int index = -1;  // position in the owning parameter list
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string name_, Eigen::Index rows, Eigen::Index cols)
      : name(std::move(name_)), value(Tensor::Zero(rows, cols)), grad(Tensor::Zero(rows, cols)) {}

  Eigen::Index rows() const { return value.rows(); }
  Eigen::Index cols() const { return value.cols(); }
};

// Per-parameter gradient accumulators detached from the parameters themselves.
class GradBuffers {
public:
  GradBuffers() = default;
  explicit GradBuffers(const std::vector<Parameter*>& params);

  void zero();
  Tensor& of(const Parameter& p) { return bufs_[static_cast<std::size_t>(p.index)]; }
  const Tensor& of(const Parameter& p) const { return bufs_[static_cast<std::size_t>(p.index)]; }
  // params[i].grad += bufs[i]
  void add_to(const std::vector<Parameter*>& params) const;
  bool empty() const { return bufs_.empty(); }

private:
  std::vector<Tensor> bufs_;
};

class Tape {
public:
  using Var = std::int32_t;

  // --- leaves ---
  Var input(Vec v);                                   // constant, no gradient
  Var param_vector(Parameter& p);                     // n x 1 parameter as a vector
  Var embedding_row(Parameter& table, Eigen::Index row);

  // --- linear ---
  Var matvec(Parameter& w, Var x);                    // w * x
  Var affine(Parameter& w, Var x, Parameter& b);      // w * x + b
  Var affine2(Parameter& w, Var x, Parameter& u, Var h, Parameter& b);  // w x + u h + b
  Var add(Var a, Var b);
  Var mul(Var a, Var b);                              // elementwise
  Var one_minus(Var x);                               // 1 - x, elementwise

  // --- nonlinear ---
  Var sigmoid(Var x);
  Var tanh(Var x);
  Var softmax(Var z);                                 // max-subtracted, sums to 1

  // --- shape / reduction ---
  Var concat(std::span<const Var> parts);
  Var stack_scalars(std::span<const Var> scalars);    // length-1 vars -> one vector
  Var dot(Var a, Var b);                              // scalar
  Var weighted_sum(Var weights, std::span<const Var> vectors);  // sum_i w_i v_i

  // --- loss ---
  Var cross_entropy(Var logits, int gold);            // -log softmax(logits)[gold]

  const Vec& value(Var v) const { return nodes_[static_cast<std::size_t>(v)].value; }

  // Seeds d(root) = seed and accumulates parameter gradients. root must be a
  // scalar. With a sink, gradients go to the buffers instead of param.grad.
  void backward(Var root, double seed = 1.0);
  void backward(Var root, GradBuffers& sink, double seed = 1.0);

  void clear();
  std::size_t size() const { return nodes_.size(); }

private:
  enum class Op : std::uint8_t {
    kInput,
    kParamVec,
    kEmbedRow,
    kMatVec,
    kAffine,
    kAffine2,
    kAdd,
    kMul,
    kOneMinus,
    kSigmoid,
    kTanh,
    kSoftmax,
    kConcat,
    kStack,
    kDot,
    kWeightedSum,
    kCrossEntropy,
  };

  struct Node {
    Vec value;
    Vec grad;
    Op op;
    Var a = -1, b = -1;
    Parameter* pw = nullptr;
    Parameter* pu = nullptr;
    Parameter* pb = nullptr;
    int aux = -1;          // embedding row / gold id
    std::vector<Var> ins;  // concat / stack / weighted_sum
    Vec cache;             // softmax probs for cross_entropy
  };

  Var push(Node n);
  void run_backward(Var root, GradBuffers* sink, double seed);

  std::vector<Node> nodes_;
};

// Central-difference gradient check. `loss` must be deterministic; called with
// want_grad=true it must also accumulate analytic gradients into param.grad.
// Returns the max over all parameter entries of
//   |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
double grad_check(const std::function<double(bool want_grad)>& loss,
                  const std::vector<Parameter*>& params, double step = 1e-5);

void zero_grads(const std::vector<Parameter*>& params);

}  // namespace msri
