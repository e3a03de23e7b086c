#include "msri/numerics.hpp"

#include <cmath>
#include <cstring>

#include "msri/error.hpp"

namespace msri {

namespace {

double stable_sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Vec softmax_of(const Vec& z) {
  const double m = z.maxCoeff();
  Vec p = (z.array() - m).exp().matrix();
  p /= p.sum();
  return p;
}

}  // namespace

GradBuffers::GradBuffers(const std::vector<Parameter*>& params) {
  bufs_.reserve(params.size());
  for (const Parameter* p : params) bufs_.emplace_back(Tensor::Zero(p->rows(), p->cols()));
}

void GradBuffers::zero() {
  for (Tensor& t : bufs_) t.setZero();
}

void GradBuffers::add_to(const std::vector<Parameter*>& params) const {
  for (std::size_t i = 0; i < params.size(); ++i) params[i]->grad += bufs_[i];
}

Tape::Var Tape::push(Node n) {
  n.grad = Vec::Zero(n.value.size());
  nodes_.push_back(std::move(n));
  return static_cast<Var>(nodes_.size() - 1);
}

Tape::Var Tape::input(Vec v) {
  Node n;
  n.op = Op::kInput;
  n.value = std::move(v);
  return push(std::move(n));
}

Tape::Var Tape::param_vector(Parameter& p) {
  if (p.cols() != 1) throw ShapeMismatch("param_vector requires an n x 1 parameter: " + p.name);
  Node n;
  n.op = Op::kParamVec;
  n.pw = &p;
  n.value = p.value.col(0);
  return push(std::move(n));
}

Tape::Var Tape::embedding_row(Parameter& table, Eigen::Index row) {
  if (row < 0 || row >= table.rows())
    throw IndexOutOfRange("embedding row " + std::to_string(row) + " in " + table.name);
  Node n;
  n.op = Op::kEmbedRow;
  n.pw = &table;
  n.aux = static_cast<int>(row);
  n.value = table.value.row(row).transpose();
  return push(std::move(n));
}

Tape::Var Tape::matvec(Parameter& w, Var x) {
  if (w.cols() != value(x).size())
    throw ShapeMismatch(w.name + ": " + std::to_string(w.cols()) + " cols vs vector of " +
                        std::to_string(value(x).size()));
  Node n;
  n.op = Op::kMatVec;
  n.pw = &w;
  n.a = x;
  n.value = w.value * value(x);
  return push(std::move(n));
}

Tape::Var Tape::affine(Parameter& w, Var x, Parameter& b) {
  if (w.cols() != value(x).size() || w.rows() != b.rows() || b.cols() != 1)
    throw ShapeMismatch("affine " + w.name + "/" + b.name);
  Node n;
  n.op = Op::kAffine;
  n.pw = &w;
  n.pb = &b;
  n.a = x;
  n.value = w.value * value(x) + b.value.col(0);
  return push(std::move(n));
}

Tape::Var Tape::affine2(Parameter& w, Var x, Parameter& u, Var h, Parameter& b) {
  if (w.cols() != value(x).size() || u.cols() != value(h).size() || w.rows() != u.rows() ||
      w.rows() != b.rows() || b.cols() != 1)
    throw ShapeMismatch("affine2 " + w.name + "/" + u.name + "/" + b.name);
  Node n;
  n.op = Op::kAffine2;
  n.pw = &w;
  n.pu = &u;
  n.pb = &b;
  n.a = x;
  n.b = h;
  n.value = w.value * value(x) + u.value * value(h) + b.value.col(0);
  return push(std::move(n));
}

Tape::Var Tape::add(Var a, Var b) {
  if (value(a).size() != value(b).size()) throw ShapeMismatch("add");
  Node n;
  n.op = Op::kAdd;
  n.a = a;
  n.b = b;
  n.value = value(a) + value(b);
  return push(std::move(n));
}

Tape::Var Tape::mul(Var a, Var b) {
  if (value(a).size() != value(b).size()) throw ShapeMismatch("mul");
  Node n;
  n.op = Op::kMul;
  n.a = a;
  n.b = b;
  n.value = value(a).cwiseProduct(value(b));
  return push(std::move(n));
}

Tape::Var Tape::one_minus(Var x) {
  Node n;
  n.op = Op::kOneMinus;
  n.a = x;
  n.value = (1.0 - value(x).array()).matrix();
  return push(std::move(n));
}

Tape::Var Tape::sigmoid(Var x) {
  Node n;
  n.op = Op::kSigmoid;
  n.a = x;
  n.value = value(x).unaryExpr(&stable_sigmoid);
  return push(std::move(n));
}

Tape::Var Tape::tanh(Var x) {
  Node n;
  n.op = Op::kTanh;
  n.a = x;
  n.value = value(x).array().tanh().matrix();
  return push(std::move(n));
}

Tape::Var Tape::softmax(Var z) {
  if (value(z).size() == 0) throw ShapeMismatch("softmax of empty vector");
  Node n;
  n.op = Op::kSoftmax;
  n.a = z;
  n.value = softmax_of(value(z));
  return push(std::move(n));
}

Tape::Var Tape::concat(std::span<const Var> parts) {
  Eigen::Index total = 0;
  for (Var v : parts) total += value(v).size();
  Node n;
  n.op = Op::kConcat;
  n.ins.assign(parts.begin(), parts.end());
  n.value.resize(total);
  Eigen::Index at = 0;
  for (Var v : parts) {
    n.value.segment(at, value(v).size()) = value(v);
    at += value(v).size();
  }
  return push(std::move(n));
}

Tape::Var Tape::stack_scalars(std::span<const Var> scalars) {
  Node n;
  n.op = Op::kStack;
  n.ins.assign(scalars.begin(), scalars.end());
  n.value.resize(static_cast<Eigen::Index>(scalars.size()));
  for (std::size_t i = 0; i < scalars.size(); ++i) {
    if (value(scalars[i]).size() != 1) throw ShapeMismatch("stack_scalars input not scalar");
    n.value[static_cast<Eigen::Index>(i)] = value(scalars[i])[0];
  }
  return push(std::move(n));
}

Tape::Var Tape::dot(Var a, Var b) {
  if (value(a).size() != value(b).size()) throw ShapeMismatch("dot");
  Node n;
  n.op = Op::kDot;
  n.a = a;
  n.b = b;
  n.value = Vec::Constant(1, value(a).dot(value(b)));
  return push(std::move(n));
}

Tape::Var Tape::weighted_sum(Var weights, std::span<const Var> vectors) {
  if (value(weights).size() != static_cast<Eigen::Index>(vectors.size()))
    throw ShapeMismatch("weighted_sum arity");
  if (vectors.empty()) throw ShapeMismatch("weighted_sum of nothing");
  Node n;
  n.op = Op::kWeightedSum;
  n.a = weights;
  n.ins.assign(vectors.begin(), vectors.end());
  n.value = Vec::Zero(value(vectors[0]).size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (value(vectors[i]).size() != n.value.size()) throw ShapeMismatch("weighted_sum input");
    n.value += value(weights)[static_cast<Eigen::Index>(i)] * value(vectors[i]);
  }
  return push(std::move(n));
}

Tape::Var Tape::cross_entropy(Var logits, int gold) {
  if (gold < 0 || gold >= value(logits).size())
    throw IndexOutOfRange("cross_entropy gold " + std::to_string(gold));
  Node n;
  n.op = Op::kCrossEntropy;
  n.a = logits;
  n.aux = gold;
  n.cache = softmax_of(value(logits));
  // -log p[gold], computed stably from the logits directly.
  const Vec& z = value(logits);
  const double m = z.maxCoeff();
  const double lse = m + std::log((z.array() - m).exp().sum());
  n.value = Vec::Constant(1, lse - z[gold]);
  return push(std::move(n));
}

void Tape::backward(Var root, double seed) { run_backward(root, nullptr, seed); }

void Tape::backward(Var root, GradBuffers& sink, double seed) { run_backward(root, &sink, seed); }

void Tape::run_backward(Var root, GradBuffers* sink, double seed) {
  if (value(root).size() != 1) throw ShapeMismatch("backward root must be scalar");
  for (Node& n : nodes_) n.grad.setZero();
  nodes_[static_cast<std::size_t>(root)].grad[0] = seed;

  auto pgrad = [&](Parameter* p) -> Tensor& { return sink ? sink->of(*p) : p->grad; };

  for (std::ptrdiff_t i = root; i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    const Vec& g = n.grad;
    switch (n.op) {
      case Op::kInput:
        break;
      case Op::kParamVec:
        pgrad(n.pw).col(0) += g;
        break;
      case Op::kEmbedRow:
        pgrad(n.pw).row(n.aux) += g.transpose();
        break;
      case Op::kMatVec:
        pgrad(n.pw).noalias() += g * value(n.a).transpose();
        nodes_[static_cast<std::size_t>(n.a)].grad.noalias() += n.pw->value.transpose() * g;
        break;
      case Op::kAffine:
        pgrad(n.pw).noalias() += g * value(n.a).transpose();
        pgrad(n.pb).col(0) += g;
        nodes_[static_cast<std::size_t>(n.a)].grad.noalias() += n.pw->value.transpose() * g;
        break;
      case Op::kAffine2:
        pgrad(n.pw).noalias() += g * value(n.a).transpose();
        pgrad(n.pu).noalias() += g * value(n.b).transpose();
        pgrad(n.pb).col(0) += g;
        nodes_[static_cast<std::size_t>(n.a)].grad.noalias() += n.pw->value.transpose() * g;
        nodes_[static_cast<std::size_t>(n.b)].grad.noalias() += n.pu->value.transpose() * g;
        break;
      case Op::kAdd:
        nodes_[static_cast<std::size_t>(n.a)].grad += g;
        nodes_[static_cast<std::size_t>(n.b)].grad += g;
        break;
      case Op::kMul:
        nodes_[static_cast<std::size_t>(n.a)].grad += g.cwiseProduct(value(n.b));
        nodes_[static_cast<std::size_t>(n.b)].grad += g.cwiseProduct(value(n.a));
        break;
      case Op::kOneMinus:
        nodes_[static_cast<std::size_t>(n.a)].grad -= g;
        break;
      case Op::kSigmoid: {
        const Vec& y = n.value;
        nodes_[static_cast<std::size_t>(n.a)].grad.array() +=
            g.array() * y.array() * (1.0 - y.array());
        break;
      }
      case Op::kTanh: {
        const Vec& y = n.value;
        nodes_[static_cast<std::size_t>(n.a)].grad.array() +=
            g.array() * (1.0 - y.array().square());
        break;
      }
      case Op::kSoftmax: {
        const Vec& p = n.value;
        const double gp = g.dot(p);
        nodes_[static_cast<std::size_t>(n.a)].grad.array() += p.array() * (g.array() - gp);
        break;
      }
      case Op::kConcat: {
        Eigen::Index at = 0;
        for (Var v : n.ins) {
          Vec& dst = nodes_[static_cast<std::size_t>(v)].grad;
          dst += g.segment(at, dst.size());
          at += dst.size();
        }
        break;
      }
      case Op::kStack:
        for (std::size_t j = 0; j < n.ins.size(); ++j)
          nodes_[static_cast<std::size_t>(n.ins[j])].grad[0] += g[static_cast<Eigen::Index>(j)];
        break;
      case Op::kDot:
        nodes_[static_cast<std::size_t>(n.a)].grad += g[0] * value(n.b);
        nodes_[static_cast<std::size_t>(n.b)].grad += g[0] * value(n.a);
        break;
      case Op::kWeightedSum: {
        Vec& dw = nodes_[static_cast<std::size_t>(n.a)].grad;
        const Vec& w = value(n.a);
        for (std::size_t j = 0; j < n.ins.size(); ++j) {
          const auto jj = static_cast<Eigen::Index>(j);
          Node& vin = nodes_[static_cast<std::size_t>(n.ins[j])];
          dw[jj] += g.dot(vin.value);
          vin.grad += w[jj] * g;
        }
        break;
      }
      case Op::kCrossEntropy: {
        Vec d = n.cache;
        d[n.aux] -= 1.0;
        nodes_[static_cast<std::size_t>(n.a)].grad += g[0] * d;
        break;
      }
    }
  }
}

void Tape::clear() { nodes_.clear(); }

void zero_grads(const std::vector<Parameter*>& params) {
  for (Parameter* p : params) p->grad.setZero();
}

double grad_check(const std::function<double(bool)>& loss, const std::vector<Parameter*>& params,
                  double step) {
  zero_grads(params);
  const double f0 = loss(true);
  const double f1 = loss(false);
  if (std::memcmp(&f0, &f1, sizeof(double)) != 0) throw NonDeterministicLoss();

  double max_rel = 0.0;
  for (Parameter* p : params) {
    double* v = p->value.data();
    const double* g = p->grad.data();
    const Eigen::Index n = p->value.size();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double saved = v[i];
      v[i] = saved + step;
      const double fp = loss(false);
      v[i] = saved - step;
      const double fm = loss(false);
      v[i] = saved;
      const double numeric = (fp - fm) / (2.0 * step);
      const double analytic = g[i];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
      max_rel = std::max(max_rel, std::abs(analytic - numeric) / denom);
    }
  }
  return max_rel;
}

}  // namespace msri
