#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "msri/error.hpp"
#include "msri/numerics.hpp"
#include "msri/rng.hpp"

using msri::GradBuffers;
using msri::Parameter;
using msri::Tape;
using msri::Tensor;
using msri::Vec;

namespace {

void fill_gaussian(Parameter& p, std::uint64_t seed, double scale = 0.5) {
  msri::SplitMix64 r(seed);
  for (Eigen::Index i = 0; i < p.value.rows(); ++i)
    for (Eigen::Index j = 0; j < p.value.cols(); ++j) p.value(i, j) = scale * r.next_gaussian();
}

void index_params(std::vector<Parameter*>& ps) {
  for (std::size_t i = 0; i < ps.size(); ++i) ps[i]->index = static_cast<int>(i);
}

}  // namespace

TEST_CASE("forward values of basic ops") {
  Tape t;
  Parameter w("w", 2, 2);
  w.value << 1, 2, 3, 4;
  Parameter b("b", 2, 1);
  b.value << 10, 20;

  auto x = t.input((Vec(2) << 1, -1).finished());
  auto y = t.matvec(w, x);
  CHECK(t.value(y)(0) == -1);
  CHECK(t.value(y)(1) == -1);

  auto z = t.affine(w, x, b);
  CHECK(t.value(z)(0) == 9);
  CHECK(t.value(z)(1) == 19);

  auto s = t.softmax(t.input(Vec::Zero(4)));
  for (int i = 0; i < 4; ++i) CHECK(t.value(s)(i) == doctest::Approx(0.25));

  auto ce = t.cross_entropy(t.input(Vec::Zero(5)), 2);
  CHECK(t.value(ce)(0) == doctest::Approx(std::log(5.0)));

  auto d = t.dot(t.input((Vec(3) << 1, 2, 3).finished()),
                 t.input((Vec(3) << 4, 5, 6).finished()));
  CHECK(t.value(d)(0) == 32);
}

TEST_CASE("softmax and cross entropy survive extreme logits") {
  Tape t;
  Vec big(3);
  big << 1000.0, 999.0, -1000.0;
  auto s = t.softmax(t.input(big));
  CHECK(t.value(s).sum() == doctest::Approx(1.0));
  CHECK(std::isfinite(t.value(s)(2)));
  auto ce = t.cross_entropy(t.input(big), 2);
  CHECK(std::isfinite(t.value(ce)(0)));
  CHECK(t.value(ce)(0) > 1000.0);

  auto sg = t.sigmoid(t.input((Vec(2) << 500.0, -500.0).finished()));
  CHECK(t.value(sg)(0) == doctest::Approx(1.0));
  CHECK(t.value(sg)(1) == doctest::Approx(0.0));
  CHECK(std::isfinite(t.value(sg)(1)));
}

// One composition that routes gradient through every op the tape supports.
TEST_CASE("gradient check across all ops") {
  Parameter E("E", 5, 4), W("W", 4, 4), U("U", 4, 4), b("b", 4, 1), b2("b2", 4, 1);
  Parameter va("va", 4, 1), Wo("Wo", 6, 8), bo("bo", 6, 1);
  std::vector<Parameter*> ps = {&E, &W, &U, &b, &b2, &va, &Wo, &bo};
  index_params(ps);
  std::uint64_t s = 100;
  for (Parameter* p : ps) fill_gaussian(*p, s++);

  auto loss = [&](bool want_grad) {
    Tape t;
    auto x = t.embedding_row(E, 2);
    auto y = t.embedding_row(E, 4);
    auto h1 = t.tanh(t.affine(W, x, b));
    auto z = t.sigmoid(t.affine2(W, x, U, h1, b2));
    auto keep = t.mul(z, h1);
    auto fresh = t.mul(t.one_minus(z), x);
    auto mixed = t.add(keep, fresh);
    auto v = t.param_vector(va);
    std::array<Tape::Var, 2> es = {t.dot(v, h1), t.dot(v, y)};
    auto alpha = t.softmax(t.stack_scalars(es));
    std::array<Tape::Var, 2> ctx = {h1, y};
    auto c = t.weighted_sum(alpha, ctx);
    std::array<Tape::Var, 2> parts = {c, mixed};
    auto full = t.concat(parts);
    auto l = t.cross_entropy(t.affine(Wo, full, bo), 3);
    if (want_grad) t.backward(l);
    return t.value(l)(0);
  };

  CHECK(msri::grad_check(loss, ps) < 1e-6);
}

TEST_CASE("gradient check of matvec chain with shared parameter") {
  Parameter W("W", 3, 3), b("b", 3, 1);
  std::vector<Parameter*> ps = {&W, &b};
  index_params(ps);
  fill_gaussian(W, 7);
  fill_gaussian(b, 8);

  auto loss = [&](bool want_grad) {
    Tape t;
    auto x = t.input((Vec(3) << 0.3, -0.2, 0.9).finished());
    // W used twice: gradient must sum both contributions.
    auto h = t.tanh(t.affine(W, x, b));
    auto h2 = t.tanh(t.affine(W, h, b));
    auto l = t.cross_entropy(h2, 1);
    if (want_grad) t.backward(l);
    return t.value(l)(0);
  };
  CHECK(msri::grad_check(loss, ps) < 1e-6);
}

TEST_CASE("embedding gradient touches only the selected rows") {
  Parameter E("E", 4, 3);
  fill_gaussian(E, 21);
  Tape t;
  auto x = t.embedding_row(E, 1);
  auto l = t.cross_entropy(x, 0);
  t.backward(l);
  CHECK(E.grad.row(0).norm() == 0.0);
  CHECK(E.grad.row(1).norm() > 0.0);
  CHECK(E.grad.row(2).norm() == 0.0);
  CHECK(E.grad.row(3).norm() == 0.0);
}

TEST_CASE("backward seed scales gradients and repeated backward accumulates") {
  Parameter W("W", 2, 2), b("b", 2, 1);
  fill_gaussian(W, 31);
  fill_gaussian(b, 32);

  Tape t;
  auto x = t.input((Vec(2) << 1.0, 2.0).finished());
  auto l = t.cross_entropy(t.affine(W, x, b), 0);

  t.backward(l);
  Tensor g1 = W.grad;
  t.backward(l);  // accumulate again
  CHECK((W.grad - 2.0 * g1).norm() == doctest::Approx(0.0));

  msri::zero_grads({&W, &b});
  t.backward(l, 0.5);
  CHECK((W.grad - 0.5 * g1).norm() < 1e-15);
}

TEST_CASE("gradbuffers reduction matches direct accumulation and is bitwise stable") {
  Parameter W("W", 3, 3), b("b", 3, 1);
  std::vector<Parameter*> ps = {&W, &b};
  index_params(ps);
  fill_gaussian(W, 41);
  fill_gaussian(b, 42);

  std::vector<Vec> xs;
  msri::SplitMix64 r(5);
  for (int i = 0; i < 4; ++i) {
    Vec x(3);
    for (int j = 0; j < 3; ++j) x(j) = r.next_gaussian();
    xs.push_back(x);
  }

  auto run_example = [&](const Vec& x, GradBuffers* sink) {
    Tape t;
    auto l = t.cross_entropy(t.tanh(t.affine(W, t.input(x), b)), 2);
    if (sink)
      t.backward(l, *sink);
    else
      t.backward(l);
  };

  // Reference: straight accumulation into param.grad.
  msri::zero_grads(ps);
  for (const Vec& x : xs) run_example(x, nullptr);
  Tensor direct_w = W.grad, direct_b = b.grad;

  // Buffered: one GradBuffers per example, reduced in example order.
  std::vector<GradBuffers> bufs;
  for (const Vec& x : xs) {
    GradBuffers gb(ps);
    run_example(x, &gb);
    bufs.push_back(std::move(gb));
  }
  msri::zero_grads(ps);
  for (const GradBuffers& gb : bufs) gb.add_to(ps);
  CHECK((W.grad - direct_w).norm() < 1e-14);
  CHECK((b.grad - direct_b).norm() < 1e-14);

  // Reducing the same buffers again must be bit-identical.
  Tensor first_w = W.grad;
  msri::zero_grads(ps);
  for (const GradBuffers& gb : bufs) gb.add_to(ps);
  CHECK(W.grad == first_w);

  // Sink mode must leave param.grad untouched.
  msri::zero_grads(ps);
  GradBuffers gb(ps);
  run_example(xs[0], &gb);
  CHECK(W.grad.norm() == 0.0);
  CHECK(gb.of(W).norm() > 0.0);
}

TEST_CASE("grad_check rejects nondeterministic losses") {
  Parameter W("W", 2, 2);
  std::vector<Parameter*> ps = {&W};
  index_params(ps);
  fill_gaussian(W, 51);
  int calls = 0;
  auto flaky = [&](bool) -> double { return static_cast<double>(calls++); };
  CHECK_THROWS_AS(msri::grad_check(flaky, ps), msri::NonDeterministicLoss);
}

TEST_CASE("shape and index violations throw") {
  Tape t;
  Parameter W("W", 2, 3), b("b", 2, 1), W2("W2", 2, 2);
  auto x = t.input(Vec::Zero(2));
  CHECK_THROWS_AS(t.matvec(W, x), msri::ShapeMismatch);
  CHECK_THROWS_AS(t.add(x, t.input(Vec::Zero(3))), msri::ShapeMismatch);
  CHECK_THROWS_AS(t.embedding_row(W, 5), msri::IndexOutOfRange);
  CHECK_THROWS_AS(t.cross_entropy(x, 2), msri::IndexOutOfRange);
  CHECK_THROWS_AS(t.param_vector(W), msri::ShapeMismatch);
  CHECK_THROWS_AS(t.backward(t.affine(W2, x, b)), msri::ShapeMismatch);  // non-scalar root
}
