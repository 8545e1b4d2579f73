// Copyright 2026 The EdgeNet Lab Authors.
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

#include "edgenet/numgrad.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace edgenet::ng {

namespace {

std::string shape_str(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

[[noreturn]] void shape_fail(const char* op, const Matrix& a, const Matrix& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + shape_str(a) +
                   " and " + shape_str(b));
}

void require_same(const char* op, const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) shape_fail(op, a, b);
}

void require_scalar(const char* op, const Matrix& a) {
  if (a.rows() != 1 || a.cols() != 1)
    throw ShapeError(std::string(op) + ": expected 1x1, got " + shape_str(a));
}

// Tape shared by a set of Vars.
Tape& tape_of(Var a, Var b) {
  if (&a.tape() != &b.tape())
    throw TapeError("operands belong to different tapes");
  return a.tape();
}

// exp(x) with exp(-inf) = 0 and stable for large |x| of either sign.
double stable_softplus(double x) {
  if (x > 30.0) return x;
  if (x < -30.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

double stable_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

// ---- Tensor / Var -----------------------------------------------------------

Tensor::Tensor(Eigen::Index rows, Eigen::Index cols, bool rg)
    : value(Matrix::Zero(rows, cols)), requires_grad(rg) {}

Tensor::Tensor(Matrix v, bool rg) : value(std::move(v)), requires_grad(rg) {}

void Tensor::zero_grad() {
  if (grad.rows() != value.rows() || grad.cols() != value.cols())
    grad = Matrix::Zero(value.rows(), value.cols());
  else
    grad.setZero();
}

const Matrix& Var::value() const { return tape_->value(id_); }

double Var::scalar() const {
  require_scalar("scalar", value());
  return value()(0, 0);
}

bool Var::requires_grad() const { return tape_->requires_grad(id_); }

// ---- Tape -------------------------------------------------------------------

Var Tape::constant(Matrix value) {
  nodes_.push_back(Node{std::move(value), {}, {}, nullptr, false});
  return Var(this, static_cast<std::int32_t>(nodes_.size() - 1));
}

Var Tape::constant(double value) {
  Matrix m(1, 1);
  m(0, 0) = value;
  return constant(std::move(m));
}

Var Tape::param(Tensor& t) {
  nodes_.push_back(Node{t.value, {}, {}, &t, record_ && t.requires_grad});
  return Var(this, static_cast<std::int32_t>(nodes_.size() - 1));
}

Var Tape::record(Matrix value, std::initializer_list<Var> inputs, BackwardFn fn) {
  return record(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()),
                std::move(fn));
}

Var Tape::record(Matrix value, std::span<const Var> inputs, BackwardFn fn) {
  if (backward_done_) throw TapeError("tape already consumed by backward()");
  bool needs = false;
  for (const Var& v : inputs) {
    if (&v.tape() != this) throw TapeError("operand belongs to a different tape");
    needs = needs || nodes_[v.id()].requires_grad;
  }
  nodes_.push_back(Node{std::move(value), {}, needs ? std::move(fn) : BackwardFn{},
                        nullptr, needs});
  return Var(this, static_cast<std::int32_t>(nodes_.size() - 1));
}

Matrix& Tape::grad_buffer(std::int32_t id) {
  Node& n = nodes_[id];
  if (n.grad.size() == 0) n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

void Tape::backward(Var loss) {
  if (&loss.tape() != this) throw TapeError("loss belongs to a different tape");
  if (backward_done_) throw TapeError("backward() called twice on the same tape");
  require_scalar("backward", loss.value());
  backward_done_ = true;
  if (!nodes_[loss.id()].requires_grad) return;
  grad_buffer(loss.id())(0, 0) = 1.0;
  for (std::int32_t id = loss.id(); id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.requires_grad || n.grad.size() == 0) continue;
    if (n.bound != nullptr) {
      Tensor& t = *n.bound;
      if (t.grad.rows() != t.value.rows() || t.grad.cols() != t.value.cols())
        t.grad = Matrix::Zero(t.value.rows(), t.value.cols());
      t.grad += n.grad;
    } else if (n.backward) {
      n.backward(*this, id);
    }
  }
}

// ---- primitives -------------------------------------------------------------

Var matmul(Var a, Var b) {
  Tape& t = tape_of(a, b);
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.cols() != bv.rows()) shape_fail("matmul", av, bv);
  Matrix out = av * bv;
  const auto ia = a.id(), ib = b.id();
  return t.record(std::move(out), {a, b}, [ia, ib](Tape& tp, std::int32_t self) {
    const Matrix g = tp.grad(self);
    if (tp.requires_grad(ia)) tp.grad_buffer(ia).noalias() += g * tp.value(ib).transpose();
    if (tp.requires_grad(ib)) tp.grad_buffer(ib).noalias() += tp.value(ia).transpose() * g;
  });
}

Var transpose(Var a) {
  const auto ia = a.id();
  return a.tape().record(a.value().transpose(), {a}, [ia](Tape& tp, std::int32_t self) {
    tp.grad_buffer(ia) += tp.grad(self).transpose();
  });
}

Var add(Var a, Var b) {
  Tape& t = tape_of(a, b);
  require_same("add", a.value(), b.value());
  const auto ia = a.id(), ib = b.id();
  return t.record(a.value() + b.value(), {a, b}, [ia, ib](Tape& tp, std::int32_t self) {
    if (tp.requires_grad(ia)) tp.grad_buffer(ia) += tp.grad(self);
    if (tp.requires_grad(ib)) tp.grad_buffer(ib) += tp.grad(self);
  });
}

Var sub(Var a, Var b) {
  Tape& t = tape_of(a, b);
  require_same("sub", a.value(), b.value());
  const auto ia = a.id(), ib = b.id();
  return t.record(a.value() - b.value(), {a, b}, [ia, ib](Tape& tp, std::int32_t self) {
    if (tp.requires_grad(ia)) tp.grad_buffer(ia) += tp.grad(self);
    if (tp.requires_grad(ib)) tp.grad_buffer(ib) -= tp.grad(self);
  });
}

Var mul(Var a, Var b) {
  Tape& t = tape_of(a, b);
  require_same("mul", a.value(), b.value());
  const auto ia = a.id(), ib = b.id();
  Matrix out = a.value().cwiseProduct(b.value());
  return t.record(std::move(out), {a, b}, [ia, ib](Tape& tp, std::int32_t self) {
    const Matrix& g = tp.grad(self);
    if (tp.requires_grad(ia)) tp.grad_buffer(ia) += g.cwiseProduct(tp.value(ib));
    if (tp.requires_grad(ib)) tp.grad_buffer(ib) += g.cwiseProduct(tp.value(ia));
  });
}

Var add_row(Var a, Var row) {
  Tape& t = tape_of(a, row);
  const Matrix& av = a.value();
  const Matrix& rv = row.value();
  if (rv.rows() != 1 || rv.cols() != av.cols()) shape_fail("add_row", av, rv);
  Matrix out = av.rowwise() + rv.row(0);
  const auto ia = a.id(), ir = row.id();
  return t.record(std::move(out), {a, row}, [ia, ir](Tape& tp, std::int32_t self) {
    const Matrix& g = tp.grad(self);
    if (tp.requires_grad(ia)) tp.grad_buffer(ia) += g;
    if (tp.requires_grad(ir)) tp.grad_buffer(ir) += g.colwise().sum();
  });
}

Var mul_row(Var a, Var row) {
  Tape& t = tape_of(a, row);
  const Matrix& av = a.value();
  const Matrix& rv = row.value();
  if (rv.rows() != 1 || rv.cols() != av.cols()) shape_fail("mul_row", av, rv);
  Matrix out = av.array().rowwise() * rv.row(0).array();
  const auto ia = a.id(), ir = row.id();
  return t.record(std::move(out), {a, row}, [ia, ir](Tape& tp, std::int32_t self) {
    const Matrix& g = tp.grad(self);
    if (tp.requires_grad(ia))
      tp.grad_buffer(ia).array() += g.array().rowwise() * tp.value(ir).row(0).array();
    if (tp.requires_grad(ir))
      tp.grad_buffer(ir) += g.cwiseProduct(tp.value(ia)).colwise().sum();
  });
}

Var add_col(Var a, Var col) {
  Tape& t = tape_of(a, col);
  const Matrix& av = a.value();
  const Matrix& cv = col.value();
  if (cv.cols() != 1 || cv.rows() != av.rows()) shape_fail("add_col", av, cv);
  Matrix out = av.colwise() + cv.col(0);
  const auto ia = a.id(), ic = col.id();
  return t.record(std::move(out), {a, col}, [ia, ic](Tape& tp, std::int32_t self) {
    const Matrix& g = tp.grad(self);
    if (tp.requires_grad(ia)) tp.grad_buffer(ia) += g;
    if (tp.requires_grad(ic)) tp.grad_buffer(ic) += g.rowwise().sum();
  });
}

Var scale(Var a, double s) {
  const auto ia = a.id();
  return a.tape().record(a.value() * s, {a}, [ia, s](Tape& tp, std::int32_t self) {
    tp.grad_buffer(ia) += tp.grad(self) * s;
  });
}

Var scale_by(Var a, Var s) {
  Tape& t = tape_of(a, s);
  require_scalar("scale_by", s.value());
  const double sv = s.value()(0, 0);
  const auto ia = a.id(), is = s.id();
  return t.record(a.value() * sv, {a, s}, [ia, is](Tape& tp, std::int32_t self) {
    const Matrix& g = tp.grad(self);
    const double s_now = tp.value(is)(0, 0);
    if (tp.requires_grad(ia)) tp.grad_buffer(ia) += g * s_now;
    if (tp.requires_grad(is)) tp.grad_buffer(is)(0, 0) += g.cwiseProduct(tp.value(ia)).sum();
  });
}

Var add_scalar(Var a, double s) {
  const auto ia = a.id();
  return a.tape().record(a.value().array() + s, {a}, [ia](Tape& tp, std::int32_t self) {
    tp.grad_buffer(ia) += tp.grad(self);
  });
}

Var neg(Var a) { return scale(a, -1.0); }

Var tanh(Var a) {
  const auto ia = a.id();
  Matrix out = a.value().array().tanh();
  return a.tape().record(std::move(out), {a}, [ia](Tape& tp, std::int32_t self) {
    const Matrix& y = tp.value(self);
    tp.grad_buffer(ia).array() += tp.grad(self).array() * (1.0 - y.array().square());
  });
}

Var sigmoid(Var a) {
  const auto ia = a.id();
  Matrix out = a.value().unaryExpr([](double x) { return stable_sigmoid(x); });
  return a.tape().record(std::move(out), {a}, [ia](Tape& tp, std::int32_t self) {
    const Matrix& y = tp.value(self);
    tp.grad_buffer(ia).array() += tp.grad(self).array() * y.array() * (1.0 - y.array());
  });
}

Var exp(Var a) {
  const auto ia = a.id();
  Matrix out = a.value().array().exp();
  return a.tape().record(std::move(out), {a}, [ia](Tape& tp, std::int32_t self) {
    tp.grad_buffer(ia).array() += tp.grad(self).array() * tp.value(self).array();
  });
}

Var log(Var a) {
  const auto ia = a.id();
  Matrix out = a.value().array().log();
  return a.tape().record(std::move(out), {a}, [ia](Tape& tp, std::int32_t self) {
    tp.grad_buffer(ia).array() += tp.grad(self).array() / tp.value(ia).array();
  });
}

Var relu(Var a) {
  const auto ia = a.id();
  Matrix out = a.value().cwiseMax(0.0);
  return a.tape().record(std::move(out), {a}, [ia](Tape& tp, std::int32_t self) {
    tp.grad_buffer(ia).array() +=
        (tp.value(ia).array() > 0.0).select(tp.grad(self).array(), 0.0);
  });
}

Var softplus(Var a) {
  const auto ia = a.id();
  Matrix out = a.value().unaryExpr([](double x) { return stable_softplus(x); });
  return a.tape().record(std::move(out), {a}, [ia](Tape& tp, std::int32_t self) {
    const Matrix s = tp.value(ia).unaryExpr([](double x) { return stable_sigmoid(x); });
    tp.grad_buffer(ia).array() += tp.grad(self).array() * s.array();
  });
}

Var square(Var a) {
  const auto ia = a.id();
  Matrix out = a.value().array().square();
  return a.tape().record(std::move(out), {a}, [ia](Tape& tp, std::int32_t self) {
    tp.grad_buffer(ia).array() += 2.0 * tp.grad(self).array() * tp.value(ia).array();
  });
}

Var softmax(Var a, Axis axis) {
  const Matrix& x = a.value();
  Matrix y(x.rows(), x.cols());
  const double ninf = -std::numeric_limits<double>::infinity();
  auto normalize = [&](auto in, auto out) {
    const double mx = in.maxCoeff();
    if (mx == ninf) throw std::domain_error("softmax: every entry is masked");
    double z = 0.0;
    for (Eigen::Index k = 0; k < in.size(); ++k) {
      const double e = in(k) == ninf ? 0.0 : std::exp(in(k) - mx);
      out(k) = e;
      z += e;
    }
    out /= z;
  };
  if (axis == Axis::kCols) {
    for (Eigen::Index r = 0; r < x.rows(); ++r) normalize(x.row(r), y.row(r));
  } else {
    for (Eigen::Index c = 0; c < x.cols(); ++c) normalize(x.col(c), y.col(c));
  }
  const auto ia = a.id();
  return a.tape().record(std::move(y), {a}, [ia, axis](Tape& tp, std::int32_t self) {
    const Matrix& yv = tp.value(self);
    const Matrix gy = tp.grad(self).cwiseProduct(yv);
    Matrix& ga = tp.grad_buffer(ia);
    if (axis == Axis::kCols) {
      const Eigen::VectorXd dot = gy.rowwise().sum();
      ga += gy - (yv.array().colwise() * dot.array()).matrix();
    } else {
      const Eigen::RowVectorXd dot = gy.colwise().sum();
      ga += gy - (yv.array().rowwise() * dot.array()).matrix();
    }
  });
}

Var logsumexp(Var a) {
  const Matrix& x = a.value();
  const double mx = x.maxCoeff();
  Matrix out(1, 1);
  if (!std::isfinite(mx)) {
    out(0, 0) = mx;
  } else {
    out(0, 0) = mx + std::log((x.array() - mx).exp().sum());
  }
  const auto ia = a.id();
  return a.tape().record(std::move(out), {a}, [ia](Tape& tp, std::int32_t self) {
    const double lse = tp.value(self)(0, 0);
    const double g = tp.grad(self)(0, 0);
    tp.grad_buffer(ia).array() += g * (tp.value(ia).array() - lse).exp();
  });
}

Var sum(Var a) {
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  const auto ia = a.id();
  return a.tape().record(std::move(out), {a}, [ia](Tape& tp, std::int32_t self) {
    tp.grad_buffer(ia).array() += tp.grad(self)(0, 0);
  });
}

Var mean(Var a) {
  const double n = static_cast<double>(a.value().size());
  if (n == 0) throw ShapeError("mean: empty tensor");
  Matrix out(1, 1);
  out(0, 0) = a.value().sum() / n;
  const auto ia = a.id();
  return a.tape().record(std::move(out), {a}, [ia, n](Tape& tp, std::int32_t self) {
    tp.grad_buffer(ia).array() += tp.grad(self)(0, 0) / n;
  });
}

Var mean_rows(Var a) {
  const double n = static_cast<double>(a.rows());
  if (n == 0) throw ShapeError("mean_rows: no rows");
  Matrix out = a.value().colwise().sum() / n;
  const auto ia = a.id();
  return a.tape().record(std::move(out), {a}, [ia, n](Tape& tp, std::int32_t self) {
    Matrix& ga = tp.grad_buffer(ia);
    ga.rowwise() += tp.grad(self).row(0) / n;
  });
}

Var sum_cols(Var a) {
  Matrix out = a.value().rowwise().sum();
  const auto ia = a.id();
  return a.tape().record(std::move(out), {a}, [ia](Tape& tp, std::int32_t self) {
    Matrix& ga = tp.grad_buffer(ia);
    ga.colwise() += tp.grad(self).col(0);
  });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no inputs");
  const Eigen::Index rows = parts[0].rows();
  Eigen::Index cols = 0;
  for (const Var& p : parts) {
    if (p.rows() != rows) shape_fail("concat_cols", parts[0].value(), p.value());
    cols += p.cols();
  }
  Matrix out(rows, cols);
  std::vector<std::pair<std::int32_t, Eigen::Index>> spans;
  Eigen::Index at = 0;
  for (const Var& p : parts) {
    out.middleCols(at, p.cols()) = p.value();
    spans.emplace_back(p.id(), p.cols());
    at += p.cols();
  }
  return parts[0].tape().record(
      std::move(out), parts, [spans = std::move(spans)](Tape& tp, std::int32_t self) {
        const Matrix& g = tp.grad(self);
        Eigen::Index off = 0;
        for (const auto& [id, w] : spans) {
          if (tp.requires_grad(id)) tp.grad_buffer(id) += g.middleCols(off, w);
          off += w;
        }
      });
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no inputs");
  const Eigen::Index cols = parts[0].cols();
  Eigen::Index rows = 0;
  for (const Var& p : parts) {
    if (p.cols() != cols) shape_fail("concat_rows", parts[0].value(), p.value());
    rows += p.rows();
  }
  Matrix out(rows, cols);
  std::vector<std::pair<std::int32_t, Eigen::Index>> spans;
  Eigen::Index at = 0;
  for (const Var& p : parts) {
    out.middleRows(at, p.rows()) = p.value();
    spans.emplace_back(p.id(), p.rows());
    at += p.rows();
  }
  return parts[0].tape().record(
      std::move(out), parts, [spans = std::move(spans)](Tape& tp, std::int32_t self) {
        const Matrix& g = tp.grad(self);
        Eigen::Index off = 0;
        for (const auto& [id, h] : spans) {
          if (tp.requires_grad(id)) tp.grad_buffer(id) += g.middleRows(off, h);
          off += h;
        }
      });
}

Var slice_rows(Var a, Eigen::Index begin, Eigen::Index count) {
  if (begin < 0 || count < 0 || begin + count > a.rows())
    throw ShapeError("slice_rows: range out of bounds");
  Matrix out = a.value().middleRows(begin, count);
  const auto ia = a.id();
  return a.tape().record(std::move(out), {a}, [ia, begin, count](Tape& tp, std::int32_t self) {
    tp.grad_buffer(ia).middleRows(begin, count) += tp.grad(self);
  });
}

Var slice_cols(Var a, Eigen::Index begin, Eigen::Index count) {
  if (begin < 0 || count < 0 || begin + count > a.cols())
    throw ShapeError("slice_cols: range out of bounds");
  Matrix out = a.value().middleCols(begin, count);
  const auto ia = a.id();
  return a.tape().record(std::move(out), {a}, [ia, begin, count](Tape& tp, std::int32_t self) {
    tp.grad_buffer(ia).middleCols(begin, count) += tp.grad(self);
  });
}

Var gather_rows(Var a, std::span<const Eigen::Index> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), a.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] < 0 || rows[k] >= a.rows())
      throw ShapeError("gather_rows: index " + std::to_string(rows[k]) +
                       " out of range for " + std::to_string(a.rows()) + " rows");
    out.row(static_cast<Eigen::Index>(k)) = a.value().row(rows[k]);
  }
  const auto ia = a.id();
  std::vector<Eigen::Index> idx(rows.begin(), rows.end());
  return a.tape().record(std::move(out), {a}, [ia, idx = std::move(idx)](Tape& tp, std::int32_t self) {
    const Matrix& g = tp.grad(self);
    Matrix& ga = tp.grad_buffer(ia);
    for (std::size_t k = 0; k < idx.size(); ++k) ga.row(idx[k]) += g.row(static_cast<Eigen::Index>(k));
  });
}

Var element(Var a, Eigen::Index r, Eigen::Index c) {
  if (r < 0 || c < 0 || r >= a.rows() || c >= a.cols())
    throw ShapeError("element: index out of range");
  Matrix out(1, 1);
  out(0, 0) = a.value()(r, c);
  const auto ia = a.id();
  return a.tape().record(std::move(out), {a}, [ia, r, c](Tape& tp, std::int32_t self) {
    tp.grad_buffer(ia)(r, c) += tp.grad(self)(0, 0);
  });
}

Var layer_norm(Var a, Var gain, Var bias, double eps) {
  Tape& t = tape_of(a, gain);
  tape_of(a, bias);
  const Matrix& x = a.value();
  const Eigen::Index c = x.cols();
  if (gain.rows() != 1 || gain.cols() != c) shape_fail("layer_norm", x, gain.value());
  if (bias.rows() != 1 || bias.cols() != c) shape_fail("layer_norm", x, bias.value());
  Matrix xhat(x.rows(), c);
  Eigen::VectorXd inv_std(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double mu = x.row(r).mean();
    const double var = (x.row(r).array() - mu).square().mean();
    inv_std(r) = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = (x.row(r).array() - mu) * inv_std(r);
  }
  Matrix out = (xhat.array().rowwise() * gain.value().row(0).array()).rowwise() +
               bias.value().row(0).array();
  const auto ia = a.id(), ig = gain.id(), ib = bias.id();
  return t.record(std::move(out), {a, gain, bias},
                  [ia, ig, ib, xhat = std::move(xhat), inv_std = std::move(inv_std)](
                      Tape& tp, std::int32_t self) {
                    const Matrix& g = tp.grad(self);
                    if (tp.requires_grad(ig))
                      tp.grad_buffer(ig) += g.cwiseProduct(xhat).colwise().sum();
                    if (tp.requires_grad(ib)) tp.grad_buffer(ib) += g.colwise().sum();
                    if (tp.requires_grad(ia)) {
                      const Matrix gx = g.array().rowwise() * tp.value(ig).row(0).array();
                      const double n = static_cast<double>(gx.cols());
                      Matrix& ga = tp.grad_buffer(ia);
                      for (Eigen::Index r = 0; r < gx.rows(); ++r) {
                        const double m1 = gx.row(r).sum() / n;
                        const double m2 = gx.row(r).cwiseProduct(xhat.row(r)).sum() / n;
                        ga.row(r).array() +=
                            inv_std(r) * (gx.row(r).array() - m1 - xhat.row(r).array() * m2);
                      }
                    }
                  });
}

// ---- optimizers -------------------------------------------------------------

void Sgd::step(std::span<Tensor* const> params) {
  for (Tensor* p : params) {
    if (!p->requires_grad) continue;
    if (p->grad.size() == p->value.size()) p->value -= lr_ * p->grad;
    p->zero_grad();
  }
}

void Adam::restore(std::int64_t steps, std::vector<Matrix> m, std::vector<Matrix> v) {
  t_ = steps;
  m_ = std::move(m);
  v_ = std::move(v);
}

void Adam::step(std::span<Tensor* const> params) {
  if (m_.size() != params.size()) {
    m_.clear();
    v_.clear();
    for (Tensor* p : params) {
      m_.push_back(Matrix::Zero(p->rows(), p->cols()));
      v_.push_back(Matrix::Zero(p->rows(), p->cols()));
    }
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor& p = *params[k];
    if (!p.requires_grad) continue;
    if (m_[k].rows() != p.rows() || m_[k].cols() != p.cols())
      throw ShapeError("adam: moment shape does not match parameter");
    if (p.grad.size() != p.value.size()) p.zero_grad();
    m_[k] = cfg_.beta1 * m_[k] + (1.0 - cfg_.beta1) * p.grad;
    v_[k] = cfg_.beta2 * v_[k] + (1.0 - cfg_.beta2) * p.grad.cwiseProduct(p.grad);
    p.value.array() -= cfg_.learning_rate * (m_[k].array() / bc1) /
                       ((v_[k].array() / bc2).sqrt() + cfg_.eps);
    p.zero_grad();
  }
}

}  // namespace edgenet::ng
