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

// Reverse-mode automatic differentiation over dense row-major matrices.
//
// A Tape records every primitive evaluated during one forward pass. Vars are
// cheap handles into the tape. Persistent weights live in Tensors; binding a
// Tensor to a tape with Tape::param() makes backward() accumulate dLoss/dW
// into Tensor::grad.
//
// One tape per forward pass: backward() may run once per tape.

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace edgenet::ng {

using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class TapeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A persistent value with an optional gradient buffer of identical shape.
struct Tensor {
  Matrix value;
  Matrix grad;
  bool requires_grad = true;

  Tensor() = default;
  Tensor(Eigen::Index rows, Eigen::Index cols, bool requires_grad = true);
  explicit Tensor(Matrix v, bool requires_grad = true);

  Eigen::Index rows() const { return value.rows(); }
  Eigen::Index cols() const { return value.cols(); }
  Eigen::Index size() const { return value.size(); }
  void zero_grad();
};

class Tape;

class Var {
 public:
  Var() = default;
  Var(Tape* tape, std::int32_t id) : tape_(tape), id_(id) {}

  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  double scalar() const;
  bool requires_grad() const;

  Tape& tape() const { return *tape_; }
  std::int32_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  Tape* tape_ = nullptr;
  std::int32_t id_ = -1;
};

class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::int32_t self)>;

  // With record_gradients = false, bound tensors are treated as constants and
  // no backward closures are kept (inference mode).
  explicit Tape(bool record_gradients = true) : record_(record_gradients) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  Var constant(double value);
  // Leaf bound to t. If t.requires_grad, backward() adds into t.grad.
  Var param(Tensor& t);

  // Records a node. `inputs` determine whether the node needs a gradient; the
  // backward closure is dropped when none of them do.
  Var record(Matrix value, std::initializer_list<Var> inputs, BackwardFn fn);
  Var record(Matrix value, std::span<const Var> inputs, BackwardFn fn);

  void backward(Var loss);
  bool backward_done() const { return backward_done_; }
  std::size_t size() const { return nodes_.size(); }

  const Matrix& value(std::int32_t id) const { return nodes_[id].value; }
  bool requires_grad(std::int32_t id) const { return nodes_[id].requires_grad; }
  const Matrix& grad(std::int32_t id) const { return nodes_[id].grad; }
  // Gradient buffer of `id`, zero-initialized on first access.
  Matrix& grad_buffer(std::int32_t id);

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    BackwardFn backward;
    Tensor* bound = nullptr;
    bool requires_grad = false;
  };
  std::vector<Node> nodes_;
  bool record_ = true;
  bool backward_done_ = false;
};

// ---- primitives -----------------------------------------------------------

Var matmul(Var a, Var b);
Var transpose(Var a);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);          // elementwise
Var add_row(Var a, Var row);    // row (1 x c) added to every row of a (r x c)
Var mul_row(Var a, Var row);    // row (1 x c) multiplied into every row of a
Var add_col(Var a, Var col);    // col (r x 1) added to every column of a
Var scale(Var a, double s);
Var scale_by(Var a, Var s);     // s is 1 x 1
Var add_scalar(Var a, double s);
Var neg(Var a);

Var tanh(Var a);
Var sigmoid(Var a);
Var exp(Var a);
Var log(Var a);
Var relu(Var a);
Var softplus(Var a);
Var square(Var a);

enum class Axis { kRows, kCols };
// Softmax along `axis`: kCols normalizes each row (over its columns), kRows
// normalizes each column. -inf entries receive probability exactly 0.
Var softmax(Var a, Axis axis);
Var logsumexp(Var a);           // over all entries, 1 x 1

Var sum(Var a);                 // 1 x 1
Var mean(Var a);                // 1 x 1
Var mean_rows(Var a);           // average of the rows, 1 x c
Var sum_cols(Var a);            // row sums, r x 1

Var concat_cols(std::span<const Var> parts);
Var concat_rows(std::span<const Var> parts);
Var slice_rows(Var a, Eigen::Index begin, Eigen::Index count);
Var slice_cols(Var a, Eigen::Index begin, Eigen::Index count);
Var gather_rows(Var a, std::span<const Eigen::Index> rows);  // embedding lookup
Var element(Var a, Eigen::Index r, Eigen::Index c);

// Per-row layer normalization followed by elementwise gain and bias (1 x c).
Var layer_norm(Var a, Var gain, Var bias, double eps = 1e-5);

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator-(Var a) { return neg(a); }

// ---- optimizers -----------------------------------------------------------

struct NamedTensor {
  std::string name;
  Tensor* tensor;
};

class Optimizer {
 public:
  virtual ~Optimizer() = default;
  // Applies one update from each tensor's grad and clears the grads.
  virtual void step(std::span<Tensor* const> params) = 0;
};

class Sgd final : public Optimizer {
 public:
  explicit Sgd(double learning_rate) : lr_(learning_rate) {}
  void step(std::span<Tensor* const> params) override;

 private:
  double lr_;
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam final : public Optimizer {
 public:
  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}
  void step(std::span<Tensor* const> params) override;

  std::int64_t steps_taken() const { return t_; }
  // Moment buffers, aligned with the params passed to step().
  std::vector<Matrix>& first_moments() { return m_; }
  std::vector<Matrix>& second_moments() { return v_; }
  const std::vector<Matrix>& first_moments() const { return m_; }
  const std::vector<Matrix>& second_moments() const { return v_; }
  void restore(std::int64_t steps, std::vector<Matrix> m, std::vector<Matrix> v);
  void set_learning_rate(double lr) { cfg_.learning_rate = lr; }

 private:
  AdamConfig cfg_;
  std::int64_t t_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

}  // namespace edgenet::ng
