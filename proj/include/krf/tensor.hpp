#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "krf/rng.hpp"

namespace krf {

namespace detail {
struct TensorData {
  std::vector<std::size_t> shape;
  std::vector<double> value;
  std::vector<double> grad;  // sized like value once requires_grad is set
  bool requires_grad = false;
};
}  // namespace detail

// Dense row-major tensor of 64-bit floats. A Tensor is a shared handle: ops
// return new handles, parameters are shared between the model registry and
// the tapes that consume them. Values are treated as immutable once an op has
// produced them; only `grad` accumulates, and only through Tape::backward.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::vector<std::size_t> shape);
  static Tensor full(std::vector<std::size_t> shape, double v);
  static Tensor from(std::vector<std::size_t> shape, std::vector<double> data);
  static Tensor scalar(double v);
  // Entries i.i.d. uniform in [lo, hi).
  static Tensor uniform(std::vector<std::size_t> shape, Rng& rng, double lo,
                        double hi, bool requires_grad = false);
  // Square orthogonal matrix from QR of a random Gaussian matrix.
  static Tensor orthogonal(std::size_t n, Rng& rng, bool requires_grad = false);

  bool defined() const { return d_ != nullptr; }

  const std::vector<std::size_t>& shape() const { return d_->shape; }
  std::size_t rank() const { return d_->shape.size(); }
  std::size_t numel() const { return d_->value.size(); }
  bool is_scalar() const { return numel() == 1; }

  // 2-D accessors; throw on rank mismatch.
  std::size_t rows() const;
  std::size_t cols() const;

  std::vector<double>& data() { return d_->value; }
  const std::vector<double>& data() const { return d_->value; }
  double item() const;  // requires numel() == 1
  double at(std::size_t i) const { return d_->value[i]; }
  double at(std::size_t i, std::size_t j) const;

  bool requires_grad() const { return d_->requires_grad; }
  void set_requires_grad(bool v);
  std::vector<double>& grad() { return d_->grad; }
  const std::vector<double>& grad() const { return d_->grad; }
  void zero_grad();

  // Deep value copy with no gradient participation.
  Tensor detached_copy() const;

  bool all_finite() const;

  // Identity of the underlying storage (for registry uniqueness checks).
  const void* id() const { return d_.get(); }

  std::string shape_str() const;

 private:
  explicit Tensor(std::shared_ptr<detail::TensorData> d) : d_(std::move(d)) {}
  std::shared_ptr<detail::TensorData> d_;
  friend class Tape;
};

// Ordered record of executed operations. Each op that touches a tensor with
// requires_grad appends one backward closure; backward() replays them in
// strict reverse execution order exactly once, accumulating into the `grad`
// buffers of the involved tensors. A tape is single-threaded and is meant to
// live for one forward/backward pass.
class Tape {
 public:
  // recording=false computes values only; useful for inference and finite
  // differences where no backward pass will run.
  explicit Tape(bool recording = true) : recording_(recording) {}

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // ---- linear algebra ----
  Tensor matmul(const Tensor& a, const Tensor& b);
  Tensor transpose(const Tensor& a);

  // ---- pointwise binary; equal shapes or one operand scalar ----
  Tensor add(const Tensor& a, const Tensor& b);
  Tensor sub(const Tensor& a, const Tensor& b);
  Tensor mul(const Tensor& a, const Tensor& b);
  Tensor add(const Tensor& a, double s);
  Tensor sub(const Tensor& a, double s);
  Tensor sub(double s, const Tensor& a);
  Tensor mul(const Tensor& a, double s);

  // ---- pointwise unary ----
  Tensor tanh(const Tensor& a);
  Tensor sigmoid(const Tensor& a);
  Tensor relu(const Tensor& a);
  Tensor leaky_relu(const Tensor& a, double negative_slope);
  Tensor exp(const Tensor& a);
  Tensor log(const Tensor& a);  // domain error on entries <= 0

  // ---- shape ops ----
  // axis 0 stacks rows (1-D or 2-D), axis 1 stacks columns (2-D).
  Tensor concat(const Tensor& a, const Tensor& b, std::size_t axis);
  Tensor concat(const std::vector<Tensor>& parts, std::size_t axis);
  Tensor slice_rows(const Tensor& a, std::size_t r0, std::size_t r1);
  Tensor slice_cols(const Tensor& a, std::size_t c0, std::size_t c1);
  // Row lookup: out[i, :] = table[index[i], :]. Backward scatter-adds.
  Tensor gather_rows(const Tensor& table, const std::vector<std::size_t>& index);

  // ---- reductions ----
  // Max-subtracted softmax along `axis` of a 1-D or 2-D tensor.
  Tensor softmax(const Tensor& a, std::size_t axis);
  Tensor sum(const Tensor& a);
  Tensor mean(const Tensor& a);

  // Mean over rows of the per-row sum of binary cross entropy between logits
  // and 0/1 targets, in the log-sum-exp stabilized form. `targets` must not
  // require grad.
  Tensor bce_with_logits(const Tensor& logits, const Tensor& targets);

  // Seeds d(loss)/d(loss)=1 and replays recorded ops in reverse. `loss` must
  // be scalar. May be called once per tape.
  void backward(const Tensor& loss);

  std::size_t op_count() const { return ops_.size(); }
  bool recording() const { return recording_; }

 private:
  enum class BinOp { kAdd, kSub, kMul };
  enum class UnOp { kTanh, kSigmoid, kRelu, kLeakyRelu, kExp, kLog };

  Tensor binary(const Tensor& a, const Tensor& b, BinOp op);
  Tensor unary(const Tensor& a, UnOp op, double slope = 0.0);
  Tensor make_output(std::vector<std::size_t> shape, bool requires_grad);
  void record(std::function<void()> fn) { ops_.push_back(std::move(fn)); }
  bool track(const Tensor& t) const { return recording_ && t.requires_grad(); }

  bool recording_;
  bool backward_done_ = false;
  std::vector<std::function<void()>> ops_;
};

// ---- gradient checking ----

struct GradCheckEntry {
  std::string name;
  double max_rel_err = 0.0;
  std::size_t worst_index = 0;
  double analytic = 0.0;   // tape gradient at the worst entry
  double numeric = 0.0;    // central finite difference at the worst entry
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_rel_err = 0.0;
  bool passed(double tol) const { return max_rel_err < tol; }
};

// Compares the tape gradient of f (a deterministic scalar-valued function of
// the named parameters) against central finite differences
// (f(t+eps)-f(t-eps))/(2 eps) for every entry of every parameter. Relative
// error uses |a-n| / max(|a|, |n|, 1e-4); the floor keeps finite-difference
// roundoff on near-zero gradients from registering as disagreement. Throws
// NumericError if f produces a non-finite value.
GradCheckReport grad_check(const std::function<Tensor(Tape&)>& f,
                           const std::vector<std::pair<std::string, Tensor>>& params,
                           double eps);

}  // namespace krf
