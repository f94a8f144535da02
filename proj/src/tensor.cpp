#include "krf/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "krf/errors.hpp"

namespace krf {

namespace {

std::size_t shape_numel(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t s : shape) n *= s;
  return n;
}

std::string shape_to_str(const std::vector<std::size_t>& shape) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ",";
    os << shape[i];
  }
  os << ")";
  return os.str();
}

void check_positive_shape(const std::vector<std::size_t>& shape) {
  for (std::size_t s : shape) {
    if (s == 0) {
      throw std::invalid_argument("tensor shape has a zero dimension: " +
                                  shape_to_str(shape));
    }
  }
}

double stable_sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

// ---------------------------------------------------------------------------
// Tensor

Tensor Tensor::zeros(std::vector<std::size_t> shape) {
  check_positive_shape(shape);
  auto d = std::make_shared<detail::TensorData>();
  d->value.assign(shape_numel(shape), 0.0);
  d->shape = std::move(shape);
  return Tensor(std::move(d));
}

Tensor Tensor::full(std::vector<std::size_t> shape, double v) {
  Tensor t = zeros(std::move(shape));
  std::fill(t.data().begin(), t.data().end(), v);
  return t;
}

Tensor Tensor::from(std::vector<std::size_t> shape, std::vector<double> data) {
  check_positive_shape(shape);
  if (shape_numel(shape) != data.size()) {
    throw std::invalid_argument("tensor data length " +
                                std::to_string(data.size()) +
                                " does not match shape " + shape_to_str(shape));
  }
  auto d = std::make_shared<detail::TensorData>();
  d->shape = std::move(shape);
  d->value = std::move(data);
  return Tensor(std::move(d));
}

Tensor Tensor::scalar(double v) { return from({1}, {v}); }

Tensor Tensor::uniform(std::vector<std::size_t> shape, Rng& rng, double lo,
                       double hi, bool requires_grad) {
  Tensor t = zeros(std::move(shape));
  for (double& x : t.data()) x = rng.uniform(lo, hi);
  t.set_requires_grad(requires_grad);
  return t;
}

Tensor Tensor::orthogonal(std::size_t n, Rng& rng, bool requires_grad) {
  // Modified Gram-Schmidt on a Gaussian matrix, columns as basis vectors.
  std::vector<std::vector<double>> q(n, std::vector<double>(n));
  for (auto& col : q) {
    for (double& x : col) x = rng.normal();
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += q[k][i] * q[j][i];
      for (std::size_t i = 0; i < n; ++i) q[j][i] -= dot * q[k][i];
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += q[j][i] * q[j][i];
    norm = std::sqrt(norm);
    if (norm < 1e-12) {
      // Degenerate draw; fall back to a unit basis vector.
      std::fill(q[j].begin(), q[j].end(), 0.0);
      q[j][j % n] = 1.0;
    } else {
      for (std::size_t i = 0; i < n; ++i) q[j][i] /= norm;
    }
  }
  Tensor t = zeros({n, n});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) t.data()[i * n + j] = q[j][i];
  }
  t.set_requires_grad(requires_grad);
  return t;
}

std::size_t Tensor::rows() const {
  if (rank() != 2) {
    throw std::invalid_argument("rows() on tensor of shape " + shape_str());
  }
  return d_->shape[0];
}

std::size_t Tensor::cols() const {
  if (rank() != 2) {
    throw std::invalid_argument("cols() on tensor of shape " + shape_str());
  }
  return d_->shape[1];
}

double Tensor::item() const {
  if (numel() != 1) {
    throw std::invalid_argument("item() on non-scalar tensor of shape " +
                                shape_str());
  }
  return d_->value[0];
}

double Tensor::at(std::size_t i, std::size_t j) const {
  return d_->value[i * cols() + j];
}

void Tensor::set_requires_grad(bool v) {
  d_->requires_grad = v;
  if (v && d_->grad.size() != d_->value.size()) {
    d_->grad.assign(d_->value.size(), 0.0);
  }
  if (!v) d_->grad.clear();
}

void Tensor::zero_grad() {
  std::fill(d_->grad.begin(), d_->grad.end(), 0.0);
}

Tensor Tensor::detached_copy() const {
  auto d = std::make_shared<detail::TensorData>();
  d->shape = d_->shape;
  d->value = d_->value;
  return Tensor(std::move(d));
}

bool Tensor::all_finite() const {
  for (double x : d_->value) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

std::string Tensor::shape_str() const { return shape_to_str(d_->shape); }

// ---------------------------------------------------------------------------
// Tape

Tensor Tape::make_output(std::vector<std::size_t> shape, bool requires_grad) {
  Tensor out = Tensor::zeros(std::move(shape));
  if (recording_ && requires_grad) out.set_requires_grad(true);
  return out;
}

Tensor Tape::matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.cols() != b.rows()) {
    throw std::invalid_argument("matmul dimension mismatch: " + a.shape_str() +
                                " x " + b.shape_str());
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  Tensor out = make_output({m, n}, a.requires_grad() || b.requires_grad());
  const double* av = a.data().data();
  const double* bv = b.data().data();
  double* ov = out.data().data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = av[i * k + p];
      const double* brow = bv + p * n;
      double* orow = ov + i * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += aip * brow[j];
    }
  }
  if (track(a) || track(b)) {
    record([a, b, out, m, k, n] {
      const std::vector<double>& go = out.grad();
      if (a.requires_grad()) {
        // dA += dC . B^T
        std::vector<double>& ga = const_cast<Tensor&>(a).grad();
        const double* bv = b.data().data();
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t p = 0; p < k; ++p) {
            double acc = 0.0;
            const double* grow = go.data() + i * n;
            const double* brow = bv + p * n;
            for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
            ga[i * k + p] += acc;
          }
        }
      }
      if (b.requires_grad()) {
        // dB += A^T . dC
        std::vector<double>& gb = const_cast<Tensor&>(b).grad();
        const double* av = a.data().data();
        for (std::size_t i = 0; i < m; ++i) {
          const double* grow = go.data() + i * n;
          for (std::size_t p = 0; p < k; ++p) {
            const double aip = av[i * k + p];
            double* gbrow = gb.data() + p * n;
            for (std::size_t j = 0; j < n; ++j) gbrow[j] += aip * grow[j];
          }
        }
      }
    });
  }
  return out;
}

Tensor Tape::transpose(const Tensor& a) {
  if (a.rank() != 2) {
    throw std::invalid_argument("transpose expects a matrix, got " +
                                a.shape_str());
  }
  const std::size_t m = a.rows(), n = a.cols();
  Tensor out = make_output({n, m}, a.requires_grad());
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out.data()[j * m + i] = a.data()[i * n + j];
    }
  }
  if (track(a)) {
    record([a, out, m, n] {
      std::vector<double>& ga = const_cast<Tensor&>(a).grad();
      const std::vector<double>& go = out.grad();
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) ga[i * n + j] += go[j * m + i];
      }
    });
  }
  return out;
}

Tensor Tape::binary(const Tensor& a, const Tensor& b, BinOp op) {
  const bool a_scalar = a.is_scalar();
  const bool b_scalar = b.is_scalar();
  if (!a_scalar && !b_scalar && a.shape() != b.shape()) {
    throw std::invalid_argument(
        "elementwise op requires equal shapes or a scalar operand, got " +
        a.shape_str() + " and " + b.shape_str());
  }
  const Tensor& shaped = a_scalar ? b : a;
  const std::size_t n = shaped.numel();
  Tensor out = make_output(shaped.shape(), a.requires_grad() || b.requires_grad());
  const double* av = a.data().data();
  const double* bv = b.data().data();
  double* ov = out.data().data();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = av[a_scalar ? 0 : i];
    const double y = bv[b_scalar ? 0 : i];
    switch (op) {
      case BinOp::kAdd: ov[i] = x + y; break;
      case BinOp::kSub: ov[i] = x - y; break;
      case BinOp::kMul: ov[i] = x * y; break;
    }
  }
  if (track(a) || track(b)) {
    record([a, b, out, op, a_scalar, b_scalar, n] {
      const std::vector<double>& go = out.grad();
      if (a.requires_grad()) {
        std::vector<double>& ga = const_cast<Tensor&>(a).grad();
        for (std::size_t i = 0; i < n; ++i) {
          double g = go[i];
          if (op == BinOp::kMul) g *= b.data()[b_scalar ? 0 : i];
          ga[a_scalar ? 0 : i] += g;
        }
      }
      if (b.requires_grad()) {
        std::vector<double>& gb = const_cast<Tensor&>(b).grad();
        for (std::size_t i = 0; i < n; ++i) {
          double g = go[i];
          if (op == BinOp::kMul) g *= a.data()[a_scalar ? 0 : i];
          if (op == BinOp::kSub) g = -g;
          gb[b_scalar ? 0 : i] += g;
        }
      }
    });
  }
  return out;
}

Tensor Tape::add(const Tensor& a, const Tensor& b) { return binary(a, b, BinOp::kAdd); }
Tensor Tape::sub(const Tensor& a, const Tensor& b) { return binary(a, b, BinOp::kSub); }
Tensor Tape::mul(const Tensor& a, const Tensor& b) { return binary(a, b, BinOp::kMul); }
Tensor Tape::add(const Tensor& a, double s) { return binary(a, Tensor::scalar(s), BinOp::kAdd); }
Tensor Tape::sub(const Tensor& a, double s) { return binary(a, Tensor::scalar(s), BinOp::kSub); }
Tensor Tape::sub(double s, const Tensor& a) { return binary(Tensor::scalar(s), a, BinOp::kSub); }
Tensor Tape::mul(const Tensor& a, double s) { return binary(a, Tensor::scalar(s), BinOp::kMul); }

Tensor Tape::unary(const Tensor& a, UnOp op, double slope) {
  const std::size_t n = a.numel();
  Tensor out = make_output(a.shape(), a.requires_grad());
  const double* av = a.data().data();
  double* ov = out.data().data();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = av[i];
    switch (op) {
      case UnOp::kTanh: ov[i] = std::tanh(x); break;
      case UnOp::kSigmoid: ov[i] = stable_sigmoid(x); break;
      case UnOp::kRelu: ov[i] = x > 0.0 ? x : 0.0; break;
      case UnOp::kLeakyRelu: ov[i] = x > 0.0 ? x : slope * x; break;
      case UnOp::kExp: ov[i] = std::exp(x); break;
      case UnOp::kLog:
        if (x <= 0.0) {
          throw std::domain_error("log of non-positive value " +
                                  std::to_string(x));
        }
        ov[i] = std::log(x);
        break;
    }
  }
  if (track(a)) {
    record([a, out, op, slope, n] {
      std::vector<double>& ga = const_cast<Tensor&>(a).grad();
      const std::vector<double>& go = out.grad();
      for (std::size_t i = 0; i < n; ++i) {
        const double x = a.data()[i];
        const double y = out.data()[i];
        double d = 0.0;
        switch (op) {
          case UnOp::kTanh: d = 1.0 - y * y; break;
          case UnOp::kSigmoid: d = y * (1.0 - y); break;
          case UnOp::kRelu: d = x > 0.0 ? 1.0 : 0.0; break;
          case UnOp::kLeakyRelu: d = x > 0.0 ? 1.0 : slope; break;
          case UnOp::kExp: d = y; break;
          case UnOp::kLog: d = 1.0 / x; break;
        }
        ga[i] += d * go[i];
      }
    });
  }
  return out;
}

Tensor Tape::tanh(const Tensor& a) { return unary(a, UnOp::kTanh); }
Tensor Tape::sigmoid(const Tensor& a) { return unary(a, UnOp::kSigmoid); }
Tensor Tape::relu(const Tensor& a) { return unary(a, UnOp::kRelu); }
Tensor Tape::leaky_relu(const Tensor& a, double negative_slope) {
  return unary(a, UnOp::kLeakyRelu, negative_slope);
}
Tensor Tape::exp(const Tensor& a) { return unary(a, UnOp::kExp); }
Tensor Tape::log(const Tensor& a) { return unary(a, UnOp::kLog); }

Tensor Tape::concat(const Tensor& a, const Tensor& b, std::size_t axis) {
  return concat(std::vector<Tensor>{a, b}, axis);
}

Tensor Tape::concat(const std::vector<Tensor>& parts, std::size_t axis) {
  if (parts.empty()) {
    throw std::invalid_argument("concat of zero tensors");
  }
  const std::size_t rank = parts.front().rank();
  if (rank != 1 && rank != 2) {
    throw std::invalid_argument("concat supports 1-D and 2-D tensors, got " +
                                parts.front().shape_str());
  }
  if (axis >= rank) {
    throw std::invalid_argument("concat axis " + std::to_string(axis) +
                                " out of range for " + parts.front().shape_str());
  }
  bool needs_grad = false;
  std::size_t concat_dim = 0;
  for (const Tensor& p : parts) {
    if (p.rank() != rank) {
      throw std::invalid_argument("concat rank mismatch: " +
                                  parts.front().shape_str() + " vs " +
                                  p.shape_str());
    }
    for (std::size_t d = 0; d < rank; ++d) {
      if (d != axis && p.shape()[d] != parts.front().shape()[d]) {
        throw std::invalid_argument("concat shape mismatch on axis " +
                                    std::to_string(d) + ": " +
                                    parts.front().shape_str() + " vs " +
                                    p.shape_str());
      }
    }
    concat_dim += p.shape()[axis];
    needs_grad = needs_grad || p.requires_grad();
  }

  std::vector<std::size_t> out_shape = parts.front().shape();
  out_shape[axis] = concat_dim;
  Tensor out = make_output(out_shape, needs_grad);

  const std::size_t out_cols = rank == 2 ? out_shape[1] : 1;
  std::size_t offset = 0;  // running offset along the concat axis
  std::vector<std::size_t> offsets(parts.size());
  for (std::size_t pi = 0; pi < parts.size(); ++pi) {
    offsets[pi] = offset;
    const Tensor& p = parts[pi];
    const std::size_t prows = p.shape()[0];
    const std::size_t pcols = rank == 2 ? p.shape()[1] : 1;
    if (axis == 0) {
      std::copy(p.data().begin(), p.data().end(),
                out.data().begin() + offset * out_cols);
    } else {
      for (std::size_t r = 0; r < prows; ++r) {
        std::copy(p.data().begin() + r * pcols,
                  p.data().begin() + (r + 1) * pcols,
                  out.data().begin() + r * out_cols + offset);
      }
    }
    offset += p.shape()[axis];
  }

  if (recording_ && needs_grad) {
    record([parts, out, offsets, axis, rank, out_cols] {
      const std::vector<double>& go = out.grad();
      for (std::size_t pi = 0; pi < parts.size(); ++pi) {
        const Tensor& p = parts[pi];
        if (!p.requires_grad()) continue;
        std::vector<double>& gp = const_cast<Tensor&>(p).grad();
        const std::size_t prows = p.shape()[0];
        const std::size_t pcols = rank == 2 ? p.shape()[1] : 1;
        if (axis == 0) {
          const std::size_t base = offsets[pi] * out_cols;
          for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += go[base + i];
        } else {
          for (std::size_t r = 0; r < prows; ++r) {
            for (std::size_t c = 0; c < pcols; ++c) {
              gp[r * pcols + c] += go[r * out_cols + offsets[pi] + c];
            }
          }
        }
      }
    });
  }
  return out;
}

Tensor Tape::slice_rows(const Tensor& a, std::size_t r0, std::size_t r1) {
  if (a.rank() != 2 || r0 >= r1 || r1 > a.rows()) {
    throw std::invalid_argument("slice_rows [" + std::to_string(r0) + "," +
                                std::to_string(r1) + ") invalid for " +
                                a.shape_str());
  }
  const std::size_t n = a.cols();
  Tensor out = make_output({r1 - r0, n}, a.requires_grad());
  std::copy(a.data().begin() + r0 * n, a.data().begin() + r1 * n,
            out.data().begin());
  if (track(a)) {
    record([a, out, r0, n] {
      std::vector<double>& ga = const_cast<Tensor&>(a).grad();
      const std::vector<double>& go = out.grad();
      for (std::size_t i = 0; i < go.size(); ++i) ga[r0 * n + i] += go[i];
    });
  }
  return out;
}

Tensor Tape::slice_cols(const Tensor& a, std::size_t c0, std::size_t c1) {
  if (a.rank() != 2 || c0 >= c1 || c1 > a.cols()) {
    throw std::invalid_argument("slice_cols [" + std::to_string(c0) + "," +
                                std::to_string(c1) + ") invalid for " +
                                a.shape_str());
  }
  const std::size_t m = a.rows(), n = a.cols(), w = c1 - c0;
  Tensor out = make_output({m, w}, a.requires_grad());
  for (std::size_t r = 0; r < m; ++r) {
    std::copy(a.data().begin() + r * n + c0, a.data().begin() + r * n + c1,
              out.data().begin() + r * w);
  }
  if (track(a)) {
    record([a, out, c0, m, n, w] {
      std::vector<double>& ga = const_cast<Tensor&>(a).grad();
      const std::vector<double>& go = out.grad();
      for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
          ga[r * n + c0 + c] += go[r * w + c];
        }
      }
    });
  }
  return out;
}

Tensor Tape::gather_rows(const Tensor& table,
                         const std::vector<std::size_t>& index) {
  if (table.rank() != 2) {
    throw std::invalid_argument("gather_rows expects a matrix, got " +
                                table.shape_str());
  }
  if (index.empty()) {
    throw std::invalid_argument("gather_rows with empty index");
  }
  const std::size_t n = table.cols();
  for (std::size_t ix : index) {
    if (ix >= table.rows()) {
      throw std::invalid_argument("gather_rows index " + std::to_string(ix) +
                                  " out of range for " + table.shape_str());
    }
  }
  Tensor out = make_output({index.size(), n}, table.requires_grad());
  for (std::size_t r = 0; r < index.size(); ++r) {
    std::copy(table.data().begin() + index[r] * n,
              table.data().begin() + (index[r] + 1) * n,
              out.data().begin() + r * n);
  }
  if (track(table)) {
    record([table, out, index, n] {
      std::vector<double>& gt = const_cast<Tensor&>(table).grad();
      const std::vector<double>& go = out.grad();
      for (std::size_t r = 0; r < index.size(); ++r) {
        for (std::size_t c = 0; c < n; ++c) {
          gt[index[r] * n + c] += go[r * n + c];
        }
      }
    });
  }
  return out;
}

Tensor Tape::softmax(const Tensor& a, std::size_t axis) {
  if (a.rank() != 1 && a.rank() != 2) {
    throw std::invalid_argument("softmax supports 1-D and 2-D tensors, got " +
                                a.shape_str());
  }
  if (axis >= a.rank()) {
    throw std::invalid_argument("softmax axis " + std::to_string(axis) +
                                " out of range for " + a.shape_str());
  }
  // Treat 1-D as a single row; axis selects rows (1) or columns (0) of 2-D.
  const bool row_wise = (a.rank() == 1) || (axis == 1);
  const std::size_t rows = a.rank() == 2 ? a.shape()[0] : 1;
  const std::size_t cols = a.rank() == 2 ? a.shape()[1] : a.shape()[0];
  Tensor out = make_output(a.shape(), a.requires_grad());

  const std::size_t lanes = row_wise ? rows : cols;
  const std::size_t len = row_wise ? cols : rows;
  auto idx = [row_wise, cols](std::size_t lane, std::size_t k) {
    return row_wise ? lane * cols + k : k * cols + lane;
  };
  for (std::size_t lane = 0; lane < lanes; ++lane) {
    double mx = a.data()[idx(lane, 0)];
    for (std::size_t k = 1; k < len; ++k) mx = std::max(mx, a.data()[idx(lane, k)]);
    double z = 0.0;
    for (std::size_t k = 0; k < len; ++k) {
      const double e = std::exp(a.data()[idx(lane, k)] - mx);
      out.data()[idx(lane, k)] = e;
      z += e;
    }
    for (std::size_t k = 0; k < len; ++k) out.data()[idx(lane, k)] /= z;
  }
  if (track(a)) {
    record([a, out, lanes, len, idx] {
      std::vector<double>& ga = const_cast<Tensor&>(a).grad();
      const std::vector<double>& go = out.grad();
      for (std::size_t lane = 0; lane < lanes; ++lane) {
        double dot = 0.0;
        for (std::size_t k = 0; k < len; ++k) {
          dot += go[idx(lane, k)] * out.data()[idx(lane, k)];
        }
        for (std::size_t k = 0; k < len; ++k) {
          const double y = out.data()[idx(lane, k)];
          ga[idx(lane, k)] += y * (go[idx(lane, k)] - dot);
        }
      }
    });
  }
  return out;
}

Tensor Tape::sum(const Tensor& a) {
  Tensor out = make_output({1}, a.requires_grad());
  double acc = 0.0;
  for (double x : a.data()) acc += x;
  out.data()[0] = acc;
  if (track(a)) {
    record([a, out] {
      std::vector<double>& ga = const_cast<Tensor&>(a).grad();
      const double g = out.grad()[0];
      for (double& x : ga) x += g;
    });
  }
  return out;
}

Tensor Tape::mean(const Tensor& a) {
  const double inv = 1.0 / static_cast<double>(a.numel());
  return mul(sum(a), inv);
}

Tensor Tape::bce_with_logits(const Tensor& logits, const Tensor& targets) {
  if (logits.shape() != targets.shape() || logits.rank() != 2) {
    throw std::invalid_argument("bce_with_logits shape mismatch: " +
                                logits.shape_str() + " vs " +
                                targets.shape_str());
  }
  if (targets.requires_grad()) {
    throw std::invalid_argument("bce_with_logits targets must not require grad");
  }
  for (double y : targets.data()) {
    if (y != 0.0 && y != 1.0) {
      throw std::invalid_argument("bce_with_logits targets must be 0 or 1");
    }
  }
  const std::size_t rows = logits.rows();
  const std::size_t n = logits.numel();
  Tensor out = make_output({1}, logits.requires_grad());
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = logits.data()[i];
    const double y = targets.data()[i];
    // max(s,0) - s*y + log(1 + exp(-|s|))
    acc += std::max(s, 0.0) - s * y + std::log1p(std::exp(-std::abs(s)));
  }
  out.data()[0] = acc / static_cast<double>(rows);
  if (track(logits)) {
    record([logits, targets, out, rows, n] {
      std::vector<double>& gl = const_cast<Tensor&>(logits).grad();
      const double g = out.grad()[0] / static_cast<double>(rows);
      for (std::size_t i = 0; i < n; ++i) {
        gl[i] += g * (stable_sigmoid(logits.data()[i]) - targets.data()[i]);
      }
    });
  }
  return out;
}

void Tape::backward(const Tensor& loss) {
  if (!recording_) {
    throw std::logic_error("backward on a non-recording tape");
  }
  if (backward_done_) {
    throw std::logic_error("backward called twice on one tape");
  }
  if (loss.numel() != 1) {
    throw std::invalid_argument("backward expects a scalar loss, got " +
                                loss.shape_str());
  }
  backward_done_ = true;
  if (loss.requires_grad()) {
    const_cast<Tensor&>(loss).grad()[0] += 1.0;
  }
  for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) (*it)();
}

// ---------------------------------------------------------------------------
// Gradient checking

GradCheckReport grad_check(const std::function<Tensor(Tape&)>& f,
                           const std::vector<std::pair<std::string, Tensor>>& params,
                           double eps) {
  if (eps <= 0.0) {
    throw std::invalid_argument("grad_check eps must be positive");
  }
  for (const auto& [name, p] : params) const_cast<Tensor&>(p).zero_grad();

  Tape tape;
  Tensor loss = f(tape);
  if (!std::isfinite(loss.item())) {
    throw NumericError("gradient check aborted: loss is non-finite");
  }
  tape.backward(loss);

  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (const auto& [name, p] : params) analytic.push_back(p.grad());

  GradCheckReport report;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Tensor p = params[pi].second;
    GradCheckEntry entry;
    entry.name = params[pi].first;
    for (std::size_t i = 0; i < p.numel(); ++i) {
      const double saved = p.data()[i];
      p.data()[i] = saved + eps;
      Tape tp(false);
      const double lp = f(tp).item();
      p.data()[i] = saved - eps;
      Tape tm(false);
      const double lm = f(tm).item();
      p.data()[i] = saved;
      if (!std::isfinite(lp) || !std::isfinite(lm)) {
        throw NumericError("gradient check aborted: perturbed loss is non-finite at " +
                           entry.name + "[" + std::to_string(i) + "]");
      }
      const double numeric = (lp - lm) / (2.0 * eps);
      const double a = analytic[pi][i];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-4});
      const double rel = std::abs(a - numeric) / denom;
      if (rel >= entry.max_rel_err) {
        entry.max_rel_err = rel;
        entry.worst_index = i;
        entry.analytic = a;
        entry.numeric = numeric;
      }
    }
    report.max_rel_err = std::max(report.max_rel_err, entry.max_rel_err);
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace krf
