#include "krf/gcn.hpp"

#include <cmath>

#include "krf/errors.hpp"

namespace krf {

GcnParams GcnParams::init(const GcnConfig& cfg, std::size_t n_labels, Rng& rng) {
  GcnParams p;
  p.h0 = Tensor::uniform({n_labels, cfg.label_dim}, rng, -0.1, 0.1, true);
  const double b1 = std::sqrt(6.0 / static_cast<double>(cfg.label_dim + cfg.hidden_dim));
  p.w1 = Tensor::uniform({cfg.label_dim, cfg.hidden_dim}, rng, -b1, b1, true);
  const double b2 = std::sqrt(6.0 / static_cast<double>(cfg.hidden_dim + cfg.out_dim));
  p.w2 = Tensor::uniform({cfg.hidden_dim, cfg.out_dim}, rng, -b2, b2, true);
  return p;
}

void GcnParams::append_named(const std::string& prefix,
                             std::vector<std::pair<std::string, Tensor>>& out) const {
  out.emplace_back(prefix + ".h0", h0);
  out.emplace_back(prefix + ".w1", w1);
  out.emplace_back(prefix + ".w2", w2);
}

Tensor gcn_layer(Tape& tape, const Tensor& a_integrated, const Tensor& h,
                 const Tensor& w, double leaky_slope) {
  if (a_integrated.rank() != 3 || a_integrated.shape()[0] != 2 ||
      a_integrated.shape()[1] != a_integrated.shape()[2]) {
    throw std::invalid_argument("gcn_layer expects a (2,|C|,|C|) tensor, got " +
                                a_integrated.shape_str());
  }
  const std::size_t n = a_integrated.shape()[1];
  if (h.rank() != 2 || h.rows() != n) {
    throw std::invalid_argument("gcn_layer: H " + h.shape_str() +
                                " does not match |C| = " + std::to_string(n));
  }
  // The correlation tensor is fixed data, never differentiated; combine the
  // slices eagerly.
  Tensor combined = Tensor::zeros({n, n});
  for (std::size_t i = 0; i < n * n; ++i) {
    combined.data()[i] =
        a_integrated.data()[i] + a_integrated.data()[n * n + i];
  }
  return tape.leaky_relu(tape.matmul(tape.matmul(combined, h), w), leaky_slope);
}

Tensor style_representations(Tape& tape, const Tensor& a_integrated,
                             const GcnParams& params, double leaky_slope) {
  Tensor h1 = gcn_layer(tape, a_integrated, params.h0, params.w1, leaky_slope);
  return gcn_layer(tape, a_integrated, h1, params.w2, leaky_slope);
}

Tensor label_similarity_heatmap(const Tensor& h2) {
  const std::size_t n = h2.rows();
  const std::size_t d = h2.cols();
  Tensor sim = Tensor::zeros({n, n});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        dot += h2.data()[i * d + k] * h2.data()[j * d + k];
      }
      sim.data()[i * n + j] = dot;
      sim.data()[j * n + i] = dot;
    }
  }
  double lo = sim.data()[0], hi = sim.data()[0];
  for (double v : sim.data()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi - lo < 1e-300) {
    return Tensor::full({n, n}, 0.5);
  }
  for (double& v : sim.data()) v = (v - lo) / (hi - lo);
  return sim;
}

}  // namespace krf
