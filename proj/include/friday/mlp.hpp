// From-scratch bias-free ReLU multilayer perceptron: He-style seeded init,
// mean-squared-error loss with exact reverse-mode gradients, momentum SGD,
// per-step spectral normalization against a Lipschitz budget zeta, and an
// empirical Lipschitz audit.
#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "friday/matrix.hpp"

namespace friday {

struct TrainingHyper {
  double learning_rate = 1e-3;
  double momentum = 0.9;
  std::size_t batch_size = 32;
};

struct MlpNetwork {
  std::vector<std::size_t> layer_sizes;   // input dim, hidden dims..., output dim
  std::vector<Matrix> weights;            // weights[l]: layer_sizes[l+1] x layer_sizes[l]
  std::vector<Matrix> momentum_buffers;   // same shapes, start at zero
  double zeta = 1.0;                      // Lipschitz budget
  bool strict_rescale = false;            // scale every layer, not just the ones over budget
  std::vector<Vec> power_vecs;            // warm-start cache for normalization

  std::size_t depth() const { return weights.size(); }
  std::size_t input_dim() const { return layer_sizes.front(); }
  std::size_t output_dim() const { return layer_sizes.back(); }
};

inline MlpNetwork init_network(const std::vector<std::size_t>& layer_sizes,
                               std::uint64_t seed, double zeta = 1.0) {
  if (layer_sizes.size() < 2)
    throw std::invalid_argument("init_network: need at least input and output sizes");
  for (std::size_t s : layer_sizes)
    if (s == 0) throw std::invalid_argument("init_network: zero layer size");
  MlpNetwork net;
  net.layer_sizes = layer_sizes;
  net.zeta = zeta;
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const std::size_t fan_in = layer_sizes[l];
    const std::size_t fan_out = layer_sizes[l + 1];
    const double lim = std::sqrt(6.0 / static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-lim, lim);
    Matrix w(fan_out, fan_in);
    for (double& x : w.data()) x = dist(rng);
    net.weights.push_back(std::move(w));
    net.momentum_buffers.emplace_back(fan_out, fan_in);
  }
  net.power_vecs.resize(net.weights.size());
  return net;
}

inline Vec mlp_forward(const MlpNetwork& net, const Vec& input) {
  if (input.size() != net.input_dim())
    throw std::invalid_argument("mlp_forward: input dimension mismatch");
  Vec a = input;
  const std::size_t depth = net.depth();
  for (std::size_t l = 0; l < depth; ++l) {
    a = net.weights[l] * a;
    if (l + 1 < depth)
      for (double& x : a) x = x > 0.0 ? x : 0.0;  // no activation on the output layer
  }
  return a;
}

// Mean-squared-error loss over the batch, (1/n) sum ||y - f(x)||^2, and its
// exact gradient with respect to every weight matrix. ReLU subgradient at 0
// is taken as 0.
inline std::pair<double, std::vector<Matrix>> loss_and_gradients(
    const MlpNetwork& net, const std::vector<Vec>& batch_inputs,
    const std::vector<Vec>& batch_targets) {
  if (batch_inputs.empty() || batch_inputs.size() != batch_targets.size())
    throw std::invalid_argument("loss_and_gradients: empty or mismatched batch");
  const std::size_t depth = net.depth();
  const double inv_n = 1.0 / static_cast<double>(batch_inputs.size());
  double loss = 0.0;
  std::vector<Matrix> grads;
  grads.reserve(depth);
  for (const Matrix& w : net.weights) grads.emplace_back(w.rows(), w.cols());

  std::vector<Vec> acts(depth + 1);  // post-activation values, acts[0] = input
  for (std::size_t s = 0; s < batch_inputs.size(); ++s) {
    const Vec& x = batch_inputs[s];
    const Vec& y = batch_targets[s];
    if (x.size() != net.input_dim() || y.size() != net.output_dim())
      throw std::invalid_argument("loss_and_gradients: sample dimension mismatch");
    acts[0] = x;
    for (std::size_t l = 0; l < depth; ++l) {
      acts[l + 1] = net.weights[l] * acts[l];
      if (l + 1 < depth)
        for (double& v : acts[l + 1]) v = v > 0.0 ? v : 0.0;
    }
    Vec delta(net.output_dim());
    for (std::size_t i = 0; i < delta.size(); ++i) {
      const double err = acts[depth][i] - y[i];
      loss += inv_n * err * err;
      delta[i] = 2.0 * inv_n * err;
    }
    for (std::size_t l = depth; l-- > 0;) {
      Matrix& g = grads[l];
      const Vec& in = acts[l];
      for (std::size_t i = 0; i < g.rows(); ++i) {
        const double d = delta[i];
        if (d == 0.0) continue;
        for (std::size_t j = 0; j < g.cols(); ++j) g(i, j) += d * in[j];
      }
      if (l == 0) break;
      Vec prev(net.weights[l].cols(), 0.0);
      for (std::size_t i = 0; i < net.weights[l].rows(); ++i) {
        const double d = delta[i];
        if (d == 0.0) continue;
        for (std::size_t j = 0; j < prev.size(); ++j) prev[j] += net.weights[l](i, j) * d;
      }
      // Post-activation value > 0 iff pre-activation > 0 for ReLU.
      for (std::size_t j = 0; j < prev.size(); ++j)
        if (acts[l][j] <= 0.0) prev[j] = 0.0;
      delta = std::move(prev);
    }
  }
  return {loss, std::move(grads)};
}

inline void sgd_momentum_step(MlpNetwork& net, const std::vector<Matrix>& grads,
                              const TrainingHyper& hyper) {
  if (grads.size() != net.depth())
    throw std::invalid_argument("sgd_momentum_step: gradient count mismatch");
  for (std::size_t l = 0; l < net.depth(); ++l) {
    Matrix& w = net.weights[l];
    Matrix& buf = net.momentum_buffers[l];
    const Matrix& g = grads[l];
    if (g.rows() != w.rows() || g.cols() != w.cols())
      throw std::invalid_argument("sgd_momentum_step: gradient shape mismatch");
    for (std::size_t i = 0; i < w.data().size(); ++i) {
      buf.data()[i] = hyper.momentum * buf.data()[i] + g.data()[i];
      w.data()[i] -= hyper.learning_rate * buf.data()[i];
    }
  }
}

// Rescales weight matrices so the product of layer spectral norms stays
// within zeta: W^l <- W^l / sigma(W^l) * zeta^(1/L). By default a layer is
// only touched when sigma exceeds zeta^(1/L); strict_rescale applies the rule
// to every layer as written. Zero layers are left alone (sigma undefined).
inline void normalize_lipschitz(MlpNetwork& net) {
  const std::size_t depth = net.depth();
  if (net.power_vecs.size() != depth) net.power_vecs.resize(depth);
  const double target = std::pow(net.zeta, 1.0 / static_cast<double>(depth));
  for (std::size_t l = 0; l < depth; ++l) {
    Matrix& w = net.weights[l];
    if (w.frobenius_norm() == 0.0) continue;
    double sigma;
    try {
      sigma = spectral_norm_warm(w, net.power_vecs[l], 1e-14);
    } catch (const SpectralNormError& e) {
      // Near-degenerate top singular pairs stall the iteration below the tight
      // tolerance, but the Rayleigh estimate is already at sigma_max then.
      sigma = e.last_estimate();
    }
    if (net.strict_rescale || sigma > target) w *= target / sigma;
  }
}

inline double lipschitz_upper_bound(const MlpNetwork& net) {
  double prod = 1.0;
  for (const Matrix& w : net.weights) {
    if (w.frobenius_norm() == 0.0) return 0.0;
    try {
      prod *= spectral_norm(w, 1e-14);
    } catch (const SpectralNormError& e) {
      prod *= e.last_estimate();
    }
  }
  return prod;
}

// Max of ||f(x) - f(x')|| / ||x - x'|| over seeded random pairs drawn from the
// box [domain_lo, domain_hi]; a lower bound on the true Lipschitz constant.
inline double empirical_lipschitz(const MlpNetwork& net, const Vec& domain_lo,
                                  const Vec& domain_hi, std::size_t n_pairs,
                                  std::uint64_t seed) {
  if (n_pairs < 1) throw std::invalid_argument("empirical_lipschitz: n_pairs must be >= 1");
  if (domain_lo.size() != net.input_dim() || domain_hi.size() != net.input_dim())
    throw std::invalid_argument("empirical_lipschitz: domain dimension mismatch");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto sample = [&] {
    Vec x(domain_lo.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] = domain_lo[i] + (domain_hi[i] - domain_lo[i]) * unit(rng);
    return x;
  };
  double best = 0.0;
  for (std::size_t k = 0; k < n_pairs; ++k) {
    const Vec x1 = sample();
    const Vec x2 = sample();
    const double dx = vec_norm(vec_sub(x1, x2));
    if (dx < 1e-12) continue;
    const double df = vec_norm(vec_sub(mlp_forward(net, x1), mlp_forward(net, x2)));
    best = std::max(best, df / dx);
  }
  return best;
}

// --- Checkpoint file format -------------------------------------------------
//
//   FRIDAY-MLP 1
//   encoding text float64 decimal
//   zeta <value>
//   layers <count> <size...>
//   layer <index> <rows> <cols>
//   <rows*cols entries in row-major order, whitespace separated>
//   ...
//
// Values are IEEE-754 64-bit doubles printed with 17 significant digits, so
// a round trip is bit-exact and byte order is irrelevant.

inline void save_checkpoint(const MlpNetwork& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
  out << "FRIDAY-MLP 1\n";
  out << "encoding text float64 decimal\n";
  out.precision(17);
  out << "zeta " << net.zeta << "\n";
  out << "layers " << net.layer_sizes.size();
  for (std::size_t s : net.layer_sizes) out << " " << s;
  out << "\n";
  for (std::size_t l = 0; l < net.depth(); ++l) {
    const Matrix& w = net.weights[l];
    out << "layer " << l << " " << w.rows() << " " << w.cols() << "\n";
    for (std::size_t i = 0; i < w.data().size(); ++i)
      out << w.data()[i] << (i + 1 == w.data().size() ? "\n" : " ");
  }
  if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

inline MlpNetwork load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  std::string magic, enc_line;
  int version = 0;
  in >> magic >> version;
  if (magic != "FRIDAY-MLP" || version != 1)
    throw std::runtime_error("load_checkpoint: unrecognized format in " + path);
  std::string tok;
  in >> tok;  // "encoding"
  std::string e1, e2, e3;
  in >> e1 >> e2 >> e3;
  if (tok != "encoding" || e1 != "text" || e2 != "float64")
    throw std::runtime_error("load_checkpoint: unsupported encoding in " + path);
  double zeta = 1.0;
  in >> tok >> zeta;
  std::size_t count = 0;
  in >> tok >> count;
  if (tok != "layers" || count < 2)
    throw std::runtime_error("load_checkpoint: bad layer list in " + path);
  std::vector<std::size_t> sizes(count);
  for (auto& s : sizes) in >> s;
  MlpNetwork net = init_network(sizes, 0, zeta);
  for (std::size_t l = 0; l < net.depth(); ++l) {
    std::size_t idx = 0, rows = 0, cols = 0;
    in >> tok >> idx >> rows >> cols;
    if (tok != "layer" || idx != l || rows != net.weights[l].rows() ||
        cols != net.weights[l].cols())
      throw std::runtime_error("load_checkpoint: layer header mismatch in " + path);
    for (double& x : net.weights[l].data()) in >> x;
    net.momentum_buffers[l] = Matrix(rows, cols);
  }
  if (!in) throw std::runtime_error("load_checkpoint: truncated file " + path);
  return net;
}

}  // namespace friday
