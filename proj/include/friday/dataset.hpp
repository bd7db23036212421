// Real-time-growing training store for (state, input) -> observed-residual
// pairs, with uniform mini-batch sampling and CSV dump/load.
#pragma once

#include <cstdint>
#include <deque>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "friday/matrix.hpp"

namespace friday {

struct ReplayDataset {
  std::deque<Vec> inputs;   // each [p, pdot, u]
  std::deque<Vec> targets;  // each the observed scalar residual force [N]
  std::optional<std::size_t> capacity;  // nullopt = unbounded (the default)

  std::size_t size() const { return inputs.size(); }
  bool empty() const { return inputs.empty(); }
};

// Appends one ([x; u], r_obs) pair. Oldest entry is evicted once a configured
// capacity is exceeded. Non-finite values are rejected so integrator blow-ups
// never poison the training set.
inline void dataset_append(ReplayDataset& ds, const Vec& x, const Vec& u, const Vec& r_obs) {
  if (!all_finite(x) || !all_finite(u) || !all_finite(r_obs))
    throw std::invalid_argument("dataset_append: non-finite value rejected");
  Vec input;
  input.reserve(x.size() + u.size());
  input.insert(input.end(), x.begin(), x.end());
  input.insert(input.end(), u.begin(), u.end());
  ds.inputs.push_back(std::move(input));
  ds.targets.push_back(r_obs);
  if (ds.capacity && ds.size() > *ds.capacity) {
    ds.inputs.pop_front();
    ds.targets.pop_front();
  }
}

// Uniform mini-batch: without replacement when n <= size (partial
// Fisher-Yates), with replacement otherwise. Deterministic under a seeded rng.
inline std::pair<std::vector<Vec>, std::vector<Vec>> sample_minibatch(
    const ReplayDataset& ds, std::size_t n, std::mt19937_64& rng) {
  if (ds.empty()) throw std::runtime_error("sample_minibatch: empty dataset");
  std::vector<Vec> xs, ys;
  xs.reserve(n);
  ys.reserve(n);
  const std::size_t len = ds.size();
  if (n > len) {
    std::uniform_int_distribution<std::size_t> pick(0, len - 1);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = pick(rng);
      xs.push_back(ds.inputs[j]);
      ys.push_back(ds.targets[j]);
    }
  } else {
    std::vector<std::size_t> idx(len);
    for (std::size_t i = 0; i < len; ++i) idx[i] = i;
    for (std::size_t i = 0; i < n; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, len - 1);
      std::swap(idx[i], idx[pick(rng)]);
      xs.push_back(ds.inputs[idx[i]]);
      ys.push_back(ds.targets[idx[i]]);
    }
  }
  return {std::move(xs), std::move(ys)};
}

// CSV layout: header "p,pdot,u,r_obs", units m, m/s, N, N.
inline void dataset_dump_csv(const ReplayDataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("dataset_dump_csv: cannot open " + path);
  out.precision(17);
  out << "p,pdot,u,r_obs\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const Vec& in = ds.inputs[i];
    if (in.size() != 3 || ds.targets[i].size() != 1)
      throw std::runtime_error("dataset_dump_csv: expected 3-d inputs and scalar targets");
    out << in[0] << "," << in[1] << "," << in[2] << "," << ds.targets[i][0] << "\n";
  }
  if (!out) throw std::runtime_error("dataset_dump_csv: write failed for " + path);
}

inline ReplayDataset dataset_load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("dataset_load_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("p,pdot,u,r_obs", 0) != 0)
    throw std::runtime_error("dataset_load_csv: missing header in " + path);
  ReplayDataset ds;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    Vec row;
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != 4) throw std::runtime_error("dataset_load_csv: malformed row in " + path);
    dataset_append(ds, {row[0], row[1]}, {row[2]}, {row[3]});
  }
  return ds;
}

}  // namespace friday
