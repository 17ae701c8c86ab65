#pragma once

// Skip-gram negative-sampling objective for one (center, context, negatives)
// training example:
//
//   L = -log s(u_o . v_c) - sum_n log s(-u_n . v_c)
//
// where v_c is the center word's input vector, u_o the context word's output
// vector, u_n the output vectors of the sampled noise words and s the
// logistic sigmoid. The trainer applies exactly the gradient computed here.

#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>

namespace ontoforge::embedding::sgns {

template <typename Real>
inline Real sigmoid(Real x) {
  if (x >= 0) return Real(1) / (Real(1) + std::exp(-x));
  const Real e = std::exp(x);
  return e / (Real(1) + e);
}

// log(1 + exp(x)) without overflow.
template <typename Real>
inline Real softplus(Real x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

template <typename Real>
inline Real dot(std::span<const Real> a, std::span<const Real> b) {
  assert(a.size() == b.size());
  Real acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

// `targets` holds the context row first and the negative rows after it, all
// as views into an output matrix. Rows are read, never written.
template <typename Real>
Real loss(std::span<const Real> center, std::span<const std::span<const Real>> targets) {
  Real total = 0;
  for (std::size_t j = 0; j < targets.size(); ++j) {
    const Real score = dot(center, targets[j]);
    total += j == 0 ? softplus(-score) : softplus(score);
  }
  return total;
}

// Writes dL/dv_c into d_center and dL/du_j into row j of d_targets
// (targets.size() rows of center.size() values, row-major). Returns L.
template <typename Real>
Real loss_and_gradient(std::span<const Real> center,
                       std::span<const std::span<const Real>> targets,
                       std::span<Real> d_center, std::span<Real> d_targets) {
  const std::size_t dim = center.size();
  assert(d_center.size() == dim);
  assert(d_targets.size() == dim * targets.size());
  for (auto& g : d_center) g = 0;

  Real total = 0;
  for (std::size_t j = 0; j < targets.size(); ++j) {
    const auto row = targets[j];
    const Real score = dot(center, row);
    const Real label = j == 0 ? Real(1) : Real(0);
    total += j == 0 ? softplus(-score) : softplus(score);
    // dL/dscore for the logistic loss.
    const Real g = sigmoid(score) - label;
    Real* d_row = d_targets.data() + j * dim;
    for (std::size_t i = 0; i < dim; ++i) {
      d_center[i] += g * row[i];
      d_row[i] = g * center[i];
    }
  }
  return total;
}

}  // namespace ontoforge::embedding::sgns
