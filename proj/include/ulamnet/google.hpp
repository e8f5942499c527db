#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ulamnet/ulam.hpp"

namespace ulamnet {

// Damped walk operator G = alpha*S + (1-alpha)*E/N over an UlamNetwork,
// applied matrix-free. The network must outlive the operator.
struct GoogleOperator {
  const UlamNetwork* network = nullptr;
  double alpha = 0.85;

  GoogleOperator(const UlamNetwork& net, double damping);
  std::int32_t size() const { return network->n_cells; }
};

// out = alpha*(S in) + (1-alpha)*mean(in). Buffers must not alias.
void apply(const GoogleOperator& op, const double* in, double* out);
std::vector<double> apply(const GoogleOperator& op, const std::vector<double>& v);

// Dense copy G_ij = alpha*S_ij + (1-alpha)/N; refuses sizes above dense_cap.
Eigen::MatrixXd materialize_dense(const GoogleOperator& op,
                                  std::int32_t dense_cap = 4000);

}  // namespace ulamnet
