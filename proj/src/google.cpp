#include "ulamnet/google.hpp"

#include <stdexcept>

namespace ulamnet {

GoogleOperator::GoogleOperator(const UlamNetwork& net, double damping)
    : network(&net), alpha(damping) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("google: alpha must lie in [0, 1]");
}

void apply(const GoogleOperator& op, const double* in, double* out) {
  const UlamNetwork& net = *op.network;
  const std::int32_t n = net.n_cells;
  double sum = 0.0, comp = 0.0;
  for (std::int32_t j = 0; j < n; ++j) {
    const double y = in[j] - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  const double teleport = (1.0 - op.alpha) * sum / n;
  for (std::int32_t i = 0; i < n; ++i) out[i] = teleport;
  const double alpha = op.alpha;
  if (alpha != 0.0) {
    for (std::int32_t j = 0; j < n; ++j) {
      const double vj = alpha * in[j];
      if (vj == 0.0) continue;
      for (std::int64_t k = net.col_ptr[j]; k < net.col_ptr[j + 1]; ++k)
        out[net.row_idx[k]] += net.values[k] * vj;
    }
  }
}

std::vector<double> apply(const GoogleOperator& op, const std::vector<double>& v) {
  if (static_cast<std::int32_t>(v.size()) != op.size())
    throw std::invalid_argument("google: vector length does not match N");
  std::vector<double> out(v.size());
  apply(op, v.data(), out.data());
  return out;
}

Eigen::MatrixXd materialize_dense(const GoogleOperator& op, std::int32_t dense_cap) {
  const UlamNetwork& net = *op.network;
  const std::int32_t n = net.n_cells;
  if (n > dense_cap)
    throw std::runtime_error("google: N exceeds the dense materialization cap");
  Eigen::MatrixXd g = Eigen::MatrixXd::Constant(n, n, (1.0 - op.alpha) / n);
  for (std::int32_t j = 0; j < n; ++j)
    for (std::int64_t k = net.col_ptr[j]; k < net.col_ptr[j + 1]; ++k)
      g(net.row_idx[k], j) += op.alpha * net.values[k];
  return g;
}

}  // namespace ulamnet
