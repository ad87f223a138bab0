#include "mlrank/optimizer.hpp"

#include <ostream>

namespace mlrank {

double OptimizationTrace::mean_epoch_seconds() const {
  if (epochs.size() < 2) return 0.0;
  return epochs.back().seconds / static_cast<double>(epochs.size() - 1);
}

void write_trace_csv(std::ostream& out, const OptimizationTrace& trace) {
  out << "epoch,objective,step_size,grad_norm,seconds\n";
  const auto old_precision = out.precision(12);
  for (const auto& e : trace.epochs)
    out << e.epoch << ',' << e.objective << ',' << e.step_size << ',' << e.grad_norm << ',' << e.seconds << '\n';
  out.precision(old_precision);
}

std::optional<double> svrg_bb_step(const MatrixXd& snapshot_delta, const MatrixXd& gradient_delta,
                                   Index inner_steps) {
  const double dw2 = snapshot_delta.squaredNorm();
  const double curvature = (snapshot_delta.array() * gradient_delta.array()).sum();
  if (!(curvature > 1e-16 * dw2) || dw2 == 0.0) return std::nullopt;
  const double step = dw2 / (static_cast<double>(inner_steps) * curvature);
  return std::clamp(step, kMinStep, kMaxStep);
}

} // namespace mlrank
