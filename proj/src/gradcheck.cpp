#include "aenet/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace aenet {

GradCheckReport gradcheck(const std::function<Var()>& build_loss,
                          const std::vector<std::pair<std::string, Var>>& params,
                          double h) {
  if (h <= 0.0) {
    throw DomainError("gradcheck: step must be positive");
  }
  for (auto& [name, p] : params) {
    (void)name;
    p.node()->grad.fill(0.0);
  }
  Var loss = build_loss();
  backward(loss);

  GradCheckReport report;
  for (auto& [name, p] : params) {
    Tensor analytic = p.grad();
    Tensor& value = p.node()->value;
    GradCheckEntry entry;
    entry.name = name;
    for (std::size_t i = 0; i < value.size(); ++i) {
      double orig = value[i];
      value[i] = orig + h;
      double f_plus = build_loss().value().item();
      value[i] = orig - h;
      double f_minus = build_loss().value().item();
      value[i] = orig;
      double numeric = (f_plus - f_minus) / (2.0 * h);
      double ga = analytic[i];
      double rel = std::abs(ga - numeric) /
                   std::max(1e-8, std::abs(ga) + std::abs(numeric));
      if (rel > entry.max_rel_err) {
        entry.max_rel_err = rel;
        entry.worst_index = i;
      }
    }
    report.max_rel_err = std::max(report.max_rel_err, entry.max_rel_err);
    report.params.push_back(std::move(entry));
  }
  return report;
}

}  // namespace aenet
