#pragma once

#include <functional>
#include <string>
#include <vector>

#include "aenet/graph.hpp"

namespace aenet {

struct GradCheckEntry {
  std::string name;
  double max_rel_err = 0.0;
  std::size_t worst_index = 0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> params;
  double max_rel_err = 0.0;

  bool passes(double tol) const { return max_rel_err < tol; }
};

// Central-difference check of a parameterized scalar function. build_loss
// must construct a fresh graph off the current parameter values each call;
// the analytic gradient comes from one backward pass, the numeric one from
// perturbing every parameter entry by +-h in place.
//
//   rel = |g_a - g_n| / max(1e-8, |g_a| + |g_n|)
GradCheckReport gradcheck(const std::function<Var()>& build_loss,
                          const std::vector<std::pair<std::string, Var>>& params,
                          double h = 1e-5);

}  // namespace aenet
