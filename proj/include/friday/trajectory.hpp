// Time-indexed record of one closed-loop trial: states, references, inputs,
// residual truth/estimate, training loss, and per-step flags.
#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace friday {

enum LogFlag : unsigned {
  kFlagFallback = 1u,  // controller fell back to pure LQR this step
  kFlagDiverged = 2u,  // plant integration diverged at/after this step
};

struct LogRow {
  double t = 0.0;
  double p = 0.0;
  double pdot = 0.0;
  double pr = 0.0;
  double prdot = 0.0;
  double u = 0.0;
  double r_true = 0.0;
  double r_hat = 0.0;
  double loss = 0.0;
  unsigned flags = 0;
};

struct TrajectoryLog {
  std::string header;          // full effective config echo
  std::vector<LogRow> rows;    // one row per control step, strictly increasing t
  unsigned seed = 0;
  bool diverged = false;
  bool has_estimator = false;  // controller produced residual estimates
};

inline double tracking_error_norm(const LogRow& r) {
  const double ep = r.p - r.pr;
  const double ev = r.pdot - r.prdot;
  return std::sqrt(ep * ep + ev * ev);
}

}  // namespace friday
