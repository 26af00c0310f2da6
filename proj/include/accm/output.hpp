#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "accm/simulate.hpp"
#include "accm/verify.hpp"

namespace accm {

/// CSV header: t, x1..xn, xd1..xdn, u1..um, uccm1..uccmm, theta_m1.., theta_em1..,
/// E, slack, geodesic_converged, geodesic_iterations.
std::string csv_header(const TrajectoryLog& log);

/// Writes the log as CSV with 9 significant digits.
void write_csv(std::ostream& os, const TrajectoryLog& log);
void write_csv(const std::filesystem::path& path, const TrajectoryLog& log);

/// Same data split per plot panel (states, parameter estimates, energy), JSON.
void write_plot_data(const std::filesystem::path& path, const TrajectoryLog& log);

/// Three SVG line charts: states.svg, parameters.svg, energy.svg.
void write_svg_charts(const std::filesystem::path& dir, const TrajectoryLog& log);

struct VerificationSummary {
  ContractionReport ccm;
  double killing_residual = 0.0;
  double lemma4_residual = 0.0;
  bool invariance_pass = false;
  int invariance_samples = 0;
  double tolerance_killing = 1e-8;
  double tolerance_lemma4 = 1e-6;

  bool pass() const;
};

void write_verification_text(std::ostream& os, const VerificationSummary& summary);
void write_verification_json(const std::filesystem::path& path, const VerificationSummary& summary);

}  // namespace accm
