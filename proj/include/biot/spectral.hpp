#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "biot/assembly.hpp"
#include "biot/dense.hpp"

namespace biot {

// Desk-scale eigenvalue verification of the preconditioner theory: the
// spectrum of P_S^{-1} S with S = B A^{-1} B^T + D formed densely, and the
// inf-sup pencil (B A0^{-1} B^T, Mp) whose eigenvalues sit in (0, 1].
struct SpectrumReport {
  std::string case_id;
  int nx = 0;
  int n_pressure = 0;
  int n_displacement = 0;
  bool has_schur = false;
  double schur_min = 0.0, schur_max = 0.0;
  bool has_infsup = false;
  double infsup_min = 0.0, infsup_max = 0.0;
};

// Dense Schur spectrum S q = lambda P_S q. The A^{-1} columns are computed
// with the exact factor (in parallel); pressure dimension is capped at 2000,
// which keeps this to nx <= 16 on the benchmark meshes.
SpectrumReport schur_spectrum(const BiotSystem& sys,
                              SchurVariant variant = SchurVariant::mass_plus_D,
                              std::vector<double>* eigenvalues = nullptr);

// Inf-sup pencil (B A0^{-1} B^T) q = lambda Mp q.
SpectrumReport infsup_spectrum(const BiotSystem& sys,
                               std::vector<double>* eigenvalues = nullptr);

// Both pencils in one report.
SpectrumReport spectral_report(const BiotSystem& sys, const std::string& case_id);

void write_spectrum_csv_header(std::ostream& os);
void write_spectrum_csv_row(std::ostream& os, const SpectrumReport& r);

} // namespace biot
