#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nbspectra/cover_solver.hpp"
#include "nbspectra/operator.hpp"

namespace nbspectra {

enum class CellCode : std::uint8_t { Out = 0, In = 1, Unknown = 2 };

struct Region {
  double re_min = -1.0, re_max = 1.0, im_min = -1.0, im_max = 1.0;
  bool valid() const { return re_min < re_max && im_min < im_max; }
};

enum class Prefilter { Out, MustTest };

// Annulus bounds for Q_lambda on the cover: OUT when |t| < 1 - delta or
// |t| > sqrt(gr) + delta, or when t is non-real with |t| outside
// [sqrt(d_min-1) - delta, sqrt(d_max-1) + delta].
Prefilter prefilter(const Graph& g, cplx lambda, double gr, double delta = 1e-9);
Prefilter prefilter(const Graph& g, cplx lambda);

struct ScanOptions {
  Region region;
  int n_re = 2;
  int n_im = 2;
  SolverConfig solver;
  bool use_symmetry = true;
  bool use_prefilter = true;
  bool second_pass = true;
  int threads = 1;
};

struct ScanCounts {
  int in = 0, out = 0, unknown = 0;
  int evaluated = 0;      // full solver runs
  int mirrored = 0;
  int prefiltered = 0;
  int forced = 0;
  int boundary_certified = 0;
  int heuristic_in = 0;
  int retested = 0;
};

struct SpectrumRaster {
  Region region;
  int n_re = 0;
  int n_im = 0;
  std::vector<CellCode> codes;  // index j * n_re + i; i along Re, j along Im
  // Provenance.
  std::string family;
  std::uint64_t graph_fingerprint = 0;
  double eps_alpha = 0.0;
  std::uint64_t seed = 0;
  double gr = 0.0;
  bool use_symmetry = false;
  ScanCounts counts;

  double dx() const { return (region.re_max - region.re_min) / n_re; }
  double dy() const { return (region.im_max - region.im_min) / n_im; }
  double cell_diagonal() const;
  cplx center(int i, int j) const;
  CellCode at(int i, int j) const { return codes[static_cast<std::size_t>(j) * n_re + i]; }
};

// Code for one point with the scanner's rules (forced +-1, prefilter, solver).
CellCode evaluate_point(const OperatorFamily& f, cplx lambda, const SolverConfig& cfg,
                        bool use_prefilter = true, MembershipVerdict* verdict = nullptr);

SpectrumRaster scan(const OperatorFamily& f, const ScanOptions& opt);

// Metadata sidecar; extra_config is merged in verbatim when non-empty.
std::string raster_metadata_json(const SpectrumRaster& r, const std::string& extra_config = {});

void write_raster_csv(const SpectrumRaster& r, const std::filesystem::path& path,
                      const std::string& provenance_line = {});
void write_raster_pgm(const SpectrumRaster& r, const std::filesystem::path& path);
void write_raster_metadata(const SpectrumRaster& r, const std::filesystem::path& path,
                           const std::string& extra_config = {});
SpectrumRaster read_raster_csv(const std::filesystem::path& csv_path,
                               const std::filesystem::path& metadata_path);

struct SymmetryAudit {
  int points = 0;
  int mismatches = 0;
  std::vector<cplx> failing;
};

// Independent evaluations of code(t), code(-t), code(conj t) at seeded
// points of the region.
SymmetryAudit symmetry_audit(const OperatorFamily& f, const Region& region, int n_points,
                             std::uint64_t seed, const SolverConfig& cfg);

struct PrefilterAudit {
  int points = 0;
  int violations = 0;  // prefiltered OUT but solver says IN
  int boundary_band = 0;  // BOUNDARY verdicts whose evidence has alpha < 1
};

PrefilterAudit prefilter_audit(const OperatorFamily& f, const Region& region, int n_points,
                               std::uint64_t seed, const SolverConfig& cfg);

// IN cells violating |t| <= sqrt(gr) + diag, |t| >= 1 - diag, and for
// non-real centres sqrt(d_min-1) - diag <= |t| <= sqrt(d_max-1) + diag.
struct ContainmentReport {
  int in_cells = 0;
  int violations = 0;
  int annulus_cells = 0;  // cells whose centre lies in the cover annulus
  int annulus_in = 0;
};

ContainmentReport containment_report(const SpectrumRaster& r, const Graph& g);

}  // namespace nbspectra
