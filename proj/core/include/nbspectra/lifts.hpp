#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nbspectra/finite_spectrum.hpp"
#include "nbspectra/graph.hpp"
#include "nbspectra/scanner.hpp"

namespace nbspectra {

// Vertex (v, i) of the lift gets id v * n + i. Each base edge k = (u, v)
// contributes edges (u, i) - (v, pi_k(i)) for a uniform permutation pi_k
// drawn from a stream keyed by (seed, k).
Graph random_lift(const Graph& g, int n, std::uint64_t seed);

// Same wiring with caller-supplied permutations, one per base edge.
Graph lift_with_permutations(const Graph& g, int n, const std::vector<std::vector<int>>& perms);

std::vector<int> lift_permutation(int n, std::uint64_t seed, int edge_index);

struct TaggedSpectrum {
  std::vector<cplx> values;
  std::vector<char> is_old;
  int n_old = 0;
  int n_new = 0;
  double max_match_distance = 0.0;

  std::vector<cplx> new_values() const;
};

// Greedy nearest matching of base eigenvalues into the lift spectrum. Throws
// MatchFailure when a base eigenvalue has no partner within tol.
TaggedSpectrum split_old_new(const std::vector<cplx>& lift_spec,
                             const std::vector<cplx>& base_spec, double tol = 1e-6);

struct RegionStats {
  std::optional<double> fraction;  // empty when there are no points
  int n_points = 0;
  int n_within = 0;
  double eps_d = 0.0;
  std::vector<double> distances;         // per point, to the nearest IN centre
  std::vector<double> histogram_edges;   // bin edges
  std::vector<int> histogram_counts;     // last bin collects the overflow
};

// Throws RegionMismatch when a point lies outside the raster rectangle.
RegionStats region_distance_stats(const std::vector<cplx>& new_eigs, const SpectrumRaster& raster,
                                  double eps_d, int n_bins = 10);

struct LiftResult {
  Graph lift;
  int n = 0;
  std::uint64_t seed = 0;
  bool connected = true;
  TaggedSpectrum spectrum;
};

LiftResult run_lift(const Graph& base, int n, std::uint64_t seed, double tol = 1e-6);

void write_point_cloud(const TaggedSpectrum& s, const std::filesystem::path& path,
                       const std::string& provenance_line = {});

std::string region_stats_json(const RegionStats& st);

}  // namespace nbspectra
