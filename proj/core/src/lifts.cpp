#include "nbspectra/lifts.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include "json.hpp"
#include "nbspectra/error.hpp"
#include "strings.hpp"

namespace nbspectra {

std::vector<int> lift_permutation(int n, std::uint64_t seed, int edge_index) {
  std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                   static_cast<std::uint32_t>(edge_index), 0x6c696674U};
  std::mt19937_64 rng(sq);
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  // Fisher-Yates with explicit bounded draws; std::shuffle is not specified
  // identically across standard libraries.
  for (int i = n - 1; i > 0; --i) {
    const std::uint64_t bound = static_cast<std::uint64_t>(i) + 1;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x = rng();
    while (x >= limit) x = rng();
    std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(x % bound)]);
  }
  return p;
}

Graph lift_with_permutations(const Graph& g, int n, const std::vector<std::vector<int>>& perms) {
  if (n < 1) throw PreconditionFailed("lift degree must be >= 1");
  if (static_cast<int>(perms.size()) != g.n_edges())
    throw PreconditionFailed("need one permutation per base edge");
  std::vector<EdgeSpec> edges;
  edges.reserve(static_cast<std::size_t>(g.n_edges()) * n);
  for (int k = 0; k < g.n_edges(); ++k) {
    const auto& p = perms[k];
    if (static_cast<int>(p.size()) != n) throw PreconditionFailed("permutation has wrong size");
    std::vector<char> hit(static_cast<std::size_t>(n), 0);
    for (int x : p) {
      if (x < 0 || x >= n || hit[x]) throw PreconditionFailed("not a permutation");
      hit[x] = 1;
    }
    const EdgeSpec& e = g.edge(k);
    for (int i = 0; i < n; ++i) edges.push_back({e.u * n + i, e.v * n + p[i], e.weight});
  }
  return Graph::from_edges(g.n_vertices() * n, std::move(edges), /*require_connected=*/false);
}

Graph random_lift(const Graph& g, int n, std::uint64_t seed) {
  if (n < 1) throw PreconditionFailed("lift degree must be >= 1");
  std::vector<std::vector<int>> perms;
  perms.reserve(static_cast<std::size_t>(g.n_edges()));
  for (int k = 0; k < g.n_edges(); ++k) perms.push_back(lift_permutation(n, seed, k));
  return lift_with_permutations(g, n, perms);
}

std::vector<cplx> TaggedSpectrum::new_values() const {
  std::vector<cplx> out;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!is_old[i]) out.push_back(values[i]);
  return out;
}

TaggedSpectrum split_old_new(const std::vector<cplx>& lift_spec,
                             const std::vector<cplx>& base_spec, double tol) {
  const MultisetMatch m = match_multisets(base_spec, lift_spec, tol);
  if (m.matched != static_cast<int>(base_spec.size())) {
    for (std::size_t i = 0; i < base_spec.size(); ++i)
      if (m.a_to_b[i] < 0)
        throw MatchFailure(detail::format("base eigenvalue %.10g%+.10gi has no lift partner within %.1e",
                                          base_spec[i].real(), base_spec[i].imag(), tol));
  }
  TaggedSpectrum out;
  out.values = lift_spec;
  out.is_old.assign(lift_spec.size(), 0);
  for (std::size_t j = 0; j < lift_spec.size(); ++j) out.is_old[j] = m.b_to_a[j] >= 0;
  out.n_old = m.matched;
  out.n_new = static_cast<int>(lift_spec.size()) - m.matched;
  out.max_match_distance = m.max_distance;
  return out;
}

RegionStats region_distance_stats(const std::vector<cplx>& new_eigs, const SpectrumRaster& raster,
                                  double eps_d, int n_bins) {
  RegionStats st;
  st.eps_d = eps_d;
  st.n_points = static_cast<int>(new_eigs.size());
  const Region& reg = raster.region;
  for (const auto& z : new_eigs)
    if (z.real() < reg.re_min || z.real() > reg.re_max || z.imag() < reg.im_min ||
        z.imag() > reg.im_max)
      throw RegionMismatch(detail::format("eigenvalue %.6g%+.6gi lies outside the raster",
                                          z.real(), z.imag()));
  std::vector<cplx> centers;
  for (int j = 0; j < raster.n_im; ++j)
    for (int i = 0; i < raster.n_re; ++i)
      if (raster.at(i, j) == CellCode::In) centers.push_back(raster.center(i, j));
  for (const auto& z : new_eigs) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : centers) best = std::min(best, std::abs(z - c));
    st.distances.push_back(best);
    if (best <= eps_d) ++st.n_within;
  }
  if (st.n_points > 0) st.fraction = static_cast<double>(st.n_within) / st.n_points;
  n_bins = std::max(1, n_bins);
  for (int b = 0; b <= n_bins; ++b) st.histogram_edges.push_back(b * eps_d);
  st.histogram_counts.assign(static_cast<std::size_t>(n_bins) + 1, 0);
  for (double d : st.distances) {
    int b = std::isfinite(d) ? static_cast<int>(d / eps_d) : n_bins;
    st.histogram_counts[static_cast<std::size_t>(std::min(b, n_bins))]++;
  }
  return st;
}

LiftResult run_lift(const Graph& base, int n, std::uint64_t seed, double tol) {
  require_leafless(base, "run_lift");
  LiftResult out;
  out.lift = random_lift(base, n, seed);
  out.n = n;
  out.seed = seed;
  out.connected = out.lift.is_connected();
  const auto base_spec = nb_spectrum_finite(base).eigenvalues;
  const auto lift_spec = nb_spectrum_finite(out.lift).eigenvalues;
  out.spectrum = split_old_new(lift_spec, base_spec, tol);
  return out;
}

void write_point_cloud(const TaggedSpectrum& s, const std::filesystem::path& path,
                       const std::string& provenance_line) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IOError("cannot write " + path.string());
  if (!provenance_line.empty()) f << "# " << provenance_line << '\n';
  f << "re,im,tag\n";
  for (std::size_t i = 0; i < s.values.size(); ++i)
    f << detail::format("%.15g,%.15g,%s\n", s.values[i].real(), s.values[i].imag(),
                        s.is_old[i] ? "old" : "new");
  f.flush();
  if (!f) throw IOError("write failed: " + path.string());
}

std::string region_stats_json(const RegionStats& st) {
  nlohmann::ordered_json j;
  if (st.fraction)
    j["fraction"] = *st.fraction;
  else
    j["fraction"] = nullptr;
  j["n_points"] = st.n_points;
  j["n_within"] = st.n_within;
  j["eps_d"] = st.eps_d;
  j["histogram_edges"] = st.histogram_edges;
  j["histogram_counts"] = st.histogram_counts;
  return j.dump();
}

}  // namespace nbspectra
