#include <filesystem>
#include <fstream>
#include <numeric>

#include "doctest.h"
#include "support.hpp"

using namespace nbspectra;
using testing::fixture;

TEST_SUITE("lifts") {

TEST_CASE("1-lift is the base graph") {
  for (const auto& name : testing::leafless_fixtures()) {
    const auto g = fixture(name);
    const Graph l = random_lift(*g, 1, 42);
    CHECK(l.n_vertices() == g->n_vertices());
    REQUIRE(l.n_edges() == g->n_edges());
    for (int k = 0; k < g->n_edges(); ++k) {
      CHECK(l.edge(k).u == g->edge(k).u);
      CHECK(l.edge(k).v == g->edge(k).v);
    }
    const auto ts = split_old_new(nb_spectrum_finite(l).eigenvalues, nb_spectrum_finite(*g).eigenvalues);
    CHECK(ts.n_new == 0);
    CHECK(ts.n_old == g->n_directed());
    CHECK(ts.new_values().empty());
  }
}

TEST_CASE("K4 2-lift") {
  const auto k4 = fixture("k4");
  const Graph l = random_lift(*k4, 2, 3);
  CHECK(l.n_vertices() == 8);
  CHECK(l.n_edges() == 12);
  for (int v = 0; v < 8; ++v) CHECK(l.degree(v) == 3);
  const auto lr = run_lift(*k4, 2, 3);
  CHECK(lr.spectrum.values.size() == 24);
  CHECK(lr.spectrum.n_old == 12);
  CHECK(lr.spectrum.n_new == 12);
  CHECK(lr.spectrum.max_match_distance <= 1e-6);
}

TEST_CASE("identity permutations disconnect the triangle") {
  const auto tri = fixture("triangle");
  const std::vector<std::vector<int>> id(3, {0, 1});
  const Graph l = lift_with_permutations(*tri, 2, id);
  CHECK(l.n_vertices() == 6);
  CHECK_FALSE(l.is_connected());
  for (int v = 0; v < 6; ++v) CHECK(l.degree(v) == 2);
  // Spectrum of two disjoint triangles: each base value twice.
  const auto base = nb_spectrum_finite(*tri).eigenvalues;
  std::vector<cplx> doubled = base;
  doubled.insert(doubled.end(), base.begin(), base.end());
  CHECK(multisets_equal(nb_spectrum_finite(l).eigenvalues, doubled, 1e-7));
  CHECK_THROWS_AS(lift_with_permutations(*tri, 2, {{0, 1}}), PreconditionFailed);
  CHECK_THROWS_AS(lift_with_permutations(*tri, 2, {{0, 0}, {0, 1}, {0, 1}}), PreconditionFailed);
}

TEST_CASE("permutations are uniform-looking and reproducible") {
  const auto p = lift_permutation(50, 9, 2);
  std::vector<int> sorted = p;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> iota(50);
  std::iota(iota.begin(), iota.end(), 0);
  CHECK(sorted == iota);
  CHECK(lift_permutation(50, 9, 2) == p);
  CHECK(lift_permutation(50, 9, 3) != p);
  CHECK(lift_permutation(50, 10, 2) != p);
  // Each fixed point has probability 1/n; over many draws position 0 spreads out.
  std::vector<int> hits(5, 0);
  for (int s = 0; s < 2000; ++s) ++hits[lift_permutation(5, static_cast<std::uint64_t>(s), 0)[0]];
  for (int h : hits) CHECK(std::abs(h - 400) < 100);
}

TEST_CASE("fiber structure and determinism") {
  for (const auto& name : {"p122", "petersen", "c5"}) {
    const auto g = fixture(name);
    for (int n : {2, 3, 7}) {
      const Graph a = random_lift(*g, n, 11);
      const Graph b = random_lift(*g, n, 11);
      CHECK(a.n_vertices() == n * g->n_vertices());
      CHECK(a.n_edges() == n * g->n_edges());
      for (int v = 0; v < a.n_vertices(); ++v) CHECK(a.degree(v) == g->degree(v / n));
      CHECK(a.to_text() == b.to_text());
    }
  }
  CHECK(random_lift(*fixture("petersen"), 5, 1).to_text() !=
        random_lift(*fixture("petersen"), 5, 2).to_text());
}

TEST_CASE("pullback containment and annulus bounds") {
  for (const auto& name : testing::leafless_fixtures()) {
    const auto g = fixture(name);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const int n = 4;
      LiftResult lr;
      // C5 has defective base eigenvalues, matched here at the eigen solver's accuracy.
      const double tol = name == "c5" ? 1e-4 : 1e-6;
      CHECK_NOTHROW(lr = run_lift(*g, n, seed, tol));
      CHECK(lr.spectrum.n_old == g->n_directed());
      CHECK(lr.spectrum.n_new == (n - 1) * g->n_directed());
      const auto audit = annulus_audit(lr.lift, lr.spectrum.values);
      CHECK_MESSAGE(audit.ok, name);
    }
  }
}

TEST_CASE("split_old_new reports missing partners") {
  CHECK_THROWS_AS(split_old_new({1.0, 2.0}, {1.0, 3.0}, 1e-6), MatchFailure);
  const auto ts = split_old_new({1.0, 2.0, cplx(0, 1)}, {2.0 + 1e-8}, 1e-6);
  CHECK(ts.n_old == 1);
  CHECK(ts.n_new == 2);
  CHECK(ts.is_old[1]);
  CHECK(ts.max_match_distance == doctest::Approx(1e-8));
}

TEST_CASE("region distance statistics") {
  SpectrumRaster r;
  r.region = {-1.0, 1.0, -1.0, 1.0};
  r.n_re = r.n_im = 4;
  r.codes.assign(16, CellCode::Out);
  r.codes[1 * 4 + 1] = CellCode::In;
  r.codes[2 * 4 + 2] = CellCode::In;
  const std::vector<cplx> at_centers{r.center(1, 1), r.center(2, 2)};
  auto st = region_distance_stats(at_centers, r, 0.05);
  REQUIRE(st.fraction);
  CHECK(*st.fraction == 1.0);
  CHECK(st.n_within == 2);

  st = region_distance_stats({r.center(1, 1) + 0.01, cplx(0.9, -0.9)}, r, 0.05);
  CHECK(*st.fraction == 0.5);
  CHECK(st.distances[0] == doctest::Approx(0.01));
  int total = 0;
  for (int c : st.histogram_counts) total += c;
  CHECK(total == 2);

  st = region_distance_stats({}, r, 0.05);
  CHECK_FALSE(st.fraction);
  CHECK(region_stats_json(st).find("\"fraction\":null") != std::string::npos);

  CHECK_THROWS_AS(region_distance_stats({cplx(2.0, 0.0)}, r, 0.05), RegionMismatch);
}

TEST_CASE("point cloud output") {
  const auto lr = run_lift(*fixture("k4"), 2, 5);
  const auto path = std::filesystem::temp_directory_path() / "nbspectra_unit_cloud.csv";
  write_point_cloud(lr.spectrum, path, "{\"seed\":5}");
  std::ifstream in(path);
  std::string line;
  int rows = 0, old_rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line == "re,im,tag") continue;
    ++rows;
    if (line.size() >= 4 && line.substr(line.size() - 4) == ",old") ++old_rows;
  }
  CHECK(rows == 24);
  CHECK(old_rows == 12);
}

}  // TEST_SUITE
