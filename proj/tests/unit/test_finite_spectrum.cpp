#include <numbers>

#include "doctest.h"
#include "support.hpp"

using namespace nbspectra;
using testing::fixture;

TEST_SUITE("finite_spectrum") {

TEST_CASE("build_B on the triangle is two 3-cycles") {
  const auto g = fixture("triangle");
  const RealMatrix B = build_B(*g);
  REQUIRE(B.rows() == 6);
  for (int i = 0; i < 6; ++i) {
    CHECK(B.row(i).sum() == 1.0);
    CHECK(B.col(i).sum() == 1.0);
  }
  const RealMatrix B3 = B * B * B;
  CHECK((B3 - RealMatrix::Identity(6, 6)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((B - RealMatrix::Identity(6, 6)).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("build_B row sums") {
  const auto k4 = fixture("k4");
  const RealMatrix B = build_B(*k4);
  for (int i = 0; i < B.rows(); ++i) CHECK(B.row(i).sum() == 2.0);

  const auto p = fixture("p122");
  const RealMatrix Bp = build_B(*p);
  REQUIRE(Bp.rows() == 10);
  for (int e = 0; e < 10; ++e) {
    const double s = Bp.row(e).sum();
    CHECK((s == 1.0 || s == 2.0));
    CHECK(s == p->degree(p->head(e)) - 1);
    CHECK(Bp(e, Graph::inverse(e)) == 0.0);
  }
  const Graph path = parse_graph("nbgraph v1\nvertices 3\nedge 0 1\nedge 1 2\n");
  CHECK_THROWS_AS(build_B(path), DegreeTooLow);
}

TEST_CASE("companion matrix") {
  const auto tri = fixture("triangle");
  const auto w = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
  CHECK(multisets_equal(eig_dense(build_companion(*tri)),
                        {1.0, 1.0, w, w, std::conj(w), std::conj(w)}, 1e-7));

  const auto k4 = fixture("k4");
  const cplx c(-0.5, std::sqrt(7.0) / 2.0);
  CHECK(multisets_equal(eig_dense(build_companion(*k4)),
                        {2.0, 1.0, c, c, c, std::conj(c), std::conj(c), std::conj(c)}, 1e-7));
  const RealMatrix X = build_companion(*fixture("p122"));
  CHECK(X.rows() == 8);
  CHECK(X.cols() == 8);
}

TEST_CASE("closed-form NB spectra") {
  const auto tri = nb_spectrum_finite(*fixture("triangle"));
  CHECK(tri.eigenvalues.size() == 6);
  const auto w = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
  CHECK(multisets_equal(tri.eigenvalues, {1.0, 1.0, w, w, std::conj(w), std::conj(w)}, 1e-7));

  const auto k4g = fixture("k4");
  const auto k4 = nb_spectrum_finite(*k4g);
  REQUIRE(k4.eigenvalues.size() == 12);
  const cplx c(-0.5, std::sqrt(7.0) / 2.0);
  const std::vector<cplx> expected{2.0, 1.0, 1.0, 1.0, -1.0, -1.0,
                                   c,   c,   c,   std::conj(c), std::conj(c), std::conj(c)};
  CHECK(multisets_equal(k4.eigenvalues, expected, 1e-7));
  CHECK(multisets_equal(k4.eigenvalues, testing::regular_nb_oracle(*k4g), 1e-7));
  int pm = 0;
  for (auto p : k4.provenance) pm += p == Provenance::BassPm1;
  CHECK(pm == 4);
  for (cplx x : k4.eigenvalues)
    if (std::abs(x.imag()) > 1e-6) CHECK(std::abs(std::abs(x) - std::sqrt(2.0)) < 1e-7);

  CHECK(multisets_equal(nb_spectrum_finite(*fixture("petersen")).eigenvalues,
                        testing::regular_nb_oracle(*fixture("petersen")), 1e-6));
}

TEST_CASE("both pipelines agree") {
  for (const auto& name : testing::leafless_fixtures()) {
    const auto g = fixture(name);
    const auto a = nb_spectrum_finite(*g).eigenvalues;
    const auto b = nb_spectrum_direct(*g);
    CHECK(a.size() == static_cast<std::size_t>(g->n_directed()));
    CHECK(b.size() == a.size());
    // C5 has defective eigenvalues, so its eigen solve is only ~sqrt(eps) accurate.
    CHECK_MESSAGE(multisets_equal(a, b, 1e-6), name);
    if (name == "p122") CHECK(multisets_equal(a, b, 1e-8));
  }
}

TEST_CASE("Bass identity") {
  for (const auto& name : testing::leafless_fixtures()) {
    const auto g = fixture(name);
    CHECK_MESSAGE(verify_bass(*g, 20, 1) <= 1e-9, name);
  }
  CHECK(verify_bass(*fixture("triangle"), 20, 9) <= 1e-10);
  const auto [lhs, rhs] = bass_sides(*fixture("k4"), 0.0);
  CHECK(lhs == cplx(1.0));
  CHECK(rhs == cplx(1.0));
  // Independent spot check: exponent m - n on K4 at u = 0.3.
  const auto k4 = fixture("k4");
  const double u = 0.3;
  RealMatrix lhsm = RealMatrix::Identity(12, 12) - u * build_B(*k4);
  RealMatrix rhsm = RealMatrix::Identity(4, 4) - u * adjacency_matrix(*k4) +
                    u * u * 2.0 * RealMatrix::Identity(4, 4);
  CHECK(lhsm.determinant() ==
        doctest::Approx(std::pow(1 - u * u, 2) * rhsm.determinant()).epsilon(1e-12));
}

TEST_CASE("growth rate") {
  CHECK(std::abs(growth_rate(*fixture("k4")) - 2.0) <= 1e-10);
  CHECK(std::abs(growth_rate(*fixture("petersen")) - 2.0) <= 1e-10);
  CHECK(std::abs(growth_rate(*fixture("triangle")) - 1.0) <= 1e-10);
  CHECK(std::abs(growth_rate(*fixture("c5")) - 1.0) <= 1e-7);

  const auto p = fixture("p122");
  const double gr = growth_rate(*p);
  CHECK(gr > 1.0);
  CHECK(gr < 2.0);
  double mx = 0.0;
  for (cplx x : eig_dense(build_companion(*p))) mx = std::max(mx, std::abs(x));
  CHECK(std::abs(gr - mx) <= 1e-8);
  // det(Q_gr) = 0 with Q_t = Q - t A + t^2 I built independently.
  RealMatrix Q = RealMatrix::Zero(4, 4);
  for (int v = 0; v < 4; ++v) Q(v, v) = p->degree(v) - 1 + gr * gr;
  for (const auto& e : p->edges()) {
    Q(e.u, e.v) = -gr;
    Q(e.v, e.u) = -gr;
  }
  CHECK(std::abs(Q.determinant()) <= 1e-9);
  CHECK(gr == doctest::Approx(1.521379706805).epsilon(1e-11));

  for (const auto& name : testing::leafless_fixtures()) {
    const auto g = fixture(name);
    const double r = growth_rate(*g);
    CHECK(r >= g->d_min() - 1 - 1e-9);
    CHECK(r <= g->d_max() - 1 + 1e-9);
    double top = 0.0;
    for (cplx x : nb_spectrum_finite(*g).eigenvalues) top = std::max(top, std::abs(x));
    CHECK(std::abs(top - r) <= (name == "c5" ? 1e-6 : 1e-8));
  }
}

TEST_CASE("annulus audit on fixtures") {
  for (const auto& name : testing::leafless_fixtures()) {
    const auto g = fixture(name);
    const auto a = annulus_audit(*g, nb_spectrum_finite(*g).eigenvalues);
    CHECK_MESSAGE(a.ok, name);
    CHECK(a.checked == g->n_directed());
  }
  // A value off the annulus is flagged.
  const auto k4 = fixture("k4");
  const auto bad = annulus_audit(*k4, {cplx(0.5, 0.5)});
  CHECK_FALSE(bad.ok);
  CHECK(bad.violations == 1);
}

}  // TEST_SUITE
