#include "nbspectra/cover_solver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>

#include "json.hpp"
#include "nbspectra/error.hpp"
#include "strings.hpp"

namespace nbspectra {

std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::Out: return "out";
    case Decision::In: return "in";
    case Decision::Boundary: return "boundary";
    case Decision::Unknown: return "unknown";
  }
  return "?";
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::ForcedPoint: return "forced_point";
    case Method::FixedPoint: return "fixed_point";
    case Method::Continuation: return "continuation";
    case Method::NewtonMultistart: return "newton_multistart";
    case Method::None: return "none";
  }
  return "?";
}

SolverConfig SolverConfig::scaled(int factor) const {
  SolverConfig c = *this;
  c.fp_max_iter *= factor;
  c.newton_starts *= factor;
  c.newton_max_iter *= factor;
  c.continuation_steps += 4 * (factor - 1);
  return c;
}

namespace {

enum class FpStatus { Converged, Diverged, Pole, Cap };

struct FpRun {
  FpStatus status = FpStatus::Cap;
  std::vector<cplx> r;
  int iterations = 0;
  double last_step = std::numeric_limits<double>::infinity();
};

FpRun fp_iterate(const LocalOperator& M, std::vector<cplx> r, double theta, int max_iter,
                 double tol) {
  const Graph& g = M.graph();
  const int nd = g.n_directed();
  FpRun run;
  std::vector<cplx> next(static_cast<std::size_t>(nd));
  for (int it = 0; it < max_iter; ++it) {
    double step = 0.0, big = 0.0, res = 0.0;
    for (int e = 0; e < nd; ++e) {
      cplx d = M.diag(g.head(e));
      for (int f : g.follow(e)) d += M.off(f) * r[f];
      if (std::abs(d) < 1e-14) {
        run.status = FpStatus::Pole;
        run.iterations = it;
        run.r = std::move(r);
        return run;
      }
      const cplx upd = -M.off(Graph::inverse(e)) / d;
      res = std::max(res, std::abs(M.off(Graph::inverse(e)) + r[e] * d));
      next[e] = (1.0 - theta) * r[e] + theta * upd;
      step = std::max(step, std::abs(next[e] - r[e]));
      big = std::max(big, std::abs(next[e]));
    }
    r.swap(next);
    run.iterations = it + 1;
    run.last_step = step;
    if (!std::isfinite(big) || big > 1e12) {
      run.status = FpStatus::Diverged;
      run.r = std::move(r);
      return run;
    }
    if (step <= tol && res <= tol) {
      run.status = FpStatus::Converged;
      run.r = std::move(r);
      return run;
    }
  }
  run.status = FpStatus::Cap;
  run.r = std::move(r);
  return run;
}

// Newton state: w[e] is r_e (direct chart) or 1/r_e (reciprocal chart).
struct Chart {
  std::vector<cplx> w;
  std::vector<char> rec;
};

struct NewtonRun {
  bool converged = false;
  Chart chart;
  double residual = 0.0;
  int iterations = 0;
};

void cleared_system(const LocalOperator& M, const Chart& c, Eigen::VectorXcd& G,
                    ComplexMatrix& J) {
  const Graph& g = M.graph();
  const int nd = g.n_directed();
  G.setZero(nd);
  J.setZero(nd, nd);
  cplx pm[16];
  for (int e = 0; e < nd; ++e) {
    const auto F = g.follow(e);
    const int k = static_cast<int>(F.size());
    const cplx mbb = M.diag(g.head(e));
    const cplx minv = M.off(Graph::inverse(e));
    // P and leave-one-out products over reciprocal followers.
    cplx P = 1.0;
    for (int j : F)
      if (c.rec[j]) P *= c.w[j];
    auto prod_except = [&](int a, int b) {
      cplx p = 1.0;
      for (int j : F)
        if (c.rec[j] && j != a && j != b) p *= c.w[j];
      return p;
    };
    cplx K = P * mbb;
    for (int t = 0; t < k; ++t) {
      const int j = F[t];
      if (c.rec[j]) {
        pm[t % 16] = prod_except(j, -1);
        K += M.off(j) * pm[t % 16];
      } else {
        K += M.off(j) * c.w[j] * P;
      }
    }
    const bool re = c.rec[e] != 0;
    const cplx we = c.w[e];
    G[e] = re ? K + minv * we * P : we * K + minv * P;
    J(e, e) += re ? minv * P : K;
    const cplx lead = re ? cplx(1.0) : we;
    for (int t = 0; t < k; ++t) {
      const int j = F[t];
      if (!c.rec[j]) {
        J(e, j) += lead * M.off(j) * P;
        continue;
      }
      const cplx Pj = k <= 16 ? pm[t] : prod_except(j, -1);
      cplx dK = Pj * mbb;
      for (int s = 0; s < k; ++s) {
        const int i = F[s];
        if (i == j) continue;
        if (c.rec[i])
          dK += M.off(i) * prod_except(i, j);
        else
          dK += M.off(i) * c.w[i] * Pj;
      }
      J(e, j) += lead * dK + minv * (re ? we : cplx(1.0)) * Pj;
    }
  }
}

NewtonRun newton_run(const LocalOperator& M, Chart c, int max_iter, double tol,
                     double chart_switch) {
  const int nd = M.graph().n_directed();
  NewtonRun run;
  Eigen::VectorXcd G(nd);
  ComplexMatrix J(nd, nd);
  int quiet = 0;
  for (int it = 0; it < max_iter; ++it) {
    for (int e = 0; e < nd; ++e) {
      if (std::abs(c.w[e]) > chart_switch) {
        c.w[e] = 1.0 / c.w[e];
        c.rec[e] = !c.rec[e];
      }
    }
    cleared_system(M, c, G, J);
    const double res = G.cwiseAbs().maxCoeff();
    run.iterations = it;
    run.residual = res;
    if (!std::isfinite(res)) break;
    if (res <= tol * 1e-2) {
      run.converged = true;
      break;
    }
    Eigen::PartialPivLU<ComplexMatrix> lu(J);
    Eigen::VectorXcd d = lu.solve(G);
    if (!d.allFinite()) break;
    for (int e = 0; e < nd; ++e) c.w[e] -= d[e];
    double wmax = 0.0;
    for (const auto& x : c.w) wmax = std::max(wmax, std::abs(x));
    const double dn = d.cwiseAbs().maxCoeff();
    if (dn <= 1e-14 * (1.0 + wmax) && res <= tol) {
      // Stagnated at the rounding floor; accept after a short confirmation.
      if (++quiet >= 2) {
        cleared_system(M, c, G, J);
        run.residual = G.cwiseAbs().maxCoeff();
        run.converged = run.residual <= tol;
        run.iterations = it + 1;
        break;
      }
    } else {
      quiet = 0;
    }
  }
  run.chart = std::move(c);
  return run;
}

RatioAssignment classify(const Chart& c, double eta, int* degenerate = nullptr) {
  RatioAssignment out;
  out.r.reserve(c.w.size());
  for (std::size_t e = 0; e < c.w.size(); ++e) {
    const double a = std::abs(c.w[e]);
    if (degenerate && a > eta && a < 1e-4) ++*degenerate;
    if (c.rec[e]) {
      out.r.push_back(a <= eta ? Ratio::infinite() : Ratio::finite(1.0 / c.w[e]));
    } else {
      out.r.push_back(a <= eta ? Ratio::zero() : Ratio::finite(c.w[e]));
    }
  }
  return out;
}

Chart direct_chart(const std::vector<cplx>& r) {
  return Chart{r, std::vector<char>(r.size(), 0)};
}

double chordal(const Ratio& a, const Ratio& b) {
  if (a.is_infinite() && b.is_infinite()) return 0.0;
  if (a.is_infinite()) return 1.0 / std::sqrt(1.0 + std::norm(b.finite_value()));
  if (b.is_infinite()) return 1.0 / std::sqrt(1.0 + std::norm(a.finite_value()));
  const cplx x = a.finite_value(), y = b.finite_value();
  return std::abs(x - y) / std::sqrt((1.0 + std::norm(x)) * (1.0 + std::norm(y)));
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

cplx shift_direction(cplx lambda) { return cplx(0.0, lambda.imag() < 0.0 ? -1.0 : 1.0); }

double default_T0(const OperatorFamily& f) {
  double gr = f.growth_rate();
  if (!std::isfinite(gr)) gr = std::max(1.0, f.graph().d_max() - 1.0);
  return 4.0 + 2.0 * std::sqrt(gr);
}

}  // namespace

FixedPointResult fixed_point_solve(const LocalOperator& M,
                                   const std::optional<std::vector<cplx>>& init, double damping,
                                   int max_iter, double tol) {
  const int nd = M.graph().n_directed();
  if (!(damping > 0.0 && damping <= 1.0))
    throw PreconditionFailed("fixed_point_solve: damping must lie in (0, 1]");
  std::vector<cplx> r0 = init ? *init : std::vector<cplx>(static_cast<std::size_t>(nd));
  if (static_cast<int>(r0.size()) != nd)
    throw PreconditionFailed("fixed_point_solve: init has the wrong size");
  FpRun run = fp_iterate(M, std::move(r0), damping, max_iter, tol);
  switch (run.status) {
    case FpStatus::Converged: break;
    case FpStatus::Pole:
      throw PoleHit(detail::format("fixed point hit a pole after %d iterations", run.iterations));
    case FpStatus::Diverged:
      throw Divergence(detail::format("fixed point diverged after %d iterations", run.iterations));
    case FpStatus::Cap:
      throw Divergence(detail::format("fixed point did not converge in %d iterations (step %.3e)",
                                      run.iterations, run.last_step));
  }
  FixedPointResult out;
  for (const auto& v : run.r) out.r.r.push_back(Ratio::finite(v));
  out.iterations = run.iterations;
  out.last_step = run.last_step;
  return out;
}

ContinuationResult continuation_solve(const OperatorFamily& f, cplx lambda, double T0, int steps,
                                      const SolverConfig& cfg) {
  if (steps < 1) throw PreconditionFailed("continuation_solve: steps must be >= 1");
  const cplx dir = shift_direction(lambda);
  std::vector<double> shifts;
  if (T0 > 0.0)
    for (int k = 0; k < steps; ++k) shifts.push_back(T0 * std::ldexp(1.0, -k));
  shifts.push_back(0.0);

  ContinuationResult out;
  std::optional<Chart> prev;
  double last_good = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t s = 0; s < shifts.size(); ++s) {
    const LocalOperator M = f.evaluate(lambda + dir * shifts[s]);
    std::optional<Chart> got;
    if (prev) {
      NewtonRun nr = newton_run(M, *prev, cfg.newton_max_iter, cfg.tol, cfg.chart_switch);
      if (nr.converged) got = std::move(nr.chart);
    }
    if (!got) {
      std::vector<cplx> init(static_cast<std::size_t>(M.graph().n_directed()));
      if (prev) {
        const RatioAssignment pr = classify(*prev, cfg.class_eta);
        if (pr.all_finite())
          for (int e = 0; e < M.graph().n_directed(); ++e) init[e] = pr[e].value;
      }
      FpRun fr = fp_iterate(M, init, cfg.damping, cfg.fp_max_iter, cfg.tol);
      if (fr.status == FpStatus::Converged) {
        got = direct_chart(fr.r);
      } else if (fr.status == FpStatus::Cap && fr.last_step < 1e-3) {
        NewtonRun nr = newton_run(M, direct_chart(fr.r), cfg.newton_max_iter, cfg.tol,
                                  cfg.chart_switch);
        if (nr.converged) got = std::move(nr.chart);
      }
    }
    if (!got)
      throw Divergence(detail::format("continuation failed at shift %.6g (last good shift %.6g)",
                                      shifts[s], last_good));
    prev = std::move(got);
    last_good = shifts[s];
    out.stages = static_cast<int>(s) + 1;
  }
  out.r = classify(*prev, cfg.class_eta);
  out.last_shift = last_good;
  return out;
}

double chordal_distance(const RatioAssignment& a, const RatioAssignment& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double d = 0.0;
  for (std::size_t e = 0; e < a.size(); ++e) d = std::max(d, chordal(a.r[e], b.r[e]));
  return d;
}

std::vector<NewtonSolution> newton_multistart(const LocalOperator& M, const NewtonOptions& opt) {
  const int nd = M.graph().n_directed();
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto draw = [&] {
    const double a = gauss(rng);
    const double b = gauss(rng);
    cplx z = opt.radius * cplx(a, b) / std::sqrt(2.0);
    if (opt.conjugate_starts) z = std::conj(z);
    if (opt.negate_starts) z = -z;
    return z;
  };
  std::vector<NewtonSolution> out;
  const int n_const = (opt.n_starts + 1) / 2;
  for (int s = 0; s < opt.n_starts; ++s) {
    Chart c;
    c.rec.assign(static_cast<std::size_t>(nd), 0);
    if (s < n_const) {
      c.w.assign(static_cast<std::size_t>(nd), draw());
    } else {
      c.w.resize(static_cast<std::size_t>(nd));
      for (auto& x : c.w) x = draw();
    }
    NewtonRun nr = newton_run(M, std::move(c), opt.max_iter, opt.tol, opt.chart_switch);
    if (!nr.converged) continue;
    NewtonSolution sol;
    sol.r = classify(nr.chart, opt.class_eta);
    sol.residual = nr.residual;
    sol.iterations = nr.iterations;
    sol.start = s;
    bool dup = false;
    for (const auto& o : out)
      if (chordal_distance(o.r, sol.r) <= opt.dedup_radius) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(std::move(sol));
  }
  return out;
}

std::vector<NewtonSolution> newton_multistart(const LocalOperator& M, int n_starts,
                                              std::uint64_t seed, double tol) {
  NewtonOptions opt;
  opt.n_starts = n_starts;
  opt.seed = seed;
  opt.tol = tol;
  return newton_multistart(M, opt);
}

std::uint64_t point_seed(cplx lambda, std::uint64_t base, bool sign_symmetric) {
  const double re = sign_symmetric ? std::abs(lambda.real()) : lambda.real();
  const double im = std::abs(lambda.imag());
  // +0.0 and -0.0 must agree.
  const std::uint64_t a = std::bit_cast<std::uint64_t>(re + 0.0);
  const std::uint64_t b = std::bit_cast<std::uint64_t>(im + 0.0);
  return splitmix(splitmix(base ^ 0x6a09e667f3bcc909ULL) ^ a) ^ splitmix(b + 0x3c6ef372fe94f82bULL);
}

MembershipVerdict membership(const OperatorFamily& f, cplx lambda, const SolverConfig& cfg) {
  MembershipVerdict v;
  v.lambda = lambda;
  const Graph& g = f.graph();
  if (f.kind() == OperatorKind::QLambda) {
    if (lambda == cplx(1.0) || lambda == cplx(-1.0)) {
      v.decision = Decision::In;
      v.method = Method::ForcedPoint;
      v.diag.note = "lambda = +-1 lies in the spectrum of every cover";
      return v;
    }
    if (lambda == cplx(0.0)) {
      if (g.d_min() < 2) throw DegreeTooLow("membership at lambda = 0 requires d_min >= 2");
      v.decision = Decision::Out;
      v.method = Method::ForcedPoint;
      v.diag.note = "Q_0 = diag(d_v - 1) is invertible";
      return v;
    }
  }
  const LocalOperator M = f.evaluate(lambda);
  const double lo = 1.0 - cfg.eps_alpha;

  std::optional<RatioAssignment> best;
  double best_alpha = std::numeric_limits<double>::infinity();
  Method best_method = Method::None;
  double best_rejected = std::numeric_limits<double>::infinity();

  // Returns true when an OUT certificate was found.
  auto consider = [&](RatioAssignment r, Method m) {
    ++v.diag.candidates;
    const ValidityReport rep = validate(r, M, cfg.residual_tol);
    if (!structurally_valid(r, g)) {
      ++v.diag.rejected;
      return false;
    }
    const double a = build_R(r, M).alpha;
    if (!rep.valid) {
      ++v.diag.rejected;
      best_rejected = std::min(best_rejected, a);
      return false;
    }
    ++v.diag.validated;
    if (a < best_alpha) {
      best_alpha = a;
      best = std::move(r);
      best_method = m;
    }
    return best_alpha <= lo;
  };

  auto finish = [&]() {
    v.diag.min_alpha = best ? best_alpha : -1.0;
    v.diag.min_alpha_rejected = std::isfinite(best_rejected) ? best_rejected : -1.0;
    if (best && best_alpha <= lo) {
      v.decision = Decision::Out;
    } else if (best && std::abs(best_alpha - 1.0) <= cfg.eps_alpha) {
      v.decision = Decision::Boundary;
    } else if (std::isfinite(best_rejected) && best_rejected <= lo) {
      v.decision = Decision::Unknown;
      v.diag.note = "only unvalidated candidates certify invertibility";
    } else {
      v.decision = Decision::In;
      v.diag.heuristic = true;
      v.diag.note = best ? "every validated system has alpha >= 1 + eps"
                         : "no ratio system found within budget";
    }
    if (best && v.decision != Decision::In && v.decision != Decision::Unknown) {
      v.evidence = best;
      v.alpha = best_alpha;
      v.method = best_method;
    } else if (best) {
      v.alpha = best_alpha;
      v.method = best_method;
    }
    return v;
  };

  if (cfg.use_fixed_point) {
    FpRun fr = fp_iterate(M, std::vector<cplx>(static_cast<std::size_t>(g.n_directed())),
                          cfg.damping, cfg.fp_max_iter, cfg.tol);
    v.diag.fp_iterations = fr.iterations;
    std::optional<RatioAssignment> cand;
    if (fr.status == FpStatus::Converged) {
      // Newton polish to rounding level; keep the raw iterate if it wanders.
      NewtonRun nr = newton_run(M, direct_chart(fr.r), 8, cfg.tol, cfg.chart_switch);
      RatioAssignment raw = RatioAssignment::from_values(fr.r, 0.0);
      if (nr.converged) {
        RatioAssignment pol = classify(nr.chart, cfg.class_eta, &v.diag.chart_degeneracies);
        cand = chordal_distance(pol, raw) <= 1e-6 ? std::move(pol) : std::move(raw);
      } else {
        cand = std::move(raw);
      }
    } else if (fr.status == FpStatus::Cap && fr.last_step < 1e-3) {
      NewtonRun nr =
          newton_run(M, direct_chart(fr.r), cfg.newton_max_iter, cfg.tol, cfg.chart_switch);
      if (nr.converged) cand = classify(nr.chart, cfg.class_eta, &v.diag.chart_degeneracies);
    }
    if (cand && consider(std::move(*cand), Method::FixedPoint)) return finish();
  }

  if (cfg.use_continuation) {
    const double T0 = cfg.T0 > 0.0 ? cfg.T0 : default_T0(f);
    try {
      ContinuationResult cr = continuation_solve(f, lambda, T0, cfg.continuation_steps, cfg);
      v.diag.continuation_stages = cr.stages;
      if (consider(std::move(cr.r), Method::Continuation)) return finish();
    } catch (const Divergence&) {
      // recorded through the stage count staying at zero
    }
  }

  if (cfg.use_newton && cfg.newton_starts > 0) {
    NewtonOptions opt;
    opt.n_starts = cfg.newton_starts;
    opt.seed = point_seed(lambda, cfg.seed, f.sign_symmetric());
    opt.tol = cfg.tol;
    opt.radius = cfg.newton_radius;
    opt.max_iter = cfg.newton_max_iter;
    opt.chart_switch = cfg.chart_switch;
    opt.class_eta = cfg.class_eta;
    opt.dedup_radius = cfg.dedup_radius;
    // Starts follow the symmetry that maps the reduced point onto lambda.
    opt.negate_starts = f.sign_symmetric() && lambda.real() < 0.0;
    const cplx t = opt.negate_starts ? -lambda : lambda;
    opt.conjugate_starts = t.imag() < 0.0;
    v.diag.newton_starts = opt.n_starts;
    const auto sols = newton_multistart(M, opt);
    v.diag.newton_converged = static_cast<int>(sols.size());
    for (const auto& s : sols)
      if (consider(s.r, Method::NewtonMultistart)) return finish();
  }
  return finish();
}

std::string verdict_to_json(const MembershipVerdict& v) {
  nlohmann::ordered_json j;
  j["lambda"] = {v.lambda.real(), v.lambda.imag()};
  j["decision"] = std::string(to_string(v.decision));
  if (v.alpha >= 0.0)
    j["alpha"] = v.alpha;
  else
    j["alpha"] = nullptr;
  j["method"] = std::string(to_string(v.method));
  if (v.evidence)
    j["ratios"] = nlohmann::ordered_json::parse(ratios_to_json(*v.evidence));
  else
    j["ratios"] = nullptr;
  nlohmann::ordered_json d;
  d["fp_iterations"] = v.diag.fp_iterations;
  d["continuation_stages"] = v.diag.continuation_stages;
  d["newton_starts"] = v.diag.newton_starts;
  d["newton_converged"] = v.diag.newton_converged;
  d["candidates"] = v.diag.candidates;
  d["validated"] = v.diag.validated;
  d["rejected"] = v.diag.rejected;
  d["min_alpha"] = v.diag.min_alpha >= 0.0 ? nlohmann::ordered_json(v.diag.min_alpha) : nullptr;
  d["heuristic"] = v.diag.heuristic;
  d["chart_degeneracies"] = v.diag.chart_degeneracies;
  d["note"] = v.diag.note;
  j["diagnostics"] = d;
  return j.dump();
}

}  // namespace nbspectra
