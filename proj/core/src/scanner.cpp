#include "nbspectra/scanner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "nbspectra/error.hpp"
#include "nbspectra/finite_spectrum.hpp"
#include "nbspectra/version.hpp"
#include "strings.hpp"

namespace nbspectra {

Prefilter prefilter(const Graph& g, cplx lambda, double gr, double delta) {
  require_leafless(g, "prefilter");
  const double a = std::abs(lambda);
  if (a < 1.0 - delta || a > std::sqrt(gr) + delta) return Prefilter::Out;
  if (lambda.imag() != 0.0) {
    if (a < std::sqrt(g.d_min() - 1.0) - delta || a > std::sqrt(g.d_max() - 1.0) + delta)
      return Prefilter::Out;
  }
  return Prefilter::MustTest;
}

Prefilter prefilter(const Graph& g, cplx lambda) {
  return prefilter(g, lambda, growth_rate(g));
}

double SpectrumRaster::cell_diagonal() const { return std::hypot(dx(), dy()); }

cplx SpectrumRaster::center(int i, int j) const {
  return {region.re_min + (i + 0.5) * dx(), region.im_min + (j + 0.5) * dy()};
}

namespace {

CellCode code_of(const MembershipVerdict& v) {
  switch (v.decision) {
    case Decision::Out: return CellCode::Out;
    case Decision::In:
    case Decision::Boundary: return CellCode::In;
    case Decision::Unknown: return CellCode::Unknown;
  }
  return CellCode::Unknown;
}

bool use_prefilter_for(const OperatorFamily& f, bool requested) {
  return requested && f.kind() == OperatorKind::QLambda && f.graph().d_min() >= 2;
}

struct CellResult {
  CellCode code = CellCode::Unknown;
  bool evaluated = false;
  bool prefiltered = false;
  bool forced = false;
  bool boundary = false;
  bool heuristic = false;
};

template <class Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int k = 0; k < n; ++k) fn(k);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex mu;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      try {
        for (int k = next++; k < n; k = next++) fn(k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace

CellCode evaluate_point(const OperatorFamily& f, cplx lambda, const SolverConfig& cfg,
                        bool use_prefilter, MembershipVerdict* verdict) {
  if (use_prefilter_for(f, use_prefilter) &&
      prefilter(f.graph(), lambda, f.growth_rate()) == Prefilter::Out) {
    if (verdict) {
      *verdict = MembershipVerdict{};
      verdict->lambda = lambda;
      verdict->decision = Decision::Out;
      verdict->diag.note = "prefilter";
    }
    return CellCode::Out;
  }
  MembershipVerdict v = membership(f, lambda, cfg);
  const CellCode c = code_of(v);
  if (verdict) *verdict = std::move(v);
  return c;
}

SpectrumRaster scan(const OperatorFamily& f, const ScanOptions& opt) {
  if (!opt.region.valid()) throw PreconditionFailed("scan: region must have min < max on both axes");
  if (opt.n_re < 1 || opt.n_im < 1) throw PreconditionFailed("scan: grid dimensions must be >= 1");
  SpectrumRaster r;
  r.region = opt.region;
  r.n_re = opt.n_re;
  r.n_im = opt.n_im;
  r.codes.assign(static_cast<std::size_t>(opt.n_re) * opt.n_im, CellCode::Unknown);
  r.family = std::string(to_string(f.kind()));
  r.graph_fingerprint = f.graph().fingerprint();
  r.eps_alpha = opt.solver.eps_alpha;
  r.seed = opt.solver.seed;
  r.gr = f.growth_rate();

  // Mirroring by index needs a region symmetric about both axes.
  const double sym_tol = 1e-12 * std::max({1.0, std::abs(opt.region.re_max), std::abs(opt.region.im_max)});
  const bool symmetric_region = std::abs(opt.region.re_min + opt.region.re_max) <= sym_tol &&
                                std::abs(opt.region.im_min + opt.region.im_max) <= sym_tol;
  r.use_symmetry = opt.use_symmetry && symmetric_region && f.sign_symmetric();
  const int i0 = r.use_symmetry ? opt.n_re / 2 : 0;
  const int j0 = r.use_symmetry ? opt.n_im / 2 : 0;

  std::vector<std::pair<int, int>> todo;
  for (int j = j0; j < opt.n_im; ++j)
    for (int i = i0; i < opt.n_re; ++i) todo.emplace_back(i, j);

  const bool qlambda = f.kind() == OperatorKind::QLambda;
  const bool pre = use_prefilter_for(f, opt.use_prefilter);
  std::vector<CellResult> res(todo.size());
  auto run_cell = [&](int k, const SolverConfig& cfg) {
    const auto [i, j] = todo[static_cast<std::size_t>(k)];
    CellResult out;
    const double xl = r.region.re_min + i * r.dx(), xh = r.region.re_min + (i + 1) * r.dx();
    const double yl = r.region.im_min + j * r.dy(), yh = r.region.im_min + (j + 1) * r.dy();
    const bool has_pm1 = yl <= 0.0 && 0.0 <= yh && ((xl <= 1.0 && 1.0 <= xh) || (xl <= -1.0 && -1.0 <= xh));
    if (qlambda && has_pm1) {
      out.code = CellCode::In;
      out.forced = true;
    } else {
      const cplx c = r.center(i, j);
      // Whole-cell test: a thin spectral set (a circle) must still reach the solver.
      if (pre && prefilter(f.graph(), c, r.gr, 0.5 * r.cell_diagonal()) == Prefilter::Out) {
        out.code = CellCode::Out;
        out.prefiltered = true;
      } else {
        const MembershipVerdict v = membership(f, c, cfg);
        out.code = code_of(v);
        out.evaluated = true;
        out.boundary = v.decision == Decision::Boundary;
        out.heuristic = v.decision == Decision::In && v.diag.heuristic;
      }
    }
    res[static_cast<std::size_t>(k)] = out;
  };
  parallel_for(static_cast<int>(todo.size()), opt.threads, [&](int k) { run_cell(k, opt.solver); });

  if (opt.second_pass) {
    std::vector<int> again;
    for (int k = 0; k < static_cast<int>(todo.size()); ++k)
      if (res[k].code == CellCode::Unknown) again.push_back(k);
    const SolverConfig big = opt.solver.scaled(4);
    parallel_for(static_cast<int>(again.size()), opt.threads,
                 [&](int t) { run_cell(again[static_cast<std::size_t>(t)], big); });
    r.counts.retested = static_cast<int>(again.size());
  }

  for (std::size_t k = 0; k < todo.size(); ++k) {
    const auto [i, j] = todo[k];
    const CellResult& c = res[k];
    r.codes[static_cast<std::size_t>(j) * opt.n_re + i] = c.code;
    r.counts.evaluated += c.evaluated;
    r.counts.prefiltered += c.prefiltered;
    r.counts.forced += c.forced;
    r.counts.boundary_certified += c.boundary;
    r.counts.heuristic_in += c.heuristic;
  }
  if (r.use_symmetry) {
    for (int j = 0; j < opt.n_im; ++j) {
      for (int i = 0; i < opt.n_re; ++i) {
        if (i >= i0 && j >= j0) continue;
        const int si = i >= i0 ? i : opt.n_re - 1 - i;
        const int sj = j >= j0 ? j : opt.n_im - 1 - j;
        r.codes[static_cast<std::size_t>(j) * opt.n_re + i] =
            r.codes[static_cast<std::size_t>(sj) * opt.n_re + si];
        ++r.counts.mirrored;
      }
    }
  }
  for (auto c : r.codes) {
    if (c == CellCode::In) ++r.counts.in;
    else if (c == CellCode::Out) ++r.counts.out;
    else ++r.counts.unknown;
  }
  return r;
}

std::string raster_metadata_json(const SpectrumRaster& r, const std::string& extra_config) {
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["family"] = r.family;
  j["graph_fingerprint"] = detail::format("%016llx", static_cast<unsigned long long>(r.graph_fingerprint));
  j["region"] = {r.region.re_min, r.region.re_max, r.region.im_min, r.region.im_max};
  j["grid"] = {r.n_re, r.n_im};
  j["eps_alpha"] = r.eps_alpha;
  j["seed"] = r.seed;
  j["gr"] = r.gr;
  j["use_symmetry"] = r.use_symmetry;
  j["codes"] = {{"out", 0}, {"in", 1}, {"unknown", 2}};
  nlohmann::ordered_json c;
  c["in"] = r.counts.in;
  c["out"] = r.counts.out;
  c["unknown"] = r.counts.unknown;
  c["evaluated"] = r.counts.evaluated;
  c["mirrored"] = r.counts.mirrored;
  c["prefiltered"] = r.counts.prefiltered;
  c["forced"] = r.counts.forced;
  c["boundary_certified"] = r.counts.boundary_certified;
  c["heuristic_in"] = r.counts.heuristic_in;
  c["retested"] = r.counts.retested;
  j["counts"] = c;
  if (!extra_config.empty()) j["config"] = nlohmann::ordered_json::parse(extra_config);
  return j.dump(2);
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IOError("cannot write " + path.string());
  return f;
}

void finish(std::ofstream& f, const std::filesystem::path& path) {
  f.flush();
  if (!f) throw IOError("write failed: " + path.string());
}

}  // namespace

void write_raster_csv(const SpectrumRaster& r, const std::filesystem::path& path,
                      const std::string& provenance_line) {
  auto f = open_out(path);
  if (!provenance_line.empty()) f << "# " << provenance_line << '\n';
  f << "re,im,code\n";
  for (int j = 0; j < r.n_im; ++j)
    for (int i = 0; i < r.n_re; ++i) {
      const cplx c = r.center(i, j);
      f << detail::format("%.12g,%.12g,%d\n", c.real(), c.imag(), static_cast<int>(r.at(i, j)));
    }
  finish(f, path);
}

void write_raster_pgm(const SpectrumRaster& r, const std::filesystem::path& path) {
  auto f = open_out(path);
  f << "P2\n" << r.n_re << ' ' << r.n_im << "\n255\n";
  // Top row is the largest imaginary part.
  for (int j = r.n_im - 1; j >= 0; --j) {
    for (int i = 0; i < r.n_re; ++i) {
      const CellCode c = r.at(i, j);
      const int v = c == CellCode::Out ? 0 : (c == CellCode::In ? 255 : 128);
      f << v << (i + 1 < r.n_re ? ' ' : '\n');
    }
  }
  finish(f, path);
}

void write_raster_metadata(const SpectrumRaster& r, const std::filesystem::path& path,
                           const std::string& extra_config) {
  auto f = open_out(path);
  f << raster_metadata_json(r, extra_config) << '\n';
  finish(f, path);
}

SpectrumRaster read_raster_csv(const std::filesystem::path& csv_path,
                               const std::filesystem::path& metadata_path) {
  std::ifstream mf(metadata_path);
  if (!mf) throw IOError("cannot open " + metadata_path.string());
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(mf);
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("raster metadata: ") + ex.what());
  }
  SpectrumRaster r;
  try {
    const auto& reg = meta.at("region");
    r.region = {reg.at(0).get<double>(), reg.at(1).get<double>(), reg.at(2).get<double>(),
                reg.at(3).get<double>()};
    r.n_re = meta.at("grid").at(0).get<int>();
    r.n_im = meta.at("grid").at(1).get<int>();
    r.family = meta.value("family", "");
    r.eps_alpha = meta.value("eps_alpha", 0.0);
    r.seed = meta.value("seed", std::uint64_t{0});
    r.gr = meta.value("gr", 0.0);
    r.use_symmetry = meta.value("use_symmetry", false);
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("raster metadata: ") + ex.what());
  }
  if (r.n_re < 1 || r.n_im < 1 || !r.region.valid()) throw ParseError("raster metadata: bad grid");
  r.codes.assign(static_cast<std::size_t>(r.n_re) * r.n_im, CellCode::Unknown);
  std::ifstream cf(csv_path);
  if (!cf) throw IOError("cannot open " + csv_path.string());
  std::string line;
  std::size_t k = 0;
  while (std::getline(cf, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("re,", 0) == 0) continue;
    const auto last = line.rfind(',');
    if (last == std::string::npos || k >= r.codes.size()) throw ParseError("raster CSV: bad row");
    long long code = 0;
    if (!detail::parse_int(std::string_view(line).substr(last + 1), code) || code < 0 || code > 2)
      throw ParseError("raster CSV: bad code");
    r.codes[k++] = static_cast<CellCode>(code);
  }
  if (k != r.codes.size()) throw ParseError("raster CSV: row count does not match the grid");
  return r;
}

SymmetryAudit symmetry_audit(const OperatorFamily& f, const Region& region, int n_points,
                             std::uint64_t seed, const SolverConfig& cfg) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(region.re_min, region.re_max);
  std::uniform_real_distribution<double> uy(region.im_min, region.im_max);
  SymmetryAudit a;
  for (int k = 0; k < n_points; ++k) {
    const double x = ux(rng);
    const double y = uy(rng);
    const cplx t(x, y);
    const CellCode c0 = evaluate_point(f, t, cfg);
    const CellCode c1 = evaluate_point(f, -t, cfg);
    const CellCode c2 = evaluate_point(f, std::conj(t), cfg);
    ++a.points;
    if (c0 != c1 || c0 != c2) {
      ++a.mismatches;
      a.failing.push_back(t);
    }
  }
  return a;
}

PrefilterAudit prefilter_audit(const OperatorFamily& f, const Region& region, int n_points,
                               std::uint64_t seed, const SolverConfig& cfg) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(region.re_min, region.re_max);
  std::uniform_real_distribution<double> uy(region.im_min, region.im_max);
  PrefilterAudit a;
  const double gr = f.growth_rate();
  int guard = 0;
  while (a.points < n_points && guard++ < 1000 * n_points) {
    const cplx t(ux(rng), uy(rng));
    if (prefilter(f.graph(), t, gr) != Prefilter::Out) continue;
    ++a.points;
    MembershipVerdict v;
    if (evaluate_point(f, t, cfg, /*use_prefilter=*/false, &v) != CellCode::In) continue;
    // A validated system with alpha < 1 certifies OUT even inside the eps band.
    if (v.decision == Decision::Boundary && v.evidence && v.alpha < 1.0)
      ++a.boundary_band;
    else
      ++a.violations;
  }
  return a;
}

ContainmentReport containment_report(const SpectrumRaster& r, const Graph& g) {
  ContainmentReport rep;
  const double diag = r.cell_diagonal();
  const double sg = std::sqrt(r.gr);
  const double lo = std::sqrt(g.d_min() - 1.0);
  const double hi = std::sqrt(g.d_max() - 1.0);
  for (int j = 0; j < r.n_im; ++j) {
    for (int i = 0; i < r.n_re; ++i) {
      const cplx c = r.center(i, j);
      const double a = std::abs(c);
      const bool in_annulus = a >= 1.0 && a <= sg;
      rep.annulus_cells += in_annulus;
      if (r.at(i, j) != CellCode::In) continue;
      ++rep.in_cells;
      rep.annulus_in += in_annulus;
      bool bad = a > sg + diag || a < 1.0 - diag;
      if (std::abs(c.imag()) > 0.5 * r.dy()) bad = bad || a < lo - diag || a > hi + diag;
      rep.violations += bad;
    }
  }
  return rep;
}

}  // namespace nbspectra
