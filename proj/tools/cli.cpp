#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "nbspectra/nbspectra.hpp"

namespace nbspectra::cli {

namespace {

using ojson = nlohmann::ordered_json;

bool to_double(std::string_view s, double& v) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  return r.ec == std::errc() && r.ptr == s.data() + s.size() && std::isfinite(v);
}

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::string fmt_g(double v, int prec = 15) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

struct Common {
  std::string graph;
  std::string op = "qlambda";
  std::uint64_t seed = 0;
};

std::shared_ptr<const Graph> load(const std::string& path) {
  return std::make_shared<const Graph>(load_graph(path));
}

ojson provenance(const std::string& sub, const ojson& cfg) {
  ojson j;
  j["tool"] = "nbspectra";
  j["version"] = kVersion;
  j["subcommand"] = sub;
  j["config"] = cfg;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IOError("cannot write " + path);
  f << text;
  f.flush();
  if (!f) throw IOError("write failed: " + path);
}

void ensure_parent(const std::string& prefix) {
  const auto dir = std::filesystem::path(prefix).parent_path();
  if (dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IOError("cannot create " + dir.string() + ": " + ec.message());
}

}  // namespace

std::complex<double> parse_lambda(std::string_view raw) {
  const std::string s = trim(raw);
  auto bad = [&] { return PreconditionFailed("malformed lambda: '" + std::string(raw) + "'"); };
  if (s.empty()) throw bad();
  if (s.back() != 'i') {
    double re = 0.0;
    if (!to_double(s, re)) throw bad();
    return {re, 0.0};
  }
  const std::string body = s.substr(0, s.size() - 1);
  // Split at the last sign that is not part of an exponent.
  std::size_t cut = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      cut = k;
      break;
    }
  }
  auto imag_of = [&](std::string t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    double v = 0.0;
    if (!to_double(t, v)) throw bad();
    return v;
  };
  if (cut == std::string::npos) return {0.0, imag_of(body)};
  double re = 0.0;
  if (!to_double(body.substr(0, cut), re)) throw bad();
  return {re, imag_of(body.substr(cut))};
}

Region parse_region(std::string_view raw) {
  std::vector<double> v;
  std::string s(raw);
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    double x = 0.0;
    if (!to_double(trim(tok), x)) throw PreconditionFailed("malformed region: '" + s + "'");
    v.push_back(x);
  }
  if (v.size() != 4) throw PreconditionFailed("region needs re_min,re_max,im_min,im_max");
  Region r{v[0], v[1], v[2], v[3]};
  if (!r.valid()) throw PreconditionFailed("region must satisfy re_min < re_max and im_min < im_max");
  return r;
}

std::pair<int, int> parse_grid(std::string_view raw) {
  const std::string s = trim(raw);
  const auto x = s.find_first_of("xX");
  auto one = [&](std::string_view t) {
    int v = 0;
    auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size() || v < 1 || v > 100000)
      throw PreconditionFailed("malformed grid: '" + s + "'");
    return v;
  };
  if (x == std::string::npos) {
    const int n = one(s);
    return {n, n};
  }
  return {one(std::string_view(s).substr(0, x)), one(std::string_view(s).substr(x + 1))};
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Non-backtracking spectra of finite graphs and their universal covers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());

  // spectrum
  Common sp;
  std::string sp_method = "companion", sp_out;
  auto* c_spec = app.add_subcommand("spectrum", "Finite non-backtracking spectrum as re,im CSV");
  c_spec->add_option("graph", sp.graph, "Graph file (nbgraph v1)")->required();
  c_spec->add_option("--method", sp_method, "companion (X plus +-1 padding) or direct (eig of B)")
      ->check(CLI::IsMember({"companion", "direct"}));
  c_spec->add_option("--out", sp_out, "Output CSV (default: stdout)");

  // scan
  Common sc;
  std::string sc_region = "-1.6,1.6,-1.6,1.6", sc_grid = "200x200", sc_out, sc_format = "both";
  double sc_eps = 0.02;
  int sc_starts = 32;
  unsigned sc_threads = hw;
  bool sc_nosym = false, sc_nopre = false;
  auto* c_scan = app.add_subcommand("scan", "Rasterize the cover spectrum over a rectangle");
  c_scan->add_option("graph", sc.graph, "Graph file")->required();
  c_scan->add_option("--operator", sc.op, "qlambda | adjacency | weighted")
      ->check(CLI::IsMember({"qlambda", "adjacency", "weighted"}));
  c_scan->add_option("--region", sc_region, "re_min,re_max,im_min,im_max");
  c_scan->add_option("--grid", sc_grid, "NxM cells (Re x Im)");
  c_scan->add_option("--seed", sc.seed, "Base seed")->envname("NBSPECTRA_SEED");
  c_scan->add_option("--eps-alpha", sc_eps, "Decay-rate margin");
  c_scan->add_option("--starts", sc_starts, "Newton starts per point");
  c_scan->add_option("--threads", sc_threads, "Worker threads (wall time only)");
  c_scan->add_flag("--no-symmetry", sc_nosym, "Evaluate every cell instead of one quadrant");
  c_scan->add_flag("--no-prefilter", sc_nopre, "Skip the annulus prefilter");
  c_scan->add_option("--out", sc_out, "Output prefix: writes PREFIX.csv, PREFIX.pgm, PREFIX.json")
      ->required();
  c_scan->add_option("--format", sc_format, "csv | pgm | both")
      ->check(CLI::IsMember({"csv", "pgm", "both"}));

  // ratios
  Common ra;
  std::string ra_lambda;
  double ra_eps = 0.02;
  int ra_starts = 32;
  auto* c_rat = app.add_subcommand("ratios", "Membership verdict with a ratio system as evidence");
  c_rat->add_option("graph", ra.graph, "Graph file")->required();
  c_rat->add_option("--operator", ra.op, "qlambda | adjacency | weighted")
      ->check(CLI::IsMember({"qlambda", "adjacency", "weighted"}));
  c_rat->add_option("--lambda", ra_lambda, "Spectral parameter, e.g. 1.2-0.3i")->required();
  c_rat->add_option("--starts", ra_starts, "Newton starts");
  c_rat->add_option("--seed", ra.seed, "Base seed")->envname("NBSPECTRA_SEED");
  c_rat->add_option("--eps-alpha", ra_eps, "Decay-rate margin");

  // lift
  Common li;
  int li_n = 1;
  std::string li_raster, li_out;
  double li_eps = 0.05;
  auto* c_lift = app.add_subcommand("lift", "Random n-lift spectrum split into old and new");
  c_lift->add_option("graph", li.graph, "Base graph file")->required();
  c_lift->add_option("-n", li_n, "Lift degree")->required()->check(CLI::PositiveNumber);
  c_lift->add_option("--seed", li.seed, "Seed")->envname("NBSPECTRA_SEED");
  c_lift->add_option("--raster", li_raster, "Raster prefix from scan (PREFIX.csv + PREFIX.json)");
  c_lift->add_option("--eps-d", li_eps, "Distance threshold for the region statistic");
  c_lift->add_option("--out", li_out, "Output prefix: PREFIX.points.csv, PREFIX.stats.json")
      ->required();

  // verify
  Common ve;
  int ve_samples = 20;
  auto* c_ver = app.add_subcommand("verify", "Bass identity residual and annulus audit");
  c_ver->add_option("graph", ve.graph, "Graph file")->required();
  c_ver->add_option("--samples", ve_samples, "Number of u samples")->check(CLI::PositiveNumber);
  c_ver->add_option("--seed", ve.seed, "Seed")->envname("NBSPECTRA_SEED");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*c_spec) {
      auto g = load(sp.graph);
      std::vector<cplx> ev =
          sp_method == "direct" ? nb_spectrum_direct(*g) : nb_spectrum_finite(*g).eigenvalues;
      std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
      });
      ojson cfg;
      cfg["graph"] = sp.graph;
      cfg["method"] = sp_method;
      std::ostringstream body;
      body << "# " << provenance("spectrum", cfg).dump() << "\nre,im\n";
      for (const auto& z : ev) body << fmt_g(z.real()) << ',' << fmt_g(z.imag()) << '\n';
      if (sp_out.empty())
        out << body.str();
      else
        write_text(sp_out, body.str());
      return 0;
    }

    if (*c_scan) {
      auto g = load(sc.graph);
      const OperatorFamily f(g, operator_kind_from_string(sc.op));
      ScanOptions opt;
      opt.region = parse_region(sc_region);
      std::tie(opt.n_re, opt.n_im) = parse_grid(sc_grid);
      opt.solver.seed = sc.seed;
      opt.solver.eps_alpha = sc_eps;
      opt.solver.newton_starts = sc_starts;
      opt.use_symmetry = !sc_nosym && f.kind() != OperatorKind::WeightedAdjacency;
      opt.use_prefilter = !sc_nopre;
      opt.threads = static_cast<int>(sc_threads);
      ojson cfg;
      cfg["graph"] = sc.graph;
      cfg["operator"] = sc.op;
      cfg["region"] = {opt.region.re_min, opt.region.re_max, opt.region.im_min, opt.region.im_max};
      cfg["grid"] = {opt.n_re, opt.n_im};
      cfg["seed"] = sc.seed;
      cfg["eps_alpha"] = sc_eps;
      cfg["starts"] = sc_starts;
      cfg["use_symmetry"] = opt.use_symmetry;
      cfg["use_prefilter"] = opt.use_prefilter;
      const auto t0 = std::chrono::steady_clock::now();
      const SpectrumRaster r = scan(f, opt);
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      const std::string prov = provenance("scan", cfg).dump();
      ensure_parent(sc_out);
      if (sc_format != "pgm") write_raster_csv(r, sc_out + ".csv", prov);
      if (sc_format != "csv") write_raster_pgm(r, sc_out + ".pgm");
      write_raster_metadata(r, sc_out + ".json", provenance("scan", cfg).dump());
      out << "in=" << r.counts.in << " out=" << r.counts.out << " unknown=" << r.counts.unknown
          << " evaluated=" << r.counts.evaluated << " gr=" << fmt_g(r.gr, 12)
          << " runtime_s=" << fmt_g(secs, 4) << '\n';
      return 0;
    }

    if (*c_rat) {
      auto g = load(ra.graph);
      const OperatorFamily f(g, operator_kind_from_string(ra.op));
      const cplx lam = parse_lambda(ra_lambda);
      SolverConfig cfg;
      cfg.seed = ra.seed;
      cfg.eps_alpha = ra_eps;
      cfg.newton_starts = ra_starts;
      const MembershipVerdict v = membership(f, lam, cfg);
      ojson j = ojson::parse(verdict_to_json(v));
      ojson c;
      c["graph"] = ra.graph;
      c["operator"] = ra.op;
      c["lambda"] = ra_lambda;
      c["starts"] = ra_starts;
      c["seed"] = ra.seed;
      c["eps_alpha"] = ra_eps;
      j["provenance"] = provenance("ratios", c);
      out << j.dump() << '\n';
      return 0;
    }

    if (*c_lift) {
      auto g = load(li.graph);
      ojson cfg;
      cfg["graph"] = li.graph;
      cfg["n"] = li_n;
      cfg["seed"] = li.seed;
      cfg["raster"] = li_raster;
      cfg["eps_d"] = li_eps;
      const LiftResult lr = run_lift(*g, li_n, li.seed);
      const std::string prov = provenance("lift", cfg).dump();
      ensure_parent(li_out);
      write_point_cloud(lr.spectrum, li_out + ".points.csv", prov);
      const AnnulusAudit aa = annulus_audit(lr.lift, lr.spectrum.values);
      ojson st;
      st["provenance"] = provenance("lift", cfg);
      st["seed"] = li.seed;
      st["n"] = li_n;
      st["lift_vertices"] = lr.lift.n_vertices();
      st["connected"] = lr.connected;
      st["n_old"] = lr.spectrum.n_old;
      st["n_new"] = lr.spectrum.n_new;
      st["max_match_distance"] = lr.spectrum.max_match_distance;
      st["annulus_ok"] = aa.ok;
      st["annulus_violations"] = aa.violations;
      if (!li_raster.empty()) {
        const SpectrumRaster r = read_raster_csv(li_raster + ".csv", li_raster + ".json");
        st["region"] =
            ojson::parse(region_stats_json(region_distance_stats(lr.spectrum.new_values(), r, li_eps)));
      } else {
        st["region"] = nullptr;
      }
      write_text(li_out + ".stats.json", st.dump(2) + "\n");
      out << "old=" << lr.spectrum.n_old << " new=" << lr.spectrum.n_new
          << " connected=" << (lr.connected ? "yes" : "no") << '\n';
      return 0;
    }

    if (*c_ver) {
      auto g = load(ve.graph);
      require_leafless(*g, "verify");
      const BassReport br = verify_bass_report(*g, ve_samples, ve.seed);
      const auto spec = nb_spectrum_finite(*g).eigenvalues;
      const AnnulusAudit aa = annulus_audit(*g, spec);
      const bool pipelines = multisets_equal(spec, nb_spectrum_direct(*g), 1e-6);
      ojson j;
      j["graph"] = ve.graph;
      j["n_vertices"] = g->n_vertices();
      j["n_edges"] = g->n_edges();
      j["bass_max_residual"] = br.max_residual;
      j["bass_max_relative"] = br.max_relative;
      j["samples"] = ve_samples;
      j["seed"] = ve.seed;
      j["growth_rate"] = growth_rate(*g);
      j["pipelines_agree"] = pipelines;
      j["annulus_ok"] = aa.ok;
      j["annulus_checked"] = aa.checked;
      j["annulus_violations"] = aa.violations;
      j["version"] = kVersion;
      out << j.dump() << '\n';
      return (aa.ok && pipelines) ? 0 : 2;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace nbspectra::cli
