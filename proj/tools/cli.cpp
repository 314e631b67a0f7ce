#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qcvx/alexandrov.hpp"
#include "qcvx/contact.hpp"
#include "qcvx/convex.hpp"
#include "qcvx/corpus.hpp"
#include "qcvx/io.hpp"
#include "qcvx/legendre.hpp"
#include "qcvx/verify.hpp"
#include "qcvx/vertex.hpp"

namespace qcvx::cli {

namespace {

using ojson = nlohmann::ordered_json;

struct Options {
  std::string in, out, format = "csv", suite = "all";
  double tol = 1e-9;
  std::uint64_t seed = 0;
  std::optional<double> radius, rho, lambda, R;
  bool no_timestamp = false;

  // gen
  std::size_t dim = 1, nodes = 101, pieces = 3;
  double lo = -1.0, hi = 1.0, curv_lo = -1.0, curv_hi = 2.0;
  // points and matrices
  std::vector<double> v1, v2, center, x0, y, A, radii;
  double c1 = 0.0, c2 = 0.0, taylor_tol = 1e-6;
  std::optional<std::size_t> node;
};

// A report is one table plus trailing summary fields. CSV prints the header row,
// the data rows, then one "# key,value" line per summary field.
struct Report {
  std::vector<std::string> header;
  std::vector<std::vector<ojson>> rows;
  std::vector<std::pair<std::string, ojson>> summary;
  bool failed = false;
};

ojson number(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

ojson point(std::span<const double> p) {
  ojson a = ojson::array();
  for (double x : p) a.push_back(number(x));
  return a;
}

std::string csv_cell(const ojson& v) {
  if (v.is_null()) return "";
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  if (v.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + csv_cell(v[i]);
    return s;
  }
  auto s = v.dump();
  // Integral doubles print as "1" rather than JSON's "1.0".
  if (v.is_number_float() && s.size() > 2 && s.compare(s.size() - 2, 2, ".0") == 0) s.resize(s.size() - 2);
  return s;
}

std::string timestamp() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string render(const std::string& command, Report rep, const Options& o) {
  if (!o.no_timestamp) rep.summary.emplace_back("timestamp", timestamp());
  if (o.format == "structured") {
    ojson j;
    j["command"] = command;
    j["rows"] = ojson::array();
    for (const auto& row : rep.rows) {
      ojson r;
      for (std::size_t k = 0; k < rep.header.size(); ++k) r[rep.header[k]] = row[k];
      j["rows"].push_back(std::move(r));
    }
    ojson s = ojson::object();
    for (const auto& [k, v] : rep.summary) s[k] = v;
    j["summary"] = std::move(s);
    return j.dump(2) + "\n";
  }
  std::string text;
  for (std::size_t k = 0; k < rep.header.size(); ++k) text += (k ? "," : "") + rep.header[k];
  text += "\n";
  for (const auto& row : rep.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) text += (k ? "," : "") + csv_cell(row[k]);
    text += "\n";
  }
  for (const auto& [k, v] : rep.summary) text += "# " + k + "," + csv_cell(v) + "\n";
  return text;
}

void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.out.empty())
    out << text << (text.empty() || text.back() == '\n' ? "" : "\n");
  else
    io::write_text_file(o.out, text);
}

GridFunction input(const Options& o) {
  if (o.in.empty()) throw DomainError("--in is required");
  return io::read_grid_function(o.in);
}

double need(const std::optional<double>& v, const char* flag) {
  if (!v) throw DomainError(std::string(flag) + " is required");
  return *v;
}

Point need_point(const std::vector<double>& p, std::size_t dim, const char* flag) {
  if (p.size() != dim) throw DomainError(std::string(flag) + " needs " + std::to_string(dim) + " coordinates");
  return p;
}

IndexRegion region_of(const GridFunction& u, const Options& o) {
  if (o.center.empty()) return full_region(u.domain());
  return region_ball(u.domain(), need_point(o.center, u.domain().dim(), "--center"), need(o.rho, "--rho"));
}

ojson domain_json(const GridDomain& d) {
  ojson j;
  j["dim"] = d.dim();
  j["min"] = d.mins();
  j["max"] = d.maxs();
  j["shape"] = d.shape();
  return j;
}

GridDomain domain_from_json(const nlohmann::json& j) {
  try {
    return GridDomain(j.at("min").get<std::vector<double>>(), j.at("max").get<std::vector<double>>(),
                      j.at("shape").get<std::vector<std::size_t>>());
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed domain: ") + e.what());
  }
}

// ---- subcommands ----------------------------------------------------------

int cmd_gen(const Options& o, std::ostream& out) {
  const auto d = GridDomain::cube(o.dim, o.lo, o.hi, o.nodes);
  const auto f = corpus::gen_max_quadratics(o.seed, d, o.pieces, o.curv_lo, o.curv_hi);
  emit(o, out, io::dump(io::to_json(corpus::rasterize(f, d))));
  if (o.out.empty()) return 0;

  ojson side;
  side["seed"] = o.seed;
  side["domain"] = domain_json(d);
  side["declared_modulus"] = f.declared_modulus();
  side["pieces"] = ojson::array();
  for (const auto& p : f.pieces()) {
    ojson q;
    q["center"] = p.center;
    q["linear"] = p.linear;
    q["constant"] = p.constant;
    q["curvature"] = p.curvature.entries();
    side["pieces"].push_back(std::move(q));
  }
  if (!o.no_timestamp) side["timestamp"] = timestamp();
  io::write_text_file(o.out + ".oracle.json", side.dump(2) + "\n");
  return 0;
}

// The output carries the input's domain as "source", and a later transform of
// that output evaluates on the source domain, so two transforms give f** on f's grid.
int cmd_transform(const Options& o, std::ostream& out) {
  if (o.in.empty()) throw DomainError("--in is required");
  const auto j = io::read_json_file(o.in);
  const auto f = io::grid_function_from_json(j);
  const auto dual = j.contains("source") ? legendre::DualGrid{domain_from_json(j.at("source"))}
                                         : legendre::auto_dual(f);
  auto g = io::to_json(legendre::conjugate(f, dual));
  nlohmann::json src;
  src["dim"] = f.domain().dim();
  src["min"] = f.domain().mins();
  src["max"] = f.domain().maxs();
  src["shape"] = f.domain().shape();
  g["source"] = src;
  emit(o, out, io::dump(g));
  return 0;
}

int cmd_envelope(const Options& o, std::ostream& out) {
  const auto f = input(o);
  const auto region = region_of(f, o);
  const auto env = legendre::envelope_on(f, region);
  std::vector<double> v(f.values());
  for (auto i : region.members()) v[i] = env.values[i];
  emit(o, out, io::dump(io::to_json(GridFunction(f.domain(), v))));
  return 0;
}

Report cmd_subdiff(const Options& o) {
  const auto u = input(o);
  const auto& d = u.domain();
  const auto g = legendre::conjugate(u, legendre::auto_dual(u));
  Report rep;
  rep.header = {"node", "x", "witness", "lower", "upper"};
  std::vector<char> all(d.size(), 1);
  std::size_t with = 0;
  const auto row = [&](std::size_t i) {
    const auto w = convex::subgradient_witness(u, g, i);
    const bool ok = w && convex::subdifferential_contains(u, i, *w, o.tol);
    with += ok;
    ojson lower, upper;
    if (d.dim() == 1) {
      const auto b = convex::chord_bounds_1d(d, u.values(), all, i);
      if (b.lower <= b.upper) {
        lower = number(b.lower);
        upper = number(b.upper);
      }
    }
    rep.rows.push_back({i, point(d.node(i)), ok ? point(*w) : ojson(), lower, upper});
  };
  if (o.node) {
    if (*o.node >= d.size()) throw DomainError("--node out of range");
    row(*o.node);
  } else {
    for (std::size_t i = 0; i < d.size(); ++i) row(i);
  }
  rep.summary = {{"nodes", rep.rows.size()}, {"with_subgradient", with}};
  return rep;
}

Report cmd_modulus(const Options& o) {
  const auto u = input(o);
  const double lmax = o.lambda.value_or(100.0);
  const auto m = convex::quasiconvex_modulus(u, lmax, o.tol);
  Report rep;
  rep.header = {"modulus", "lambda_max", "convexity_defect"};
  rep.rows.push_back({m ? number(*m) : ojson(), lmax, number(convex::convexity_defect(u))});
  return rep;
}

SymMatrix type_matrix(const Options& o, std::size_t n) {
  if (o.A.empty()) return SymMatrix::identity(n, o.lambda.value_or(0.0));
  if (o.A.size() != n * (n + 1) / 2) throw DomainError("--A needs the n(n+1)/2 upper-triangle entries");
  return SymMatrix(n, o.A);
}

Report cmd_contact(const Options& o) {
  const auto u = input(o);
  const auto cs = contact::global_contact_set(u, region_of(u, o), type_matrix(o, u.domain().dim()), o.tol);
  Report rep;
  rep.header = {"node", "x", "witness"};
  for (std::size_t k = 0; k < cs.members.size(); ++k) {
    const auto i = cs.members.members()[k];
    rep.rows.push_back({i, point(u.domain().node(i)), point(cs.witnesses[k])});
  }
  rep.summary = {{"region", cs.region.size()}, {"members", cs.members.size()}, {"measure", cs.measure()}};
  return rep;
}

Report cmd_vertexmap(const Options& o) {
  const auto u = input(o);
  const double r = need(o.radius, "--radius");
  const auto pairs = vertex::vertex_map(u, region_of(u, o), r, o.tol);
  Report rep;
  rep.header = {"node", "x", "v"};
  for (const auto& p : pairs) rep.rows.push_back({p.x, point(u.domain().node(p.x)), point(p.v)});
  rep.summary.emplace_back("pairs", pairs.size());
  if (pairs.size() >= 2) rep.summary.emplace_back("contraction_defect", vertex::contraction_defect(u.domain(), pairs));
  return rep;
}

Report cmd_slab(const Options& o) {
  const double r = need(o.radius, "--radius");
  const auto s = vertex::slab_of_paraboloids({o.v1, o.c1, r}, {o.v2, o.c2, r});
  Report rep;
  rep.header = {"width", "lo", "hi", "m", "e"};
  rep.rows.push_back({s.width, s.lo, s.hi, s.m, point(s.e)});
  return rep;
}

Report cmd_measure(const Options& o) {
  const auto u = input(o);
  const Point x0 = need_point(o.x0, u.domain().dim(), "--x0");
  const double rho = need(o.rho, "--rho"), r = need(o.radius, "--radius"), R = need(o.R, "--R");
  const auto mc = vertex::measure_chain(u, x0, rho, r, R, o.tol);
  const auto cov = vertex::coverage_check(u, x0, rho, r, R, o.tol);
  Report rep;
  rep.header = {"lhs", "mid", "rhs", "h", "probes", "coverage_failures"};
  rep.rows.push_back({mc.lhs, mc.mid, mc.rhs, mc.h, cov.probes.size(), cov.failures});
  return rep;
}

Report cmd_prox(const Options& o) {
  const auto u = input(o);
  const Point y = need_point(o.y, u.domain().dim(), "--y");
  const auto p = alexandrov::prox(u, y, need(o.radius, "--radius"));
  Report rep;
  rep.header = {"node", "x", "p", "objective"};
  rep.rows.push_back({p.x, point(u.domain().node(p.x)), point(p.p), p.objective});
  return rep;
}

Report cmd_alexandrov(const Options& o) {
  const auto u = input(o);
  std::vector<double> radii = o.radii;
  if (radii.empty()) {
    const double h = *std::max_element(u.domain().spacing().begin(), u.domain().spacing().end());
    radii = {h, 2 * h};
  }
  const auto a = alexandrov::alexandrov_statistic(u, o.lambda.value_or(0.0), o.taylor_tol, radii);
  Report rep;
  rep.header = {"tested", "passed", "fraction"};
  rep.rows.push_back({a.tested, a.passed, a.fraction()});
  return rep;
}

Report cmd_verify(const Options& o, std::ostream& err) {
  std::vector<std::string> names;
  if (o.suite == "all")
    names = verify::suite_names();
  else
    names = {o.suite};
  Report rep;
  rep.header = {"suite", "cases", "failures", "worst_defect", "seed", "wall_time", "status", "note"};
  std::size_t failed = 0;
  for (const auto& name : names) {
    const auto r = verify::run_suite(name, o.seed);
    failed += !r.passed();
    rep.rows.push_back({r.suite, r.cases, r.failures, number(r.worst_defect), r.seed,
                        o.no_timestamp ? ojson() : ojson(r.wall_time), r.passed() ? "PASS" : "FAIL", r.note});
    err << r.suite << ": " << (r.passed() ? "PASS" : "FAIL") << "\n";
  }
  rep.summary = {{"suites", names.size()}, {"failed", failed}};
  rep.failed = failed > 0;
  return rep;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quasi-convex analysis on grids: Legendre transforms, contact sets, vertex maps."};
  app.name("qcvx");
  app.require_subcommand(1, 1);
  app.fallthrough();
  Options o;

  app.add_option("--in", o.in, "input grid function (JSON)");
  app.add_option("--out", o.out, "output file (default: standard output)");
  app.add_option("--tol", o.tol, "tolerance")->capture_default_str();
  app.add_option("--seed", o.seed, "random seed")->capture_default_str();
  app.add_option("--radius", o.radius, "paraboloid radius r");
  app.add_option("--rho", o.rho, "ball radius");
  app.add_option("--lambda", o.lambda, "quasi-convexity modulus (or type matrix scale, or modulus search bound)");
  app.add_option("--R", o.R, "growth radius");
  app.add_option("--format", o.format, "report format")->check(CLI::IsMember({"csv", "structured"}))->capture_default_str();
  app.add_flag("--no-timestamp", o.no_timestamp, "omit timestamps and wall times for byte-stable output");

  auto* gen = app.add_subcommand("gen", "write a random max-of-quadratics grid function and its oracle sidecar");
  gen->add_option("--dim", o.dim)->check(CLI::Range(1, 3))->capture_default_str();
  gen->add_option("--nodes", o.nodes, "nodes per axis")->check(CLI::Range(2, 1 << 24))->capture_default_str();
  gen->add_option("--lo", o.lo)->capture_default_str();
  gen->add_option("--hi", o.hi)->capture_default_str();
  gen->add_option("--pieces", o.pieces)->check(CLI::Range(1, 1000))->capture_default_str();
  gen->add_option("--curv-lo", o.curv_lo)->capture_default_str();
  gen->add_option("--curv-hi", o.curv_hi)->capture_default_str();

  auto* transform = app.add_subcommand("transform", "discrete Legendre-Fenchel conjugate");
  auto* envelope = app.add_subcommand("envelope", "convex envelope (optionally over a ball)");
  envelope->add_option("--center", o.center)->delimiter(',');
  auto* subdiff = app.add_subcommand("subdiff", "subgradient witnesses and 1-D subdifferential intervals");
  subdiff->add_option("--node", o.node, "single node (default: all)");
  auto* modulus = app.add_subcommand("modulus", "smallest lambda making u + lambda/2 |x|^2 convex");
  auto* contact = app.add_subcommand("contact", "global upper contact set of type A");
  contact->add_option("--A", o.A, "upper-triangle entries of A (default lambda I)")->delimiter(',');
  contact->add_option("--center", o.center)->delimiter(',');
  auto* vertexmap = app.add_subcommand("vertexmap", "vertex map on the radius-r contact set");
  vertexmap->add_option("--center", o.center)->delimiter(',');
  auto* slab = app.add_subcommand("slab", "slab between two equal-radius paraboloids");
  slab->add_option("--v1", o.v1)->delimiter(',')->required();
  slab->add_option("--c1", o.c1)->required();
  slab->add_option("--v2", o.v2)->delimiter(',')->required();
  slab->add_option("--c2", o.c2)->required();
  auto* measure = app.add_subcommand("measure", "coverage and measure chain around x0");
  measure->add_option("--x0", o.x0)->delimiter(',')->required();
  auto* prox = app.add_subcommand("prox", "grid proximal point");
  prox->add_option("--y", o.y)->delimiter(',')->required();
  auto* alex = app.add_subcommand("alexandrov", "fraction of nodes with a second-order Taylor expansion");
  alex->add_option("--taylor-tol", o.taylor_tol)->capture_default_str();
  alex->add_option("--radii", o.radii)->delimiter(',');
  auto* ver = app.add_subcommand("verify", "run property suites");
  ver->add_option("--suite", o.suite, "suite name or 'all'")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_gen(o, out);
    if (transform->parsed()) return cmd_transform(o, out);
    if (envelope->parsed()) return cmd_envelope(o, out);

    std::string name;
    Report rep;
    if (subdiff->parsed()) name = "subdiff", rep = cmd_subdiff(o);
    else if (modulus->parsed()) name = "modulus", rep = cmd_modulus(o);
    else if (contact->parsed()) name = "contact", rep = cmd_contact(o);
    else if (vertexmap->parsed()) name = "vertexmap", rep = cmd_vertexmap(o);
    else if (slab->parsed()) name = "slab", rep = cmd_slab(o);
    else if (measure->parsed()) name = "measure", rep = cmd_measure(o);
    else if (prox->parsed()) name = "prox", rep = cmd_prox(o);
    else if (alex->parsed()) name = "alexandrov", rep = cmd_alexandrov(o);
    else name = "verify", rep = cmd_verify(o, err);
    const bool failed = rep.failed;
    emit(o, out, render(name, std::move(rep), o));
    return failed ? 1 : 0;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const ConsistencyError& e) {
    err << "consistency check failed: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace qcvx::cli
