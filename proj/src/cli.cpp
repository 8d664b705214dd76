#include "expamoeba/cli.hpp"

#include "expamoeba/amoeba.hpp"
#include "expamoeba/convexity.hpp"
#include "expamoeba/io.hpp"
#include "expamoeba/lattice.hpp"
#include "expamoeba/polytope.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>

namespace expamoeba {

namespace {

struct Globals {
  int threads = 0;
  bool deterministic = false;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t"), b = s.find_last_not_of(" \t");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

double parse_number(const std::string& text) {
  std::string s = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParseError("invalid number '" + text + "'");
  }
  if (used != s.size()) throw ParseError("invalid number '" + text + "'");
  return v;
}

// number, or [a][*]pi[/b]
double parse_angle(const std::string& text) {
  std::string s = trim(text);
  std::size_t p = s.find("pi");
  if (p == std::string::npos) return parse_number(s);
  std::string head = s.substr(0, p), tail = s.substr(p + 2);
  if (!head.empty() && head.back() == '*') head.pop_back();
  double a = head.empty() || head == "+" ? 1.0 : head == "-" ? -1.0 : parse_number(head);
  double b = 1.0;
  if (!tail.empty()) {
    if (tail[0] != '/') throw ParseError("invalid angle '" + text + "'");
    b = parse_number(tail.substr(1));
  }
  return a * std::numbers::pi / b;
}

Eigen::VectorXd parse_angles(const std::string& text) {
  std::vector<std::string> parts = split(text, ',');
  Eigen::VectorXd v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) v(i) = parse_angle(parts[i]);
  return v;
}

Box parse_box(const std::string& text, Eigen::Index n) {
  std::vector<std::string> parts = split(text, ',');
  if (parts.size() == 1 && n > 1) parts.assign(n, parts[0]);
  if (static_cast<Eigen::Index>(parts.size()) != n)
    throw DimensionError("--box needs " + std::to_string(n) + " intervals lo:hi");
  std::vector<double> lo, hi;
  for (const std::string& p : parts) {
    // the separator is the first ':' after the leading character (lo may be negative)
    std::size_t c = p.find(':', 1);
    if (c == std::string::npos) throw ParseError("interval '" + p + "' must read lo:hi");
    lo.push_back(parse_number(p.substr(0, c)));
    hi.push_back(parse_number(p.substr(c + 1)));
  }
  return make_box(lo, hi);
}

std::vector<int> parse_res(const std::string& text, Eigen::Index n) {
  std::vector<std::string> parts = split(text, ',');
  if (parts.size() == 1 && n > 1) parts.assign(n, parts[0]);
  if (static_cast<Eigen::Index>(parts.size()) != n)
    throw DimensionError("--res needs " + std::to_string(n) + " entries");
  std::vector<int> res;
  for (const std::string& p : parts) {
    double v = parse_number(p);
    if (v < 1 || v != std::floor(v)) throw ParseError("resolution entries must be positive integers");
    res.push_back(static_cast<int>(v));
  }
  return res;
}

Eigen::MatrixXd parse_matrix(const std::string& text);

// "a,b;c,d"; exact unless some entry is written in decimal
GeneratorMatrix parse_generator_rows(const std::string& text) {
  std::vector<std::string> rows = split(text, ';');
  const std::size_t n = split(rows[0], ',').size();
  RationalMatrix w(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n));
  bool exact = true;
  for (std::size_t i = 0; i < rows.size() && exact; ++i) {
    std::vector<std::string> cols = split(rows[i], ',');
    if (cols.size() != n) throw ParseError("generator rows differ in length");
    for (std::size_t j = 0; j < n && exact; ++j) {
      const std::string e = trim(cols[j]);
      if (e.find_first_of(".eE") != std::string::npos) {
        exact = false;
        break;
      }
      w(i, j) = Rational::parse(e);
    }
  }
  if (exact) return GeneratorMatrix(w);
  return GeneratorMatrix(parse_matrix(text));
}

Eigen::MatrixXd parse_matrix(const std::string& text) {
  std::vector<std::string> rows = split(text, ';');
  Eigen::MatrixXd m;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<std::string> cols = split(rows[i], ',');
    if (i == 0) m.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    if (static_cast<Eigen::Index>(cols.size()) != m.cols()) throw ParseError("matrix rows differ in length");
    for (std::size_t j = 0; j < cols.size(); ++j) m(i, j) = parse_number(cols[j]);
  }
  return m;
}

std::string rational_row(const RationalMatrix& m, Eigen::Index i) {
  std::string s = "(";
  for (Eigen::Index j = 0; j < m.cols(); ++j) s += (j ? ", " : "") + m(i, j).str();
  return s + ")";
}

std::string rational_rows(const RationalMatrix& m) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) s += (j ? ", " : (i ? "; " : "")) + m(i, j).str();
  return s + "]";
}

std::string int_list(const std::vector<long long>& q) {
  std::string s = "(";
  for (std::size_t i = 0; i < q.size(); ++i) s += (i ? ", " : "") + std::to_string(q[i]);
  return s + ")";
}

std::string cell_list(const std::vector<int>& c) {
  std::string s = "(";
  for (std::size_t i = 0; i < c.size(); ++i) s += (i ? ", " : "") + std::to_string(c[i]);
  return s + ")";
}

std::string coefficient_text(Complex c) {
  char buf[80];
  if (c.imag() == 0.0) {
    std::snprintf(buf, sizeof buf, "%.12g", c.real());
  } else {
    std::snprintf(buf, sizeof buf, "(%.12g%+.12gi)", c.real(), c.imag());
  }
  return buf;
}

std::string laurent_text(const LaurentPolynomial& p) {
  std::string s;
  for (std::size_t t = 0; t < p.terms.size(); ++t) {
    const LaurentMonomial& m = p.terms[t];
    std::string mono;
    for (Eigen::Index i = 0; i < m.exponent.size(); ++i) {
      if (m.exponent(i) == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += "u" + std::to_string(i + 1);
      if (m.exponent(i) != 1) mono += "^" + std::to_string(m.exponent(i));
    }
    std::string coef = coefficient_text(m.c);
    std::string term;
    if (mono.empty())
      term = coef;
    else if (coef == "1")
      term = mono;
    else if (coef == "-1")
      term = "-" + mono;
    else
      term = coef + "*" + mono;
    if (t == 0)
      s = term;
    else if (term[0] == '-')
      s += " - " + term.substr(1);
    else
      s += " + " + term;
  }
  return s;
}

std::string true_runs(const Raster& r) {
  std::string s;
  const double h = r.cell_size()(0);
  std::size_t i = 0;
  while (i < r.cell_count()) {
    if (!r.mask[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < r.cell_count() && r.mask[j + 1]) ++j;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s[%.6g, %.6g]", s.empty() ? "" : ";", r.box.lo(0) + i * h,
                  r.box.lo(0) + (j + 1) * h);
    s += buf;
    i = j + 1;
  }
  return s.empty() ? "none" : s;
}

struct Context {
  Globals g;
  Report rep;
};

void add_system_header(Context& ctx, const ParsedSystem& ps) {
  ctx.rep.add("input_hash", system_hash(ps.system));
  ctx.rep.add("mode", to_string(ps.system.mode()));
  ctx.rep.add("n", static_cast<long long>(ps.system.dim()));
  ctx.rep.add("r", static_cast<long long>(ps.system.rank()));
  ctx.rep.add("card", ps.system.card());
  ctx.rep.add("generators_heuristic", ps.check.heuristic);
}

DefectOptions defect_options(int grid, int restarts, int max_iter) {
  DefectOptions d;
  d.grid = grid;
  d.restarts = restarts;
  d.max_iter = max_iter;
  return d;
}

struct RasterFlags {
  std::string box, res;
  double tau = 1e-3;
  int grid = 0, restarts = 3, max_iter = 500;
  bool centre_only = false;

  void attach(CLI::App* sub, bool required = true) {
    auto* b = sub->add_option("--box", box, "lo:hi per axis, comma separated");
    auto* r = sub->add_option("--res", res, "cells per axis");
    if (required) {
      b->required();
      r->required();
    }
    sub->add_option("--tau", tau, "membership threshold")->capture_default_str();
    sub->add_option("--grid", grid, "torus grid points per angle (0 = auto)")->capture_default_str();
    sub->add_option("--restarts", restarts, "simplex restarts from the best grid cells")->capture_default_str();
    sub->add_option("--max-iter", max_iter, "simplex iteration budget")->capture_default_str();
    sub->add_flag("--centre-only", centre_only, "evaluate cell centres only (no cell minimum)");
  }
  RasterOptions options(const Globals& g) const {
    RasterOptions o;
    o.tau = tau;
    o.defect = defect_options(grid, restarts, max_iter);
    o.cell_minimum = !centre_only;
    o.threads = g.threads;
    return o;
  }
  void report(Report& rep) const {
    rep.add("tau", tau);
    rep.add("grid", grid);
    rep.add("restarts", restarts);
    rep.add("max_iter", max_iter);
    rep.add("cell_minimum", !centre_only);
  }
};

struct ZeroFlags {
  std::string im_window = "-1000:1000";
  double residual = 1e-8;
  long long budget = 20'000'000;
  int retries = 6, starts = 4000;
  std::uint64_t seed = 1;

  void attach(CLI::App* sub) {
    sub->add_option("--im-window", im_window, "Im z window lo:hi per axis")->capture_default_str();
    sub->add_option("--residual", residual, "accepted max |f(z)|")->capture_default_str();
    sub->add_option("--budget", budget, "function evaluation budget")->capture_default_str();
    sub->add_option("--retries", retries, "contour shifts when a contour meets a zero")->capture_default_str();
    sub->add_option("--starts", starts, "Newton multistarts (n = 2)")->capture_default_str();
    sub->add_option("--seed", seed, "multistart seed")->capture_default_str();
  }
  ZeroOptions options() const {
    ZeroOptions o;
    o.residual = residual;
    o.budget = budget;
    o.retries = retries;
    o.starts = starts;
    o.seed = seed;
    return o;
  }
  void report(Report& rep) const {
    rep.add("im_window", im_window);
    rep.add("residual_bound", residual);
    rep.add("budget", budget);
    rep.add("retries", retries);
    rep.add("starts", starts);
    rep.add("seed", static_cast<long long>(seed));
  }
};

struct FixtureFlags {
  FixtureParams p;
  void attach(CLI::App* sub, const std::string& res_flag) {
    sub->add_option("--dims", p.dims, "2 or 3")->capture_default_str();
    sub->add_option(res_flag, p.res, "cells per axis")->capture_default_str();
    sub->add_option("--count", p.count, "points or lines")->capture_default_str();
    sub->add_option("--axis", p.axis, "first line axis")->capture_default_str();
    sub->add_option("--radius", p.radius, "radius in cells (-1 = default)")->capture_default_str();
  }
};

int probe_exit(const ProbeReport& r) {
  if (r.violated()) return kExitViolation;
  if (r.inconclusive > 0) return kExitInconclusive;
  return kExitOk;
}

void report_probe(Report& rep, const std::string& prefix, const ProbeReport& r) {
  rep.add(prefix + ".trials", r.trials);
  if (prefix == "k1") rep.add(prefix + ".cycles", r.cycles);
  const std::size_t nv = r.zero_violations.size() + r.one_violations.size();
  rep.add(prefix + ".violations", nv);
  rep.add(prefix + ".inconclusive", r.inconclusive);
  rep.add(prefix + ".verdict", r.violated() ? "violation" : "no violation found");
  for (std::size_t i = 0; i < r.zero_violations.size() && i < 5; ++i) {
    const ZeroViolation& v = r.zero_violations[i];
    rep.add(prefix + ".violation." + std::to_string(i),
            "component " + std::to_string(v.component) + " " + cell_list(v.a) + " -> " + cell_list(v.b) +
                " exits at " + cell_list(v.exit_cell));
  }
  for (std::size_t i = 0; i < r.one_violations.size() && i < 5; ++i)
    rep.add(prefix + ".violation." + std::to_string(i), r.one_violations[i]);
  rep.add(prefix + ".notes", r.notes.size());
  for (std::size_t i = 0; i < r.notes.size() && i < 5; ++i) rep.add(prefix + ".note." + std::to_string(i), r.notes[i]);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  Context ctx;
  CLI::App app{"Amoebas of exponential-sum systems: membership, rasters, zeros, convexity probes", "expamoeba"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--threads", ctx.g.threads, "worker threads (0 = EXPAMOEBA_THREADS, then hardware)");
  app.add_flag("--deterministic", ctx.g.deterministic, "omit wall time so reports are byte-identical");

  std::string file;
  std::function<int()> handler;
  auto need_file = [&](CLI::App* sub) { sub->add_option("file", file, "system file (JSON)")->required(); };

  // validate
  auto* validate = app.add_subcommand("validate", "parse a system file and validate its generators");
  need_file(validate);
  validate->callback([&] {
    handler = [&] {
      try {
        ParsedSystem ps = parse_system_file(file);
        add_system_header(ctx, ps);
        std::size_t terms = 0;
        for (const ExpSum& f : ps.system.sums()) terms += f.terms.size();
        ctx.rep.add("sums", ps.system.card());
        ctx.rep.add("terms", terms);
        ctx.rep.add("generators_ok", true);
        return int(kExitOk);
      } catch (const DependentGenerators&) {
        ctx.rep.add("generators_ok", false);
        throw;
      }
    };
  });

  // spectra
  int samples = 2000;
  double radius = 10.0;
  auto* spectra = app.add_subcommand("spectra", "closed-spectra check, regularity estimate and dimension gate");
  need_file(spectra);
  spectra->add_option("--samples", samples, "quasi-random samples per low face")->capture_default_str();
  spectra->add_option("--radius", radius, "sampling ball radius")->capture_default_str();
  spectra->callback([&] {
    handler = [&] {
      ParsedSystem ps = parse_system_file(file);
      add_system_header(ctx, ps);
      const ExpSystem& F = ps.system;
      auto low = enumerate_low_faces(F);
      ctx.rep.add("low_faces", low.size());
      SpectraVerdict sv = closed_spectra_check(F);
      ctx.rep.add("closed", sv.closed);
      if (sv.witness) {
        ctx.rep.add("witness.normal", format_vector(sv.witness->normal));
        ctx.rep.add("witness.dim", sv.witness->dimension);
        for (std::size_t s = 0; s < sv.witness->summand_faces.size(); ++s) {
          const auto& P = sv.witness->summand_faces[s];
          std::string verts;
          for (Eigen::Index v = 0; v < P.size(); ++v)
            verts += (v ? " " : "") + format_vector(P.vertices().col(v));
          ctx.rep.add("witness.face." + F.sums()[s].name, verts);
        }
      }
      RegularityVerdict rv = regularity_estimate(F, samples, radius);
      ctx.rep.add("regularity", to_string(rv.kind));
      if (rv.epsilon) ctx.rep.add("regularity.epsilon", *rv.epsilon);
      if (rv.point) {
        std::string p;
        for (Eigen::Index i = 0; i < rv.point->size(); ++i) p += (i ? ", " : "") + format_complex((*rv.point)(i));
        ctx.rep.add("regularity.point", "(" + p + ")");
      }
      DimGate dg = dim_gate(F);
      ctx.rep.add("dim_gate.dim_affine", dg.dim_affine);
      ctx.rep.add("dim_gate.card", dg.card);
      ctx.rep.add("dim_gate.zeros_expected", dg.zeros_expected);
      ctx.rep.add("dim_gate", std::to_string(dg.dim_affine) + (dg.zeros_expected ? " >= " : " < ") +
                                  std::to_string(dg.card));
      return int(rv.kind == RegularityKind::suspected_fail ? kExitViolation : kExitOk);
    };
  });

  // perturb
  std::string theta, output;
  auto* perturb_cmd = app.add_subcommand("perturb", "twist coefficients by a character");
  need_file(perturb_cmd);
  perturb_cmd->add_option("--theta", theta, "angles, comma separated (e.g. 0,3pi/2)")->required();
  perturb_cmd->add_option("--output", output, "write the perturbed system here");
  perturb_cmd->callback([&] {
    handler = [&] {
      ParsedSystem ps = parse_system_file(file);
      add_system_header(ctx, ps);
      Character chi(parse_angles(theta));
      ExpSystem G = perturb(ps.system, chi);
      ctx.rep.add("theta", format_vector(chi.theta));
      ctx.rep.add("output_hash", system_hash(G));
      for (const ExpSum& f : G.sums())
        for (std::size_t t = 0; t < f.terms.size(); ++t) {
          std::vector<long long> k(f.terms[t].k.data(), f.terms[t].k.data() + f.terms[t].k.size());
          ctx.rep.add("term." + f.name + "." + std::to_string(t), format_complex(f.terms[t].c) + " k=" + int_list(k));
        }
      if (!output.empty()) {
        write_file(output, serialize_system(G));
        ctx.rep.add("output", output);
      }
      return int(kExitOk);
    };
  });

  // kronecker
  double tol = 1e-3, max_box = 1e7;
  long long enum_budget = 50'000'000;
  std::string omega_rows;
  auto* kron = app.add_subcommand("kronecker", "find t with <omega_j, t> = theta_j mod 2pi within tol");
  auto* kron_file = kron->add_option("file", file, "system file (JSON)");
  kron->add_option("--omega", omega_rows, "generator rows instead of a file, e.g. \"1;2\" or \"1/2,0;0,1/3\"")
      ->excludes(kron_file);
  kron->add_option("--theta", theta, "target angles")->required();
  kron->add_option("--tol", tol, "congruence tolerance")->capture_default_str();
  kron->add_option("--max-box", max_box, "largest search box |t|_inf")->capture_default_str();
  kron->add_option("--enumeration-budget", enum_budget, "candidate budget of the fallback search")
      ->capture_default_str();
  kron->callback([&] {
    handler = [&] {
      GeneratorMatrix omega;
      if (!omega_rows.empty()) {
        // dependent rows are accepted here so the refusal path is reachable
        omega = parse_generator_rows(omega_rows);
        ctx.rep.add("mode", to_string(omega.mode()));
        ctx.rep.add("omega", omega_rows);
      } else if (!file.empty()) {
        ParsedSystem ps = parse_system_file(file);
        add_system_header(ctx, ps);
        omega = ps.system.generators();
      } else {
        throw Error("kronecker needs a system file or --omega");
      }
      KroneckerOptions ko;
      ko.max_box = max_box;
      ko.enumeration_budget = enum_budget;
      Eigen::VectorXd th = parse_angles(theta);
      ctx.rep.add("theta", format_vector(th));
      ctx.rep.add("tol", tol);
      KroneckerResult kr = kronecker_solve(omega, th, tol, ko);
      ctx.rep.add("solved", kr.solved);
      if (kr.solved) {
        ctx.rep.add("t", format_vector(kr.t));
        ctx.rep.add("residual", kr.residual);
        ctx.rep.add("method", kr.method);
        return int(kExitOk);
      }
      ctx.rep.add("refused", true);
      ctx.rep.add("certificate", int_list(kr.refusal->q));
      ctx.rep.add("certificate_exact", kr.refusal->exact);
      ctx.rep.add("violation", kr.violation);
      return int(kExitViolation);
    };
  });

  // reduce
  auto* reduce = app.add_subcommand("reduce", "torus reduction of rational generators");
  need_file(reduce);
  reduce->callback([&] {
    handler = [&] {
      ParsedSystem ps = parse_system_file(file);
      add_system_header(ctx, ps);
      TorusReduction tr = torus_reduction(ps.system.generators());
      ctx.rep.add("s", tr.s);
      ctx.rep.add("mu", tr.mu);
      ctx.rep.add("A", rational_rows(tr.A));
      ctx.rep.add("phi", rational_rows(tr.phi));
      ctx.rep.add("det_sign", tr.det_sign);
      const RationalMatrix& w = ps.system.generators().exact();
      for (Eigen::Index j = 0; j < w.rows(); ++j) {
        RationalVector img = tr.phi * w.row(j).transpose();
        RationalMatrix m = img.transpose();
        ctx.rep.add("image." + std::to_string(j + 1), rational_row(m, 0));
      }
      return int(kExitOk);
    };
  });

  // laurent
  bool apply_reduction = false;
  auto* laurent = app.add_subcommand("laurent", "Laurent polynomials of an integral-frequency system");
  need_file(laurent);
  laurent->add_flag("--reduce", apply_reduction, "pull back by the torus reduction first");
  laurent->callback([&] {
    handler = [&] {
      ParsedSystem ps = parse_system_file(file);
      add_system_header(ctx, ps);
      ExpSystem F = ps.system;
      if (apply_reduction) {
        TorusReduction tr = torus_reduction(F.generators());
        F = pullback_system(F, tr.phi);
        ctx.rep.add("phi", rational_rows(tr.phi));
      }
      for (const LaurentPolynomial& p : to_laurent(F)) ctx.rep.add("laurent." + p.name, laurent_text(p));
      return int(kExitOk);
    };
  });

  // approx
  int levels = 6;
  auto* approx = app.add_subcommand("approx", "continued-fraction approximation of the generators");
  need_file(approx);
  approx->add_option("--levels", levels, "levels 1..L")->capture_default_str();
  approx->callback([&] {
    handler = [&] {
      ParsedSystem ps = parse_system_file(file);
      add_system_header(ctx, ps);
      const ExpSystem& F = ps.system;
      bool monotone = true;
      double prev_err = std::numeric_limits<double>::infinity();
      std::vector<double> prev_h(F.card(), std::numeric_limits<double>::infinity());
      for (int l = 1; l <= levels; ++l) {
        ApproxSchedule sch = rational_approx(F.generators(), l);
        ExpSystem Fl = approximate_system(F, sch);
        const std::string key = "level." + std::to_string(l);
        ctx.rep.add(key + ".omega", rational_rows(sch.omega));
        ctx.rep.add(key + ".error", sch.error);
        if (sch.error > prev_err) monotone = false;
        prev_err = sch.error;
        for (std::size_t s = 0; s < F.card(); ++s) {
          double h = hausdorff_distance(newton_polytope<double>(Fl.sums()[s], Fl.generators()),
                                        newton_polytope<double>(F.sums()[s], F.generators()));
          ctx.rep.add(key + ".hausdorff." + F.sums()[s].name, h);
          if (h > prev_h[s] + 1e-15) monotone = false;
          prev_h[s] = h;
        }
      }
      ctx.rep.add("nonincreasing", monotone);
      return int(monotone ? kExitOk : kExitViolation);
    };
  });

  // raster
  RasterFlags rf;
  std::string pgm, csv, mask_out;
  auto* raster = app.add_subcommand("raster", "rasterize the amoeba via the membership defect");
  need_file(raster);
  rf.attach(raster);
  raster->add_option("--pgm", pgm, "write a P2 grayscale image of the defect");
  raster->add_option("--csv", csv, "write per-cell coordinates, defect and mask");
  raster->add_option("--mask-out", mask_out, "write the complement mask (for convexity)");
  raster->callback([&] {
    handler = [&] {
      ParsedSystem ps = parse_system_file(file);
      add_system_header(ctx, ps);
      const Eigen::Index n = ps.system.dim();
      Box box = parse_box(rf.box, n);
      std::vector<int> res = parse_res(rf.res, n);
      ctx.rep.add("box", rf.box);
      ctx.rep.add("res", rf.res);
      rf.report(ctx.rep);
      Raster r = rasterize(ps.system, box, res, rf.options(ctx.g));
      ctx.rep.add("cells", r.cell_count());
      ctx.rep.add("true_cells", r.true_count());
      ctx.rep.add("lipschitz", r.lipschitz);
      ctx.rep.add("budget_flags", r.budget_flags);
      if (n == 1) ctx.rep.add("true_runs", true_runs(r));
      if (!pgm.empty()) {
        write_file(pgm, raster_pgm(r));
        ctx.rep.add("pgm", pgm);
      }
      if (!csv.empty()) {
        write_file(csv, raster_csv(r));
        ctx.rep.add("csv", csv);
      }
      if (!mask_out.empty()) {
        write_file(mask_out, mask_text(complement_mask(r)));
        ctx.rep.add("mask", mask_out);
      }
      return int(kExitOk);
    };
  });

  // zeros
  ZeroFlags zf;
  std::string zbox;
  int max_print = 50;
  auto* zeros = app.add_subcommand("zeros", "sample zeros with Re z in a box and Im z in a window");
  need_file(zeros);
  zeros->add_option("--box", zbox, "Re z box lo:hi per axis")->required();
  zf.attach(zeros);
  zeros->add_option("--max-print", max_print, "zeros listed in the report")->capture_default_str();
  zeros->callback([&] {
    handler = [&] {
      ParsedSystem ps = parse_system_file(file);
      add_system_header(ctx, ps);
      const Eigen::Index n = ps.system.dim();
      ctx.rep.add("box", zbox);
      zf.report(ctx.rep);
      ZeroSample zs = zero_sample(ps.system, parse_box(zbox, n), parse_box(zf.im_window, n), zf.options());
      ctx.rep.add("zeros", zs.zeros.size());
      ctx.rep.add("evaluations", zs.evaluations);
      ctx.rep.add("partial", zs.partial);
      if (!zs.note.empty()) ctx.rep.add("note", zs.note);
      for (std::size_t i = 0; i < zs.zeros.size() && static_cast<int>(i) < max_print; ++i) {
        std::string z;
        for (Eigen::Index j = 0; j < n; ++j) z += (j ? ", " : "") + format_complex(zs.zeros[i](j));
        ctx.rep.add("zero." + std::to_string(i), "(" + z + ") residual " + format_double(zs.residuals[i]));
      }
      return int(zs.partial ? kExitInconclusive : kExitOk);
    };
  });

  // compare
  RasterFlags cf;
  ZeroFlags czf;
  int dilate = 1;
  double max_hausdorff = 2.0;
  auto* compare = app.add_subcommand("compare", "character amoeba raster against the zero-sample raster");
  need_file(compare);
  cf.attach(compare);
  czf.attach(compare);
  compare->add_option("--dilate", dilate, "zero raster dilation in cells")->capture_default_str();
  compare->add_option("--max-hausdorff", max_hausdorff, "agreement tolerance in cells")->capture_default_str();
  compare->callback([&] {
    handler = [&] {
      ParsedSystem ps = parse_system_file(file);
      add_system_header(ctx, ps);
      const Eigen::Index n = ps.system.dim();
      Box box = parse_box(cf.box, n);
      std::vector<int> res = parse_res(cf.res, n);
      ctx.rep.add("box", cf.box);
      ctx.rep.add("res", cf.res);
      cf.report(ctx.rep);
      czf.report(ctx.rep);
      Raster Y = rasterize(ps.system, box, res, cf.options(ctx.g));
      ZeroSample zs = zero_sample(ps.system, box, parse_box(czf.im_window, n), czf.options());
      Raster Z = zero_raster(zs, box, res, dilate);
      MaskComparison mc = compare_masks(Y, Z);
      ctx.rep.add("y_true_cells", Y.true_count());
      ctx.rep.add("f_true_cells", Z.true_count());
      ctx.rep.add("zeros", zs.zeros.size());
      ctx.rep.add("zeros_partial", zs.partial);
      ctx.rep.add("hausdorff_cells", mc.hausdorff_cells);
      ctx.rep.add("symmetric_diff_cells", mc.symmetric_diff_cells);
      if (n == 1) {
        ctx.rep.add("y_true_runs", true_runs(Y));
        ctx.rep.add("f_true_runs", true_runs(Z));
      }
      if (!(mc.hausdorff_cells <= max_hausdorff)) {
        ctx.rep.add("flag", "Favorov/char-amoeba mismatch: equality hypotheses likely violated");
        return int(kExitViolation);
      }
      return int(zs.partial ? kExitInconclusive : kExitOk);
    };
  });

  // pullback-check
  RasterFlags pf;
  std::string phi_text;
  auto* pull = app.add_subcommand("pullback-check", "compare the raster of F with the image of the raster of F o phi^T");
  need_file(pull);
  pf.attach(pull);
  pull->add_option("--phi", phi_text, "matrix rows separated by ';', entries by ','")->required();
  pull->callback([&] {
    handler = [&] {
      ParsedSystem ps = parse_system_file(file);
      add_system_header(ctx, ps);
      const Eigen::Index n = ps.system.dim();
      Eigen::MatrixXd phi = parse_matrix(phi_text);
      ctx.rep.add("phi", phi_text);
      ctx.rep.add("box", pf.box);
      ctx.rep.add("res", pf.res);
      pf.report(ctx.rep);
      PullbackCheck pc =
          pullback_raster_check(ps.system, phi, parse_box(pf.box, n), parse_res(pf.res, n), pf.options(ctx.g));
      ctx.rep.add("hausdorff_cells", pc.hausdorff_cells);
      std::vector<long long> pr(pc.pulled_resolution.begin(), pc.pulled_resolution.end());
      ctx.rep.add("pulled_resolution", int_list(pr));
      ctx.rep.add("pulled_cells_evaluated", pc.pulled_cells_evaluated);
      ctx.rep.add("pass", pc.pass);
      return int(pc.pass ? kExitOk : kExitViolation);
    };
  });

  // convexity
  std::string mask_path, fixture;
  FixtureFlags ff;
  RasterFlags vf;
  int k = 0, sections = 20;
  long long trials = 10000;
  std::uint64_t seed = 1;
  auto* conv = app.add_subcommand("convexity", "k-convexity probes (k = 0, 1) on a complement mask");
  conv->add_option("file", file, "system file; its amoeba complement is probed (needs --box, --res)");
  conv->add_option("--mask", mask_path, "mask file");
  conv->add_option("--fixture", fixture, "synthetic fixture name");
  ff.attach(conv, "--fixture-res");
  vf.attach(conv, false);
  conv->add_option("--k", k, "0 or 1")->capture_default_str()->check(CLI::IsMember({0, 1}));
  conv->add_option("--trials", trials, "0-probe segment trials")->capture_default_str();
  conv->add_option("--sections", sections, "1-probe plane sections")->capture_default_str();
  conv->add_option("--seed", seed, "probe seed")->capture_default_str();
  conv->callback([&] {
    handler = [&] {
      int sources = !file.empty() + !mask_path.empty() + !fixture.empty();
      if (sources != 1) throw Error("convexity needs exactly one of: system file, --mask, --fixture");
      Mask X;
      if (!fixture.empty()) {
        X = synthetic_fixture(fixture, ff.p);
        ctx.rep.add("source", "fixture " + fixture);
      } else if (!mask_path.empty()) {
        X = parse_mask_text(read_file(mask_path));
        ctx.rep.add("source", "mask " + mask_path);
      } else {
        ParsedSystem ps = parse_system_file(file);
        add_system_header(ctx, ps);
        if (vf.box.empty() || vf.res.empty()) throw Error("a system source needs --box and --res");
        const Eigen::Index n = ps.system.dim();
        vf.report(ctx.rep);
        Raster r = rasterize(ps.system, parse_box(vf.box, n), parse_res(vf.res, n), vf.options(ctx.g));
        X = complement_mask(r);
        if (X.dim() == 1) X = embed_line_mask(X, X.box.lo(0), X.box.hi(0), X.resolution[0]);
        ctx.rep.add("source", "complement of the amoeba raster");
      }
      int comps = 0;
      label_components(X, comps);
      std::string res;
      for (int i = 0; i < X.dim(); ++i) res += (i ? "x" : "") + std::to_string(X.resolution[i]);
      ctx.rep.add("mask.dims", X.dim());
      ctx.rep.add("mask.res", res);
      ctx.rep.add("mask.true_cells", X.true_count());
      ctx.rep.add("mask.components", comps);
      ctx.rep.add("k", k);
      ctx.rep.add("seed", static_cast<long long>(seed));
      if (k == 0) {
        ProbeReport pr = zero_convexity_probe(X, trials, seed, ctx.g.threads);
        report_probe(ctx.rep, "k0", pr);
        return probe_exit(pr);
      }
      OneProbeOptions o;
      o.sections = sections;
      o.seed = seed;
      o.threads = ctx.g.threads;
      ProbeReport pr = one_convexity_probe(X, o);
      report_probe(ctx.rep, "k1", pr);
      return probe_exit(pr);
    };
  });

  // fixtures
  FixtureFlags xf;
  std::string fixture_name;
  auto* fixtures = app.add_subcommand("fixtures", "emit a synthetic mask");
  fixtures->add_option("name", fixture_name, "removed_points | removed_lines | tower | halfspace | removed_disc")
      ->required();
  xf.attach(fixtures, "--res");
  fixtures->add_option("--output", output, "write the mask file here");
  fixtures->callback([&] {
    handler = [&] {
      Mask X = synthetic_fixture(fixture_name, xf.p);
      ctx.rep.add("fixture", fixture_name);
      ctx.rep.add("dims", X.dim());
      ctx.rep.add("res", xf.p.res);
      ctx.rep.add("cells", X.cell_count());
      ctx.rep.add("true_cells", X.true_count());
      if (!output.empty()) {
        write_file(output, mask_text(X));
        ctx.rep.add("output", output);
      }
      return int(kExitOk);
    };
  });

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  std::string echo = "expamoeba";
  for (std::size_t i = 0; i < args.size(); ++i) {
    // thread count never changes results, so it stays out of the report
    if (args[i] == "--threads") {
      ++i;
      continue;
    }
    if (args[i].rfind("--threads=", 0) == 0) continue;
    echo += " " + args[i];
  }
  Report head;
  head.add("command", echo);
  head.add("version", kFormatVersion);

  int code = kExitOk;
  try {
    code = handler();
  } catch (const DependentGenerators& e) {
    ctx.rep.add("error", e.what());
    if (!e.relation.empty()) ctx.rep.add("certificate", int_list(e.relation));
    err << "error: " << e.what() << "\n";
    code = kExitInput;
  } catch (const BudgetExceeded& e) {
    ctx.rep.add("error", e.what());
    err << "error: " << e.what() << "\n";
    code = kExitInconclusive;
  } catch (const std::exception& e) {
    ctx.rep.add("error", e.what());
    err << "error: " << e.what() << "\n";
    code = kExitInput;
  }
  std::string wall = "omitted";
  if (!ctx.g.deterministic) {
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3fs", secs);
    wall = buf;
  }
  ctx.rep.add("exit_code", code);
  ctx.rep.add("wall_time", wall);
  out << head.str() << ctx.rep.str();
  return code;
}

}  // namespace expamoeba
