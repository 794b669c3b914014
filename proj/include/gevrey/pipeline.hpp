#pragma once

#include <filesystem>
#include <fstream>

#include "gevrey/gauge.hpp"
#include "gevrey/satcheck.hpp"
#include "gevrey/specio.hpp"
#include "gevrey/stokes.hpp"
#include "gevrey/version.hpp"

namespace gevrey {

struct PipelineOptions {
  int order = 20;
  double theta = 0.0;
  double ray = 0.0;
  int samples = 8;
  double xmin = 0.05;
  double xmax = 0.2;
  std::optional<double> tol;
  long seed = 0;
  int level = 0;                    // Borel/Laplace level; 0 means the spec's q
  std::vector<std::string> polys;   // comma-separated rational coefficient lists
  std::string func_path;            // MultiSeries JSON file for compose/witness
  std::string out_dir = "gevrey-out";
};

struct RunReport {
  std::string command;
  std::vector<std::string> files;
};

namespace pipedetail {

inline QuadratureParams quad_params(const PipelineOptions& opt) {
  QuadratureParams p = QuadratureParams::from_env();
  if (opt.tol) p.rel_tol = *opt.tol;
  return p;
}

inline Json complex_json(const Cplx& z) { return Json::array({z.real(), z.imag()}); }

inline Json base_report(const std::string& command, const PipelineOptions& opt) {
  Json doc;
  doc["command"] = command;
  doc["tool_version"] = kVersion;
  Json params;
  params["order"] = opt.order;
  params["theta"] = opt.theta;
  params["ray"] = opt.ray;
  params["samples"] = opt.samples;
  params["xmin"] = opt.xmin;
  params["xmax"] = opt.xmax;
  params["seed"] = opt.seed;
  QuadratureParams qp = quad_params(opt);
  params["quad_rel_tol"] = qp.rel_tol;
  params["quad_max_levels"] = qp.max_levels;
  doc["params"] = params;
  return doc;
}

inline void write_file(const std::filesystem::path& path, const std::string& content,
                       RunReport& rep) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw numeric_error("cannot write " + path.string());
  out << content;
  rep.files.push_back(path.string());
}

inline void write_json(const std::filesystem::path& path, const Json& doc, RunReport& rep) {
  write_file(path, doc.dump(2) + "\n", rep);
}

inline Json validation_json(const ValidationReport& vrep) {
  Json checks = Json::array();
  for (const auto& c : vrep.checks) {
    Json e;
    e["name"] = c.name;
    e["pass"] = c.pass;
    if (!c.detail.empty()) e["detail"] = c.detail;
    checks.push_back(e);
  }
  Json doc;
  doc["checks"] = checks;
  doc["valid"] = vrep.valid();
  if (vrep.trace_order) {
    doc["trace"]["l"] = *vrep.trace_order;
    doc["trace"]["alpha"] = specio::rational_json(*vrep.trace_leading);
  }
  doc["notes"] = vrep.notes;
  return doc;
}

// One row per coefficient order 1..N (H(0) = 0 by construction).
inline std::string solution_csv(const FormalSolution& sol) {
  std::ostringstream out;
  out << "n,h1_num,h1_den,h2_num,h2_den\n";
  for (int n = 1; n <= sol.certified_order; ++n) {
    out << n << "," << numerator(sol.h[0][n]).str() << "," << denominator(sol.h[0][n]).str()
        << "," << numerator(sol.h[1][n]).str() << "," << denominator(sol.h[1][n]).str()
        << "\n";
  }
  return out.str();
}

inline std::vector<double> log_spaced_moduli(const PipelineOptions& opt) {
  if (opt.samples < 1) throw validation_error("need --samples >= 1");
  if (!(opt.xmin > 0) || !(opt.xmax >= opt.xmin))
    throw validation_error("need 0 < xmin <= xmax");
  std::vector<double> m;
  for (int i = 0; i < opt.samples; ++i) {
    double f = (opt.samples == 1) ? 0.0 : static_cast<double>(i) / (opt.samples - 1);
    m.push_back(opt.xmax * std::pow(opt.xmin / opt.xmax, f));
  }
  return m;
}

inline std::vector<QShortPoly> parse_poly_options(const PipelineOptions& opt, int q) {
  if (opt.polys.empty())
    throw validation_error("this command needs at least one --poly coefficient list");
  std::vector<QShortPoly> ps;
  for (const std::string& raw : opt.polys) {
    std::vector<Rat> c;
    std::stringstream ss(raw);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok.erase(0, tok.find_first_not_of(" \t"));
      tok.erase(tok.find_last_not_of(" \t") + 1);
      try {
        c.push_back(Rat(tok));
      } catch (const std::exception&) {
        throw validation_error("--poly: bad rational '" + tok + "'");
      }
    }
    ps.push_back(QShortPoly::make(RatPoly(c), q));
  }
  return ps;
}

inline RatMultiSeries parse_func_option(const PipelineOptions& opt) {
  if (opt.func_path.empty()) throw validation_error("this command needs --func <file.json>");
  std::ifstream in(opt.func_path);
  if (!in) throw parse_error("$", "cannot open " + opt.func_path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw parse_error("$", std::string("invalid JSON: ") + e.what());
  }
  return parse_multiseries(doc, "$");
}

inline Json laurent_json(const RatLaurent& l) {
  Json pp = Json::array();
  for (const auto& [e, c] : l.principal())
    pp.push_back(Json::array({e, specio::rational_json(c)}));
  return pp;
}

}  // namespace pipedetail

// Batch front end: parse -> validate -> run one stage -> write reports.
// Deterministic given fixed options (quadrature is deterministic, no
// randomness is used by the stages themselves).
inline RunReport run_pipeline(const std::string& command, const std::string& spec_path,
                              const PipelineOptions& opt) {
  using namespace pipedetail;
  namespace fs = std::filesystem;

  RunReport rep;
  rep.command = command;
  fs::create_directories(opt.out_dir);
  fs::path dir(opt.out_dir);
  QuadratureParams qp = quad_params(opt);

  SystemSpec spec = parse_spec(spec_path);
  const int q = spec_q(spec);
  const auto* inter = std::get_if<InterlacedSpec>(&spec);

  auto need_interlaced = [&]() -> const InterlacedSpec& {
    if (!inter) throw validation_error(command + " needs an interlaced spec");
    return *inter;
  };

  if (command == "validate") {
    Json doc = base_report(command, opt);
    doc["validation"] = validation_json(validate_system(spec));
    write_json(dir / "report.json", doc, rep);
    return rep;
  }

  if (command == "solve") {
    FormalSolution sol = formal_solution(spec, opt.order);
    write_file(dir / "solution.csv", solution_csv(sol), rep);
    Json doc = base_report(command, opt);
    doc["certified_order"] = sol.certified_order;
    auto res = ode_residual(spec, sol, sol.certified_order);
    doc["residual_zero_to_order"] = res[0].zero_to_trunc() && res[1].zero_to_trunc()
                                        ? sol.certified_order
                                        : std::min(res[0].order().value_or(0),
                                                   res[1].order().value_or(0)) - 1;
    if (sol.certified_order >= 8) {
      GevreyReport gr = gevrey_estimate(sol);
      doc["gevrey"]["s_estimate"] = gr.s_estimate;
      doc["gevrey"]["constant_estimate"] = gr.constant_estimate;
      doc["gevrey"]["divergent"] = gr.divergent_flag;
      doc["gevrey"]["note"] = gr.divergent_flag
                                  ? "numerically divergent to order " +
                                        std::to_string(gr.certified_order)
                                  : "no divergence detected to order " +
                                        std::to_string(gr.certified_order);
    }
    write_json(dir / "report.json", doc, rep);
    return rep;
  }

  if (command == "gauge") {
    const auto* ff = std::get_if<FinalFormSpec>(&spec);
    if (!ff) throw validation_error("gauge needs a finalform spec");
    GaugeResult gr = compute_gauge(*ff);
    Json doc = base_report(command, opt);
    doc["T"] = Json::array({Json::array({specio::poly_json(gr.T.a), specio::poly_json(gr.T.b)}),
                            Json::array({specio::poly_json(gr.T.c), specio::poly_json(gr.T.d)})});
    Json nm = Json::array();
    for (const auto& n : gr.nmats)
      nm.push_back(Json::array({specio::rational_json(n.a), specio::rational_json(n.c)}));
    doc["N_diag_rot"] = nm;  // (a_j, b_j) pairs of each rotation-dilation block
    doc["E"] = Json::array({Json::array({specio::poly_json(gr.E.a), specio::poly_json(gr.E.b)}),
                            Json::array({specio::poly_json(gr.E.c), specio::poly_json(gr.E.d)})});
    InterlacedSpec pb = pullback_system(*ff, gr, opt.order);
    FormalSolution h_ff = formal_solution(spec, opt.order);
    FormalSolution h_pb = formal_solution(pb, opt.order);
    auto mapped = apply_gauge(gr, h_pb.h);
    int upto = std::min(h_ff.certified_order, h_pb.certified_order);
    doc["solution_correspondence_exact_to"] =
        (h_ff.h[0].agrees_with(mapped[0], upto) && h_ff.h[1].agrees_with(mapped[1], upto))
            ? upto
            : -1;
    write_json(dir / "gauge.json", doc, rep);
    write_json(dir / "pullback_spec.json", spec_json(SystemSpec(pb)), rep);
    return rep;
  }

  if (command == "shift") {
    ShiftResult sh = rk_shift(need_interlaced(), opt.order);
    Json doc = base_report(command, opt);
    doc["p"] = Json::array({specio::rational_json(sh.p.x), specio::rational_json(sh.p.y)});
    doc["d"] = Json::array({specio::poly_json(sh.new_spec.c.x), specio::poly_json(sh.new_spec.c.y)});
    doc["a_new"] = specio::poly_json(sh.new_spec.a);
    FormalSolution resolved = formal_solution(sh.new_spec, std::max(1, opt.order - 1));
    bool coherent = resolved.h[0].agrees_with(sh.new_solution_prefix.h[0], resolved.certified_order) &&
                    resolved.h[1].agrees_with(sh.new_solution_prefix.h[1], resolved.certified_order);
    doc["shift_coherence_exact"] = coherent;
    write_json(dir / "shift.json", doc, rep);
    write_json(dir / "new_spec.json", spec_json(SystemSpec(sh.new_spec)), rep);
    write_file(dir / "prefix.csv", solution_csv(sh.new_solution_prefix), rep);
    return rep;
  }

  const int level = opt.level > 0 ? opt.level : q;

  if (command == "borel") {
    FormalSolution sol = formal_solution(spec, opt.order);
    std::array<CplxSeries, 2> b{borel_transform(sol.h[0], level),
                                borel_transform(sol.h[1], level)};
    std::ostringstream csv;
    csv << "n,b1_re,b1_im,b2_re,b2_im\n";
    for (int n = 0; n <= sol.certified_order; ++n) {
      csv << n;
      for (int comp = 0; comp < 2; ++comp) {
        const Cplx v = b[static_cast<size_t>(comp)][n];
        csv << "," << Json(v.real()).dump() << "," << Json(v.imag()).dump();
      }
      csv << "\n";
    }
    write_file(dir / "borel.csv", csv.str(), rep);
    Json doc = base_report(command, opt);
    doc["level"] = level;
    doc["certified_order"] = sol.certified_order;
    write_json(dir / "report.json", doc, rep);
    return rep;
  }

  if (command == "sum") {
    FormalSolution sol = formal_solution(spec, opt.order);
    std::vector<Cplx> xs;
    for (double m : log_spaced_moduli(opt)) xs.emplace_back(m * std::cos(opt.ray), m * std::sin(opt.ray));
    Json doc = base_report(command, opt);
    doc["level"] = level;
    Json comps = Json::array();
    for (int comp = 0; comp < 2; ++comp) {
      CplxSeries b = borel_transform(sol.h[static_cast<size_t>(comp)], level);
      Json vals = Json::array();
      for (const LaplaceValue& lv : laplace_sum(b, level, opt.theta, xs, qp)) {
        Json e;
        e["value"] = complex_json(lv.value);
        e["error_estimate"] = lv.error_estimate;
        vals.push_back(e);
      }
      comps.push_back(vals);
    }
    Json xj = Json::array();
    for (const Cplx& x : xs) xj.push_back(complex_json(x));
    doc["xs"] = xj;
    doc["components"] = comps;
    write_json(dir / "sum.json", doc, rep);
    return rep;
  }

  if (command == "stokes") {
    const InterlacedSpec& s = need_interlaced();
    FormalSolution sol = formal_solution(spec, opt.order);
    StokesSample sample =
        stokes_difference(s, sol, Direction(opt.theta), opt.ray, log_spaced_moduli(opt), qp);
    Json doc = base_report(command, opt);
    Json samp;
    samp["theta"] = sample.theta.theta;
    samp["phi"] = sample.phi;
    Json rows = Json::array();
    for (size_t i = 0; i < sample.moduli.size(); ++i) {
      Json e;
      e["modulus"] = sample.moduli[i];
      e["delta1"] = complex_json(sample.values[i][0]);
      e["delta2"] = complex_json(sample.values[i][1]);
      e["error1"] = sample.errors[i][0];
      e["error2"] = sample.errors[i][1];
      rows.push_back(e);
    }
    samp["rows"] = rows;
    doc["sample"] = samp;
    StokesModel fit = fit_stokes_model(sample, s);
    Json fj;
    fj["exp_rate"] = fit.exp_rate;
    fj["power_exponent"] = fit.power_exponent;
    fj["osc_freq"] = fit.osc_freq;
    fj["a_fitted"] = fit.a_fitted;
    fj["b_fitted"] = fit.b_fitted;
    fj["a_spec"] = fit.a_spec;
    fj["b_spec"] = fit.b_spec;
    fj["mu1"] = complex_json(fit.mu1);
    fj["mu2"] = complex_json(fit.mu2);
    fj["residual_norm"] = fit.residual_norm;
    doc["model"] = fj;
    write_json(dir / "stokes.json", doc, rep);
    return rep;
  }

  if (command == "separate") {
    const InterlacedSpec& s = need_interlaced();
    std::vector<QShortPoly> ps = parse_poly_options(opt, q);
    std::vector<int> omega;
    for (size_t j = 1; j <= ps.size(); ++j) omega.push_back(static_cast<int>(j));
    SeparationReport sep = exponential_separation(s.a, q, ps, omega, opt.ray);
    Json doc = base_report(command, opt);
    Json pw = Json::array();
    for (const auto& [key, l] : sep.pairwise) {
      Json e;
      e["pair"] = Json::array({key.first, key.second});
      e["principal_part"] = laurent_json(l);
      pw.push_back(e);
    }
    doc["pairwise"] = pw;
    doc["admissible"] = sep.admissible;
    doc["subclaim_violation"] = sep.subclaim_violation;
    if (sep.j0) doc["j0"] = *sep.j0;
    doc["dominance_order"] = sep.dominance_order;
    if (sep.suggested_phi) doc["suggested_phi"] = *sep.suggested_phi;
    write_json(dir / "separate.json", doc, rep);
    return rep;
  }

  if (command == "witness") {
    const InterlacedSpec& s = need_interlaced();
    std::vector<QShortPoly> ps = parse_poly_options(opt, q);
    RatMultiSeries f = parse_func_option(opt);
    WitnessReport w = witness_search(f, s, ps, opt.order);
    Json doc = base_report(command, opt);
    doc["certified_order"] = w.certified_order;
    doc["zero_to_certified"] = w.zero_to_certified;
    if (w.first_nonzero_order) doc["first_nonzero_order"] = *w.first_nonzero_order;
    if (w.derivative_order) doc["derivative_order"] = *w.derivative_order;
    if (w.witness_index)
      doc["witness_index"] = Json::array({w.witness_index->first, w.witness_index->second});
    doc["exhausted"] = w.exhausted;
    Json lam = Json::array();
    for (const auto& [i, j] : w.lambda_f) lam.push_back(Json::array({i, j}));
    doc["lambda_F"] = lam;
    write_json(dir / "witness.json", doc, rep);
    return rep;
  }

  if (command == "compose") {
    const InterlacedSpec& s = need_interlaced();
    std::vector<QShortPoly> ps = parse_poly_options(opt, q);
    RatMultiSeries f = parse_func_option(opt);
    std::vector<Cplx> xs;
    for (double m : log_spaced_moduli(opt)) xs.emplace_back(m * std::cos(opt.ray), m * std::sin(opt.ray));
    CompositionCheckReport cr = stokes_composition_check(f, s, ps, Direction(opt.theta), xs,
                                                         qp, 4, std::max(opt.order, 30));
    Json doc = base_report(command, opt);
    Json rows = Json::array();
    for (size_t i = 0; i < cr.xs.size(); ++i) {
      Json e;
      e["x"] = complex_json(cr.xs[i]);
      e["lhs"] = complex_json(cr.lhs[i]);
      e["rhs"] = complex_json(cr.rhs[i]);
      e["rel_err"] = cr.rel_err[i];
      rows.push_back(e);
    }
    doc["rows"] = rows;
    doc["max_rel_err"] = cr.max_rel_err;
    doc["omega"] = cr.omega;
    if (cr.dominant_j) doc["dominant_j"] = *cr.dominant_j;
    doc["dominance_consistent"] = cr.dominance_consistent;
    write_json(dir / "compose.json", doc, rep);
    return rep;
  }

  throw validation_error("unknown command '" + command + "'");
}

}  // namespace gevrey
