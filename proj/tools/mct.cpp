#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mct/alberti.hpp"
#include "mct/approx.hpp"
#include "mct/current.hpp"
#include "mct/derivation.hpp"
#include "mct/io.hpp"
#include "mct/renorm.hpp"

using nlohmann::json;

namespace {

struct CliState {
  std::string space_path, current_path, fragments_path, functions_path;
  std::string rep_path, out_dir;
  double eps = 0.1, eta = 0.9, delta = 0.2, tol = 1e-9, sigma = 0.9;
  double cone_alpha = 1.2;
  std::vector<double> cone_axis{1.0};
  int M = 16, max_iter = 3;
  std::uint64_t seed = 20140416;
  bool quiet = false;

  mct::RunConfig config() const {
    mct::RunConfig c;
    c.eta = eta;
    c.delta = delta;
    c.mass_tol = tol;
    c.decomposition_tol = tol;
    c.seed = seed;
    c.sigma = sigma;
    c.cone_alpha = cone_alpha;
    c.truncation_M = M;
    return c;
  }
};

void add_common(CLI::App* cmd, CliState& st) {
  cmd->add_option("--space", st.space_path, "space file (JSON)");
  cmd->add_option("--current", st.current_path, "current file (JSON)");
  cmd->add_option("--fragments", st.fragments_path, "fragment list (JSON)");
  cmd->add_option("--functions", st.functions_path, "functions file (JSON)");
  cmd->add_option("--rep", st.rep_path, "representation file (JSON)");
  cmd->add_option("--eps", st.eps, "epsilon parameter");
  cmd->add_option("--eta", st.eta, "mass witness efficiency");
  cmd->add_option("--delta", st.delta, "speed threshold");
  cmd->add_option("--sigma", st.sigma, "cone refinement speed parameter");
  cmd->add_option("--tol", st.tol, "tolerance");
  cmd->add_option("--seed", st.seed, "random seed");
  cmd->add_option("--truncation", st.M, "generating-set truncation M");
  cmd->add_flag("--quiet", st.quiet, "report only on stdout");
  cmd->add_option("--out", st.out_dir, "output directory for reports");
}

struct Inputs {
  mct::SpacePtr space;
  mct::Measure mu;
  std::vector<mct::Fragment> fragments;
};

Inputs load_inputs(const CliState& st) {
  if (st.space_path.empty()) mct::fail_input("--space is required");
  auto [space, mu] = mct::io::load_space(mct::io::read_file(st.space_path));
  Inputs in{space, mu, {}};
  if (!st.fragments_path.empty())
    in.fragments = mct::io::load_fragments(mct::io::read_file(st.fragments_path));
  return in;
}

mct::FnDict load_dict(const CliState& st, mct::SpacePtr space) {
  if (!st.functions_path.empty())
    return mct::io::load_functions(mct::io::read_file(st.functions_path),
                                   space);
  // Default dictionary: coordinates when present, else distance functions
  // from the first point.
  mct::FnDict dict(space, 0);
  if (space->has_coords()) {
    for (int c = 0; c < space->coord_dim(); ++c) {
      std::vector<double> v(space->size());
      for (int x = 0; x < space->size(); ++x) v[x] = space->coords()[x][c];
      dict.add("coord" + std::to_string(c), std::move(v));
    }
  } else {
    for (int p = 0; p < std::min(space->size(), 8); ++p) {
      std::vector<double> v(space->size());
      for (int x = 0; x < space->size(); ++x) v[x] = space->dist(x, p);
      dict.add("dist" + std::to_string(p), std::move(v));
    }
  }
  return dict;
}

mct::Current load_current(const CliState& st, const Inputs& in) {
  if (st.current_path.empty()) mct::fail_input("--current is required");
  return mct::io::load_current(mct::io::read_file(st.current_path), in.space,
                               in.mu, in.fragments);
}

void emit(const CliState& st, const std::string& name, const json& report,
          const std::string& csv = std::string()) {
  std::cout << report.dump(2) << "\n";
  if (!st.out_dir.empty()) {
    std::filesystem::create_directories(st.out_dir);
    std::ofstream f(st.out_dir + "/" + name + ".json");
    f << report.dump(2) << "\n";
    if (!csv.empty()) {
      std::ofstream c(st.out_dir + "/" + name + ".csv");
      c << csv;
    }
  }
}

void diag(const CliState& st, const std::string& msg) {
  if (!st.quiet) std::cerr << msg << "\n";
}

int run_mass(const CliState& st) {
  auto in = load_inputs(st);
  auto T = load_current(st, in);
  auto dict = load_dict(st, in.space);
  auto me = mct::mass_estimate(T, st.eta, dict, st.config());
  emit(st, "mass", mct::io::mass_report(me, *in.space));
  return 0;
}

int run_decompose(const CliState& st) {
  auto in = load_inputs(st);
  auto T = load_current(st, in);
  if ((int)st.cone_axis.size() != T.k())
    mct::fail_input("cone axis dimension must match the current dimension");
  auto dict = load_dict(st, in.space);
  double n2 = 0.0;
  for (double v : st.cone_axis) n2 += v * v;
  std::vector<double> axis = st.cone_axis;
  for (double& v : axis) v /= std::sqrt(n2);
  auto cone = mct::ConeField::constant(in.space->size(),
                                       mct::Cone(axis, st.cone_alpha));
  auto dec =
      mct::current_to_alberti(T, st.eta, st.delta, cone, dict, st.config());
  json pieces = json::array();
  for (const auto& p : dec.pieces) {
    json names = json::array();
    for (int x : p.V) names.push_back(in.space->name(x));
    pieces.push_back({{"V", names},
                      {"pi", p.pi},
                      {"direction_fraction", p.direction_fraction},
                      {"peel_ratio", p.peel_ratio},
                      {"rep", mct::io::to_json(p.refined)}});
  }
  emit(st, "decompose",
       json{{"pieces", pieces},
            {"coverage_defect", dec.coverage_defect},
            {"defects", dec.defects}});
  return 0;
}

int run_represent(const CliState& st) {
  auto in = load_inputs(st);
  auto T = load_current(st, in);
  auto dict = load_dict(st, in.space);
  if (!T.is_precurrent())
    mct::fail_precondition("represent: precurrent input required");
  const auto& pf = T.precurrent_form();
  std::vector<mct::Derivation> basis;
  for (const auto& d : pf.xi.basis) basis.push_back(*d);
  auto pd = mct::pseudodual_basis(basis, dict, 0.5);
  json pieces = json::array();
  for (const auto& piece : pd.pieces) {
    std::vector<mct::DerivationPtr> dp;
    for (const auto& d : piece.d_final)
      dp.push_back(std::make_shared<mct::Derivation>(d));
    auto rep = mct::represent_current(T, dp, piece.g, dict, st.config());
    json names = json::array();
    for (int x : piece.V) names.push_back(in.space->name(x));
    pieces.push_back({{"V", names},
                      {"tuples", rep.omega.tuples},
                      {"lambda", rep.omega.coeffs},
                      {"reference", rep.reference.weights()},
                      {"lambda_sup", rep.lambda_sup},
                      {"reconstruction_defect", rep.reconstruction_defect}});
  }
  emit(st, "represent", json{{"pieces", pieces}});
  return 0;
}

int run_renorm(const CliState& st) {
  auto in = load_inputs(st);
  auto dict = load_dict(st, in.space);
  mct::GeneratingSet gen{&dict, st.M};
  auto rs = mct::renorm_distance(in.space, gen, st.eps);
  emit(st, "renorm",
       json{{"eps", rs.eps},
            {"M", rs.M},
            {"sandwich_ok", rs.sandwich_ok},
            {"d_eps", rs.d_eps}});
  return 0;
}

int run_pseudodual(const CliState& st) {
  auto in = load_inputs(st);
  auto dict = load_dict(st, in.space);
  if (st.current_path.empty())
    mct::fail_input("pseudodual: --current with a precurrent holding the "
                    "basis derivations is required");
  auto T = load_current(st, in);
  if (!T.is_precurrent())
    mct::fail_precondition("pseudodual: precurrent input required");
  std::vector<mct::Derivation> basis;
  for (const auto& d : T.precurrent_form().xi.basis) basis.push_back(*d);
  auto pd = mct::pseudodual_basis(basis, dict, 0.5);
  json pieces = json::array();
  for (const auto& piece : pd.pieces) {
    json names = json::array();
    for (int x : piece.V) names.push_back(in.space->name(x));
    json gnames = json::array();
    for (const auto& g : piece.g) gnames.push_back(g.fn_name());
    double dmin = 1e300, dmax = 0.0;
    for (double v : piece.det) dmin = std::min(dmin, v), dmax = std::max(dmax, v);
    json norms = json::array();
    for (const auto& d : piece.d_final) norms.push_back(mct::global_norm(d));
    pieces.push_back({{"V", names},
                      {"g", gnames},
                      {"det_min", dmin},
                      {"det_max", dmax},
                      {"norms", norms}});
  }
  emit(st, "pseudodual",
       json{{"pieces", pieces}, {"norm_bound", pd.norm_bound}});
  return 0;
}

int run_validate(const CliState& st) {
  auto in = load_inputs(st);
  auto report = mct::validate_metric(in.space->dist_matrix());
  json j{{"metric_ok", report.ok},
         {"violation", report.violation},
         {"mu_total", in.mu.total()}};
  if (!st.current_path.empty()) {
    auto T = load_current(st, in);
    auto dict = load_dict(st, in.space);
    auto ax = mct::check_axioms(T, 64, dict, st.config());
    j["axioms"] = {{"multilinearity", ax.multilinearity},
                   {"antisymmetry", ax.antisymmetry},
                   {"locality", ax.locality},
                   {"locality_strict_defect", ax.locality_strict},
                   {"note", ax.note}};
  }
  if (!st.rep_path.empty()) {
    auto rep = mct::io::load_rep(mct::io::read_file(st.rep_path), in.space,
                                 in.fragments);
    auto rv = mct::validate(rep, in.mu, st.tol);
    j["rep"] = {{"decomposition_defect", rv.decomposition_defect},
                {"p_defect", rv.p_normalization_defect},
                {"absolutely_continuous", rv.absolutely_continuous}};
  }
  emit(st, "validate", j);
  return 0;
}

int run_approx_normal(const CliState& st) {
  auto in = load_inputs(st);
  auto T = load_current(st, in);
  auto dict = load_dict(st, in.space);
  auto report =
      mct::approximate_by_normal(T, st.max_iter, dict, st.config());
  json steps = json::array();
  std::ostringstream csv;
  csv << "n,e_n,fit_l1,glip_cap\n";
  for (std::size_t i = 0; i < report.steps.size(); ++i) {
    const auto& s = report.steps[i];
    steps.push_back({{"error", s.error},
                     {"fit_l1", s.fit_l1},
                     {"glip_cap", s.glip_cap},
                     {"provenance", s.provenance}});
    csv << (i + 1) << "," << s.error << "," << s.fit_l1 << "," << s.glip_cap
        << "\n";
  }
  emit(st, "approx-normal",
       json{{"steps", steps}, {"final_error", report.final_error}},
       csv.str());
  if (report.final_error > st.eps) {
    diag(st, "approx-normal: final error above --eps");
    return 4;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"metric currents toolkit"};
  app.require_subcommand(1);
  CliState st;

  auto* c_mass = app.add_subcommand("mass", "mass estimate of a current");
  add_common(c_mass, st);
  auto* c_dec = app.add_subcommand("decompose", "cone decomposition");
  add_common(c_dec, st);
  c_dec->add_option("--cone-axis", st.cone_axis, "cone axis components");
  c_dec->add_option("--cone-alpha", st.cone_alpha, "cone opening angle");
  auto* c_rep = app.add_subcommand("represent", "representation formula");
  add_common(c_rep, st);
  auto* c_ren = app.add_subcommand("renorm", "strictly convex renorming");
  add_common(c_ren, st);
  auto* c_psd = app.add_subcommand("pseudodual", "pseudodual basis");
  add_common(c_psd, st);
  auto* c_val = app.add_subcommand("validate", "validate inputs");
  add_common(c_val, st);
  auto* c_apx = app.add_subcommand("approx-normal",
                                   "approximation by normal currents");
  add_common(c_apx, st);
  c_apx->add_option("--max-iter", st.max_iter, "refinement steps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (c_mass->parsed()) return run_mass(st);
    if (c_dec->parsed()) return run_decompose(st);
    if (c_rep->parsed()) return run_represent(st);
    if (c_ren->parsed()) return run_renorm(st);
    if (c_psd->parsed()) return run_pseudodual(st);
    if (c_val->parsed()) return run_validate(st);
    if (c_apx->parsed()) return run_approx_normal(st);
  } catch (const mct::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case mct::ErrorKind::Input:
        return 2;
      case mct::ErrorKind::Precondition:
        return 3;
      case mct::ErrorKind::Tolerance:
        return 4;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
