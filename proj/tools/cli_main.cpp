#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hardy/acceptance.hpp"
#include "hardy/atoms.hpp"
#include "hardy/complex.hpp"
#include "hardy/corpus.hpp"
#include "hardy/covering.hpp"
#include "hardy/hardy_space.hpp"
#include "hardy/holo.hpp"
#include "hardy/offdiag.hpp"

using namespace hardy;
namespace fs = std::filesystem;

namespace {

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

Space load_space(const std::string& path) { return space_from_json(load_json(path)); }

WeightedComplex load_complex(const std::string& arg) {
  if (fs::exists(arg)) return complex_from_json(load_json(arg));
  if (arg == "path40") return path_complex(40);
  if (arg == "cycle32") return cycle_complex(32);
  if (arg == "grid8x7") return grid_complex(8, 7);
  if (arg == "disc24") return disc_complex(24);
  int a = 0, b = 0;
  if (std::sscanf(arg.c_str(), "path:%d", &a) == 1) return path_complex(a);
  if (std::sscanf(arg.c_str(), "cycle:%d", &a) == 1) return cycle_complex(a);
  if (std::sscanf(arg.c_str(), "grid:%d,%d", &a, &b) == 2)
    return grid_complex(a, b);
  if (std::sscanf(arg.c_str(), "disc:%d", &a) == 1) return disc_complex(a);
  throw UnknownKind("complex must be a json file, a fixture name "
                    "(path40|cycle32|grid8x7|disc24), or path:N|cycle:N|"
                    "grid:R,C|disc:N");
}

HoloFn parse_func(const std::string& s) {
  double a = 0, p = 0;
  if (s == "expz2") return HoloFn::expz2();
  if (std::sscanf(s.c_str(), "expsqrt:%lf", &a) == 1) return HoloFn::expsqrt(a);
  if (std::sscanf(s.c_str(), "resolvent:%lf,%lf", &a, &p) == 2)
    return HoloFn::resolvent_power(a, p);
  if (std::sscanf(s.c_str(), "riesz:%lf", &a) == 1)
    return HoloFn::riesz_symbol(a);
  throw UnknownKind("func must be expz2 | expsqrt:A | resolvent:A,P | riesz:A");
}

TimeGrid parse_grid(const std::string& s) {
  TimeGrid g;
  if (s.empty()) return g;
  int M = 0;
  double q = 0;
  if (std::sscanf(s.c_str(), "%lf,%d", &q, &M) != 2 || !(q > 0) || q >= 1 ||
      M < 1)
    throw Error("grid must be q,M with 0 < q < 1 and M >= 1");
  g.q = q;
  g.M = M;
  return g;
}

SectorParams parse_sector(const std::string& s) {
  SectorParams sec;
  if (s.empty()) return sec;
  double t = 0, r = 0;
  if (std::sscanf(s.c_str(), "%lf,%lf", &t, &r) != 2)
    throw Error("sector must be theta,r");
  sec.theta = t;
  sec.r = r;
  return sec;
}

void write_text(const std::string& dir, const std::string& name,
                const std::string& body) {
  fs::create_directories(dir);
  std::ofstream out(dir + "/" + name);
  if (!out) throw Error("cannot write " + dir + "/" + name);
  out << body;
}

void write_json_file(const std::string& dir, const std::string& name,
                     const nlohmann::json& j) {
  write_text(dir, name, j.dump(1) + "\n");
}

nlohmann::json cplx_vec_json(const Eigen::VectorXcd& v) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) {
    re.push_back(v(i).real());
    im.push_back(v(i).imag());
  }
  return {{"re", re}, {"im", im}};
}

// values from --config lose to explicit flags but beat built-in defaults
template <typename T>
void cfg_override(const nlohmann::json& c, const char* key,
                  const CLI::Option* opt, T& val) {
  if (opt->count() == 0 && c.contains(key)) val = c.at(key).get<T>();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"local hardy space toolkit: growth fitting, coverings, "
               "decompositions, operator calculus, and verification"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path,
                 "json file supplying defaults for the flags below");
  nlohmann::json cfg = nlohmann::json::object();
  // option values are assigned before subcommand callbacks run, so each
  // callback can pull the config in on demand
  auto ensure_cfg = [&] {
    if (!config_path.empty() && cfg.empty()) cfg = load_json(config_path);
  };

  // space ------------------------------------------------------------
  auto* sp = app.add_subcommand("space", "fit growth envelopes of a space");
  std::string sp_in, sp_out = "out";
  auto* sp_in_o = sp->add_option("--in", sp_in, "space json (dist or graph)");
  auto* sp_out_o = sp->add_option("--out", sp_out, "output directory");
  sp->callback([&] {
    ensure_cfg();
    cfg_override(cfg, "space", sp_in_o, sp_in);
    cfg_override(cfg, "out", sp_out_o, sp_out);
    if (sp_in.empty()) throw Error("space: --in is required");
    Space X = load_space(sp_in);
    GrowthReport g = fit_growth(X);
    nlohmann::json j = growth_to_json(g);
    j["provenance"] = "fitted";
    j["points"] = X.n();
    write_json_file(sp_out, "growth.json", j);
    std::printf("space: n=%d kappa=%.6g lambda=%.6g -> %s/growth.json\n",
                X.n(), g.envelope.kappa, g.envelope.lambda, sp_out.c_str());
  });

  // cover ------------------------------------------------------------
  auto* cv = app.add_subcommand("cover", "whitney cover and unit cubes");
  std::string cv_in, cv_out = "out";
  int cv_center = 0;
  double cv_radius = 0;
  auto* cv_in_o = cv->add_option("--in", cv_in, "space json");
  auto* cv_out_o = cv->add_option("--out", cv_out, "output directory");
  cv->add_option("--center", cv_center, "center of the open set O");
  cv->add_option("--radius", cv_radius, "radius of O (default 0.4 diameter)");
  cv->callback([&] {
    ensure_cfg();
    cfg_override(cfg, "space", cv_in_o, cv_in);
    cfg_override(cfg, "out", cv_out_o, cv_out);
    if (cv_in.empty()) throw Error("cover: --in is required");
    Space X = load_space(cv_in);
    double r = cv_radius > 0 ? cv_radius : 0.4 * X.diameter();
    std::vector<int> O = ball(X, cv_center, r);
    WhitneyCover wc = whitney_cover(X, O);
    UnitCubeStructure U = unit_cubes(X);
    nlohmann::json balls = nlohmann::json::array();
    for (const BallRef& b : wc.balls)
      balls.push_back({{"center", b.center}, {"radius", b.radius}});
    nlohmann::json j = {{"O", {{"center", cv_center}, {"radius", r}}},
                        {"balls", balls},
                        {"intersection_bound", wc.intersection_bound},
                        {"cubes", U.cubes.size()},
                        {"provenance", "fitted"}};
    write_json_file(cv_out, "cover.json", j);
    std::printf("cover: |O|=%zu balls=%zu cubes=%zu -> %s/cover.json\n",
                O.size(), wc.balls.size(), U.cubes.size(), cv_out.c_str());
  });

  // decompose ----------------------------------------------------------
  auto* dc = app.add_subcommand("decompose", "atomic decompositions");
  std::string dc_in, dc_mode = "t1", dc_field = "random", dc_grid,
              dc_out = "out";
  unsigned dc_seed = 1;
  auto* dc_in_o = dc->add_option("--in", dc_in, "space json");
  dc->add_option("--mode", dc_mode, "t1 | l1q")
      ->check(CLI::IsMember({"t1", "l1q"}));
  dc->add_option("--field", dc_field, "zero | random");
  auto* dc_seed_o = dc->add_option("--seed", dc_seed, "rng seed");
  auto* dc_grid_o = dc->add_option("--grid", dc_grid, "time grid q,M");
  auto* dc_out_o = dc->add_option("--out", dc_out, "output directory");
  dc->callback([&] {
    ensure_cfg();
    cfg_override(cfg, "space", dc_in_o, dc_in);
    cfg_override(cfg, "seed", dc_seed_o, dc_seed);
    cfg_override(cfg, "grid", dc_grid_o, dc_grid);
    cfg_override(cfg, "out", dc_out_o, dc_out);
    if (dc_in.empty()) throw Error("decompose: --in is required");
    Space X = load_space(dc_in);
    nlohmann::json atoms = nlohmann::json::array();
    nlohmann::json j;
    if (dc_mode == "t1") {
      TimeGrid g = parse_grid(dc_grid);
      TentField F = dc_field == "zero" ? zero_field(X, g)
                                       : random_tent_field(X, g, dc_seed);
      std::vector<TentAtomRecord> recs = t1_decompose(X, F);
      double lsum = 0;
      TentField R = zero_field(X, g);
      for (const TentAtomRecord& a : recs) {
        atoms.push_back({{"center", a.ball.center},
                         {"radius", a.ball.radius},
                         {"coeff", a.coeff}});
        lsum += std::abs(a.coeff);
        R.v += a.coeff * a.field.v;
      }
      TentField diff;
      diff.grid = g;
      diff.v = F.v - R.v;
      double base = l2bullet(X, F);
      j = {{"mode", "t1"},
           {"atoms", atoms},
           {"sum_abs_coeff", lsum},
           {"field_norm", base},
           {"reconstruction_error", base > 0 ? l2bullet(X, diff) / base : 0.0},
           {"provenance", "fitted"}};
    } else {
      UnitCubeStructure U = unit_cubes(X);
      Eigen::VectorXcd f =
          dc_field == "zero"
              ? Eigen::VectorXcd::Zero(X.n()).eval()
              : random_form(X.n(), dc_seed);
      std::vector<LQAtomRecord> recs = l1q_decompose(X, U, f);
      double lsum = 0;
      for (const LQAtomRecord& a : recs) {
        atoms.push_back({{"center", a.ball.center},
                         {"radius", a.ball.radius},
                         {"coeff", a.coeff}});
        lsum += std::abs(a.coeff);
      }
      j = {{"mode", "l1q"},
           {"atoms", atoms},
           {"sum_abs_coeff", lsum},
           {"block_norm", lq_norm(X, U, f, 1.0)},
           {"provenance", "fitted"}};
    }
    write_json_file(dc_out, "atoms.json", j);
    std::printf("decompose: %zu atoms -> %s/atoms.json\n", atoms.size(),
                dc_out.c_str());
  });

  // calculus -----------------------------------------------------------
  auto* ca = app.add_subcommand("calculus", "apply f(D) to a random section");
  std::string ca_cpx = "path40", ca_func = "expz2", ca_route = "auto",
              ca_sector, ca_out = "out";
  unsigned ca_seed = 1;
  double ca_tol = 1e-9;
  auto* ca_cpx_o = ca->add_option("--complex", ca_cpx, "fixture or json");
  ca->add_option("--func", ca_func, "expz2 | expsqrt:A | resolvent:A,P | riesz:A");
  ca->add_option("--route", ca_route, "auto | spectral | contour | both")
      ->check(CLI::IsMember({"auto", "spectral", "contour", "both"}));
  auto* ca_seed_o = ca->add_option("--seed", ca_seed, "rng seed");
  auto* ca_sec_o = ca->add_option("--sector", ca_sector, "sector theta,r");
  auto* ca_tol_o = ca->add_option("--tolerance", ca_tol, "contour tail tol");
  auto* ca_out_o = ca->add_option("--out", ca_out, "output directory");
  ca->callback([&] {
    ensure_cfg();
    cfg_override(cfg, "complex", ca_cpx_o, ca_cpx);
    cfg_override(cfg, "seed", ca_seed_o, ca_seed);
    cfg_override(cfg, "sector", ca_sec_o, ca_sector);
    cfg_override(cfg, "tolerance", ca_tol_o, ca_tol);
    cfg_override(cfg, "out", ca_out_o, ca_out);
    WeightedComplex K = load_complex(ca_cpx);
    DiracOperator op = dirac(K);
    Eigen::VectorXcd u = random_form(op.n(), ca_seed);
    HoloFn f = parse_func(ca_func);
    SectorParams sec = parse_sector(ca_sector);
    ContourSpec spec;
    spec.tail_tol = ca_tol;
    nlohmann::json j = {{"func", ca_func},
                        {"route", ca_route},
                        {"n", op.n()},
                        {"seed", ca_seed},
                        {"provenance", "configured"}};
    double ra = 0;
    bool is_riesz = std::sscanf(ca_func.c_str(), "riesz:%lf", &ra) == 1;
    if (is_riesz && (ca_route == "contour" || ca_route == "both")) {
      // the symbol does not decay, so the contour leg runs on the factored
      // form D (z^2+a)^{-1/2}; the library handles the split
      RieszReport rep = riesz_local(op, ra, u, sec);
      j["result"] = cplx_vec_json(ca_route == "contour" ? rep.contour
                                                        : rep.spectral);
      j["err_estimate"] = rep.err_estimate;
      j["norm_bound"] = rep.norm_bound;
      if (ca_route == "both") j["route_gap"] = rep.rel_gap;
    } else if (ca_route == "spectral" || ca_route == "auto") {
      j["result"] = cplx_vec_json(spectral_apply(op, f, u));
    } else if (ca_route == "contour") {
      ApplyResult r = contour_apply(op, f, u, sec, spec);
      j["result"] = cplx_vec_json(r.u);
      j["err_estimate"] = r.err_estimate;
    } else {
      Eigen::VectorXcd s = spectral_apply(op, f, u);
      ApplyResult r = contour_apply(op, f, u, sec, spec);
      j["result"] = cplx_vec_json(s);
      j["err_estimate"] = r.err_estimate;
      j["route_gap"] = (r.u - s).norm() / std::max(1e-300, s.norm());
    }
    write_json_file(ca_out, "field.json", j);
    std::printf("calculus: %s via %s -> %s/field.json\n", ca_func.c_str(),
                ca_route.c_str(), ca_out.c_str());
  });

  // offdiag ------------------------------------------------------------
  auto* od = app.add_subcommand("offdiag", "resolvent decay profile");
  std::string od_cpx = "path40", od_z = "0,2", od_out = "out";
  double od_width = 2.0;
  auto* od_cpx_o = od->add_option("--complex", od_cpx, "fixture or json");
  od->add_option("--z", od_z, "resolvent point re,im");
  od->add_option("--width", od_width, "shell width");
  auto* od_out_o = od->add_option("--out", od_out, "output directory");
  od->callback([&] {
    ensure_cfg();
    cfg_override(cfg, "complex", od_cpx_o, od_cpx);
    cfg_override(cfg, "out", od_out_o, od_out);
    double re = 0, im = 0;
    if (std::sscanf(od_z.c_str(), "%lf,%lf", &re, &im) != 2)
      throw Error("offdiag: --z must be re,im");
    WeightedComplex K = load_complex(od_cpx);
    DiracOperator op = dirac(K);
    DecayProfile prof = decay_profile(resolvent_matrix(op, cplx(re, im)),
                                      op.W, nearest_vertex_dist(K), od_width);
    std::ostringstream csv;
    csv << "# rate=" << prof.rate << " amp=" << prof.amp
        << " provenance=fitted\n";
    csv << "sep,norm\n";
    char line[64];
    for (size_t i = 0; i < prof.sep.size(); ++i) {
      std::snprintf(line, sizeof line, "%.17g,%.17g\n", prof.sep[i],
                    prof.norm[i]);
      csv << line;
    }
    write_text(od_out, "profile.csv", csv.str());
    std::printf("offdiag: %zu shells, rate %.4g -> %s/profile.csv\n",
                prof.sep.size(), prof.rate, od_out.c_str());
  });

  // hardy --------------------------------------------------------------
  auto* hd = app.add_subcommand("hardy", "square-function norms and molecules");
  std::string hd_cpx = "path40", hd_grid, hd_out = "out";
  unsigned hd_seed = 1;
  auto* hd_cpx_o = hd->add_option("--complex", hd_cpx, "fixture or json");
  auto* hd_seed_o = hd->add_option("--seed", hd_seed, "rng seed");
  auto* hd_grid_o = hd->add_option("--grid", hd_grid, "time grid q,M");
  auto* hd_out_o = hd->add_option("--out", hd_out, "output directory");
  hd->callback([&] {
    ensure_cfg();
    cfg_override(cfg, "complex", hd_cpx_o, hd_cpx);
    cfg_override(cfg, "seed", hd_seed_o, hd_seed);
    cfg_override(cfg, "grid", hd_grid_o, hd_grid);
    cfg_override(cfg, "out", hd_out_o, hd_out);
    WeightedComplex K = load_complex(hd_cpx);
    DiracOperator op = dirac(K);
    Space X = simplex_space(K);
    UnitCubeStructure cubes = unit_cubes(X);
    HardyConfig hc = make_config(fit_growth(X), 1.0);
    if (!hd_grid.empty()) hc.grid = parse_grid(hd_grid);
    Eigen::VectorXcd u = random_form(X.n(), hd_seed);
    double l2 = std::sqrt((X.mass.array() * u.cwiseAbs2().array()).sum());
    double h1 = hp_norm(op, X, cubes, hc, u, 1.0);
    double h2 = hp_norm(op, X, cubes, hc, u, 2.0);

    // one tent atom through the molecule pipeline as a worked record
    TentField F = random_tent_field(X, hc.grid, hd_seed + 7);
    std::vector<TentAtomRecord> recs = t1_decompose(X, F);
    nlohmann::json mol_json;
    if (!recs.empty()) {
      size_t best = 0;
      for (size_t i = 1; i < recs.size(); ++i)
        if (std::abs(recs[i].coeff) > std::abs(recs[best].coeff)) best = i;
      Molecule mol = tent_atom_to_molecule(op, X, hc, recs[best]);
      MoleculeCheck chk = validate_molecule(op, X, mol);
      mol_json = {{"radius", mol.ball.radius},
                  {"order", mol.N},
                  {"decay_rate", mol.q},
                  {"coeff", mol.coeff},
                  {"witness", mol.has_witness},
                  {"pass", chk.pass},
                  {"worst_row_slack", chk.worst_slack},
                  {"h1_image", molecule_h1_bound(op, X, cubes, hc, mol)}};
    }
    nlohmann::json j = {{"n", X.n()},
                        {"seed", hd_seed},
                        {"grid", {{"q", hc.grid.q}, {"M", hc.grid.M}}},
                        {"l2", l2},
                        {"h1", h1},
                        {"h2", h2},
                        {"h2_over_l2", h2 / l2},
                        {"molecule", mol_json},
                        {"provenance", "fitted"}};
    write_json_file(hd_out, "norms.json", j);
    char buf[160];
    std::snprintf(buf, sizeof buf, "p,norm,ratio_to_l2,provenance\n"
                  "1,%.17g,%.17g,fitted\n2,%.17g,%.17g,fitted\n",
                  h1, h1 / l2, h2, h2 / l2);
    write_text(hd_out, "norms.csv", buf);
    std::printf("hardy: h1=%.6g h2=%.6g l2=%.6g -> %s/norms.json\n", h1, h2,
                l2, hd_out.c_str());
  });

  // verify -------------------------------------------------------------
  auto* vf = app.add_subcommand("verify", "run the full acceptance suite");
  std::string vf_data = "data";
  auto* vf_data_o = vf->add_option("--data", vf_data, "fixture directory");
  int verify_rc = 0;
  vf->callback([&] {
    ensure_cfg();
    cfg_override(cfg, "data", vf_data_o, vf_data);
    verify_rc = acceptance_run_and_report(vf_data);
  });

  // let --config appear after the subcommand name
  for (CLI::App* s : {sp, cv, dc, ca, od, hd, vf}) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return verify_rc;
}
