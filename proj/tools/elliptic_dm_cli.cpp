// elliptic-dm: command-line driver for the elliptic face-model toolkit.
//
//   eval-w    evaluate the lattice partition function W (transfer route)
//   eval-g    evaluate the closed form G
//   compare   evaluate both and report the relative residual
//   suite     run the identity suite on one spec or a range of specs
//   sweep     compare all evaluation routes across a range of specs
//   ybr       sample Yang-Baxter hexagons and report residuals
//
// Reports are JSON lines by default (--format csv switches the encoding);
// --out writes atomically via a temp file.  Exit status: 0 all checks pass,
// 1 at least one failed, 2 usage error.  The environment variable
// ELLIPTIC_DM_MAX_ENUM overrides the brute-force enumeration cap.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "edm/verify.hpp"

namespace {

using edm::cplx;
using nlohmann::json;

json to_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

cplx cplx_from_json(const json& j) {
  return {j.at("re").get<double>(), j.at("im").get<double>()};
}

struct CommonOpts {
  double q = 0.3;
  double lambda_re = 1.0;
  double lambda_im = 0.0;
  std::uint64_t seed = 0;
  double tol_scale = 1.0;
  std::string out;
  std::string format = "json";
};

struct SpecOpts {
  int m = 0;
  int n = 0;
  std::vector<int> x;
};

struct ParamOpts {
  std::vector<double> u_flat;
  std::vector<double> v_flat;
  std::optional<double> a12_re;
  double a12_im = 0.0;
  std::string params_file;
  std::string dump_params;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--q", o.q, "nome in (0,1)")->capture_default_str();
  cmd->add_option("--lambda-re", o.lambda_re, "crossing parameter, real part")
      ->capture_default_str();
  cmd->add_option("--lambda-im", o.lambda_im, "crossing parameter, imaginary part")
      ->capture_default_str();
  cmd->add_option("--seed", o.seed, "base RNG seed")->capture_default_str();
  cmd->add_option("--tol-scale", o.tol_scale, "multiplier on all tolerances")
      ->capture_default_str();
  cmd->add_option("--out", o.out, "output path (written atomically; default stdout)");
  cmd->add_option("--format", o.format, "report encoding: json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
}

void add_spec(CLI::App* cmd, SpecOpts& s, bool required) {
  auto* m = cmd->add_option("--M", s.m, "number of columns");
  auto* n = cmd->add_option("--N", s.n, "number of rows");
  auto* x = cmd->add_option("--x", s.x, "occupied bottom columns, comma separated")
                ->delimiter(',');
  if (required) {
    m->required();
    n->required();
    x->required();
  }
}

void add_params(CLI::App* cmd, ParamOpts& p) {
  cmd->add_option("--u", p.u_flat,
                  "row parameters as re,im pairs (flat comma-separated list)")
      ->delimiter(',');
  cmd->add_option("--v", p.v_flat,
                  "column parameters as re,im pairs (flat comma-separated list)")
      ->delimiter(',');
  cmd->add_option("--a12-re", p.a12_re, "dynamical offset, real part");
  cmd->add_option("--a12-im", p.a12_im, "dynamical offset, imaginary part");
  cmd->add_option("--params-file", p.params_file, "JSON file with u, v, a12");
  cmd->add_option("--dump-params", p.dump_params,
                  "write the resolved parameters to this JSON file");
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp + " for writing");
    os << content;
    if (!os.flush()) throw std::runtime_error("write to " + tmp + " failed");
  }
  std::filesystem::rename(tmp, path);
}

void emit(const CommonOpts& o, const std::string& content) {
  if (o.out.empty()) {
    std::cout << content;
  } else {
    write_atomic(o.out, content);
  }
}

std::string render_report(const edm::VerificationReport& rep,
                          const std::string& format) {
  std::ostringstream os;
  if (format == "csv") {
    rep.write_csv(os);
  } else {
    rep.write_jsonl(os);
  }
  return os.str();
}

double enum_cap() {
  if (const char* env = std::getenv("ELLIPTIC_DM_MAX_ENUM")) {
    const double cap = std::strtod(env, nullptr);
    if (cap > 0) return cap;
  }
  return edm::kDefaultEnumCap;
}

std::vector<cplx> pair_up(const std::vector<double>& flat, const char* what) {
  if (flat.size() % 2 != 0) {
    throw std::invalid_argument(std::string(what) +
                                " must be a flat list of re,im pairs");
  }
  std::vector<cplx> out;
  out.reserve(flat.size() / 2);
  for (std::size_t i = 0; i < flat.size(); i += 2) {
    out.emplace_back(flat[i], flat[i + 1]);
  }
  return out;
}

edm::GenericitySampler sampler_for(const CommonOpts& o) {
  edm::GenericitySampler s;
  s.rng_seed = o.seed;
  return s;
}

// Explicit parameters win over --params-file, which wins over sampling.
edm::ModelParams resolve_params(const edm::BoundarySpec& spec,
                                const CommonOpts& o, const ParamOpts& po,
                                const edm::EllipticContext& ctx) {
  edm::ModelParams p;
  if (!po.u_flat.empty() || !po.v_flat.empty()) {
    if (po.u_flat.empty() || po.v_flat.empty() || !po.a12_re.has_value()) {
      throw std::invalid_argument(
          "explicit parameters need --u, --v and --a12-re together");
    }
    p.u = pair_up(po.u_flat, "--u");
    p.v = pair_up(po.v_flat, "--v");
    p.a12 = cplx{*po.a12_re, po.a12_im};
  } else if (!po.params_file.empty()) {
    std::ifstream is(po.params_file);
    if (!is) throw std::invalid_argument("cannot read " + po.params_file);
    json j;
    is >> j;
    for (const json& ju : j.at("u")) p.u.push_back(cplx_from_json(ju));
    for (const json& jv : j.at("v")) p.v.push_back(cplx_from_json(jv));
    p.a12 = cplx_from_json(j.at("a12"));
  } else {
    p = edm::sample_generic(spec, sampler_for(o), ctx);
  }
  if (static_cast<int>(p.u.size()) != spec.n ||
      static_cast<int>(p.v.size()) != spec.m) {
    throw std::invalid_argument("parameter counts must match the spec (n u's, m v's)");
  }
  if (!po.dump_params.empty()) {
    json dump;
    dump["a12"] = to_json(p.a12);
    dump["u"] = json::array();
    for (const cplx& u : p.u) dump["u"].push_back(to_json(u));
    dump["v"] = json::array();
    for (const cplx& v : p.v) dump["v"].push_back(to_json(v));
    write_atomic(po.dump_params, dump.dump(2) + "\n");
  }
  return p;
}

json result_header(const std::string& command, const CommonOpts& o,
                   const edm::BoundarySpec& spec, const edm::ModelParams& p) {
  json j;
  j["command"] = command;
  j["q"] = o.q;
  j["lambda"] = to_json(cplx{o.lambda_re, o.lambda_im});
  j["M"] = spec.m;
  j["N"] = spec.n;
  j["x"] = spec.x;
  j["seed"] = o.seed;
  j["a12"] = to_json(p.a12);
  j["u"] = json::array();
  for (const cplx& u : p.u) j["u"].push_back(to_json(u));
  j["v"] = json::array();
  for (const cplx& v : p.v) j["v"].push_back(to_json(v));
  return j;
}

edm::EllipticContext context_for(const CommonOpts& o) {
  return edm::make_context(o.q, cplx{o.lambda_re, o.lambda_im});
}

int run_eval(const std::string& command, const CommonOpts& o,
             const SpecOpts& so, const ParamOpts& po) {
  const edm::EllipticContext ctx = context_for(o);
  const edm::BoundarySpec spec = edm::make_boundary_spec(so.m, so.n, so.x);
  const edm::ModelParams p = resolve_params(spec, o, po, ctx);
  json j = result_header(command, o, spec, p);
  if (command == "eval-w") {
    j["W"] = to_json(edm::evaluate_w_dp(spec, p, ctx));
  } else {
    j["G"] = to_json(edm::g_closed_form(spec, p, ctx));
  }
  emit(o, j.dump(2) + "\n");
  return 0;
}

int run_compare(const CommonOpts& o, const SpecOpts& so, const ParamOpts& po) {
  const edm::EllipticContext ctx = context_for(o);
  const edm::BoundarySpec spec = edm::make_boundary_spec(so.m, so.n, so.x);
  const edm::ModelParams p = resolve_params(spec, o, po, ctx);
  const cplx w = edm::evaluate_w_dp(spec, p, ctx);
  const cplx g = edm::g_closed_form(spec, p, ctx);
  const double residual = edm::rel_residual(w, g);
  const edm::Tolerances tol{.scale = o.tol_scale};
  const double bound = tol.effective(tol.lattice);
  json j = result_header("compare", o, spec, p);
  j["W"] = to_json(w);
  j["G"] = to_json(g);
  j["residual"] = residual;
  j["tol"] = bound;
  j["pass"] = residual <= bound;
  emit(o, j.dump(2) + "\n");
  return residual <= bound ? 0 : 1;
}

int run_suite(const CommonOpts& o, const SpecOpts& so, int m_max, int n_max,
              int seeds) {
  const edm::EllipticContext ctx = context_for(o);
  const edm::Tolerances tol{.scale = o.tol_scale};
  const edm::GenericitySampler sampler = sampler_for(o);
  edm::VerificationReport rep;
  if (!so.x.empty()) {
    const edm::BoundarySpec spec = edm::make_boundary_spec(so.m, so.n, so.x);
    rep = edm::run_property_suite(spec, sampler, ctx, tol, seeds, enum_cap());
  } else {
    if (m_max < 1 || n_max < 1) {
      throw std::invalid_argument("suite: --Mmax/--Nmax must be positive");
    }
    for (int m = 1; m <= m_max; ++m) {
      for (int n = 1; n <= std::min(n_max, m); ++n) {
        std::vector<int> x(n);
        for (int i = 0; i < n; ++i) x[i] = i + 1;
        while (true) {
          const edm::BoundarySpec spec = edm::make_boundary_spec(m, n, x);
          edm::VerificationReport part =
              edm::run_property_suite(spec, sampler, ctx, tol, seeds, enum_cap());
          rep.records.insert(rep.records.end(), part.records.begin(),
                             part.records.end());
          int i = n - 1;
          while (i >= 0 && x[i] == m - (n - 1 - i)) --i;
          if (i < 0) break;
          ++x[i];
          for (int k = i + 1; k < n; ++k) x[k] = x[k - 1] + 1;
        }
      }
    }
  }
  emit(o, render_report(rep, o.format));
  return rep.all_passed() ? 0 : 1;
}

int run_sweep(const CommonOpts& o, int m_max, int n_max, int seeds) {
  const edm::EllipticContext ctx = context_for(o);
  const edm::Tolerances tol{.scale = o.tol_scale};
  const edm::VerificationReport rep = edm::theorem_sweep(
      m_max, n_max, seeds, sampler_for(o), ctx, tol, enum_cap());
  emit(o, render_report(rep, o.format));
  return rep.all_passed() ? 0 : 1;
}

int run_ybr(const CommonOpts& o, int count) {
  const edm::EllipticContext ctx = context_for(o);
  const edm::Tolerances tol{.scale = o.tol_scale};
  const edm::VerificationReport rep =
      edm::yang_baxter_sweep(count, sampler_for(o), ctx, tol);
  emit(o, render_report(rep, o.format));
  return rep.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"elliptic face-model toolkit"};
  app.require_subcommand(1);

  CommonOpts common;
  SpecOpts spec;
  ParamOpts params;
  int m_max = 4;
  int n_max = 4;
  int seeds = 20;
  int hexagons = 200;

  CLI::App* eval_w = app.add_subcommand("eval-w", "evaluate W on one spec");
  CLI::App* eval_g = app.add_subcommand("eval-g", "evaluate G on one spec");
  CLI::App* compare = app.add_subcommand("compare", "compare W against G");
  for (CLI::App* cmd : {eval_w, eval_g, compare}) {
    add_common(cmd, common);
    add_spec(cmd, spec, /*required=*/true);
    add_params(cmd, params);
  }

  CLI::App* suite = app.add_subcommand("suite", "run the identity suite");
  add_common(suite, common);
  add_spec(suite, spec, /*required=*/false);
  suite->add_option("--Mmax", m_max, "largest column count when no --x is given")
      ->capture_default_str();
  suite->add_option("--Nmax", n_max, "largest row count when no --x is given")
      ->capture_default_str();
  suite->add_option("--seeds", seeds, "parameter draws per spec")
      ->capture_default_str();

  CLI::App* sweep = app.add_subcommand("sweep", "compare all routes across specs");
  add_common(sweep, common);
  sweep->add_option("--Mmax", m_max, "largest column count")->capture_default_str();
  sweep->add_option("--Nmax", n_max, "largest row count")->capture_default_str();
  sweep->add_option("--seeds", seeds, "parameter draws per spec")
      ->capture_default_str();

  CLI::App* ybr = app.add_subcommand("ybr", "Yang-Baxter hexagon sweep");
  add_common(ybr, common);
  ybr->add_option("--seeds", hexagons, "number of hexagons")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(eval_w)) return run_eval("eval-w", common, spec, params);
    if (app.got_subcommand(eval_g)) return run_eval("eval-g", common, spec, params);
    if (app.got_subcommand(compare)) return run_compare(common, spec, params);
    if (app.got_subcommand(suite)) return run_suite(common, spec, m_max, n_max, seeds);
    if (app.got_subcommand(sweep)) return run_sweep(common, m_max, n_max, seeds);
    if (app.got_subcommand(ybr)) return run_ybr(common, hexagons);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
