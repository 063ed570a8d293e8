// spiderchain: command-line front end for the spider-chain spectral library.
#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "spider/chain_model.hpp"
#include "spider/factorization.hpp"
#include "spider/km_spectral.hpp"
#include "spider/oracle.hpp"
#include "spider/spider_rw.hpp"
#include "spider/stieltjes.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace spider;

namespace {

constexpr const char* kVersion = "spiderchain 0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

struct Options {
  std::string input;
  std::string out_dir;
  std::vector<double> beta;
  std::uint64_t seed = 1;
  int nodes = 512;
  int levels = 100;
  double tol = 1e-8;
};

json matrix_json(const Matrix& M) {
  json j;
  j["rows"] = M.rows();
  j["cols"] = M.cols();
  auto data = json::array();
  for (int i = 0; i < M.rows(); ++i)
    for (int k = 0; k < M.cols(); ++k) data.push_back(M(i, k));
  j["data"] = std::move(data);  // row-major
  return j;
}

json defaults_json(const Options& opt) {
  return json{{"nodes", opt.nodes},
              {"levels", opt.levels},
              {"seed", opt.seed},
              {"tol", opt.tol},
              {"version", kVersion}};
}

SpiderParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("InputNotFound", "cannot open " + path);
  json spec;
  try {
    in >> spec;
  } catch (const json::exception& e) {
    throw Error("InputNotFound", std::string("bad JSON: ") + e.what());
  }
  return parse_spider_params(spec);
}

void write_report(const Options& opt, const std::string& name, json report) {
  report["defaults"] = defaults_json(opt);
  fs::create_directories(opt.out_dir);
  std::ofstream out(fs::path(opt.out_dir) / name);
  if (!out) throw Error("OutputNotWritable", "cannot write to " + opt.out_dir);
  out << report.dump(2) << "\n";
}

int cmd_validate(const Options& opt) {
  SpiderParams params = load_params(opt.input);
  auto violations = check(params);
  json report;
  report["valid"] = violations.empty();
  auto list = json::array();
  for (const auto& v : violations) list.push_back({{"code", v.code}, {"detail", v.detail}});
  report["violations"] = std::move(list);
  write_report(opt, "validate.json", report);
  if (!violations.empty()) {
    for (const auto& v : violations) std::cerr << v.code << ": " << v.detail << "\n";
    return kExitValidation;
  }
  std::cout << "valid\n";
  return kExitOk;
}

int cmd_analyze(const Options& opt) {
  const ValidatedChain chain = validate(load_params(opt.input));
  json report;
  report["N"] = chain.num_legs();
  report["constant_rates"] = chain.constant_rates();
  report["pi0"] = matrix_json(potential(chain, 0).matrix());
  fs::create_directories(opt.out_dir);
  if (chain.constant_rates()) {
    const RWParams rw = rw_from_chain(chain);
    const SupportInterval s = support(rw);
    report["support"] = {s.lo, s.hi};
    report["classification"] = to_string(rw_classify(rw));
    const Thresholds th = rw_thresholds(rw);
    report["thresholds"] = th.H;
    report["feasible"] = th.feasible;
    report["thresholds_closed_form"] = th.closed_form;
    const AtomReport atoms = rw_atoms(rw);
    json ja = json::array();
    if (atoms.at_one)
      ja.push_back({{"location", 1.0},
                    {"coefficient", atoms.coeff_one},
                    {"mass", matrix_json(atoms.at_one->mass)}});
    if (atoms.at_z2)
      ja.push_back({{"location", atoms.z2},
                    {"coefficient", atoms.coeff_z2},
                    {"mass", matrix_json(atoms.at_z2->mass)}});
    report["atoms"] = std::move(ja);
    // density samples: x then N^2 entries row-major
    std::ofstream csv(fs::path(opt.out_dir) / "density.csv");
    const int samples = 200;
    for (int i = 1; i < samples; ++i) {
      const double x = s.lo + (s.hi - s.lo) * i / samples;
      const Matrix W = rw_density(rw, x);
      csv << x;
      for (int r = 0; r < W.rows(); ++r)
        for (int c = 0; c < W.cols(); ++c) csv << "," << W(r, c);
      csv << "\n";
    }
  } else {
    json jb = json::array();
    for (int n = 0; n <= 3; ++n) {
      const BlockTriple t = blocks(chain, n);
      json e{{"level", n}, {"A", matrix_json(t.A)}, {"B", matrix_json(t.B)}};
      if (n >= 1) e["C"] = matrix_json(t.C);
      jb.push_back(std::move(e));
    }
    report["blocks"] = std::move(jb);
    json jpi = json::array();
    for (int n = 0; n <= 3; ++n) jpi.push_back(matrix_json(potential(chain, n).matrix()));
    report["pi"] = std::move(jpi);
    json jh = json::array();
    for (int m = 1; m <= chain.num_legs(); ++m) {
      const ConvergentState st = convergents(chain, m, 40);
      jh.push_back({{"leg", m}, {"h", st.h}, {"hypothesis_ok", st.hypothesis_ok}});
    }
    report["convergents"] = std::move(jh);
  }
  write_report(opt, "analyze.json", report);
  return kExitOk;
}

int cmd_km_check(const Options& opt) {
  const ValidatedChain chain = validate(load_params(opt.input));
  if (!chain.constant_rates())
    throw Error("UnsupportedWeight", "km-check needs the constant-coefficient closed forms");
  const RWParams rw = rw_from_chain(chain);
  const WeightMatrixSpec weight = rw_weight(rw);
  const QuadratureRule rule = QuadratureRule::gauss_chebyshev2(opt.nodes);
  double max_err = 0.0;
  json table = json::array();
  for (int i = 0; i <= 3; ++i)
    for (int j = 0; j <= 3; ++j)
      for (int n = 0; n <= 12; ++n) {
        const int L = std::max(i, j) + n + 1;
        const double err =
            (km_block(chain, weight, i, j, n, rule) - power_block(chain, L, n, i, j))
                .cwiseAbs()
                .maxCoeff();
        max_err = std::max(max_err, err);
        table.push_back({{"i", i}, {"j", j}, {"n", n}, {"error", err}});
      }
  json report;
  report["max_error"] = max_err;
  report["tolerance"] = opt.tol;
  report["table"] = std::move(table);
  write_report(opt, "km_check.json", report);
  std::cout << "max |km - power| = " << max_err << "\n";
  return max_err < opt.tol ? kExitOk : kExitCheckFailed;
}

BetaVector beta_from(const Options& opt, const ValidatedChain& chain) {
  if (static_cast<int>(opt.beta.size()) != chain.num_legs())
    throw Error("InputNotFound", "--beta needs exactly N values");
  return BetaVector{opt.beta};
}

int cmd_factorize(const Options& opt) {
  const ValidatedChain chain = validate(load_params(opt.input));
  const BetaVector beta = beta_from(opt, chain);
  json report;
  const FeasibilityReport feas = thresholds(chain);
  report["thresholds"] = feas.H;
  report["feasible"] = feas.feasible;
  try {
    const FactorPair pair = ul_factorize(chain, beta, opt.levels + 2);
    const double residual = verify_product(chain, pair, opt.levels);
    report["residual"] = residual;
    json seq = json::array();
    for (int m = 1; m <= chain.num_legs(); ++m) {
      json leg{{"leg", m}};
      std::vector<double> xs, ys, rs, ss;
      for (int n = 1; n <= std::min(opt.levels, pair.depth()); ++n) {
        xs.push_back(pair.x(n, m));
        ys.push_back(pair.y(n, m));
        rs.push_back(pair.r(n, m));
        ss.push_back(pair.s(n, m));
      }
      leg["x"] = xs;
      leg["y"] = ys;
      leg["r"] = rs;
      leg["s"] = ss;
      seq.push_back(std::move(leg));
    }
    report["sequences"] = std::move(seq);
    write_report(opt, "factorize.json", report);
    return residual < 1e-12 ? kExitOk : kExitCheckFailed;
  } catch (const NotStochastic& e) {
    report["error"] = {{"code", e.code()},
                       {"depth", e.depth()},
                       {"leg", e.leg()},
                       {"detail", e.what()}};
    write_report(opt, "factorize.json", report);
    std::cerr << e.what() << "\n";
    return kExitCheckFailed;
  }
}

int cmd_darboux(const Options& opt) {
  const ValidatedChain chain = validate(load_params(opt.input));
  const BetaVector beta = beta_from(opt, chain);
  const FactorPair pair = ul_factorize(chain, beta, std::max(opt.levels, 20) + 2);
  const DarbouxChain tilde = darboux(chain, pair);
  json report;
  report["B0_tilde"] = matrix_json(tilde.blocks(0).B);
  report["A0_tilde"] = matrix_json(tilde.blocks(0).A);
  json d = json::array();
  for (int i = 1; i <= chain.num_legs(); ++i) {
    std::vector<double> row;
    for (int j = 1; j <= chain.num_legs(); ++j) row.push_back(tilde.extra_transition(i, j));
    d.push_back(row);
  }
  report["extra_transitions"] = std::move(d);
  report["pi0_tilde"] = matrix_json(darboux_potential(chain, pair, 0));
  if (chain.constant_rates()) {
    const RWParams rw = rw_from_chain(chain);
    const WeightMatrixSpec wt =
        geronimus_weight(chain, pair, rw_weight(rw), rw_m_minus1(rw));
    report["geronimus_atom_at_0"] = matrix_json(wt.atoms.back().mass);
    // Gram check summary for the transformed polynomials
    const QuadratureRule rule = QuadratureRule::gauss_chebyshev2(opt.nodes);
    auto polys = [&](int n_max, double x) { return darboux_polys(chain, pair, n_max, x); };
    double ortho = 0.0, norm = 0.0;
    for (int n = 0; n <= 4; ++n)
      for (int m = 0; m <= 4; ++m) {
        const Matrix G = km_block_with(wt, polys, Matrix::Identity(chain.num_legs(),
                                                                  chain.num_legs()),
                                       n, m, 0, rule);
        if (n == m)
          norm = std::max(norm, (G * darboux_potential(chain, pair, n) -
                                 Matrix::Identity(chain.num_legs(), chain.num_legs()))
                                    .cwiseAbs()
                                    .maxCoeff());
        else
          ortho = std::max(ortho, G.cwiseAbs().maxCoeff());
      }
    report["gram_offdiag_max"] = ortho;
    report["gram_norm_defect_max"] = norm;
  }
  write_report(opt, "darboux.json", report);
  return kExitOk;
}

int cmd_simulate(const Options& opt) {
  const ValidatedChain chain = validate(load_params(opt.input));
  const int steps = 5;
  const std::int64_t paths = 1000000;
  const EmpiricalDistribution emp = simulate(chain, 0, 0, steps, paths, opt.seed);
  const int L = steps + 1;
  const Matrix P = matrix_power(truncate(chain, L), steps);
  const Vector exact = P.row(0).transpose();
  const ComparisonReport rep = compare(emp, exact);
  fs::create_directories(opt.out_dir);
  std::ofstream csv(fs::path(opt.out_dir) / "empirical.csv");
  for (std::size_t i = 0; i < emp.counts.size(); ++i)
    csv << i << "," << emp.counts[i] << ","
        << static_cast<double>(emp.counts[i]) / static_cast<double>(paths) << "\n";
  json report;
  report["paths"] = paths;
  report["steps"] = steps;
  report["max_abs_deviation"] = rep.max_abs_deviation;
  report["total_variation"] = rep.total_variation;
  double max_z = 0.0;
  for (double z : rep.z_scores) max_z = std::max(max_z, std::abs(z));
  report["max_abs_z"] = max_z;
  write_report(opt, "simulate.json", report);
  return (rep.total_variation < 0.005 && max_z < 4.0) ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral analysis of birth-death chains on spider graphs"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--input", opt.input, "chain spec JSON")->required();
    cmd->add_option("--out", opt.out_dir, "output directory")->required();
    cmd->add_option("--seed", opt.seed, "RNG seed");
    cmd->add_option("--nodes", opt.nodes, "quadrature nodes");
    cmd->add_option("--levels", opt.levels, "truncation / factorization depth");
    cmd->add_option("--tol", opt.tol, "tolerance");
    cmd->add_option("--beta", opt.beta, "beta_1..beta_N for factorize/darboux");
  };
  for (const char* name :
       {"validate", "analyze", "km-check", "factorize", "darboux", "simulate"})
    add_common(app.add_subcommand(name));

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("validate")) return cmd_validate(opt);
    if (app.got_subcommand("analyze")) return cmd_analyze(opt);
    if (app.got_subcommand("km-check")) return cmd_km_check(opt);
    if (app.got_subcommand("factorize")) return cmd_factorize(opt);
    if (app.got_subcommand("darboux")) return cmd_darboux(opt);
    if (app.got_subcommand("simulate")) return cmd_simulate(opt);
  } catch (const ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return e.code() == "InputNotFound" || e.code() == "OutputNotWritable" ? kExitIo
                                                                          : kExitCheckFailed;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}
