#include "allpass/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "allpass/blaschke.hpp"
#include "allpass/enumerate.hpp"
#include "allpass/gmr_replica.hpp"
#include "allpass/mirror.hpp"
#include "allpass/polymat.hpp"
#include "allpass/roots.hpp"
#include "allpass/verify.hpp"
#include "json.hpp"

namespace allpass::cli {

namespace {

using nlohmann::json;

bool verbose() {
  const char* env = std::getenv("ALLPASS_LOG");
  return env != nullptr && *env != '\0';
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::io_error, "invalid JSON in '" + path + "': " + e.what());
  }
  return j;
}

void write_output(const json& j, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << j.dump(2) << "\n";
    return;
  }
  std::ofstream file(path);
  if (!file) throw Error(ErrorCode::io_error, "cannot write '" + path + "'");
  file << j.dump(2) << "\n";
}

MirrorMethod parse_method(const std::string& name) {
  if (name == "svd") return MirrorMethod::svd;
  if (name == "qr") return MirrorMethod::qr;
  throw Error(ErrorCode::bad_config, "method must be 'svd' or 'qr'");
}

struct Options {
  CliConfig cfg;
  std::string method_name = "qr";

  void register_common(CLI::App* app) {
    app->add_option("--tol-unit-circle", cfg.tol.unit_circle,
                    "relative margin around |z| = 1")
        ->check(CLI::PositiveNumber);
    app->add_option("--tol-real", cfg.tol.realness,
                    "residual imaginary part allowed on real outputs")
        ->check(CLI::PositiveNumber);
    app->add_option("--tol-rank", cfg.tol.rank,
                    "singular value ratio treated as rank deficient")
        ->check(CLI::PositiveNumber);
    app->add_option("--tol-pair", cfg.tol.pairing,
                    "conjugate pairing / root realness tolerance")
        ->check(CLI::PositiveNumber);
    app->add_option("--tol-multiplicity", cfg.tol.multiplicity,
                    "minimal separation between distinct roots")
        ->check(CLI::PositiveNumber);
    app->add_option("--grid", cfg.grid, "unit circle grid points")
        ->check(CLI::Range(8, 1 << 20));
    app->add_option("--regime-cap", cfg.regime_cap,
                    "largest admissible number of regimes");
    app->add_option("--method", method_name, "mirroring pipeline: svd or qr")
        ->check(CLI::IsMember({"svd", "qr"}));
  }

  void finish() { cfg.method = parse_method(method_name); }
};

json config_to_json(const MirrorConfig& cfg) { return cfg.to_bitstring(); }

int run_roots(const std::string& in_path, const Options& opt, std::ostream& out) {
  PolyMat p = polymat_from_json(read_json_file(in_path));
  auto groups = group_roots(determinantal_roots(p, opt.cfg.tol), opt.cfg.tol);
  json arr = json::array();
  for (const auto& g : groups) arr.push_back(root_group_to_json(g));
  out << arr.dump(2) << "\n";
  return 0;
}

int run_mirror(const std::string& in_path, const std::string& config_bits,
               const std::string& out_path, const std::string& report_path,
               const Options& opt, std::ostream& out) {
  PolyMat p = polymat_from_json(read_json_file(in_path));
  auto groups = group_roots(determinantal_roots(p, opt.cfg.tol), opt.cfg.tol);
  MirrorConfig config = MirrorConfig::from_bitstring(config_bits);
  if (config.size() != groups.size())
    throw Error(ErrorCode::bad_config,
                "config has " + std::to_string(config.size()) + " bits but " +
                    std::to_string(groups.size()) + " root groups exist");
  if (verbose())
    std::clog << "mirroring " << config_bits << " over " << groups.size()
              << " groups\n";
  PolyMat mirrored = apply_config(p, groups, config, opt.cfg.method, opt.cfg.tol);
  VerificationReport report = verify_mirror(p, mirrored, groups, config,
                                            opt.cfg.grid, {}, opt.cfg.tol);
  if (!out_path.empty() || !report_path.empty()) {
    write_output(polymat_to_json(mirrored), out_path, out);
    write_output(report_to_json(report), report_path, out);
  } else {
    out << json{{"polymat", polymat_to_json(mirrored)},
                {"report", report_to_json(report)}}
               .dump(2)
        << "\n";
  }
  return 0;
}

int run_enumerate(const std::string& in_path, const std::string& out_path,
                  const Options& opt, std::ostream& out) {
  PolyMat p = polymat_from_json(read_json_file(in_path));
  auto regimes = enumerate_regimes(p, opt.cfg.method, opt.cfg.tol,
                                   opt.cfg.regime_cap, opt.cfg.grid);
  json arr = json::array();
  for (const auto& r : regimes)
    arr.push_back({{"config", config_to_json(r.config)},
                   {"polymat", polymat_to_json(r.poly)},
                   {"report", report_to_json(r.report)}});
  write_output(arr, out_path, out);
  return 0;
}

int run_count(int n, int q, int pairs, double secs_per_item, std::ostream& out) {
  RegimeCount count = count_regimes(n, q, pairs);
  CostEstimate cost = estimate_cost(count.raw, secs_per_item);
  out << "raw: " << count.raw << (count.overflow ? " (saturated)" : "") << "\n";
  out << "grouped: " << count.grouped << "\n";
  out << "cost: " << cost.human << "\n";
  return 0;
}

int run_verify(const std::string& a_path, const std::string& b_path,
               const Options& opt, std::ostream& out) {
  PolyMat a = polymat_from_json(read_json_file(a_path));
  PolyMat b = polymat_from_json(read_json_file(b_path));
  SpectralComparison cmp = spectral_equivalence(a, b, opt.cfg.grid);
  double defect = allpass_defect(quotient_filter(a, b), opt.cfg.grid);
  out << json{{"grid_points", opt.cfg.grid},
              {"max_spectral_defect", cmp.max_frobenius},
              {"max_dist_herm", cmp.max_dist_herm},
              {"dist_herm", cmp.dist_herm},
              {"max_allpass_defect", defect},
              {"max_imag_a", a.max_imag()},
              {"max_imag_b", b.max_imag()}}
             .dump(2)
      << "\n";
  return 0;
}

int run_blaschke_check(const std::string& in_path, const Options& opt,
                       std::ostream& out) {
  json j = read_json_file(in_path);
  std::string kind;
  try {
    kind = j.at("kind").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::io_error, std::string("filter json: ") + e.what());
  }
  auto read_alpha = [&j]() {
    const auto& a = j.at("alpha");
    return Cplx(a.at("re").get<double>(),
                a.contains("im") ? a.at("im").get<double>() : 0.0);
  };
  MatrixFilter filter;
  try {
    if (kind == "elementary") {
      ElementaryBlaschke f{read_alpha()};
      filter = [f](Cplx z) {
        return Eigen::MatrixXcd::Constant(1, 1, f.eval(z));
      };
    } else if (kind == "squared") {
      SquaredBlaschke f = squared_from_pair(read_alpha(), opt.cfg.tol);
      filter = [f](Cplx z) {
        return Eigen::MatrixXcd::Constant(1, 1, f.eval(z));
      };
    } else if (kind == "bivariate") {
      const auto& warr = j.at("w");
      Eigen::Vector2cd w(
          Cplx(warr.at(0).at("re").get<double>(),
               warr.at(0).contains("im") ? warr.at(0).at("im").get<double>() : 0.0),
          Cplx(warr.at(1).at("re").get<double>(),
               warr.at(1).contains("im") ? warr.at(1).at("im").get<double>() : 0.0));
      BivariateBlaschke f = build_bivariate(read_alpha(), w, opt.cfg.tol);
      filter = [f](Cplx z) { return Eigen::MatrixXcd(f.eval(z)); };
    } else {
      throw Error(ErrorCode::io_error,
                  "filter kind must be elementary, squared or bivariate");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::io_error, std::string("filter json: ") + e.what());
  }
  out << json{{"kind", kind},
              {"grid_points", opt.cfg.grid},
              {"allpass_defect", allpass_defect(filter, opt.cfg.grid)}}
             .dump(2)
      << "\n";
  return 0;
}

int run_replicate(const std::string& case_name, std::ostream& out,
                  std::ostream& err) {
  DiagnoseReport report = diagnose(diagnose_case_from_name(case_name));
  out << diagnose_report_to_json(report).dump(2) << "\n";
  err << "case " << diagnose_case_name(report.which) << ": status "
      << replica_status_name(report.status) << ", "
      << (report.all_match() ? "all checks match the reference listing"
                             : "CHECK MISMATCH against the reference listing")
      << "\n";
  for (const auto& c : report.checks)
    err << "  [" << (c.pass ? "ok" : "FAIL") << "] " << c.name << " (observed "
        << c.observed << ", expected " << c.expected << ")\n";
  err << "  " << report.contrast << "\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{
      "All-pass (Blaschke) transformations of VMA matrix polynomials: root "
      "mirroring with exact spectral-density preservation."};
  app.require_subcommand(1);
  Options opt;

  std::string in_path, out_path, report_path, a_path, b_path, config_bits,
      case_name;
  int count_n = 0, count_q = 0, count_pairs = 0;
  double secs_per_item = 1.0;

  CLI::App* roots_cmd = app.add_subcommand("roots", "group determinantal roots");
  roots_cmd->add_option("--in", in_path, "input PolyMat JSON")->required();
  opt.register_common(roots_cmd);

  CLI::App* mirror_cmd =
      app.add_subcommand("mirror", "mirror selected root groups");
  mirror_cmd->add_option("--in", in_path, "input PolyMat JSON")->required();
  mirror_cmd
      ->add_option("--config", config_bits,
                   "bitstring over root groups sorted by (modulus, argument); "
                   "'1' mirrors the group")
      ->required();
  mirror_cmd->add_option("--out", out_path, "output PolyMat JSON path");
  mirror_cmd->add_option("--report", report_path, "verification report path");
  opt.register_common(mirror_cmd);

  CLI::App* enum_cmd =
      app.add_subcommand("enumerate", "compute all fundamentalness regimes");
  enum_cmd->add_option("--in", in_path, "input PolyMat JSON")->required();
  enum_cmd->add_option("--out", out_path, "output JSON path");
  opt.register_common(enum_cmd);

  CLI::App* count_cmd =
      app.add_subcommand("count", "count regimes and estimate enumeration cost");
  count_cmd->add_option("--n", count_n, "output dimension")->required();
  count_cmd->add_option("--q", count_q, "VMA degree")->required();
  count_cmd->add_option("--pairs", count_pairs, "number of complex-conjugate pairs")
      ->required();
  count_cmd->add_option("--secs-per-item", secs_per_item,
                        "seconds per enumerated regime");

  CLI::App* verify_cmd =
      app.add_subcommand("verify", "compare two polynomials on the unit circle");
  verify_cmd->add_option("--a", a_path, "first PolyMat JSON")->required();
  verify_cmd->add_option("--b", b_path, "second PolyMat JSON")->required();
  opt.register_common(verify_cmd);

  CLI::App* blaschke_cmd = app.add_subcommand("blaschke", "all-pass factor tools");
  CLI::App* check_cmd =
      blaschke_cmd->add_subcommand("check", "all-pass deviation of a serialized filter");
  check_cmd->add_option("--in", in_path, "filter JSON")->required();
  opt.register_common(check_cmd);
  blaschke_cmd->require_subcommand(1);

  CLI::App* replicate_cmd = app.add_subcommand(
      "replicate-gmr", "run a documented failure case of the GMR procedure");
  replicate_cmd
      ->add_option("--case", case_name,
                   "purely-complex | skew-symmetric | general-complex | discard-imag")
      ->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    opt.finish();
    if (roots_cmd->parsed()) return run_roots(in_path, opt, out);
    if (mirror_cmd->parsed())
      return run_mirror(in_path, config_bits, out_path, report_path, opt, out);
    if (enum_cmd->parsed()) return run_enumerate(in_path, out_path, opt, out);
    if (count_cmd->parsed())
      return run_count(count_n, count_q, count_pairs, secs_per_item, out);
    if (verify_cmd->parsed()) return run_verify(a_path, b_path, opt, out);
    if (blaschke_cmd->parsed()) return run_blaschke_check(in_path, opt, out);
    if (replicate_cmd->parsed()) return run_replicate(case_name, out, err);
    err << app.help();
    return 2;
  } catch (const Error& e) {
    err << json{{"error", e.code_name()}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }
}

}  // namespace allpass::cli
