// Command line front end: analyze, schur, realize, verify, sample, random.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "schuriter/error.hpp"
#include "schuriter/random.hpp"
#include "schuriter/schuralg.hpp"
#include "schuriter/serialize.hpp"

namespace {

using namespace schuriter;

constexpr int kExitOk = 0;
constexpr int kExitResidual = 1;
constexpr int kExitParse = 2;
constexpr int kExitValidation = 3;

struct Options {
  std::string input;
  std::string output;
  int n_max = -1;
  int step = 1;
  double rank_tol = 1e-10;
  double eq_tol = 1e-9;
  std::vector<double> grid_radii{0.3, 0.6, 0.9};
  std::uint64_t seed = 0;
  int io_dim = 1;
  int state_dim = 3;
  std::string function = "transfer";
};

std::string read_input(const std::string& path) {
  std::stringstream ss;
  if (path.empty() || path == "-") {
    ss << std::cin.rdbuf();
  } else {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read " + path);
    ss << in.rdbuf();
  }
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << text << '\n';
}

Tolerance tolerance(const Options& o) {
  Tolerance tol{o.rank_tol, o.eq_tol};
  tol.validate();
  return tol;
}

DiscreteSystem load_system(const Options& o) {
  return DiscreteSystem(block_from_json(parse_json(read_input(o.input))),
                        tolerance(o));
}

int n_max_for(const Options& o, const DiscreteSystem& sys) {
  return o.n_max >= 0 ? o.n_max : static_cast<int>(sys.state_dim()) + 1;
}

int run_analyze(const Options& o) {
  const DiscreteSystem sys = load_system(o);
  const Contraction a(sys.a(), sys.tol());
  const bool cnu = is_cnu(a);
  Json out{{"system", block_to_json(sys.block())},
           {"classification", classification_to_json(classify(sys))},
           {"defect_profile",
            cnu ? profile_to_json(defect_profile(a, n_max_for(o, sys)))
                : Json(nullptr)},
           {"cnu", cnu},
           {"c00", cnu ? Json(is_c00(a)) : Json(nullptr)}};
  try {
    const SchurChain chain = build_chain(sys, n_max_for(o, sys));
    Json schur = chain_to_json(chain);
    schur.erase("iterates");
    schur["residuals"] =
        report_to_json(verify_chain(chain, sample_grid(o.grid_radii)));
    out["schur"] = schur;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNotSimpleConservative) throw;
    out["schur"] = nullptr;
    out["schur_skipped"] = e.what();
  }
  write_output(o.output, dump_fixed(out));
  return kExitOk;
}

int run_schur(const Options& o) {
  const DiscreteSystem sys = load_system(o);
  const SchurChain chain = build_chain(sys, n_max_for(o, sys));
  Json out = chain_to_json(chain);
  const ChainReport rep = verify_chain(chain, sample_grid(o.grid_radii));
  out["residuals"] = report_to_json(rep);
  write_output(o.output, dump_fixed(out));
  return rep.passed() ? kExitOk : kExitResidual;
}

int run_realize(const Options& o) {
  const DiscreteSystem sys = load_system(o);
  Json out = Json::array();
  for (const DiscreteSystem& tau : iterate_systems(sys, o.step)) {
    out.push_back(block_to_json(tau.block()));
  }
  write_output(o.output, dump_fixed(Json{{"step", o.step}, {"iterates", out}}));
  return kExitOk;
}

int run_verify(const Options& o) {
  const DiscreteSystem sys = load_system(o);
  try {
    const ChainReport rep = verify_chain(build_chain(sys, n_max_for(o, sys)),
                                         sample_grid(o.grid_radii));
    Json out = report_to_json(rep);
    out["max_residual"] = rep.max_residual();
    write_output(o.output, dump_fixed(out));
    return rep.passed() ? kExitOk : kExitResidual;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNotSimpleConservative &&
        e.code() != ErrorCode::kRangeInclusionViolated) {
      throw;
    }
    Json out{{"passed", false},
             {"reason", e.what()},
             {"unitarity", unitarity_residual(sys.block().assembled())}};
    write_output(o.output, dump_fixed(out));
    return kExitResidual;
  }
}

int run_sample(const Options& o) {
  const DiscreteSystem sys = load_system(o);
  std::optional<DiskFunction> f;
  if (o.function == "transfer") {
    f = transfer_function(sys);
  } else {
    f = char_function(Contraction(sys.a(), sys.tol()));
  }
  std::ostringstream csv;
  csv.precision(17);
  for (Complex z : sample_grid(o.grid_radii)) {
    const CMatrix v = (*f)(z);
    csv << z.real() << ',' << z.imag();
    for (Index i = 0; i < v.rows(); ++i) {
      for (Index j = 0; j < v.cols(); ++j) {
        csv << ',' << v(i, j).real() << ',' << v(i, j).imag();
      }
    }
    csv << '\n';
  }
  std::string text = csv.str();
  if (!text.empty()) text.pop_back();
  write_output(o.output, text);
  return kExitOk;
}

int run_random(const Options& o) {
  Rng rng(o.seed);
  const DiscreteSystem sys =
      random_conservative_system(o.io_dim, o.state_dim, rng, tolerance(o));
  write_output(o.output, dump_fixed(block_to_json(sys.block())));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schur algorithm for contractive operator functions"};
  app.require_subcommand(1);
  Options o;

  auto common = [&o](CLI::App* sub, bool needs_input) {
    auto* in = sub->add_option("--input", o.input, "system JSON file, - for stdin");
    if (!needs_input) in->group("");
    sub->add_option("--output", o.output, "output file, default stdout");
    sub->add_option("--n-max", o.n_max, "largest Schur step")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--rank-tol", o.rank_tol, "relative rank tolerance");
    sub->add_option("--eq-tol", o.eq_tol, "absolute equality tolerance");
    sub->add_option("--grid-radii", o.grid_radii, "sample radii in [0, 1)")
        ->delimiter(',');
    sub->add_option("--seed", o.seed, "random seed");
  };

  auto* analyze = app.add_subcommand("analyze", "classify a system and run the Schur algorithm");
  auto* schur = app.add_subcommand("schur", "Schur parameters and iterate systems");
  auto* realize = app.add_subcommand("realize", "iterate systems of one step");
  auto* verify = app.add_subcommand("verify", "check realization against the oracle");
  auto* sample = app.add_subcommand("sample", "CSV of function values on the grid");
  auto* random = app.add_subcommand("random", "random simple conservative system");
  for (auto* sub : {analyze, schur, realize, verify, sample}) common(sub, true);
  common(random, false);
  realize->add_option("--step", o.step, "Schur step n")
      ->check(CLI::NonNegativeNumber);
  sample->add_option("--function", o.function, "transfer or characteristic")
      ->check(CLI::IsMember({"transfer", "characteristic"}));
  random->add_option("--io-dim", o.io_dim, "input and output dimension")
      ->check(CLI::NonNegativeNumber);
  random->add_option("--state-dim", o.state_dim, "state dimension")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  try {
    if (*analyze) return run_analyze(o);
    if (*schur) return run_schur(o);
    if (*realize) return run_realize(o);
    if (*verify) return run_verify(o);
    if (*sample) return run_sample(o);
    if (*random) return run_random(o);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitParse;
  }
  return kExitParse;
}
