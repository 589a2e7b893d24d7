// kober: evaluate operators, run verification suites, emit tables.

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kober/error.hpp"
#include "kober/matrix_ops.hpp"
#include "kober/mtransform.hpp"
#include "kober/scalar_ops.hpp"
#include "kober/suites.hpp"

namespace {

using namespace kober;

struct ArgError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double parse_number(const std::string& text) {
  auto one = [&](std::string_view s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) throw ArgError("not a number: '" + text + "'");
    return v;
  };
  const std::string_view s(text);
  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    const double den = one(s.substr(slash + 1));
    if (den == 0.0) throw ArgError("zero denominator in '" + text + "'");
    return one(s.substr(0, slash)) / den;
  }
  return one(s);
}

std::uint64_t parse_seed(const std::string& text) {
  std::uint64_t v = 0;
  int base = 10;
  std::string_view s(text);
  if (s.starts_with("0x") || s.starts_with("0X")) {
    s.remove_prefix(2);
    base = 16;
  }
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) throw ArgError("not a seed: '" + text + "'");
  return v;
}

std::vector<double> numbers(const std::vector<std::string>& v) {
  std::vector<double> out;
  for (const std::string& s : v) out.push_back(parse_number(s));
  return out;
}

// "name:a:b" -> name, {a, b}
std::pair<std::string, std::vector<double>> split_family(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.empty() || parts[0].empty()) throw ArgError("empty --f");
  std::vector<double> args;
  for (std::size_t i = 1; i < parts.size(); ++i) args.push_back(parse_number(parts[i]));
  return {parts[0], args};
}

double arg_or(const std::vector<double>& a, std::size_t i, double def) { return i < a.size() ? a[i] : def; }

TestFunction1D scalar_function(const std::string& spec) {
  const auto [name, a] = split_family(spec);
  if (name == "power") {
    if (a.empty()) throw ArgError("power needs an exponent, e.g. power:2");
    return TestFunction1D::power(a[0], arg_or(a, 1, 1.0));
  }
  if (name == "exp") return TestFunction1D::exp_decay(arg_or(a, 0, 1.0));
  if (name == "power-exp") {
    if (a.empty()) throw ArgError("power-exp needs an exponent, e.g. power-exp:1.5");
    return TestFunction1D::power_times_exp(a[0], arg_or(a, 1, 1.0));
  }
  throw ArgError("unknown scalar function '" + name + "' (power:L, exp[:rate], power-exp:L[:rate])");
}

MatrixTestFunction matrix_function(const std::string& spec) {
  const auto [name, a] = split_family(spec);
  auto need = [&, n = name]() {
    if (a.empty()) throw ArgError(n + " needs a parameter");
    return a[0];
  };
  if (name == "det-power") return MatrixTestFunction::det_power(need());
  if (name == "exp-trace") return MatrixTestFunction::exp_neg_trace();
  if (name == "det-power-exp") return MatrixTestFunction::det_power_times_exp(need());
  if (name == "wishart") return MatrixTestFunction::wishart_density(need());
  if (name == "inv-dirichlet") return MatrixTestFunction::inverted_dirichlet(need());
  throw ArgError("unknown matrix function '" + name +
                 "' (det-power:L, exp-trace, det-power-exp:G, wishart:DF, inv-dirichlet:C)");
}

struct Options {
  std::string op;
  std::string suite;
  int p = 1;
  int k = 0;
  std::vector<std::string> zeta, alpha, points, s;
  std::string beta, gamma;
  std::string f;
  std::string n_samples;
  std::string seed;
  std::string format = "json";
  std::string out;
  bool timing = false;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--op", o.op, "operator");
  sub->add_option("--suite", o.suite, "verification suite");
  sub->add_option("--p", o.p, "matrix dimension")->check(CLI::Range(1, 4));
  sub->add_option("--k", o.k, "number of matrix arguments")->check(CLI::Range(1, 3));
  sub->add_option("--zeta", o.zeta, "zeta_j (repeatable)");
  sub->add_option("--alpha", o.alpha, "alpha_j (repeatable)");
  sub->add_option("--beta", o.beta, "Saigo beta");
  sub->add_option("--gamma", o.gamma, "Saigo gamma");
  sub->add_option("--f", o.f, "test function, e.g. power:2, exp, wishart:3");
  sub->add_option("--u,--x", o.points, "evaluation points (repeatable)");
  sub->add_option("--s", o.s, "transform points (repeatable)");
  sub->add_option("--n-samples", o.n_samples, "Monte Carlo sample size");
  sub->add_option("--seed", o.seed, "RNG seed (default 0xE4DE17, or KOBER_SEED)");
  sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", o.out, "output file (default stdout)");
  sub->add_flag("--timing", o.timing, "include elapsed_ms in JSON");
  sub->add_option("--config", "key=value file; flags override it");
}

std::uint64_t seed_of(const Options& o) {
  if (!o.seed.empty()) return parse_seed(o.seed);
  if (const char* env = std::getenv("KOBER_SEED"); env && *env) return parse_seed(env);
  return kDefaultSeed;
}

MCConfig mc_of(const Options& o) {
  MCConfig mc;
  mc.seed = seed_of(o);
  if (!o.n_samples.empty()) {
    const double n = parse_number(o.n_samples);
    if (!(n >= 1000) || n != std::floor(n)) throw ArgError("--n-samples must be an integer >= 1000");
    mc.n_samples = static_cast<std::size_t>(n);
  }
  return mc;
}

std::vector<KernelPair> pairs_of(const Options& o) {
  const std::vector<double> z = numbers(o.zeta), a = numbers(o.alpha);
  if (z.size() != a.size()) throw ArgError("--zeta and --alpha must be given the same number of times");
  if (z.empty()) throw ArgError("need at least one --zeta/--alpha pair");
  if (o.k && int(z.size()) != o.k) throw ArgError("--k does not match the number of --zeta/--alpha pairs");
  std::vector<KernelPair> out;
  for (std::size_t i = 0; i < z.size(); ++i) out.push_back({z[i], a[i]});
  return out;
}

struct Row {
  std::vector<double> point;
  std::vector<double> values;
};

std::string render(const std::string& command, const Options& o, const std::vector<std::string>& cols,
                   const std::vector<Row>& rows) {
  if (o.format == "csv") {
    std::ostringstream os;
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << csv_field(cols[i]);
    os << "\r\n";
    for (const Row& r : rows) {
      std::string pt;
      for (std::size_t j = 0; j < r.point.size(); ++j) pt += (j ? ";" : "") + format12(r.point[j]);
      os << csv_field(pt);
      for (double v : r.values) os << ',' << format12(v);
      os << "\r\n";
    }
    return os.str();
  }
  nlohmann::ordered_json j;
  j["command"] = command;
  j["op"] = o.op;
  j["seed"] = seed_of(o);
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  auto num = [](double x) -> nlohmann::ordered_json {
    if (!std::isfinite(x)) return nullptr;
    return std::strtod(format12(x).c_str(), nullptr);
  };
  for (const Row& r : rows) {
    nlohmann::ordered_json e;
    nlohmann::ordered_json pt = nlohmann::ordered_json::array();
    for (double x : r.point) pt.push_back(num(x));
    e[cols[0]] = pt;
    for (std::size_t i = 0; i < r.values.size(); ++i) e[cols[i + 1]] = num(r.values[i]);
    arr.push_back(std::move(e));
  }
  j["rows"] = std::move(arr);
  return j.dump(2) + "\n";
}

bool is_matrix_op(const std::string& op) { return op == "matrix-first" || op == "matrix-second"; }

ScalarOpSpec scalar_spec(const Options& o) {
  static const std::map<std::string, ScalarOpKind> kinds{{"kober1", ScalarOpKind::kober1},
                                                         {"kober2", ScalarOpKind::kober2},
                                                         {"riemann-liouville", ScalarOpKind::riemann_liouville},
                                                         {"rl", ScalarOpKind::riemann_liouville},
                                                         {"weyl-left", ScalarOpKind::weyl_left},
                                                         {"weyl-right", ScalarOpKind::weyl_right},
                                                         {"saigo1", ScalarOpKind::saigo1}};
  const auto it = kinds.find(o.op);
  if (it == kinds.end()) {
    throw ArgError("unknown --op '" + o.op +
                   "' (kober1, kober2, riemann-liouville, weyl-left, weyl-right, saigo1, frac-derivative, "
                   "matrix-first, matrix-second, mtransform-first, mtransform-second)");
  }
  ScalarOpSpec spec;
  spec.kind = it->second;
  const std::vector<double> a = numbers(o.alpha), z = numbers(o.zeta);
  if (a.size() != 1) throw ArgError("scalar operators take exactly one --alpha");
  if (z.size() > 1) throw ArgError("scalar operators take at most one --zeta");
  spec.alpha = a[0];
  spec.zeta = z.empty() ? 0.0 : z[0];
  if (!o.beta.empty()) spec.saigo_beta = parse_number(o.beta);
  if (!o.gamma.empty()) spec.saigo_gamma = parse_number(o.gamma);
  return spec;
}

std::vector<Row> eval_rows(const Options& o, bool homogeneity) {
  if (o.points.empty()) throw ArgError("no evaluation points (--u/--x)");
  if (o.f.empty()) throw ArgError("missing --f");
  const std::vector<double> pts = numbers(o.points);
  std::vector<Row> rows;
  if (is_matrix_op(o.op)) {
    MatrixOpParams params{o.op == "matrix-first" ? OperatorKind::first : OperatorKind::second, o.p, pairs_of(o)};
    const MatrixTestFunction f = matrix_function(o.f);
    const MCConfig mc = mc_of(o);
    for (double u : pts) {
      const std::vector<SymMat> us(params.pairs.size(), SymMat::scalar(o.p, u));
      const McEstimate e = kober_matrix(params, f, us, mc);
      rows.push_back({{u}, {e.mean, e.se}});
    }
    return rows;
  }
  const TestFunction1D f = scalar_function(o.f);
  if (o.op == "frac-derivative") {
    const std::vector<double> a = numbers(o.alpha);
    if (a.size() != 1) throw ArgError("frac-derivative takes exactly one --alpha");
    for (double x : pts) {
      const ScalarValue v = frac_derivative(a[0], f, x);
      rows.push_back({{x}, {v.value, v.quad_delta}});
    }
    return rows;
  }
  const ScalarOpSpec spec = scalar_spec(o);
  for (double x : pts) {
    const ScalarValue v = evaluate(spec, f, x);
    Row r{{x}, {v.value, v.quad_delta}};
    if (homogeneity) {
      double lam = f.family() == TestFunction1D::Family::power ? f.lambda() : NAN;
      if (spec.kind == ScalarOpKind::riemann_liouville || spec.kind == ScalarOpKind::weyl_right ||
          spec.kind == ScalarOpKind::weyl_left)
        lam += spec.alpha;
      r.values.push_back(v.value / std::pow(x, lam));
    }
    rows.push_back(r);
  }
  return rows;
}

std::vector<Row> transform_rows(const Options& o) {
  if (o.s.empty()) throw ArgError("empty --s grid");
  if (o.f.empty()) throw ArgError("missing --f");
  MatrixOpParams params{o.op == "mtransform-first" ? OperatorKind::first : OperatorKind::second, o.p, pairs_of(o)};
  validate(params);
  const MatrixTestFunction f = matrix_function(o.f);
  const std::vector<double> sv = numbers(o.s);
  const int k = params.k();
  if (sv.size() % k) throw ArgError("number of --s values must be a multiple of k");
  std::vector<MPoint> grid;
  for (std::size_t i = 0; i < sv.size(); i += k) grid.push_back({{sv.begin() + i, sv.begin() + i + k}});
  const std::vector<TransformReport> reps = verify_transform(params, f, grid, mc_of(o));
  std::vector<Row> rows;
  for (const TransformReport& t : reps) {
    if (!t.error.empty()) throw Error(ErrorCode::DomainError, t.error);
    rows.push_back({t.s, {t.lhs, t.lhs_se, t.rhs, t.ratio}});
  }
  return rows;
}

// flat key=value config, inserted before the command-line tokens unless the flag is given there
std::vector<std::string> with_config(const std::vector<std::string>& args) {
  std::string path;
  std::set<std::string> given;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (!a.starts_with("--")) continue;
    const std::string key = a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2);
    given.insert(key == "x" ? "u" : key);
    if (key == "config") {
      if (a.find('=') != std::string::npos)
        path = a.substr(a.find('=') + 1);
      else if (i + 1 < args.size())
        path = args[i + 1];
    }
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw ArgError("cannot read config file '" + path + "'");
  std::vector<std::string> extra;
  for (std::string line; std::getline(in, line);) {
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    const auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ArgError("config line without '=': " + line);
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.starts_with("--")) key.erase(0, 2);
    if (given.count(key == "x" ? "u" : key) || key == "config") continue;
    if (key == "timing") {
      if (value == "true" || value == "1") extra.push_back("--timing");
      continue;
    }
    std::stringstream ss(value);
    for (std::string item; std::getline(ss, item, ',');) {
      extra.push_back("--" + key);
      extra.push_back(trim(item));
    }
  }
  std::vector<std::string> out;
  out.push_back(args.at(0));
  std::size_t i = 1;
  if (args.size() > 1 && !args[1].starts_with("-")) out.push_back(args[i++]);
  out.insert(out.end(), extra.begin(), extra.end());
  out.insert(out.end(), args.begin() + i, args.end());
  return out;
}

int emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw ArgError("cannot write '" + o.out + "'");
  f << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kober fractional operators: evaluation and verification"};
  app.require_subcommand(1);
  Options o;
  CLI::App* eval = app.add_subcommand("eval", "evaluate an operator at points");
  CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
  CLI::App* table = app.add_subcommand("table", "tabulate an operator or transform ratio over a grid");
  for (CLI::App* sub : {eval, verify, table}) add_common(sub, o);

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = with_config(args);
    std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ArgError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (verify->parsed()) {
      if (o.suite.empty() || !is_suite(o.suite)) {
        std::string list;
        for (const std::string& n : suite_names()) list += (list.empty() ? "" : ", ") + n;
        throw ArgError((o.suite.empty() ? std::string("missing --suite") : "unknown suite '" + o.suite + "'") +
                       "; available: " + list);
      }
      SuiteOptions so;
      so.p = o.p;
      so.seed = seed_of(o);
      if (!o.n_samples.empty()) so.n_samples = mc_of(o).n_samples;
      const SuiteResult r = run_suite(o.suite, so);
      emit(o, o.format == "csv" ? to_csv(r) : to_json(r, o.timing));
      for (const SuiteCase& c : r.cases)
        if (!c.pass) std::cerr << "FAIL " << c.id << " (" << c.paper_ref << ")\n";
      return r.all_pass() ? 0 : 1;
    }
    if (o.op.empty()) throw ArgError("missing --op");
    if (eval->parsed()) {
      const std::vector<Row> rows = eval_rows(o, false);
      const std::string err = is_matrix_op(o.op) ? "se" : "quad_delta";
      return emit(o, render("eval", o, {"point", "value", err}, rows));
    }
    if (o.op == "mtransform-first" || o.op == "mtransform-second") {
      return emit(o, render("table", o, {"s", "lhs", "lhs_se", "rhs", "lhs/rhs"}, transform_rows(o)));
    }
    if (is_matrix_op(o.op) || o.op == "frac-derivative") {
      const std::string err = is_matrix_op(o.op) ? "se" : "quad_delta";
      return emit(o, render("table", o, {"point", "value", err}, eval_rows(o, false)));
    }
    return emit(o, render("table", o, {"point", "value", "quad_delta", "value/point^lambda"}, eval_rows(o, true)));
  } catch (const ArgError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const kober::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
