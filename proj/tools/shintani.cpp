// Command-line front end: enumeration, Dirichlet coefficients, critical-line
// scans, functional-equation checks, exponential-sum experiments, Maass
// twisted sums and a quick self test.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/version.hpp>

#include "shintani/afe.hpp"
#include "shintani/coords.hpp"
#include "shintani/enumerate.hpp"
#include "shintani/expsum.hpp"
#include "shintani/maass.hpp"
#include "shintani/specfun.hpp"

#ifndef SHINTANI_VERSION
#define SHINTANI_VERSION "unknown"
#endif
#ifndef SHINTANI_DEFAULT_DATA_DIR
#define SHINTANI_DEFAULT_DATA_DIR "data"
#endif

using namespace shintani;
using json = nlohmann::ordered_json;

namespace {

/// A check that ran and did not pass: exit status 1.
struct CheckFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string data_dir() {
  if (const char* env = std::getenv("SHINTANI_DATA_DIR"); env && *env) return env;
  return SHINTANI_DEFAULT_DATA_DIR;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Output target: a file when a path is given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) : path_(path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot write " + path);
    }
  }
  std::ostream& stream() { return path_.empty() ? std::cout : file_; }

 private:
  std::string path_;
  std::ofstream file_;
};

struct Run {
  std::string command;
  std::string out;
  std::string meta;
  unsigned threads = default_threads();
  json params = json::object();
  json results = json::object();
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  std::string sidecar() const {
    if (!meta.empty()) return meta;
    if (!out.empty()) return out + ".json";
    return command + ".meta.json";
  }

  void write(int status) const {
    json j;
    j["command"] = command;
    j["parameters"] = params;
    j["threads"] = threads;
    j["versions"] = {{"shintani", SHINTANI_VERSION},
                     {"compiler", __VERSION__},
                     {"boost", std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000)}};
    j["results"] = results;
    j["exit_status"] = status;
    j["started_utc"] = start_utc;
    j["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ofstream f(sidecar());
    if (!f) throw std::runtime_error("cannot write metadata " + sidecar());
    f << j.dump(2) << '\n';
  }

  std::string start_utc = utc_now();
};

ClassTable load_or_enumerate(const std::string& table_path, std::int64_t X, unsigned threads) {
  if (!table_path.empty()) {
    std::ifstream in(table_path);
    if (!in) throw std::runtime_error("cannot open " + table_path);
    return ClassTable::read_csv(in, X >= 0 ? X : -1);
  }
  if (X < 0) throw CLI::ValidationError("--X", "required when --table is not given");
  return enumerate_classes(X, threads);
}

WeightChoice parse_weight(const std::string& s) {
  if (s == "gaussian") return WeightChoice::gaussian();
  const std::string prefix = "cospower:";
  if (s.rfind(prefix, 0) == 0) {
    std::size_t pos = 0;
    const std::string num = s.substr(prefix.size());
    double A = 0;
    try {
      A = std::stod(num, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == num.size() && pos > 0) return WeightChoice::cospower(A);
  }
  throw CLI::ValidationError("--G", "expected cospower:<A> or gaussian, got '" + s + "'");
}

std::vector<Variant> parse_variants(const std::string& s) {
  if (s == "both") return {Variant::add, Variant::sub};
  return {parse_variant(s)};
}

// ---------------------------------------------------------------------------
// Commands

int cmd_enumerate(Run& run, std::int64_t X) {
  run.params = {{"X", X}};
  const ClassTable t = enumerate_classes(X, run.threads);
  Output out(run.out);
  t.write_csv(out.stream());
  run.results = {{"total_classes", t.total_classes(X)}};
  return 0;
}

int cmd_coeffs(Run& run, std::int64_t X, const std::string& table, const std::string& variant) {
  run.params = {{"X", X}, {"table", table}, {"variant", variant}};
  const ClassTable t = load_or_enumerate(table, X, run.threads);
  const auto a = dirichlet_coefficients(t, parse_variant(variant));
  Output out(run.out);
  auto& os = out.stream();
  os << "n,a_n\n";
  for (std::size_t n = 1; n < a.size(); ++n)
    if (a[n] != 0) os << n << ',' << fmt17(a[n]) << '\n';
  run.results = {{"bound", t.bound()}};
  return 0;
}

int cmd_zeta_scan(Run& run, std::int64_t X, const std::string& table, const std::string& variant, double tmin, double tmax,
                  double step, const std::string& G, std::optional<double> tol) {
  run.params = {{"X", X}, {"table", table}, {"variant", variant}, {"tau_min", tmin}, {"tau_max", tmax}, {"step", step}, {"G", G}};
  if (tol) run.params["tol"] = *tol;
  if (!(step > 0) || !(tmax >= tmin) || !(tmin >= 1)) throw CLI::ValidationError("zeta-scan", "need 1 <= tau-min <= tau-max and step > 0");
  const WeightChoice w = parse_weight(G);
  const ClassTable t = load_or_enumerate(table, X, run.threads);
  if (t.bound() < 2 || t.total_classes(t.bound()) == 0) throw CheckFailed("table too small: no classes with |Disc| <= " + std::to_string(t.bound()));
  std::vector<ScanRow> rows;
  json taus = json::array();
  for (const Variant v : parse_variants(variant)) {
    const auto a = dirichlet_coefficients(t, v);
    const int count = static_cast<int>(std::floor((tmax - tmin) / step + 1e-9)) + 1;
    for (int i = 0; i < count; ++i) {
      const double tau = tmin + i * step;
      CriticalEvaluation e;
      if (tol) {
        try {
          e = xi_critical(tau, v, t, w, {}, *tol);
        } catch (const TableTooSmall& err) {
          throw CheckFailed(std::string("table too small: ") + err.what());
        }
      } else {
        e = xi_truncated(tau, v, a, w, t.bound());
      }
      rows.push_back({tau, e});
      taus.push_back(tau);
    }
  }
  Output out(run.out);
  write_scan_csv(out.stream(), rows);
  bool monotone = true;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].eval.variant == rows[i - 1].eval.variant && !(rows[i].tau > rows[i - 1].tau)) monotone = false;
  double max_abs = 0, max_tail = 0;
  for (const auto& r : rows) {
    max_abs = std::max(max_abs, std::abs(r.eval.value));
    max_tail = std::max(max_tail, r.eval.tail_bound);
  }
  run.results = {{"rows", rows.size()}, {"tau", taus}, {"tau_monotone", monotone}, {"max_abs_xi", max_abs}, {"max_tail_bound", max_tail}};
  return 0;
}

int cmd_fe_check(Run& run, double tau, double tol, std::int64_t X, const std::string& table, const std::string& variant,
                 const std::string& G1, const std::string& G2) {
  run.params = {{"tau", tau}, {"tol", tol}, {"X", X}, {"table", table}, {"variant", variant}, {"G", {G1, G2}}};
  const WeightChoice w1 = parse_weight(G1), w2 = parse_weight(G2);
  const ClassTable t = load_or_enumerate(table, X, run.threads);
  if (t.bound() < 2) throw CheckFailed("table too small");
  bool ok = true;
  json per = json::array();
  for (const Variant v : parse_variants(variant)) {
    const auto a = dirichlet_coefficients(t, v);
    const auto e1 = xi_truncated(tau, v, a, w1, t.bound());
    const auto e2 = xi_truncated(tau, v, a, w2, t.bound());
    const Complex s(0.5, tau);
    const Complex L = completed_lambda(s, v, e1.value);
    const double gap = std::abs(e1.value - e2.value) / std::abs(e1.value);
    const double realness = std::abs(L.imag()) / std::abs(L);
    const bool pass = gap <= tol && realness <= tol;
    ok = ok && pass;
    std::printf("%s tau=%g N=%lld  G-independence %.3e  |Im Lambda|/|Lambda| %.3e  tail bounds %.3e %.3e  %s\n", to_string(v), tau,
                static_cast<long long>(e1.N), gap, realness, e1.tail_bound, e2.tail_bound, pass ? "PASS" : "FAIL");
    per.push_back({{"variant", to_string(v)},
                   {"N", e1.N},
                   {"xi_" + w1.tag(), {e1.value.real(), e1.value.imag()}},
                   {"xi_" + w2.tag(), {e2.value.real(), e2.value.imag()}},
                   {"g_independence_rel", gap},
                   {"lambda_imag_rel", realness},
                   {"tail_bound", {e1.tail_bound, e2.tail_bound}},
                   {"pass", pass}});
  }
  run.results = {{"checks", per}, {"pass", ok}};
  if (!ok) throw CheckFailed("fe-check: consistency above tolerance " + fmt17(tol));
  return 0;
}

std::vector<RealCubicForm> experiment_forms(ExperimentMode mode, double Y, double T, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0, 1);
  std::vector<RealCubicForm> out;
  for (int i = 0; i < count; ++i) {
    HomogeneousCoords h;
    h.sign = i % 2 ? 1 : -1;
    h.lambda = std::pow(Y, 0.25);
    h.u = U(rng) - 0.5;
    if (mode == ExperimentMode::generic) {
      h.t = 1 + (T - 1) * U(rng);
      h.theta = U(rng) * h.theta_period();
    } else {
      // theta = 0 gives a = 0; the reducible line lives at t >= T
      h.t = T * (1 + U(rng));
      h.theta = 0;
    }
    out.push_back(form_from_coords(h));
  }
  return out;
}

int cmd_vdc(Run& run, const std::string& mode_s, double Y, double tau, double T, int forms, std::uint64_t seed,
            std::int64_t samples) {
  run.params = {{"mode", mode_s}, {"Y", Y}, {"tau", tau}, {"T", T}, {"forms", forms}, {"seed", seed}, {"samples", samples}};
  const ExperimentMode mode = parse_mode(mode_s);
  ExperimentParams p = recipe_parameters(Y, tau, T, mode);
  p.seed = seed;
  p.samples = samples;
  Output out(run.out);
  write_experiment_csv_header(out.stream());
  double worst = 0;
  const auto fs = experiment_forms(mode, Y, T, forms, seed);
  for (std::size_t i = 0; i < fs.size(); ++i) {
    PhaseAverage a;
    if (mode == ExperimentMode::generic) {
      ExperimentParams q = p;
      q.seed = seed + i;
      a = disc_phase_average(fs[i], p.R, tau, q, run.threads);
    } else {
      // deterministic quadrature: no samples, no standard error
      a.value = reducible_line_average(fs[i], p.R, tau).value;
      a.seed = seed + i;
    }
    worst = std::max(worst, a.modulus());
    write_experiment_csv_row(out.stream(), p, a);
  }
  run.results = {{"R", p.R}, {"max_modulus", worst}, {"predicted_scale", p.predicted_scale()}, {"hypothesis_violations", p.violations}};
  for (const auto& v : p.violations) std::fprintf(stderr, "note: hypothesis violated: %s\n", v.c_str());
  return 0;
}

int cmd_twist(Run& run, double s_re, double s_im, const std::string& phi_path, std::vector<std::int64_t> Ns, int sign) {
  const std::string path = phi_path.empty() ? data_dir() + "/maass_r13.78_even.csv" : phi_path;
  run.params = {{"s", {s_re, s_im}}, {"phi", path}, {"N", Ns}, {"sign", sign}};
  if (sign != 1 && sign != -1) throw CLI::ValidationError("--sign", "must be 1 or -1");
  const MaassFormData phi = load_maass_form(path);
  const std::int64_t top = *std::max_element(Ns.begin(), Ns.end());
  const auto records = enumerate_records(top, run.threads);
  const double sup = phi_sup_on_domain(phi);
  Output out(run.out);
  out.stream() << kTwistCsvHeader << '\n';
  json vals = json::array();
  for (const std::int64_t N : Ns) {
    const auto t = twisted_partial_sum({s_re, s_im}, sign, records, top, phi, N, sup);
    write_twist_csv_row(out.stream(), {s_re, s_im}, t);
    vals.push_back({{"N", N}, {"classes", t.classes}, {"value", {t.value.real(), t.value.imag()}}, {"tail_estimate", t.tail_estimate}});
  }
  run.results = {{"R", phi.R}, {"source", phi.source}, {"phi_sup", sup}, {"sums", vals}};
  return 0;
}

int cmd_selftest(Run& run) {
  json checks = json::array();
  bool ok = true;
  auto report = [&](const std::string& name, bool pass, double measured) {
    std::printf("%-44s %-4s %.3e\n", name.c_str(), pass ? "PASS" : "FAIL", measured);
    checks.push_back({{"name", name}, {"pass", pass}, {"measured", measured}});
    ok = ok && pass;
  };
  std::mt19937_64 rng(2024);

  // specfun
  {
    const double k = bessel_k(0.5, 2.0).real(), closed = std::sqrt(std::numbers::pi / 4) * std::exp(-2.0);
    report("specfun: K_{1/2}(2) closed form", std::abs(k - closed) < 1e-12 * closed, std::abs(k - closed) / closed);
    const double g = std::abs(std::exp(log_gamma(Complex(4.5, 0))) - std::tgamma(4.5)) / std::tgamma(4.5);
    report("specfun: Gamma(4.5)", g < 1e-13, g);
  }
  // forms
  {
    std::uniform_int_distribution<int> c(-50, 50), m(-4, 4);
    int bad = 0;
    for (int i = 0; i < 1000; ++i) {
      const IntegerCubicForm f{c(rng), c(rng), c(rng), c(rng)};
      UnimodularMatrix g = UnimodularMatrix::identity();
      for (int k = 0; k < 3; ++k) g = UnimodularMatrix::unipotent(m(rng)) * UnimodularMatrix::inversion() * g;
      if (discriminant(group_action(g, f)) != discriminant(f)) ++bad;
    }
    report("forms: Disc invariant under SL2(Z), 1000 pairs", bad == 0, bad);
    int mism = 0;
    for (int i = 0; i < 300; ++i) {
      const IntegerCubicForm f{c(rng), c(rng), c(rng), c(rng)};
      if (discriminant(f) == 0) continue;
      const auto r = reduce_form(f);
      if (!(reduce_form(r.representative).representative == r.representative) || !(group_action(r.witness, f) == r.representative)) ++mism;
    }
    report("forms: reduce_form idempotent with witness", mism == 0, mism);
  }
  // coords
  {
    std::uniform_real_distribution<double> U(-3, 3);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
      const RealCubicForm f{U(rng), U(rng), U(rng), U(rng)};
      if (std::abs(discriminant(f)) < 1e-3) continue;
      const RealCubicForm g = form_from_coords(coords_from_form(f));
      worst = std::max(worst, (g - f).sup_norm() / f.sup_norm());
    }
    report("coords: roundtrip, 1000 forms", worst < 1e-8, worst);
  }
  run.results = {{"checks", checks}, {"pass", ok}};
  if (!ok) throw CheckFailed("selftest failed");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shintani zeta functions of binary cubic forms"};
  app.require_subcommand(1);
  Run run;
  app.add_option("--threads", run.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--meta", run.meta, "JSON metadata path (default: <out>.json or <command>.meta.json)");

  std::int64_t X = -1;
  std::string table, variant = "add", G = "cospower:2", G2 = "cospower:3", mode = "generic", phi;
  double tmin = 10, tmax = 100, step = 10, tau = 40, tol = 1e-6, Y = 1e12, T = 2, s_re = 1.5, s_im = 0;
  std::optional<double> scan_tol;
  int forms = 8, sign = 1;
  std::uint64_t seed = 1;
  std::int64_t samples = 40000;
  std::vector<std::int64_t> Ns{50000, 100000};

  auto* en = app.add_subcommand("enumerate", "class table for 0 < |Disc| <= X");
  en->add_option("--X", X, "discriminant bound")->required()->check(CLI::NonNegativeNumber);
  en->add_option("--out", run.out, "CSV path (default stdout)");

  auto* co = app.add_subcommand("coeffs", "Dirichlet coefficients a(n)");
  co->add_option("--X", X, "discriminant bound");
  co->add_option("--table", table, "class table CSV instead of enumerating");
  co->add_option("--variant", variant, "plus, minus, add or sub");
  co->add_option("--out", run.out, "CSV path (default stdout)");

  auto* zs = app.add_subcommand("zeta-scan", "xi on the critical line over a tau grid");
  zs->add_option("--X", X, "table bound")->default_val(100000);
  zs->add_option("--table", table, "class table CSV instead of enumerating");
  zs->add_option("--variant", variant, "add, sub or both");
  zs->add_option("--tau-min", tmin);
  zs->add_option("--tau-max", tmax);
  zs->add_option("--step", step);
  zs->add_option("--G", G, "cospower:<A> or gaussian");
  zs->add_option("--tol", scan_tol, "truncate at the certified length for this tolerance");
  zs->add_option("--out", run.out, "CSV path (default stdout)");

  auto* fe = app.add_subcommand("fe-check", "G-independence and realness of Lambda");
  fe->add_option("--tau", tau);
  fe->add_option("--tol", tol);
  fe->add_option("--X", X, "table bound")->default_val(100000);
  fe->add_option("--table", table);
  fe->add_option("--variant", variant, "add, sub or both")->default_val("both");
  fe->add_option("--G", G);
  fe->add_option("--G2", G2);

  auto* vd = app.add_subcommand("vdc", "phase-average experiment");
  vd->add_option("--mode", mode, "generic or reducible");
  vd->add_option("--Y", Y);
  vd->add_option("--tau", tau)->default_val(1e4);
  vd->add_option("--T", T);
  vd->add_option("--forms", forms)->check(CLI::PositiveNumber);
  vd->add_option("--seed", seed);
  vd->add_option("--samples", samples);
  vd->add_option("--out", run.out, "CSV path (default stdout)");

  auto* tw = app.add_subcommand("twist", "Maass-twisted partial sums");
  tw->add_option("--s", s_re, "real part of s");
  tw->add_option("--s-im", s_im, "imaginary part of s");
  tw->add_option("--phi", phi, "coefficient file (default $SHINTANI_DATA_DIR/maass_r13.78_even.csv)");
  tw->add_option("--N", Ns, "truncation points")->delimiter(',');
  tw->add_option("--sign", sign, "1 for Disc > 0, -1 for Disc < 0");
  tw->add_option("--out", run.out, "CSV path (default stdout)");

  auto* st = app.add_subcommand("selftest", "quick specfun/forms/coords property checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  auto* sub = app.get_subcommands().front();
  run.command = sub->get_name();
  int status = 0;
  try {
    if (sub == en) status = cmd_enumerate(run, X);
    else if (sub == co) status = cmd_coeffs(run, X, table, variant);
    else if (sub == zs) status = cmd_zeta_scan(run, X, table, variant, tmin, tmax, step, G, scan_tol);
    else if (sub == fe) status = cmd_fe_check(run, tau, tol, X, table, variant, G, G2);
    else if (sub == vd) status = cmd_vdc(run, mode, Y, tau, T, forms, seed, samples);
    else if (sub == tw) status = cmd_twist(run, s_re, s_im, phi, Ns, sign);
    else if (sub == st) status = cmd_selftest(run);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n" << sub->help();
    return 2;
  } catch (const CheckFailed& e) {
    std::cerr << e.what() << '\n';
    status = 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n" << sub->help();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    status = 1;
  }
  try {
    run.write(status);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return status;
}
