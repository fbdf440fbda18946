#pragma once

#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "heis/calculus.hpp"
#include "heis/dsl.hpp"
#include "heis/form.hpp"
#include "heis/identities.hpp"
#include "heis/numeric_lab.hpp"
#include "heis/report.hpp"

namespace heis {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Coordinate polynomial written in the DSL over the symbols x1..xn, y1..yn, t.
inline Polynomial parse_polynomial(const std::string& src, int n) {
  const ScalarExpr e = parse_scalar(src, n);
  const int vars = 2 * n + 1;
  Polynomial out(vars);
  for (auto& [product, c] : e.terms()) {
    Polynomial term(vars, c);
    for (auto& f : product) {
      if (!f.word.empty()) throw UsageError("binding '" + src + "' applies a derivative");
      const std::string& s = f.symbol.name;
      int v = -1;
      if (s == "t") {
        v = 2 * n;
      } else if (s.size() >= 2 && (s[0] == 'x' || s[0] == 'y') &&
                 s.find_first_not_of("0123456789", 1) == std::string::npos) {
        const int j = std::stoi(s.substr(1));
        if (j >= 1 && j <= n) v = s[0] == 'x' ? j - 1 : j - 1 + n;
      }
      if (v < 0) throw UsageError("binding '" + src + "' uses '" + s + "', not a coordinate for n=" + std::to_string(n));
      term = term * Polynomial::variable(vars, v);
    }
    out += term;
  }
  return out;
}

inline std::vector<Rational> parse_point(const std::string& src, int n) {
  std::vector<Rational> p;
  std::stringstream ss(src);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw UsageError("empty coordinate in point '" + src + "'");
    try {
      p.push_back(parse_rational(item.substr(b, e - b + 1)));
    } catch (const std::invalid_argument&) {
      throw UsageError("bad coordinate '" + item + "'");
    }
  }
  if (static_cast<int>(p.size()) != 2 * n + 1)
    throw UsageError("point needs " + std::to_string(2 * n + 1) + " coordinates (x1..xn, y1..yn, t)");
  return p;
}

struct CliOptions {
  int n = 1;
  bool n_given = false;
  std::string convention = "-";
  bool convention_given = false;
  std::string format = "text";
  std::uint64_t seed = 1;
  int trials = 0;
  double step = 1e-5;
  double t = 0, h = 1, eps = 0.125;
  std::optional<double> s;
  int samples = 10001;
  std::vector<std::string> exprs;
  std::string part = "horizontal";
  std::optional<int> k;
  std::string identity;
  bool mutate = false;
  std::vector<std::string> binds;
  std::string at;
  bool fd = false;
};

namespace detail {

inline ConventionProfile profile_of(const CliOptions& o) {
  return o.convention == "+" ? ConventionProfile::flipped() : ConventionProfile::standard();
}

inline Json verb_doc(const std::string& verb, const CliOptions& o, const std::string& status, Json result,
                     double wall_time) {
  Json j;
  j["verb"] = verb;
  j["n"] = o.n;
  j["convention"] = o.convention;
  j["status"] = status;
  j["result"] = std::move(result);
  j["line_audit"] = Json::array();
  j["seed"] = nullptr;
  j["wall_time"] = wall_time;
  return j;
}

struct Emitter {
  std::ostream& out;
  Format format;
  const CliOptions& opt;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  double elapsed() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); }

  void form(const std::string& verb, const SymbolicForm& f) {
    switch (format) {
      case Format::kText: out << to_text(f) << "\n"; break;
      case Format::kLatex: out << to_latex(f) << "\n"; break;
      case Format::kStructured:
        out << verb_doc(verb, opt, "ok", {{"degree", f.degree()}, {"form", to_text(f)}, {"latex", to_latex(f)}},
                        elapsed())
                   .dump(2)
            << "\n";
        break;
    }
  }

  void boolean(const std::string& verb, bool value) {
    if (format == Format::kStructured) {
      out << verb_doc(verb, opt, "ok", {{"member", value}}, elapsed()).dump(2) << "\n";
    } else {
      out << (value ? "true" : "false") << "\n";
    }
  }
};

inline SymbolicForm parse_arg(const CliOptions& o, std::size_t i) {
  if (i >= o.exprs.size()) throw UsageError("missing expression argument");
  return parse_form(o.exprs[i], o.n, profile_of(o));
}

inline int run_verify(const CliOptions& o, std::ostream& out) {
  const Format format = *parse_format(o.format);
  std::vector<SuiteRequest> requests;
  if (o.identity == "all") {
    for (auto& req : full_suite())
      if (!o.n_given || req.n == o.n) requests.push_back(req);
  } else {
    const auto id = parse_identity(o.identity);
    if (!id) throw UsageError("unknown identity '" + o.identity + "'");
    const auto [lo, hi] = supported_n(*id);
    if (o.n < lo || o.n > hi)
      throw UsageError(o.identity + " supports n in " + std::to_string(lo) + ".." + std::to_string(hi));
    requests.push_back({*id, o.n});
  }
  if (requests.empty()) throw UsageError("no identity supports n=" + std::to_string(o.n));

  std::vector<VerificationReport> reports;
  if (o.convention_given) {
    // One profile only, no retry.
    const auto profile = profile_of(o);
    for (auto& req : requests) reports.push_back(run_checker(req.id, *make_workspace(req.n, profile)));
  } else {
    reports = run_suite(requests);
  }

  std::vector<std::optional<RandomCheckReport>> randoms(reports.size());
  if (o.trials > 0) {
    for (std::size_t i = 0; i < reports.size(); ++i) {
      if (reports[i].exploratory) continue;
      RandomCheckOptions ro;
      ro.trials = o.trials;
      ro.seed = o.seed;
      ro.corrupt_rhs = o.mutate;
      ro.convention = reports[i].convention;
      randoms[i] = random_identity_check(reports[i].identity, reports[i].n, ro);
      if (randoms[i]->nonzero > 0) reports[i].status = Status::kFailed;
    }
  }

  switch (format) {
    case Format::kText:
      for (std::size_t i = 0; i < reports.size(); ++i) {
        if (i) out << "\n";
        out << report_text(reports[i], randoms[i]);
      }
      break;
    case Format::kLatex:
      for (auto& r : reports) out << report_latex(r);
      break;
    case Format::kStructured:
      if (reports.size() == 1) {
        out << report_json(reports[0], randoms[0]).dump(2) << "\n";
      } else {
        Json doc;
        doc["identity"] = "all";
        doc["n"] = o.n_given ? Json(o.n) : Json(nullptr);
        doc["convention"] = o.convention_given ? Json(o.convention) : Json("default, flipped on failure");
        doc["status"] = suite_exit_code(reports) == 0 ? "verified" : "failed";
        Json results = Json::array();
        double total = 0;
        for (std::size_t i = 0; i < reports.size(); ++i) {
          results.push_back(report_json(reports[i], randoms[i]));
          total += reports[i].wall_time;
        }
        doc["result"] = results;
        doc["line_audit"] = Json::array();
        doc["seed"] = o.trials > 0 ? Json(o.seed) : Json(nullptr);
        doc["wall_time"] = total;
        out << doc.dump(2) << "\n";
      }
      break;
  }
  return suite_exit_code(reports) == 0 ? kExitOk : kExitFailed;
}

inline int run_eval(const CliOptions& o, std::ostream& out) {
  const Format format = *parse_format(o.format);
  const auto start = std::chrono::steady_clock::now();
  const ScalarExpr e = parse_scalar(o.exprs.at(0), o.n, profile_of(o));
  Bindings bindings;
  for (auto& b : o.binds) {
    const auto eq = b.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("binding must look like name=polynomial, got '" + b + "'");
    bindings[b.substr(0, eq)] = parse_polynomial(b.substr(eq + 1), o.n);
  }
  if (o.at.empty()) throw UsageError("eval needs --at x1,..,xn,y1,..,yn,t");
  const auto p = parse_point(o.at, o.n);
  const CoordinateFrame frame = coordinate_frame(o.n, profile_of(o));
  const Rational value = bind_and_eval(e, bindings, p, frame);
  std::optional<FiniteDiffResult> fd;
  if (o.fd) fd = finite_diff_check(e, bindings, p, o.step, frame);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  switch (format) {
    case Format::kText:
      out << to_string(value) << "\n";
      if (fd) out << "finite-difference max deviation: " << fd->max_abs << " (relative " << fd->max_rel << ")\n";
      break;
    case Format::kLatex:
      out << latex_rational(value) << "\n";
      break;
    case Format::kStructured: {
      Json result{{"expression", to_text(e)}, {"value", to_string(value)}};
      if (fd) result["finite_difference"] = {{"step", o.step}, {"max_abs", fd->max_abs}, {"max_rel", fd->max_rel}};
      out << verb_doc("eval", o, "ok", result, wall).dump(2) << "\n";
      break;
    }
  }
  return kExitOk;
}

inline int run_ramp(const CliOptions& o, std::ostream& out) {
  const Format format = *parse_format(o.format);
  const auto start = std::chrono::steady_clock::now();
  const SlicingProfile prof{o.t, o.h, o.eps};
  Json result;
  std::ostringstream text;
  if (o.s) {
    const double s = *o.s;
    const double g = gamma_h(s, prof), r = smooth_ramp(s, prof), dr = smooth_ramp_derivative(s, prof);
    result = {{"s", s}, {"gamma_h", g}, {"smooth_ramp", r}, {"smooth_ramp_derivative", dr}};
    text << std::setprecision(17) << "gamma_h(" << s << ") = " << g << "\nsmooth_ramp(" << s << ") = " << r
         << "\nsmooth_ramp'(" << s << ") = " << dr << "\n";
  } else {
    smooth_ramp(o.t, prof);  // validates eps
    if (o.samples < 2) throw UsageError("--samples must be at least 2");
    const double lo = o.t - 1, hi = o.t + o.h + 1;
    const double lg = lipschitz_estimate([&](double s) { return gamma_h(s, prof); }, lo, hi, o.samples, o.seed);
    const double lr = lipschitz_estimate([&](double s) { return smooth_ramp(s, prof); }, lo, hi, o.samples, o.seed);
    double sup = 0;
    for (int i = 0; i < o.samples; ++i) {
      const double s = lo + (hi - lo) * i / (o.samples - 1);
      sup = std::max(sup, std::abs(smooth_ramp(s, prof) - gamma_h(s, prof)));
    }
    result = {{"lipschitz_gamma_h", lg},
              {"lipschitz_smooth_ramp", lr},
              {"expected_gamma_h", 1 / o.h},
              {"expected_smooth_ramp", 1 / (o.h - 2 * o.eps)},
              {"sup_difference", sup}};
    text << std::setprecision(10) << "Lip(gamma_h) ~ " << lg << " (1/h = " << 1 / o.h << ")\n"
         << "Lip(smooth_ramp) ~ " << lr << " (1/(h-2eps) = " << 1 / (o.h - 2 * o.eps) << ")\n"
         << "sup |smooth_ramp - gamma_h| ~ " << sup << "\n";
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (format == Format::kStructured) {
    Json doc = verb_doc("ramp", o, "ok", result, wall);
    doc["result"]["t"] = o.t;
    doc["result"]["h"] = o.h;
    doc["result"]["eps"] = o.eps;
    doc["seed"] = o.s ? Json(nullptr) : Json(o.seed);
    out << doc.dump(2) << "\n";
  } else {
    out << text.str();
  }
  return kExitOk;
}

inline int dispatch(const std::string& verb, const CliOptions& o, std::ostream& out) {
  if (verb == "verify") return run_verify(o, out);
  if (verb == "eval") return run_eval(o, out);
  if (verb == "ramp") return run_ramp(o, out);

  const auto ctx = make_context(o.n, profile_of(o));
  const auto calc = symbolic_calculus(ctx);
  Emitter emit{out, *parse_format(o.format), o};
  const SymbolicForm a = parse_arg(o, 0);
  if (verb == "d") {
    emit.form(verb, calc.d(a));
  } else if (verb == "wedge") {
    const SymbolicForm b = parse_arg(o, 1);
    if (a.degree() + b.degree() > 2 * o.n + 1) throw UsageError("wedge degree exceeds 2n+1");
    emit.form(verb, wedge(a, b));
  } else if (verb == "L") {
    emit.form(verb, calc.L(a));
  } else if (verb == "Linv") {
    emit.form(verb, calc.L_inv(a));
  } else if (verb == "scriptL") {
    emit.form(verb, calc.script_L(a));
  } else if (verb == "project") {
    if (o.part == "horizontal") {
      emit.form(verb, horizontal_part(a));
    } else if (o.part == "vertical") {
      emit.form(verb, vertical_part(a));
    } else {  // beta with a = a' + beta ^ theta
      emit.form(verb, decompose_theta(a).beta);
    }
  } else if (verb == "inJ") {
    emit.boolean(verb, calc.in_J(a, o.k.value_or(a.degree())));
  } else if (verb == "inI") {
    emit.boolean(verb, calc.in_I(a, o.k.value_or(a.degree())));
  } else if (verb == "reduceI") {
    emit.form(verb, calc.reduce_mod_I(a, o.k.value_or(a.degree())));
  } else {
    throw UsageError("unknown verb '" + verb + "'");
  }
  return kExitOk;
}

}  // namespace detail

// Parses the command line and runs it. 0: success or verified, 1: a
// verification failed, 2: usage or internal error.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exterior calculus on the Heisenberg group", "heis"};
  app.set_help_flag("--help", "print help");  // -h would clash with --h
  app.require_subcommand(1);
  CliOptions o;

  auto* n_opt = app.add_option("--n", o.n, "Heisenberg dimension n")->check(CLI::Range(1, kMaxN));
  auto* conv_opt =
      app.add_option("--convention", o.convention, "sign of dtheta: - (default) or +")->check(CLI::IsMember({"+", "-"}));
  app.add_option("--format", o.format, "text | structured | latex")->check(CLI::IsMember({"text", "structured", "json", "latex"}));
  app.add_option("--seed", o.seed, "random seed");
  app.add_option("--trials", o.trials, "random trials for the numeric cross-check")->check(CLI::NonNegativeNumber);
  app.add_option("--step", o.step, "finite-difference step")->check(CLI::PositiveNumber);
  app.add_option("--t", o.t, "ramp start");
  app.add_option("--h", o.h, "ramp width");
  app.add_option("--eps", o.eps, "mollifier half-width");

  auto form_verb = [&](const std::string& name, const std::string& help, int exprs) {
    auto* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    sub->add_option("expr", o.exprs, "expression(s) in the form DSL")->required()->expected(exprs);
    return sub;
  };
  form_verb("d", "exterior derivative", 1);
  form_verb("wedge", "wedge product of two forms", 2);
  form_verb("L", "dtheta ^ beta on horizontal (n-1)-forms", 1);
  form_verb("Linv", "inverse of L on horizontal (n+1)-forms", 1);
  form_verb("scriptL", "L^{-1}(-(d alpha) horizontal part) on n-forms", 1);
  form_verb("project", "horizontal or vertical part, or beta in w = w' + beta^theta", 1)
      ->add_option("--part", o.part, "horizontal | vertical | beta")
      ->check(CLI::IsMember({"horizontal", "vertical", "beta"}));
  form_verb("inJ", "membership in J^k", 1)->add_option("--k", o.k, "degree (default: the form's)");
  form_verb("inI", "membership in I^k", 1)->add_option("--k", o.k, "degree (default: the form's)");
  form_verb("reduceI", "canonical representative modulo I^k", 1)->add_option("--k", o.k, "degree (default: the form's)");

  auto* verify = app.add_subcommand("verify", "run an identity checker (or all)");
  verify->fallthrough();
  verify->add_option("identity", o.identity, "lemma-3.14 | lemma-3.15 | eq-3.4.1 | final-rewrite | h1-explicit | class-invariance | all")
      ->required();
  verify->add_flag("--mutate", o.mutate, "negate the right-hand side in the numeric cross-check");

  auto* eval = app.add_subcommand("eval", "evaluate a scalar with polynomial bindings at a point");
  eval->fallthrough();
  eval->add_option("expr", o.exprs, "scalar expression")->required()->expected(1);
  eval->add_option("--bind", o.binds, "name=polynomial in x1..xn, y1..yn, t (repeatable)");
  eval->add_option("--at", o.at, "point x1,..,xn,y1,..,yn,t");
  eval->add_flag("--fd", o.fd, "also compare derivatives with central differences");

  auto* ramp = app.add_subcommand("ramp", "slicing ramp gamma_h and its smooth approximant");
  ramp->fallthrough();
  ramp->add_option("--s", o.s, "evaluate at s (otherwise report Lipschitz estimates)");
  ramp->add_option("--samples", o.samples, "grid size for the estimates");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  o.convention_given = conv_opt->count() > 0;
  o.n_given = n_opt->count() > 0;
  const std::string verb = app.get_subcommands().front()->get_name();
  try {
    return detail::dispatch(verb, o, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
  } catch (const UnboundSymbolError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitUsage;
}

inline int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace heis
