#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "conformal/conformal.hpp"

namespace {

using namespace conformal;

enum exit_code : int { ok = 0, parse_failure = 2, domain_failure = 3, convergence_failure = 4, invariant_failure = 5 };

struct Session {
  std::string cache_path;
  NewtonOptions newton;
  InversionCache cache;

  void open() {
    if (cache_path.empty()) {
      if (const char* env = std::getenv(kCacheEnvVar)) cache_path = env;
    }
    if (!cache_path.empty()) load_cache(cache_path, cache);
  }

  void close() const {
    if (!cache_path.empty()) save_cache(cache_path, cache);
  }
};

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

Modulus parse_modulus(const std::string& q1, const std::string& q2) {
  return Modulus(Rational::parse(q1), Rational::parse(q2));
}

void print_record(std::ostream& os, const StringRecord& r) {
  os << "modulus   " << r.modulus.str() << '\n';
  os << "quantum   |" << r.quantum.n << ',' << r.quantum.l1 << ',' << r.quantum.l2 << ">\n";
  os << "a         " << format_double(r.a) << '\n';
  os << "b         " << format_double(r.b) << '\n';
  os << "omega     " << format_double(r.omega) << '\n';
  os << "residual  " << format_double(r.residual) << '\n';
  os << "jacobian  " << format_double(r.jacobian) << '\n';
  os << "order     " << r.order << " (euclidean " << r.euclidean_order << ", clifford " << r.clifford_order << ")\n";
  if (r.closure) os << "closure   " << format_double(*r.closure) << '\n';
  if (r.linking)
    os << "linking   lk_clifford " << fixed(r.linking->lk_clifford, 6) << ", lk_axis " << fixed(r.linking->lk_axis, 6)
       << '\n';
}

/// Writes to the named file, or to stdout when the path is empty or "-".
void emit(const std::string& path, const std::function<void(std::ostream&)>& body) {
  if (path.empty() || path == "-") {
    body(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  body(out);
  if (!out) throw Error("write to " + path + " failed");
}

void write_polyline(std::ostream& os, PolylineFormat format, const CurveSamples& s,
                    const std::optional<StringRecord>& record) {
  switch (format) {
    case PolylineFormat::csv:
      write_csv(os, s);
      break;
    case PolylineFormat::obj:
      write_obj(os, s);
      break;
    case PolylineFormat::json:
      if (record) {
        write_json(os, *record, s);
      } else {
        ordered_json j;
        j["schema"] = kSchemaVersion;
        j["samples"] = samples_to_json(s);
        os << j.dump() << '\n';
      }
      break;
  }
}

int cmd_invert(Session& session, const std::string& q1, const std::string& q2) {
  const auto q = parse_modulus(q1, q2);
  session.open();
  print_record(std::cout, make_string_record(q, session.cache, false, 2048, session.newton));
  session.close();
  return ok;
}

int cmd_string(Session& session, Int n, Int l1, Int l2, std::size_t samples, std::size_t periods,
               const std::string& format_name, const std::string& out) {
  const auto format = parse_format(format_name);
  const auto q = modulus_from_quantum({n, l1, l2});
  if (samples < 16) throw DomainError("--samples must be at least 16");
  session.open();
  const auto record = make_string_record(q, session.cache, true, samples, session.newton);
  const auto s = sample_string(q, Parameters(record.a, record.b), samples, periods);
  emit(out, [&](std::ostream& os) { write_polyline(os, format, s, record); });
  if (!out.empty() && out != "-") print_record(std::cout, record);
  session.close();
  return ok;
}

int cmd_table(Session& session, Int n) {
  if (n < 1) throw DomainError("table: n must be at least 1");
  session.open();
  const auto moduli = enumerate_moduli(n);
  std::cout << "n=" << n << " strings=" << moduli.size() << '\n';
  if (!moduli.empty()) std::cout << "  l1  l2  q1      q2      a            b            omega\n";
  for (const auto& q : moduli) {
    const auto qn = quantum_from_modulus(q);
    const auto inv = invert_cached(q, session.cache, session.newton);
    char line[160];
    std::snprintf(line, sizeof line, "%4lld%4lld  %-7s %-7s %-12.6g %-12.6g %.6g\n", static_cast<long long>(qn.l1),
                  static_cast<long long>(qn.l2), q.q1().str().c_str(), q.q2().str().c_str(), inv.a, inv.b,
                  inv.omega);
    std::cout << line;
  }
  session.close();
  return ok;
}

int cmd_rho(Int n_max, const std::string& out) {
  if (n_max < 1) throw DomainError("rho: n_max must be at least 1");
  std::ostringstream body;
  body << "n,rho,four_sqrt_rho\n";
  rho_table(n_max, [&](Int n, Int r) {
    body << n << ',' << r << ',' << format_double(4.0 * std::sqrt(static_cast<double>(r))) << '\n';
  });
  emit(out, [&](std::ostream& os) { os << body.str(); });
  return ok;
}

struct CheckLine {
  std::string name;
  bool pass;
  std::string detail;
};

int cmd_check(Session& session, const std::string& q1, const std::string& q2, std::size_t samples) {
  const auto q = parse_modulus(q1, q2);
  session.open();
  const auto record = make_string_record(q, session.cache, true, samples, session.newton);
  session.close();
  const Parameters p(record.a, record.b);
  const auto qn = record.quantum;

  std::vector<CheckLine> lines;
  auto add = [&](std::string name, bool pass, std::string detail) {
    lines.push_back({std::move(name), pass, std::move(detail)});
  };
  auto near_int = [](double x, double target, double tol) { return std::abs(x - target) <= tol; };

  add("inversion_residual", record.residual <= session.newton.tolerance, format_double(record.residual));
  const auto phi = phi_closed(p);
  const double phi_err = std::max(std::abs(phi.phi1 + q.q1().value()), std::abs(phi.phi2 - q.q2().value()));
  add("record_consistency", phi_err <= std::max(record.residual, 1e-12) * 1.0001, format_double(phi_err));
  add("jacobian_nonzero", std::abs(record.jacobian) > 0.0, format_double(record.jacobian));
  const double nl = null_lift_residual(p);
  add("null_lift", nl < 1e-10, format_double(nl));
  const double pc = projection_coherence(p);
  add("projection_coherence", pc < 1e-10, format_double(pc));
  add("closure", *record.closure < 1e-6, format_double(*record.closure));
  add("monodromy_order", record.order == qn.n, std::to_string(record.order));
  const auto& lw = *record.linking;
  add("linking_winding",
      near_int(lw.lk_clifford, static_cast<double>(qn.l1), 1e-3) && near_int(lw.lk_axis, static_cast<double>(qn.l2), 1e-3),
      fixed(lw.lk_clifford, 6) + "," + fixed(lw.lk_axis, 6));
  const auto lg = linking_by_gauss(sample_string(q, p, samples));
  add("linking_gauss",
      near_int(lg.lk_clifford, static_cast<double>(qn.l1), 1e-2) && near_int(lg.lk_axis, static_cast<double>(qn.l2), 1e-2),
      fixed(lg.lk_clifford, 6) + "," + fixed(lg.lk_axis, 6));
  const double spread = momentum_spectrum_error(p);
  add("momentum_spectrum", spread < 1e-9, format_double(spread));
  const auto frames = integrate_vessiot(p, 0.0, record.omega, 2048);
  const double drift = group_residual(frames.back().F);
  add("frame_drift", drift < 1e-8, format_double(drift));

  bool all = true;
  for (const auto& l : lines) {
    std::cout << (l.pass ? "PASS " : "FAIL ") << l.name << ' ' << l.detail << '\n';
    all = all && l.pass;
  }
  if (!all) {
    for (const auto& l : lines)
      if (!l.pass) std::cerr << "error: invariant failed: " << l.name << '\n';
    return invariant_failure;
  }
  return ok;
}

int cmd_torus_knot(Int m, Int n, std::size_t samples, const std::string& format_name, const std::string& out) {
  const auto format = parse_format(format_name);
  const auto s = sample_torus_knot(m, n, samples);
  emit(out, [&](std::ostream& os) { write_polyline(os, format, s, std::nullopt); });
  if (!out.empty() && out != "-") {
    const auto lk = linking_by_winding(s);
    std::cout << "torus knot (" << m << ',' << n << ") r=" << format_double(r_of_q(Rational(m, n)))
              << " winding " << fixed(std::abs(lk.lk_clifford), 6) << ',' << fixed(std::abs(lk.lk_axis), 6) << '\n';
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed critical curves of the conformal arclength functional"};
  app.require_subcommand(1);

  Session session;
  app.add_option("--cache", session.cache_path, "Inversion cache file (default: $" + std::string(kCacheEnvVar) + ")");
  app.add_option("--tol", session.newton.tolerance, "Accepted inversion residual")->check(CLI::PositiveNumber);

  std::string q1, q2, format = "csv", out;
  Int n = 0, l1 = 0, l2 = 0, m = 0;
  std::size_t samples = 2048, periods = 0;
  std::function<int()> action;

  auto* invert = app.add_subcommand("invert", "Solve Phi(a, b) = (-q1, q2)");
  invert->add_option("q1", q1, "p/q")->required();
  invert->add_option("q2", q2, "p/q")->required();
  invert->callback([&] { action = [&] { return cmd_invert(session, q1, q2); }; });

  auto* sample = app.add_subcommand("string", "Sample the string |n, l1, l2>");
  sample->add_option("n", n)->required();
  sample->add_option("l1", l1)->required();
  sample->add_option("l2", l2)->required();
  sample->add_option("--samples", samples, "Samples per wavelength");
  sample->add_option("--periods", periods, "Number of wavelengths (default n)");
  sample->add_option("--format", format, "csv, json or obj");
  sample->add_option("--out", out, "Output file (default stdout)");
  sample->callback([&] { action = [&] { return cmd_string(session, n, l1, l2, samples, periods, format, out); }; });

  auto* table = app.add_subcommand("table", "All strings of symmetry order n");
  table->add_option("n", n)->required();
  table->callback([&] { action = [&] { return cmd_table(session, n); }; });

  auto* rho = app.add_subcommand("rho", "Counts of strings per order as CSV");
  rho->add_option("n_max", n)->required();
  rho->add_option("--out", out, "Output file (default stdout)");
  rho->callback([&] { action = [&] { return cmd_rho(n, out); }; });

  auto* check = app.add_subcommand("check", "Run every invariant for one modulus");
  check->add_option("q1", q1, "p/q")->required();
  check->add_option("q2", q2, "p/q")->required();
  check->add_option("--samples", samples, "Samples per wavelength");
  check->callback([&] { action = [&] { return cmd_check(session, q1, q2, samples); }; });

  auto* torus = app.add_subcommand("torus-knot", "Closed rhumb line of type (m, n) on a torus");
  torus->add_option("m", m)->required();
  torus->add_option("n", n)->required();
  torus->add_option("--samples", samples, "Number of samples");
  torus->add_option("--format", format, "csv, json or obj");
  torus->add_option("--out", out, "Output file (default stdout)");
  torus->callback([&] { action = [&] { return cmd_torus_knot(m, n, samples, format, out); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? ok : parse_failure;
  }

  try {
    return action();
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return parse_failure;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return domain_failure;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return convergence_failure;
  } catch (const InvariantError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return invariant_failure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
