#include "verisparse/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "verisparse/baselines.hpp"
#include "verisparse/generate.hpp"
#include "verisparse/matrix_market.hpp"
#include "verisparse/refine.hpp"
#include "verisparse/report.hpp"
#include "verisparse/rounding.hpp"
#include "verisparse/verify.hpp"

namespace verisparse {

namespace {

namespace fs = std::filesystem;

struct RunConfig {
  std::string input;
  std::string rhs;
  std::string certificate;
  std::string out;
  std::string method = "augmented";
  bool precond = false;
  bool acc = false;
  double theta_fraction = 0.5;
  std::uint64_t seed = 1;
  Index count = 5;
  Index n = 100;
  double kappa = 1e6;
  bool timing = true;
};

// Thrown for bad user input; mapped to kExitInputError.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string g17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

VerifyOptions verify_options(const RunConfig& cfg) {
  VerifyOptions o;
  o.precond = cfg.precond;
  o.acc = cfg.acc;
  o.policy.initial_fraction = cfg.theta_fraction;
  return o;
}

SparseMatrix load_matrix(const std::string& path) {
  SparseMatrix a = mm_read_file(path);
  if (!a.is_square() || a.rows() == 0) throw InputError(path + ": matrix must be square and nonempty");
  return a;
}

void print_certificate(std::ostream& out, const Certificate& c) {
  out << "status: " << to_string(c.status) << '\n';
  out << "n: " << c.matrix.n << "  nnz: " << c.matrix.nnz << '\n';
  out << "sigma estimate: " << g17(c.sigma_estimate) << '\n';
  if (c.verified()) {
    out << "theta: " << g17(c.theta) << "  rho: " << g17(c.rho) << '\n';
    out << "sigma_min >= " << g17(c.delta_original) << '\n';
    out << "||A^-1||_2 <= " << g17(c.inv_norm_bound_original) << '\n';
    if (c.equilibration) out << "scaled system: delta " << g17(c.delta) << '\n';
  } else if (!c.message.empty()) {
    out << "reason: " << c.message << '\n';
  }
  out << "attempts: " << c.attempts.size() << '\n';
  for (const AttemptRecord& a : c.attempts) {
    out << "  theta " << g17(a.theta) << "  " << to_string(a.outcome);
    if (!std::isnan(a.rho)) out << "  rho " << g17(a.rho);
    out << '\n';
  }
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const SparseMatrix a = load_matrix(cfg.input);
  const Certificate cert = verify_sigmin(a, verify_options(cfg));
  const std::string path = cfg.out.empty() ? cfg.input + ".cert.json" : cfg.out;
  write_json_file(path, certificate_to_json(cert));
  print_certificate(out, cert);
  out << "certificate: " << path << '\n';
  return cert.verified() ? kExitOk : kExitVerificationFailed;
}

// Factors of the shifted augmented matrix a stored certificate describes.
std::optional<LdltFactors> refactor(const SparseMatrix& a, const Certificate& cert) {
  if (!check_certificate(a, cert)) return std::nullopt;
  const SparseMatrix system = cert.equilibration ? apply_equilibration(*cert.equilibration, a) : a;
  return ldlt(add_diagonal(augment(system), cert.theta), cert.ordering, cert.pivoting);
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const SparseMatrix a = load_matrix(cfg.input);
  std::vector<double> b;
  if (cfg.rhs.empty()) {
    b = spmv(a, std::vector<double>(a.cols(), 1.0));
  } else {
    b = mm_read_vector_file(cfg.rhs);
    if (static_cast<Index>(b.size()) != a.rows()) {
      throw InputError(cfg.rhs + ": right-hand side has length " + std::to_string(b.size()) + ", expected " +
                       std::to_string(a.rows()));
    }
  }
  for (const double x : b) {
    if (!std::isfinite(x)) throw InputError("right-hand side has non-finite entries");
  }

  Certificate cert;
  std::optional<LdltFactors> factors;
  if (!cfg.certificate.empty()) {
    cert = certificate_from_json(read_json_file(cfg.certificate));
    if (!cert.verified()) {
      err << "certificate " << cfg.certificate << " is not verified\n";
      return kExitVerificationFailed;
    }
    if (cfg.method == "augmented") factors = refactor(a, cert);
    const bool checks = cfg.method == "augmented" ? factors.has_value() : check_certificate(a, cert);
    if (!checks) {
      err << "certificate " << cfg.certificate << " does not check against " << cfg.input << '\n';
      return kExitVerificationFailed;
    }
  } else {
    Verification v = verify_and_factor(a, verify_options(cfg));
    cert = std::move(v.certificate);
    if (!cert.verified()) {
      print_certificate(out, cert);
      err << "verification failed; no solution enclosure\n";
      return kExitVerificationFailed;
    }
    factors = std::move(v.factors);
  }

  const PairedSolution ps = cfg.method == "lu" ? refine_lu(a, b, cert) : refine_augmented(a, b, *factors, cert);
  const SolutionEnclosure enc = enclose_solution(ps, cert);
  nlohmann::json j = solution_to_json(ps, enc, cert, cfg.certificate);
  if (cfg.certificate.empty()) j["certificate"] = certificate_to_json(cert);
  const std::string path = cfg.out.empty() ? cfg.input + ".solution.json" : cfg.out;
  write_json_file(path, j);

  out << "sigma_min >= " << g17(cert.delta_original) << '\n';
  out << "method: " << cfg.method << "  iterations: " << ps.iterations
      << "  converged: " << (ps.converged ? "yes" : "no") << '\n';
  out << "residual bound: " << g17(ps.residual_norm_sup) << '\n';
  out << "max rad/|mid|: " << g17(max_relative_radius(enc)) << '\n';
  out << "solution: " << path << '\n';
  if (!ps.converged) err << "warning: refinement did not meet the stopping rule; the enclosure is still valid\n";
  return kExitOk;
}

struct BenchRow {
  std::string matrix;
  std::string method;
  bool success = false;
  double sigma_lower = std::nan("");
  double inv_norm = std::nan("");
  double contraction = std::nan("");
  double fill = std::nan("");
  double iterations = std::nan("");
  double max_rel_rad = std::nan("");
  double seconds = 0.0;
};

std::string cell(double x) { return std::isnan(x) ? "" : g17(x); }

template <class F>
double timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Every method on one matrix; failures become rows, never exceptions.
std::vector<BenchRow> bench_matrix(const std::string& name, const SparseMatrix& a) {
  std::vector<BenchRow> rows;
  const auto row = [&](const char* method) {
    BenchRow r;
    r.matrix = name;
    r.method = method;
    return r;
  };
  const auto guarded = [&](BenchRow& r, auto&& body) {
    try {
      r.seconds = timed(body);
    } catch (const std::exception&) {
      r.success = false;
    }
    rows.push_back(r);
  };

  {
    BenchRow r = row("normal_eq");
    guarded(r, [&] {
      const auto s = sigmin_normal_eq(a, 0.0);
      r.success = s.has_value();
      if (s) r.sigma_lower = *s;
    });
  }
  for (const auto& [label, modified] : {std::pair{"lu", false}, std::pair{"lu_modified", true}}) {
    BenchRow r = row(label);
    guarded(r, [&] {
      const auto bnd = modified ? inv_norm_lu_modified(a) : inv_norm_lu(a);
      r.success = bnd.has_value();
      if (!bnd) return;
      r.inv_norm = bnd->bound;
      r.contraction = bnd->contraction;
      r.fill = bnd->inverse_fill_ratio;
    });
  }

  std::optional<Verification> plain;
  for (const bool precond : {false, true}) {
    for (const bool acc : {false, true}) {
      const std::string label = std::string("proposed_p") + (precond ? "1" : "0") + "_a" + (acc ? "1" : "0");
      BenchRow r = row(label.c_str());
      guarded(r, [&] {
        VerifyOptions o;
        o.precond = precond;
        o.acc = acc;
        Verification v = verify_and_factor(a, o);
        r.success = v.certificate.verified();
        if (!r.success) return;
        r.sigma_lower = v.certificate.delta_original;
        r.inv_norm = v.certificate.inv_norm_bound_original;
        r.contraction = v.certificate.rho / v.certificate.theta;
        r.fill = static_cast<double>(v.factors->lower.nnz()) / static_cast<double>(2 * a.nnz());
        if (!precond && !acc) plain = std::move(v);
      });
    }
  }

  const std::vector<double> b = spmv(a, std::vector<double>(a.cols(), 1.0));
  for (const bool with_lu : {false, true}) {
    BenchRow r = row(with_lu ? "refine_lu" : "refine_augmented");
    if (!plain) {
      rows.push_back(r);
      continue;
    }
    guarded(r, [&] {
      const Certificate& cert = plain->certificate;
      const PairedSolution ps = with_lu ? refine_lu(a, b, cert) : refine_augmented(a, b, *plain->factors, cert);
      r.success = ps.converged;
      r.iterations = ps.iterations;
      r.max_rel_rad = max_relative_radius(enclose_solution(ps, cert));
      r.sigma_lower = cert.delta_original;
    });
  }
  return rows;
}

int cmd_bench(const RunConfig& cfg, std::ostream& out) {
  std::vector<std::pair<std::string, fs::path>> files;
  if (!cfg.input.empty()) {
    const fs::path dir(cfg.input);
    if (!fs::is_directory(dir)) throw InputError(cfg.input + ": not a directory");
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_regular_file() && e.path().extension() == ".mtx") files.emplace_back(e.path().filename().string(), e.path());
    }
    std::sort(files.begin(), files.end());
  }

  std::ofstream file;
  if (!cfg.out.empty()) {
    file.open(cfg.out);
    if (!file) throw InputError("cannot open " + cfg.out + " for writing");
  }
  std::ostream& csv = cfg.out.empty() ? out : file;
  csv << "matrix,method,success,sigma_lower,inv_norm_bound,contraction,fill,iterations,max_rel_rad,seconds\n";
  const auto emit = [&](const std::vector<BenchRow>& rows) {
    for (const BenchRow& r : rows) {
      csv << r.matrix << ',' << r.method << ',' << (r.success ? 1 : 0) << ',' << cell(r.sigma_lower) << ','
          << cell(r.inv_norm) << ',' << cell(r.contraction) << ',' << cell(r.fill) << ',' << cell(r.iterations)
          << ',' << cell(r.max_rel_rad) << ',' << (cfg.timing ? g17(r.seconds) : std::string()) << '\n';
    }
    csv.flush();
  };

  if (!cfg.input.empty()) {
    for (const auto& [name, path] : files) {
      std::optional<SparseMatrix> a;
      try {
        a = mm_read_file(path);
      } catch (const Error&) {
      }
      if (!a || !a->is_square() || a->rows() == 0) {
        BenchRow r;
        r.matrix = name;
        r.method = "read";
        emit({r});
        continue;
      }
      emit(bench_matrix(name, *a));
    }
    return kExitOk;
  }

  SpectrumOptions so;
  so.n = cfg.n;
  so.kappa = cfg.kappa;
  for (Index i = 0; i < cfg.count; ++i) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(i);
    emit(bench_matrix("gen_n" + std::to_string(cfg.n) + "_s" + std::to_string(seed), random_with_spectrum(so, seed)));
  }
  return kExitOk;
}

int cmd_info(const RunConfig& cfg, std::ostream& out) {
  const SparseMatrix a = mm_read_file(cfg.input);
  const MatrixFingerprint fp = fingerprint(a);
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fp.hash));
  out << "rows: " << a.rows() << "  cols: " << a.cols() << "  nnz: " << a.nnz() << '\n';
  out << "hash: " << hash << '\n';
  out << "symmetric: " << (a.is_square() && a.is_symmetric() ? "yes" : "no") << '\n';
  if (a.rows() > 0 && a.cols() > 0) {
    out << "density: " << g17(static_cast<double>(a.nnz()) / static_cast<double>(a.rows()) / static_cast<double>(a.cols()))
        << '\n';
  }
  out << "version: " << kVersion << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Verified lower bounds on the smallest singular value of sparse matrices", "verisparse"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", kVersion);

  const auto common = [&](CLI::App* sub, bool input_required) {
    auto* in = sub->add_option("--input", cfg.input, "Matrix Market file");
    if (input_required) in->required();
    sub->add_option("--out", cfg.out, "output path");
  };
  const auto verification = [&](CLI::App* sub) {
    sub->add_flag("--precond", cfg.precond, "equilibrate before verifying");
    sub->add_flag("--acc", cfg.acc, "tighter interval products for the residual bound");
    sub->add_option("--theta-fraction", cfg.theta_fraction, "initial shift as a fraction of the estimate");
  };

  CLI::App* verify = app.add_subcommand("verify", "prove a lower bound on sigma_min(A); writes a certificate");
  common(verify, true);
  verification(verify);

  CLI::App* solve = app.add_subcommand("solve", "verified solution enclosure of A x = b");
  common(solve, true);
  verification(solve);
  solve->add_option("--rhs", cfg.rhs, "right-hand side (Matrix Market vector); default A * ones");
  solve->add_option("--cert", cfg.certificate, "certificate from a previous verify run");
  solve->add_option("--method", cfg.method, "refinement: augmented or lu")->check(CLI::IsMember({"augmented", "lu"}));

  CLI::App* bench = app.add_subcommand("bench", "compare methods on a corpus or generated matrices; CSV report");
  common(bench, false);
  bench->add_option("--seed", cfg.seed, "first generator seed");
  bench->add_option("--count", cfg.count, "number of generated matrices")->check(CLI::NonNegativeNumber);
  bench->add_option("--n", cfg.n, "dimension of generated matrices")->check(CLI::PositiveNumber);
  bench->add_option("--kappa", cfg.kappa, "condition number of generated matrices");
  bool no_timing = false;
  bench->add_flag("--no-timing", no_timing, "leave the seconds column empty");

  CLI::App* info = app.add_subcommand("info", "matrix summary");
  common(info, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }
  cfg.timing = !no_timing;

  try {
    if (!(cfg.theta_fraction > 0 && cfg.theta_fraction < 1)) throw InputError("--theta-fraction must lie in (0, 1)");
    if (!(cfg.kappa >= 1) || !std::isfinite(cfg.kappa)) throw InputError("--kappa must be finite and at least 1");
    if (verify->parsed()) return cmd_verify(cfg, out);
    if (solve->parsed()) return cmd_solve(cfg, out, err);
    if (bench->parsed()) return cmd_bench(cfg, out);
    return cmd_info(cfg, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const MatrixMarketError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const DimensionMismatch& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternalError;
  }
}

}  // namespace verisparse
