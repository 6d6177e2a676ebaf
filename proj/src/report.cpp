#include "verisparse/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "verisparse/error.hpp"

namespace verisparse {

using nlohmann::json;

namespace {

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json numbers(std::span<const double> v) {
  json a = json::array();
  for (const double x : v) a.push_back(number(x));
  return a;
}

json inertia_json(const Inertia& in) {
  return {{"positive", in.positive}, {"negative", in.negative}, {"zero", in.zero}};
}

const char* pivoting_name(Pivoting p) { return p == Pivoting::none ? "none" : "bunch_kaufman"; }

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

[[noreturn]] void bad(const std::string& what) { throw InvalidArgument("certificate json: " + what); }

const json& field(const json& j, const char* key) {
  if (!j.is_object()) bad("expected an object");
  const auto it = j.find(key);
  if (it == j.end()) bad(std::string("missing field ") + key);
  return *it;
}

double read_number(const json& j, const char* key, double if_null) {
  const json& v = field(j, key);
  if (v.is_null()) return if_null;
  if (!v.is_number()) bad(std::string(key) + " is not a number");
  return v.get<double>();
}

Index read_index(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_integer()) bad(std::string(key) + " is not an integer");
  return v.get<Index>();
}

bool read_bool(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_boolean()) bad(std::string(key) + " is not a boolean");
  return v.get<bool>();
}

std::string read_string(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) bad(std::string(key) + " is not a string");
  return v.get<std::string>();
}

std::vector<double> read_numbers(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_array()) bad(std::string(key) + " is not an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const json& x : v) {
    if (x.is_null()) {
      out.push_back(std::numeric_limits<double>::infinity());
    } else if (x.is_number()) {
      out.push_back(x.get<double>());
    } else {
      bad(std::string(key) + " holds a non-number");
    }
  }
  return out;
}

std::vector<Index> read_indices(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_array()) bad(std::string(key) + " is not an array");
  std::vector<Index> out;
  out.reserve(v.size());
  for (const json& x : v) {
    if (!x.is_number_integer()) bad(std::string(key) + " holds a non-integer");
    out.push_back(x.get<Index>());
  }
  return out;
}

VerifyStatus read_status(const json& j, const char* key) {
  const std::string s = read_string(j, key);
  for (const VerifyStatus st : {VerifyStatus::verified, VerifyStatus::failed_inertia, VerifyStatus::failed_residual,
                                VerifyStatus::failed_breakdown}) {
    if (s == to_string(st)) return st;
  }
  bad("unknown status " + s);
}

Inertia read_inertia(const json& j) {
  return {read_index(j, "positive"), read_index(j, "negative"), read_index(j, "zero")};
}

}  // namespace

json certificate_to_json(const Certificate& cert) {
  json j;
  j["format"] = kCertificateFormat;
  j["version"] = cert.version;
  j["status"] = to_string(cert.status);
  j["matrix"] = {{"n", cert.matrix.n}, {"nnz", cert.matrix.nnz}, {"hash", hex64(cert.matrix.hash)}};
  j["options"] = {{"precond", cert.precond},
                  {"acc", cert.acc},
                  {"pivoting", pivoting_name(cert.pivoting)},
                  {"theta_fraction", cert.policy.initial_fraction},
                  {"max_shrinks", cert.policy.max_shrinks},
                  {"max_grows", cert.policy.max_grows}};
  j["sigma_estimate"] = number(cert.sigma_estimate);
  j["theta"] = number(cert.theta);
  j["rho"] = number(cert.rho);
  j["inertia"] = inertia_json(cert.counts);
  j["delta"] = number(cert.delta);
  j["inv_norm_bound"] = number(cert.inv_norm_bound);
  j["delta_original"] = number(cert.delta_original);
  j["inv_norm_bound_original"] = number(cert.inv_norm_bound_original);
  if (cert.equilibration) {
    const Equilibration& eq = *cert.equilibration;
    j["equilibration"] = {{"row_perm", eq.row_perm}, {"row_scale", numbers(eq.row_scale)},
                          {"col_scale", numbers(eq.col_scale)}};
  } else {
    j["equilibration"] = nullptr;
  }
  j["ordering"] = cert.ordering;
  json attempts = json::array();
  for (const AttemptRecord& a : cert.attempts) {
    attempts.push_back({{"theta", number(a.theta)},
                        {"rho", number(a.rho)},
                        {"inertia", a.counts ? inertia_json(*a.counts) : json(nullptr)},
                        {"outcome", to_string(a.outcome)}});
  }
  j["attempts"] = std::move(attempts);
  j["message"] = cert.message;
  return j;
}

Certificate certificate_from_json(const json& j) {
  if (read_string(j, "format") != kCertificateFormat) bad("wrong format tag");
  Certificate cert;
  cert.version = read_string(j, "version");
  cert.status = read_status(j, "status");

  const json& m = field(j, "matrix");
  cert.matrix.n = read_index(m, "n");
  cert.matrix.nnz = read_index(m, "nnz");
  const std::string hash = read_string(m, "hash");
  const auto [end, ec] = std::from_chars(hash.data(), hash.data() + hash.size(), cert.matrix.hash, 16);
  if (ec != std::errc() || end != hash.data() + hash.size() || hash.size() != 16) bad("malformed hash");

  const json& o = field(j, "options");
  cert.precond = read_bool(o, "precond");
  cert.acc = read_bool(o, "acc");
  const std::string piv = read_string(o, "pivoting");
  if (piv == "none") {
    cert.pivoting = Pivoting::none;
  } else if (piv == "bunch_kaufman") {
    cert.pivoting = Pivoting::bunch_kaufman;
  } else {
    bad("unknown pivoting " + piv);
  }
  cert.policy.initial_fraction = read_number(o, "theta_fraction", 0.0);
  cert.policy.max_shrinks = static_cast<int>(read_index(o, "max_shrinks"));
  cert.policy.max_grows = static_cast<int>(read_index(o, "max_grows"));

  const double inf = std::numeric_limits<double>::infinity();
  cert.sigma_estimate = read_number(j, "sigma_estimate", inf);
  cert.theta = read_number(j, "theta", inf);
  cert.rho = read_number(j, "rho", inf);
  cert.counts = read_inertia(field(j, "inertia"));
  cert.delta = read_number(j, "delta", inf);
  cert.inv_norm_bound = read_number(j, "inv_norm_bound", inf);
  cert.delta_original = read_number(j, "delta_original", inf);
  cert.inv_norm_bound_original = read_number(j, "inv_norm_bound_original", inf);

  const json& e = field(j, "equilibration");
  if (!e.is_null()) {
    Equilibration eq;
    eq.row_perm = read_indices(e, "row_perm");
    eq.row_scale = read_numbers(e, "row_scale");
    eq.col_scale = read_numbers(e, "col_scale");
    cert.equilibration = std::move(eq);
  }
  cert.ordering = read_indices(j, "ordering");

  const json& attempts = field(j, "attempts");
  if (!attempts.is_array()) bad("attempts is not an array");
  for (const json& a : attempts) {
    AttemptRecord rec;
    rec.theta = read_number(a, "theta", inf);
    rec.rho = read_number(a, "rho", std::numeric_limits<double>::quiet_NaN());
    const json& in = field(a, "inertia");
    if (!in.is_null()) rec.counts = read_inertia(in);
    rec.outcome = read_status(a, "outcome");
    cert.attempts.push_back(rec);
  }
  cert.message = read_string(j, "message");
  return cert;
}

json solution_to_json(const PairedSolution& ps, const SolutionEnclosure& enc, const Certificate& cert,
                      const std::string& certificate) {
  json j;
  j["format"] = kSolutionFormat;
  j["version"] = cert.version;
  j["certificate"] = certificate;
  j["matrix"] = {{"n", cert.matrix.n}, {"nnz", cert.matrix.nnz}, {"hash", hex64(cert.matrix.hash)}};
  j["converged"] = ps.converged;
  j["iterations"] = ps.iterations;
  j["residual_bound"] = number(ps.residual_norm_sup);
  j["delta"] = number(ps.delta);
  j["max_relative_radius"] = number(max_relative_radius(enc));
  j["mid"] = numbers(enc.mid);
  j["rad"] = numbers(enc.rad);
  return j;
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw InvalidArgument("failed writing " + path.string());
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
}

}  // namespace verisparse
