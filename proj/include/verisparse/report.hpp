#pragma once

// JSON forms of certificates and solution enclosures. Field names follow
// docs/schemas. Non-finite numbers are written as null; a null bound reads
// back as +inf and a null attempt residual as NaN.

#include <filesystem>
#include <string>

#include "json.hpp"
#include "verisparse/refine.hpp"
#include "verisparse/verify.hpp"

namespace verisparse {

inline constexpr const char* kCertificateFormat = "verisparse.certificate";
inline constexpr const char* kSolutionFormat = "verisparse.solution";

nlohmann::json certificate_to_json(const Certificate& cert);

// Throws InvalidArgument on a missing or ill-typed field or a wrong format tag.
Certificate certificate_from_json(const nlohmann::json& j);

// `certificate` is a reference to the certificate file (a path or "").
nlohmann::json solution_to_json(const PairedSolution& ps, const SolutionEnclosure& enc, const Certificate& cert,
                                const std::string& certificate);

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);
// Throws InvalidArgument when the file cannot be read or parsed.
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace verisparse
