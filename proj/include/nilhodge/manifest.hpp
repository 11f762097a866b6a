#pragma once

// JSON manifests: a Lie algebra with a complex structure and a first-order
// deformation, or a finite free complex over one parameter.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nilhodge/coeff.hpp"
#include "nilhodge/errors.hpp"
#include "nilhodge/exterior.hpp"
#include "nilhodge/lab.hpp"

namespace nilhodge {

class ManifestError : public ValidationError {
  public:
    ManifestError(std::string source, int line, std::string pointer, const std::string& message);
    const std::string& source() const { return source_; }
    int line() const { return line_; }  // 1-based; 0 when unknown
    const std::string& pointer() const { return pointer_; }
    const std::string& detail() const { return detail_; }

  private:
    std::string source_;
    int line_;
    std::string pointer_;
    std::string detail_;
};

struct StructureEntry {
    int k = 0;                  // d f_k, 1-based
    Mask monomial = 0;
    GaussianRational coeff;     // sign of the written monomial order folded in
};

struct DeformationEntry {
    int i = 0;       // theta_i, 1-based
    int lambda = 0;  // conj(phi_lambda), 1-based
    Poly coeff;
};

struct NamedPoint {
    std::string name;
    Point values;
};

struct Manifest {
    enum class Kind { LieAlgebra, FreeComplex };

    std::string source;
    std::string name;
    Kind kind = Kind::LieAlgebra;
    std::string description;

    // lie-algebra
    int dimension = 0;
    std::vector<std::string> parameters;
    RingPtr ring;
    std::vector<StructureEntry> structure;
    std::vector<DeformationEntry> deformation;
    unsigned order = 2;
    std::vector<NamedPoint> points;
    std::vector<Diagnostic> warnings;

    // free-complex
    std::string parameter = "t";
    std::vector<std::size_t> ranks;
    std::vector<PMatrix> differentials;

    ComplexStructureSpec spec() const;
    VectorForm<Poly> psi1() const;
    FreeComplex complex() const;
    const NamedPoint* find_point(std::string_view name) const;
};

std::string_view kind_name(Manifest::Kind kind);

/// Parses and validates; throws ManifestError with the line of the offending
/// value.
Manifest parse_manifest(std::string_view text, const std::string& source = "<input>");

/// Canonical JSON text (two-space indent, fixed key order).
std::string serialize_manifest(const Manifest& m);

/// `where` is a path, or a bare builtin name (with or without .json) looked
/// up in `data_dir`.
std::filesystem::path resolve_manifest(const std::string& where, const std::filesystem::path& data_dir);
Manifest load_manifest(const std::string& where, const std::filesystem::path& data_dir);

/// Directory holding the builtin manifests, fixed at build time.
std::filesystem::path default_data_dir();

}  // namespace nilhodge
