#pragma once

// Exact coefficients: Gaussian rationals Q(i), multivariate polynomials over
// Q(i) in named deformation parameters, and jets (polynomials in a ring that
// truncates above a fixed total degree).

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "nilhodge/errors.hpp"

namespace nilhodge {

using Rational = mpq_class;

class DivisionByZero : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

class RingMismatch : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class ParseError : public std::invalid_argument {
  public:
    ParseError(const std::string& what, std::size_t column)
        : std::invalid_argument(what), column_(column) {}
    std::size_t column() const { return column_; }

  private:
    std::size_t column_;
};

/// Element a + b*i of Q(i). Both parts are kept canonical (lowest terms,
/// positive denominators) by GMP.
class GaussianRational {
  public:
    GaussianRational() = default;
    GaussianRational(long v) : re_(v) {}  // NOLINT(google-explicit-constructor)
    GaussianRational(Rational re, Rational im = 0);

    static GaussianRational imag_unit() { return {Rational(0), Rational(1)}; }

    const Rational& re() const { return re_; }
    const Rational& im() const { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_one() const { return re_ == 1 && sgn(im_) == 0; }
    bool is_real() const { return sgn(im_) == 0; }

    GaussianRational conj() const { return {re_, -im_}; }
    Rational norm() const { return re_ * re_ + im_ * im_; }
    GaussianRational inv() const;

    GaussianRational operator-() const { return {-re_, -im_}; }
    GaussianRational& operator+=(const GaussianRational& o);
    GaussianRational& operator-=(const GaussianRational& o);
    GaussianRational& operator*=(const GaussianRational& o);
    GaussianRational& operator/=(const GaussianRational& o);

    friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
    friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
    friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
    friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }

    /// Canonical text: `a/b`, `c/d*i`, `a/b+c/d*i`, with `i`/`-i` for unit
    /// imaginary parts and integers printed without a denominator.
    std::string str() const;

    /// Accepts the canonical text plus `1/4i`, `-i`, `3`, `(1+i)` forms.
    static GaussianRational parse(std::string_view text);

    std::size_t hash() const;

  private:
    Rational re_{0};
    Rational im_{0};
};

std::ostream& operator<<(std::ostream& os, const GaussianRational& z);
std::string rational_str(const Rational& q);

/// Named parameter list plus an optional truncation order. Polynomials in a
/// ring with an order are jets: every product drops monomials of total
/// degree above the order.
struct PolyRing {
    std::vector<std::string> names;
    std::optional<unsigned> order;

    std::optional<std::size_t> index_of(std::string_view name) const;
    friend bool operator==(const PolyRing&, const PolyRing&) = default;
};

using RingPtr = std::shared_ptr<const PolyRing>;

RingPtr make_ring(std::vector<std::string> names, std::optional<unsigned> order = std::nullopt);

using Exponents = std::vector<unsigned>;

unsigned total_degree(const Exponents& e);

/// Graded lexicographic order on exponent vectors of equal length.
struct GrlexLess {
    bool operator()(const Exponents& a, const Exponents& b) const;
};

using Point = std::map<std::string, GaussianRational, std::less<>>;

/// Multivariate polynomial over Q(i). A polynomial without a ring is a
/// constant and adopts the ring of whatever it is combined with; two
/// polynomials with different rings cannot be combined.
class Poly {
  public:
    using Terms = std::map<Exponents, GaussianRational, GrlexLess>;

    Poly() = default;
    Poly(long c) : Poly(GaussianRational(c)) {}  // NOLINT(google-explicit-constructor)
    Poly(const GaussianRational& c);            // NOLINT(google-explicit-constructor)
    Poly(RingPtr ring, const GaussianRational& c);

    static Poly variable(const RingPtr& ring, std::string_view name);
    static Poly monomial(const RingPtr& ring, Exponents e, const GaussianRational& c);

    const RingPtr& ring() const { return ring_; }
    const Terms& terms() const { return terms_; }
    std::size_t nvars() const { return ring_ ? ring_->names.size() : 0; }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    GaussianRational constant_term() const;
    /// -1 for the zero polynomial.
    int degree() const;
    /// Lowest total degree of a nonzero term, -1 for zero.
    int low_degree() const;

    Poly homogeneous_part(unsigned n) const;
    /// Drops monomials above `order` and moves into the ring truncated there.
    Poly truncated(unsigned order) const;
    /// Same terms in the ring without truncation.
    Poly untruncated() const;
    /// Reinterprets in `ring`, which must have the same parameter names.
    Poly with_ring(const RingPtr& ring) const;

    GaussianRational eval(const Point& point) const;
    /// Partial evaluation: assigns only the parameters present in `point`.
    Poly substitute(const Point& point) const;
    /// Ring homomorphism sending parameter k to images[k]; images share one ring.
    Poly compose(const std::vector<Poly>& images, const RingPtr& target) const;

    Poly conj_coefficients() const;

    Poly operator-() const;
    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    Poly& operator*=(const Poly& o);
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(const Poly& a, const Poly& b);
    friend bool operator==(const Poly& a, const Poly& b);

    /// Exact quotient a / b; throws std::domain_error when b does not divide a.
    static Poly divide_exact(const Poly& a, const Poly& b);

    /// Canonical text, leading monomial first in graded-lex order, e.g.
    /// `t11*t22-t12*t21`, `(1/2+i)*t11^2`, `-3`.
    std::string str() const;

  private:
    friend Poly parse_poly(std::string_view, const RingPtr&);
    static RingPtr unify(const RingPtr& a, const RingPtr& b);
    void adopt(const RingPtr& r);
    void add_term(const Exponents& e, const GaussianRational& c);
    void enforce_order();

    RingPtr ring_;
    Terms terms_;
};

std::ostream& operator<<(std::ostream& os, const Poly& p);

/// Jets are polynomials in a truncated ring.
using Jet = Poly;

/// Product of two jets of the same parameters and order, truncated.
Jet jet_mul(const Jet& a, const Jet& b);

/// Parses `3*t^2-1/2*t`, `(1/2+i)*t11*t22`, `-t21`. Unknown identifiers are
/// an error; `i` is the imaginary unit.
Poly parse_poly(std::string_view text, const RingPtr& ring);

// Uniform scalar interface used by the form and matrix templates.
inline bool is_zero(const GaussianRational& z) { return z.is_zero(); }
inline bool is_zero(const Poly& p) { return p.is_zero(); }
inline std::string to_string(const GaussianRational& z) { return z.str(); }
inline std::string to_string(const Poly& p) { return p.str(); }

}  // namespace nilhodge
