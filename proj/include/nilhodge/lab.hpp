#pragma once

// Obstruction calculus on a finite complex of free modules over a
// one-parameter base: 0 -> O^{P_0} -> ... -> O^{P_N} -> 0 with polynomial
// differentials in t. Cochains with polynomial entries stand for jets; only
// coefficients below the order under discussion are ever read.

#include <optional>
#include <string>
#include <vector>

#include "nilhodge/coeff.hpp"
#include "nilhodge/exterior.hpp"
#include "nilhodge/linalg.hpp"

namespace nilhodge {

class FreeComplex {
  public:
    FreeComplex() = default;
    /// d[q] is the P_{q+1} x P_q matrix of d^q; entries must live in the
    /// one-variable ring `parameter` (constants are adopted).
    FreeComplex(std::string parameter, std::vector<std::size_t> ranks, std::vector<PMatrix> d);

    const std::string& parameter() const { return parameter_; }
    const RingPtr& ring() const { return ring_; }
    const std::vector<std::size_t>& ranks() const { return ranks_; }
    std::size_t rank(int q) const;
    /// Number of terms E^0..E^N.
    int length() const { return static_cast<int>(ranks_.size()); }
    int top() const { return length() - 1; }

    /// d^q, or the zero map when q is outside 0..N-1 (with the right shape).
    PMatrix differential(int q) const;
    /// Coefficient of t^k in d^q.
    QMatrix coefficient(int q, unsigned k) const;
    QMatrix at_zero(int q) const { return coefficient(q, 0); }

    unsigned max_degree() const;
    std::size_t total_rank() const;
    /// (max entry degree) x (total rank) + 1.
    unsigned order_bound() const;

  private:
    std::string parameter_ = "t";
    RingPtr ring_;
    std::vector<std::size_t> ranks_;
    std::vector<PMatrix> d_;
};

/// Checks d^{q+1} d^q = 0 as polynomial identities; names (q, row, col) of the
/// first nonzero entry.
std::vector<Diagnostic> validate_complex(const FreeComplex& c);

struct HDims {
    std::size_t at_zero = 0;
    std::size_t generic = 0;
};

std::vector<HDims> h_dims(const FreeComplex& c);

/// H^q(E_0).
CohomologyBasis central_cohomology(const FreeComplex& c, int q);

/// Vector of t^k coefficients.
QVec coefficient(const PVec& v, unsigned k);
/// Drops every term of degree above `degree`.
PVec truncate(const PVec& v, unsigned degree);

/// Matrix of d^q on jets of degree < blocks, landing in jets of degree < blocks.
QMatrix toeplitz(const FreeComplex& c, int q, unsigned blocks);

class ExtensionOrderError : public std::invalid_argument {
  public:
    ExtensionOrderError(const std::string& what, unsigned order) : std::invalid_argument(what), order_(order) {}
    unsigned order() const { return order_; }

  private:
    unsigned order_;
};

struct LabObstruction {
    unsigned n = 0;
    int q = 0;                 // alpha lives in E^q; the class lives in H^{q+1}(E_0)
    QVec representative;       // t^n coefficient of d^q(alpha), in E_0^{q+1}
    QVec coordinates;          // in the stored basis of H^{q+1}(E_0)

    bool is_zero() const { return is_zero_vec(coordinates); }
};

/// o_n^q: alpha is an (n-1)-th order extension (d^q alpha = 0 mod t^n);
/// only its coefficients of degree < n are used. Throws ExtensionOrderError
/// naming the first order where d^q alpha does not vanish.
LabObstruction o_n_q(const FreeComplex& c, int q, const PVec& alpha, unsigned n);

/// rho_i: some gamma in E^q jets of degree <= i with d^q gamma = t^i sigma
/// mod t^{i+1}, or nullopt when [t^i sigma] is a nonzero class.
std::optional<PVec> rho_preimage(const FreeComplex& c, int q, const QVec& sigma, unsigned i);

/// Whether o_{n,i}^q(alpha) = rho_i(o_n^q(alpha)) vanishes.
bool o_n_i_vanishes(const FreeComplex& c, int q, const PVec& alpha, unsigned n, unsigned i);

struct ExtendStep {
    std::optional<PVec> extension;             // n-th order extension
    std::optional<LabObstruction> obstruction;  // o_n when the top coefficient cannot absorb the defect
};

/// Adds t^n x with d_0 x = -(t^n coefficient of d alpha).
ExtendStep extend_step(const FreeComplex& c, int q, const PVec& alpha, unsigned n);

/// Split of H^q(E_0) into a subspace and a complement; vectors are
/// coordinates in the stored basis.
struct ClassSplit {
    int q = 0;
    unsigned order_bound = 0;
    std::vector<QVec> subspace;
    std::vector<QVec> complement;
};

/// First class: `complement` spans the classes that extend to order
/// `order_bound` (any lower-order coefficients may change); `subspace` is a
/// complementary span of obstructed classes.
ClassSplit classify_first_class(const FreeComplex& c, int q, unsigned order_bound);

struct SecondClass {
    int q = 0;
    unsigned order_bound = 0;
    std::vector<QVec> saturation;   // method (a): values at 0 of Im(d^{q-1}) saturated over K
    std::vector<QVec> jet_search;   // method (b): classes o_n(alpha), n <= order_bound
    std::vector<QVec> basis;        // agreed subspace of H^q(E_0)
};

/// Throws InvariantError if the two methods disagree.
SecondClass classify_second_class(const FreeComplex& c, int q);

struct Primitive {
    unsigned n = 0;
    PVec alpha;
    LabObstruction leading;   // o_{n'} of the returned alpha; o_{n',n'-1} != 0
    unsigned steps = 0;       // descents taken
};

/// Descends from o_n(alpha) != 0 to n' <= n with o_{n',n'-1}(alpha') != 0 and
/// the same class.
Primitive reduce_to_primitive(const FreeComplex& c, int q, const PVec& alpha, unsigned n);

struct JumpAccounting {
    int q = 0;
    std::size_t h_zero = 0;
    std::size_t h_generic = 0;
    std::size_t kernel_drop = 0;    // dim Ker d^q(0) - generic dim Ker d^q
    std::size_t image_rise = 0;     // generic rank d^{q-1} - rank d^{q-1}(0)
    std::size_t first_class = 0;
    std::size_t second_class = 0;
    unsigned order_bound = 0;
    bool consistent = true;
    std::string note;
};

JumpAccounting jump_accounting(const FreeComplex& c, int q);

}  // namespace nilhodge
