#pragma once

// Deformation engine: invariant Dolbeault cohomology of the central fiber,
// first-order obstructions o1 = del iota + iota del, order-by-order
// Maurer-Cartan completion, class extension along a family, Froelicher d1,
// and Hodge-number jump accounting with an independent deformed-structure
// oracle.

#include <optional>
#include <string>
#include <vector>

#include "nilhodge/coeff.hpp"
#include "nilhodge/exterior.hpp"
#include "nilhodge/linalg.hpp"

namespace nilhodge {

/// H^{p,q} of a frame: canonical (p,q)-basis plus the cohomology basis of
/// the delbar complex at that spot.
class DolbeaultGroup {
  public:
    DolbeaultGroup(const Frame<GaussianRational>& frame, int p, int q);

    Bidegree bidegree() const { return {p_, q_}; }
    std::size_t dim() const { return coh_.dim(); }
    const CohomologyBasis& cohomology() const { return coh_; }

    std::vector<Form<GaussianRational>> representatives() const;
    /// Coordinates of the class of a delbar-closed (p,q)-form.
    QVec project(const Form<GaussianRational>& f) const;
    /// Coefficientwise projection of a form with polynomial coefficients.
    PVec project(const Form<Poly>& f) const;

  private:
    int n_;
    int p_;
    int q_;
    CohomologyBasis coh_;
};

struct HodgeTable {
    int n = 0;
    std::vector<std::vector<std::size_t>> h;  // h[p][q]

    std::size_t at(int p, int q) const { return h[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)]; }
    /// (1,0),(0,1),(2,0),(1,1),(0,2),...,(0,n): every bidegree with 1 <= p+q <= n.
    std::vector<std::size_t> summary() const;
    friend bool operator==(const HodgeTable&, const HodgeTable&) = default;
};

std::vector<Bidegree> summary_order(int n);

HodgeTable hodge_table(const Frame<GaussianRational>& frame);

/// The central fiber: a validated spec plus all of its Dolbeault groups.
class DolbeaultModel {
  public:
    explicit DolbeaultModel(ComplexStructureSpec spec);

    const ComplexStructureSpec& spec() const { return spec_; }
    int dim() const { return spec_.dim(); }
    const DolbeaultGroup& group(int p, int q) const;
    const Frame<Poly>& poly_frame() const { return poly_frame_; }
    HodgeTable hodge() const;

  private:
    ComplexStructureSpec spec_;
    Frame<Poly> poly_frame_;
    std::vector<DolbeaultGroup> groups_;
};

/// T^{1,0}-valued delbar: (dbar psi)^i = dbar(psi^i) - sum_{j,k} B^i_{jk} psi^j ^ conj(phi_k).
VectorForm<Poly> dbar_vector(const ComplexStructureSpec& spec, const VectorForm<Poly>& psi);

/// Checks dbar psi1 = 0; one diagnostic per failing component.
std::vector<Diagnostic> validate_first_order(const ComplexStructureSpec& spec, const VectorForm<Poly>& psi1);

/// del(iota_psi alpha) + iota_psi(del alpha), before projection.
Form<Poly> o1_form(const DolbeaultModel& model, const VectorForm<Poly>& psi1, const Form<Poly>& alpha);

struct PointRank {
    Point point;
    std::size_t rank = 0;
};

/// Matrix of o1 : H^{p,q} -> H^{p,q+1}; columns follow the stored basis of
/// H^{p,q}, rows that of H^{p,q+1}.
struct ObstructionReport {
    Bidegree source;
    PMatrix matrix;
    std::size_t generic_rank = 0;
    std::vector<PVec> kernel;  // over the fraction field
    std::vector<PointRank> point_ranks;
};

ObstructionReport obstruction_o1(const DolbeaultModel& model, const VectorForm<Poly>& psi1, int p, int q,
                                 const std::vector<Point>& points = {});

/// A family psi(t) = psi_1 + psi_2 + ... through the central fiber.
struct DeformationFamily {
    ComplexStructureSpec spec;
    VectorForm<Poly> psi;  // untruncated polynomial coefficients, zero constant term
    unsigned order = 1;

    /// Degree-k homogeneous part of psi.
    VectorForm<Poly> homogeneous(unsigned k) const;
};

struct MaurerCartanResult {
    std::optional<DeformationFamily> family;
    std::vector<VectorForm<Poly>> corrections;  // psi_2, psi_3, ...
    // Set when the defect at some order is not in the image of dbar.
    std::optional<unsigned> obstructed_order;
    std::vector<Form<Poly>> obstruction;
};

/// Solves for psi_2..psi_target so the coframe defect vanishes mod m^{target+1}.
MaurerCartanResult mc_extend(const ComplexStructureSpec& spec, const VectorForm<Poly>& psi1, unsigned target_order);

/// Integrability defect of psi truncated at `order`: zero iff every defect
/// coefficient has no terms of degree <= order.
bool defect_vanishes_to_order(const ComplexStructureSpec& spec, const VectorForm<Poly>& psi, unsigned order);

struct ClassExtension {
    unsigned verified_order = 0;             // alpha(t) is dbar_t-closed mod m^{verified_order+1}
    std::optional<unsigned> failing_order;   // first order that could not be reached
    PVec obstruction;                        // class in H^{p,q+1}(X_0), sign-normalized like o1
    std::vector<PVec> jets;                  // coordinates of alpha_k in the mixed (p,q)-basis
    RingPtr ring;
};

/// Extends alpha order by order along the family; `direction`, when given,
/// restricts the family to the line t = s * direction (parameter `s`).
ClassExtension extend_class(const DolbeaultModel& model, const DeformationFamily& family,
                            const Form<GaussianRational>& alpha, unsigned max_order,
                            const std::optional<Point>& direction = std::nullopt);

struct SecondClassSubspace {
    Bidegree bidegree;
    std::size_t generic_dim = 0;
    std::vector<PVec> generic_basis;  // columns of o1 independent over the fraction field
};

/// Image of o1 : H^{p,q-1} -> H^{p,q}.
SecondClassSubspace second_class_subspace(const DolbeaultModel& model, const VectorForm<Poly>& psi1, int p, int q);
std::vector<QVec> second_class_at(const DolbeaultModel& model, const VectorForm<Poly>& psi1, int p, int q,
                                  const Point& point);

struct JumpEntry {
    Bidegree bidegree;
    std::size_t h0 = 0;
    std::size_t first_class = 0;
    std::size_t second_class = 0;
    long predicted = 0;
};

struct JumpTable {
    int n = 0;
    Point point;
    bool first_order_prediction = true;
    std::vector<JumpEntry> entries;  // all 0 <= p,q <= n, p-major

    const JumpEntry& at(int p, int q) const;
    HodgeTable predicted_table() const;
};

JumpTable jump_report(const DolbeaultModel& model, const VectorForm<Poly>& psi1, const Point& point);

struct OracleResult {
    HodgeTable table;
    GaussianRational scale;  // family evaluated at scale * point
    ComplexStructureSpec deformed;
};

class IntegrabilityError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Recomputes the Hodge table of the deformed structure at a point from
/// scratch. Walks the ray s * point, s = 1, 1/2, 1/3, ..., until the genuine
/// coframe is nondegenerate.
OracleResult oracle_hodge_at_point(const DeformationFamily& family, const Point& point);

/// d1 : H^{p,q} -> H^{p+1,q} induced by del.
QMatrix frolicher_d1(const DolbeaultModel& model, int p, int q);

struct Witness {
    int i = 0;  // del phi_i != 0 (0-based)
    int k = 0;  // theta_k
    int j = 0;  // conj(phi_j) with d phi_j = 0
    VectorForm<Poly> psi;
    Form<Poly> obstruction;  // o1(phi_i)
    PVec obstruction_class;  // in H^{1,1}
};

/// Searches theta_k (x) conj(phi_j) with o1(phi_i) != 0 in H^{1,1}.
/// Empty only for the abelian structure; throws std::invalid_argument for
/// non-parallelisable specs.
std::optional<Witness> parallelisable_witness(const DolbeaultModel& model);

/// Fills parameters of `ring` missing from `partial` with zero; rejects
/// names not in the ring.
Point complete_point(const RingPtr& ring, const Point& partial);

/// Ring shared by the coefficients of psi (nullptr if all are constants).
RingPtr ring_of(const VectorForm<Poly>& psi);

}  // namespace nilhodge
