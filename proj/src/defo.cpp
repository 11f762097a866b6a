#include "nilhodge/defo.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <set>

namespace nilhodge {

namespace {

using GR = GaussianRational;

Exponents zero_exponents(const RingPtr& ring) { return Exponents(ring ? ring->names.size() : 0, 0); }

Poly monomial_in(const RingPtr& ring, const Exponents& e, const GR& c) {
    if (!ring) {
        return Poly(c);
    }
    return Poly::monomial(ring, e, c);
}

/// Splits a vector of polynomials into constant vectors, one per monomial.
std::map<Exponents, QVec> split_by_monomial(const PVec& v) {
    std::map<Exponents, QVec> out;
    for (std::size_t k = 0; k < v.size(); ++k) {
        for (const auto& [e, c] : v[k].terms()) {
            auto [it, inserted] = out.try_emplace(e, QVec(v.size()));
            it->second[k] = c;
        }
    }
    return out;
}

RingPtr ring_of_vec(const PVec& v) {
    for (const auto& p : v) {
        if (p.ring()) {
            return p.ring();
        }
    }
    return nullptr;
}

PVec homogeneous(const PVec& v, unsigned k) {
    PVec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = v[i].homogeneous_part(k);
    }
    return out;
}

bool has_terms_up_to(const Poly& p, unsigned order) {
    const int low = p.low_degree();
    return low >= 0 && static_cast<unsigned>(low) <= order;
}

/// All exponent vectors of total degree k in `vars` variables.
void monomials_of_degree(std::size_t vars, unsigned k, Exponents& cur, std::size_t pos, std::vector<Exponents>& out) {
    if (pos + 1 == vars) {
        cur[pos] = k;
        out.push_back(cur);
        cur[pos] = 0;
        return;
    }
    for (unsigned a = 0; a <= k; ++a) {
        cur[pos] = k - a;
        monomials_of_degree(vars, a, cur, pos + 1, out);
    }
    cur[pos] = 0;
}

std::vector<Exponents> monomials_of_degree(std::size_t vars, unsigned k) {
    std::vector<Exponents> out;
    if (vars == 0) {
        if (k == 0) {
            out.emplace_back();
        }
        return out;
    }
    Exponents cur(vars, 0);
    monomials_of_degree(vars, k, cur, 0, out);
    return out;
}

Exponents add_exponents(const Exponents& a, const Exponents& b) {
    Exponents c(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        c[k] = a[k] + b[k];
    }
    return c;
}

int obstruction_sign(int p, int q) { return (p + q) % 2 == 1 ? 1 : -1; }

}  // namespace

// --- Dolbeault groups -------------------------------------------------------

DolbeaultGroup::DolbeaultGroup(const Frame<GR>& frame, int p, int q) : n_(frame.dim()), p_(p), q_(q) {
    coh_ = CohomologyBasis::compute(delbar_matrix(frame, p, q - 1), delbar_matrix(frame, p, q));
}

std::vector<Form<GR>> DolbeaultGroup::representatives() const {
    std::vector<Form<GR>> out;
    for (const auto& v : coh_.representatives()) {
        out.push_back(form_from_coordinates(n_, p_, q_, v));
    }
    return out;
}

QVec DolbeaultGroup::project(const Form<GR>& f) const {
    if (f.is_zero()) {
        return QVec(dim());
    }
    return coh_.project(coordinates(f, p_, q_));
}

PVec DolbeaultGroup::project(const Form<Poly>& f) const {
    PVec out(dim());
    if (f.is_zero()) {
        return out;
    }
    const PVec coords = coordinates(f, p_, q_);
    const RingPtr ring = ring_of_vec(coords);
    for (const auto& [e, v] : split_by_monomial(coords)) {
        QVec c = coh_.project(v);
        for (std::size_t k = 0; k < c.size(); ++k) {
            out[k] += monomial_in(ring, e, c[k]);
        }
    }
    return out;
}

std::vector<Bidegree> summary_order(int n) {
    std::vector<Bidegree> out;
    for (int k = 1; k <= n; ++k) {
        for (int p = std::min(k, n); p >= std::max(0, k - n); --p) {
            out.push_back({p, k - p});
        }
    }
    return out;
}

std::vector<std::size_t> HodgeTable::summary() const {
    std::vector<std::size_t> out;
    for (auto b : summary_order(n)) {
        out.push_back(at(b.p, b.q));
    }
    return out;
}

HodgeTable hodge_table(const Frame<GR>& frame) {
    HodgeTable t;
    t.n = frame.dim();
    t.h.assign(static_cast<std::size_t>(t.n + 1), std::vector<std::size_t>(static_cast<std::size_t>(t.n + 1)));
    for (int p = 0; p <= t.n; ++p) {
        for (int q = 0; q <= t.n; ++q) {
            t.h[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] = DolbeaultGroup(frame, p, q).dim();
        }
    }
    return t;
}

DolbeaultModel::DolbeaultModel(ComplexStructureSpec spec) : spec_(std::move(spec)) {
    auto diags = validate_spec(spec_);
    if (has_errors(diags)) {
        std::string msg;
        for (const auto& d : diags) {
            if (d.severity == Diagnostic::Severity::Error) {
                msg += (msg.empty() ? "" : "; ") + d.message;
            }
        }
        throw ValidationError(msg);
    }
    poly_frame_ = lift_frame(spec_.frame());
    const int n = spec_.dim();
    for (int p = 0; p <= n; ++p) {
        for (int q = 0; q <= n; ++q) {
            groups_.emplace_back(spec_.frame(), p, q);
        }
    }
}

const DolbeaultGroup& DolbeaultModel::group(int p, int q) const {
    const int n = spec_.dim();
    if (p < 0 || q < 0 || p > n || q > n) {
        throw std::out_of_range("no Dolbeault group in bidegree (" + std::to_string(p) + "," + std::to_string(q) + ")");
    }
    return groups_[static_cast<std::size_t>(p * (n + 1) + q)];
}

HodgeTable DolbeaultModel::hodge() const {
    HodgeTable t;
    t.n = dim();
    t.h.assign(static_cast<std::size_t>(t.n + 1), std::vector<std::size_t>(static_cast<std::size_t>(t.n + 1)));
    for (int p = 0; p <= t.n; ++p) {
        for (int q = 0; q <= t.n; ++q) {
            t.h[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] = group(p, q).dim();
        }
    }
    return t;
}

// --- first order --------------------------------------------------------------

VectorForm<Poly> dbar_vector(const ComplexStructureSpec& spec, const VectorForm<Poly>& psi) {
    const int n = spec.dim();
    VectorForm<Poly> out(n, psi.degree() + 1);
    if (psi.is_zero()) {
        return out;
    }
    if (psi.dim() != n) {
        throw std::invalid_argument("dbar_vector: psi lives on a different algebra");
    }
    const Frame<Poly> frame = lift_frame(spec.frame());
    for (int i = 0; i < n; ++i) {
        Form<Poly> f = frame.delbar(psi.component(i));
        for (int j = 0; j < n; ++j) {
            const Form<Poly> pj = psi.component(j);
            if (pj.is_zero()) {
                continue;
            }
            for (int k = 0; k < n; ++k) {
                const GR b = spec.mixed_constant(i, j, k);
                if (!b.is_zero()) {
                    f -= wedge(pj, phibar<Poly>(n, k + 1)).scaled(Poly(b));
                }
            }
        }
        for (const auto& [m, c] : f.terms()) {
            out.add(i, m, c);
        }
    }
    return out;
}

std::vector<Diagnostic> validate_first_order(const ComplexStructureSpec& spec, const VectorForm<Poly>& psi1) {
    std::vector<Diagnostic> out;
    if (psi1.degree() != 1) {
        out.push_back({Diagnostic::Severity::Error, "degree", "deformation must be a vector-valued (0,1)-form"});
        return out;
    }
    if (!psi1.is_zero() && psi1.dim() != spec.dim()) {
        out.push_back({Diagnostic::Severity::Error, "dimension", "deformation lives on a different algebra"});
        return out;
    }
    for (const auto& [key, c] : psi1.terms()) {
        if (c.low_degree() != 1 || c.degree() != 1) {
            out.push_back({Diagnostic::Severity::Error, "not-linear",
                           "coefficient of th" + std::to_string(key.first + 1) + "." +
                               monomial_str(key.second, spec.dim()) + " is not linear in the parameters: " +
                               c.str()});
        }
    }
    VectorForm<Poly> d = dbar_vector(spec, psi1);
    for (int i = 0; i < spec.dim(); ++i) {
        Form<Poly> c = d.component(i);
        if (!c.is_zero()) {
            out.push_back({Diagnostic::Severity::Error, "not-closed",
                           "dbar of component th" + std::to_string(i + 1) + " is " + c.str() + ", not 0"});
        }
    }
    return out;
}

Form<Poly> o1_form(const DolbeaultModel& model, const VectorForm<Poly>& psi1, const Form<Poly>& alpha) {
    const auto& frame = model.poly_frame();
    return frame.del(contract(psi1, alpha)) + contract(psi1, frame.del(alpha));
}

ObstructionReport obstruction_o1(const DolbeaultModel& model, const VectorForm<Poly>& psi1, int p, int q,
                                 const std::vector<Point>& points) {
    const int n = model.dim();
    const DolbeaultGroup& src = model.group(p, q);
    ObstructionReport rep;
    rep.source = {p, q};
    if (q == n) {
        rep.matrix = PMatrix(0, src.dim());
    } else {
        const DolbeaultGroup& dst = model.group(p, q + 1);
        std::vector<PVec> cols;
        for (const auto& alpha : src.representatives()) {
            Form<Poly> beta = o1_form(model, psi1, lift(alpha));
            Form<Poly> check = model.poly_frame().delbar(beta);
            if (!check.is_zero()) {
                throw InvariantError("o1(" + alpha.str() + ") = " + beta.str() + " is not delbar-closed: " +
                                     check.str());
            }
            cols.push_back(dst.project(beta));
        }
        rep.matrix = PMatrix::from_columns(dst.dim(), cols);
    }
    rep.generic_rank = generic_rank(rep.matrix);
    rep.kernel = kernel_basis(rep.matrix);
    for (const auto& pt : points) {
        rep.point_ranks.push_back({pt, specialized_rank(rep.matrix, pt)});
    }
    return rep;
}

// --- Maurer-Cartan ------------------------------------------------------------

VectorForm<Poly> DeformationFamily::homogeneous(unsigned k) const {
    return psi.map_coefficients([k](const Poly& c) { return c.homogeneous_part(k); });
}

bool defect_vanishes_to_order(const ComplexStructureSpec& spec, const VectorForm<Poly>& psi, unsigned order) {
    for (const auto& f : deformed_coframe(spec, psi).defect) {
        for (const auto& [m, c] : f.terms()) {
            if (has_terms_up_to(c, order)) {
                return false;
            }
        }
    }
    return true;
}

MaurerCartanResult mc_extend(const ComplexStructureSpec& spec, const VectorForm<Poly>& psi1, unsigned target_order) {
    if (target_order < 1) {
        throw std::invalid_argument("mc_extend: target order must be at least 1");
    }
    auto diags = validate_first_order(spec, psi1);
    if (has_errors(diags)) {
        throw ValidationError(diags.front().message);
    }
    const int n = spec.dim();
    const RingPtr ring = ring_of(psi1);
    const auto anti1 = bidegree_basis(n, 0, 1);
    const auto anti2 = bidegree_basis(n, 0, 2);
    const std::size_t nb = anti2.size();
    std::map<Mask, std::size_t> row_of;
    for (std::size_t r = 0; r < nb; ++r) {
        row_of[anti2[r]] = r;
    }

    // Linearized defect: the T-valued dbar on unknowns theta_i (x) conj(phi_mu).
    QMatrix lin(static_cast<std::size_t>(n) * nb, static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i) {
        for (int mu = 0; mu < n; ++mu) {
            VectorForm<Poly> e(n, 1);
            e.add(i, anti1[static_cast<std::size_t>(mu)], Poly(1));
            const VectorForm<Poly> image = dbar_vector(spec, e);
            for (const auto& [key, c] : image.terms()) {
                lin(static_cast<std::size_t>(key.first) * nb + row_of.at(key.second),
                    static_cast<std::size_t>(i * n + mu)) = c.constant_term();
            }
        }
    }

    MaurerCartanResult res;
    VectorForm<Poly> psi = psi1;
    for (unsigned k = 2; k <= target_order; ++k) {
        MixedFrame mf = deformed_coframe(spec, psi);
        std::map<Exponents, QVec> rhs;
        for (int i = 0; i < n; ++i) {
            for (const auto& [m, c] : mf.defect[static_cast<std::size_t>(i)].terms()) {
                if (has_terms_up_to(c, k - 1)) {
                    throw InvariantError("Maurer-Cartan defect has terms below order " + std::to_string(k));
                }
                const Poly top = c.homogeneous_part(k);
                for (const auto& [e, v] : top.terms()) {
                    auto [it, ins] = rhs.try_emplace(e, QVec(lin.rows()));
                    it->second[static_cast<std::size_t>(i) * nb + row_of.at(m)] = -v;
                }
            }
        }
        VectorForm<Poly> corr(n, 1);
        for (const auto& [e, b] : rhs) {
            auto x = solve(lin, b);
            if (!x) {
                res.obstructed_order = k;
                for (const auto& f : mf.defect) {
                    res.obstruction.push_back(f.map_coefficients([k](const Poly& c) { return c.homogeneous_part(k); }));
                }
                return res;
            }
            for (int i = 0; i < n; ++i) {
                for (int mu = 0; mu < n; ++mu) {
                    const GR& c = (*x)[static_cast<std::size_t>(i * n + mu)];
                    if (!c.is_zero()) {
                        corr.add(i, anti1[static_cast<std::size_t>(mu)], monomial_in(ring, e, c));
                    }
                }
            }
        }
        psi += corr;
        res.corrections.push_back(corr);
    }
    if (!defect_vanishes_to_order(spec, psi, target_order)) {
        throw InvariantError("Maurer-Cartan completion does not vanish to order " + std::to_string(target_order));
    }
    res.family = DeformationFamily{spec, psi, target_order};
    return res;
}

// --- class extension ----------------------------------------------------------

ClassExtension extend_class(const DolbeaultModel& model, const DeformationFamily& family, const Form<GR>& alpha,
                            unsigned max_order, const std::optional<Point>& direction) {
    const int n = model.dim();
    auto bd = alpha.bidegree();
    if (!bd) {
        throw std::invalid_argument("extend_class: alpha must be a nonzero form of pure bidegree");
    }
    const int p = bd->p;
    const int q = bd->q;
    if (!model.spec().frame().delbar(alpha).is_zero()) {
        throw NotClosedError("extend_class: alpha is not delbar-closed on the central fiber");
    }

    VectorForm<Poly> psi = family.psi;
    RingPtr ring = ring_of(psi);
    if (direction) {
        const Point dir = complete_point(ring, *direction);
        RingPtr line = make_ring({"s"});
        const Poly s = Poly::variable(line, "s");
        std::vector<Poly> images;
        if (ring) {
            for (const auto& name : ring->names) {
                images.push_back(s * Poly(dir.at(name)));
            }
        }
        psi = psi.map_coefficients([&](const Poly& c) {
            return c.ring() ? c.compose(images, line) : Poly(line, c.constant_term());
        });
        ring = line;
    }
    const std::size_t nvars = ring ? ring->names.size() : 0;

    ClassExtension out;
    out.ring = ring;
    const QVec a0 = coordinates(alpha, p, q);
    PVec A(a0.size());
    for (std::size_t k = 0; k < a0.size(); ++k) {
        A[k] = monomial_in(ring, zero_exponents(ring), a0[k]);
    }
    out.jets.push_back(A);
    if (q == n) {
        out.verified_order = max_order;
        return out;
    }

    const MixedFrame mf = deformed_coframe(model.spec(), psi);
    const PMatrix dt = delbar_matrix(mf.frame, p, q);
    std::map<Exponents, QMatrix> parts;
    for (std::size_t r = 0; r < dt.rows(); ++r) {
        for (std::size_t c = 0; c < dt.cols(); ++c) {
            for (const auto& [e, v] : dt(r, c).terms()) {
                // Lifted constants carry no ring and an empty exponent vector.
                const Exponents key = e.empty() ? zero_exponents(ring) : e;
                auto [it, ins] = parts.try_emplace(key, QMatrix(dt.rows(), dt.cols()));
                it->second(r, c) += v;
            }
        }
    }
    const QMatrix d0 = delbar_matrix(model.spec().frame(), p, q);
    {
        auto it = parts.find(zero_exponents(ring));
        const QMatrix got = it == parts.end() ? QMatrix(dt.rows(), dt.cols()) : it->second;
        if (!(got == d0)) {
            throw InvariantError("deformed delbar does not restrict to delbar at t = 0");
        }
    }
    const std::vector<QVec> ker0 = kernel_basis(d0);
    const DolbeaultGroup& target = model.group(p, q + 1);
    const int sign = obstruction_sign(p, q);
    const std::size_t rows = dt.rows();
    const std::size_t cols = dt.cols();

    auto class_of = [&](const PVec& defect) {
        PVec cls = target.project(form_from_coordinates(n, p, q + 1, defect));
        for (auto& c : cls) {
            c = sign > 0 ? c : -c;
        }
        return cls;
    };

    for (unsigned k = 1; k <= max_order; ++k) {
        const PVec image = dt.apply(A);
        for (const auto& c : image) {
            if (has_terms_up_to(c, k - 1)) {
                throw InvariantError("class extension left a defect below order " + std::to_string(k));
            }
        }
        const PVec defect = homogeneous(image, k);
        PVec cls;
        try {
            cls = class_of(defect);
        } catch (const NotClosedError&) {
            throw InvariantError("order-" + std::to_string(k) + " defect of the extension is not delbar-closed");
        }

        if (k == 1) {
            VectorForm<Poly> lin = psi.map_coefficients([](const Poly& c) { return c.homogeneous_part(1); });
            PVec expect = target.project(o1_form(model, lin, lift(alpha).map_coefficients([&](const Poly& c) {
                return monomial_in(ring, zero_exponents(ring), c.constant_term());
            })));
            if (!(expect == cls)) {
                throw InvariantError("first-order extension class differs from o1");
            }
        }

        // Greedy step: solve d0 x_e = -defect_e monomial by monomial.
        const auto rhs = split_by_monomial(defect);
        bool greedy = true;
        PVec step(cols);
        for (const auto& [e, b] : rhs) {
            QVec nb = b;
            for (auto& x : nb) {
                x = -x;
            }
            auto x = solve(d0, nb);
            if (!x) {
                greedy = false;
                break;
            }
            for (std::size_t j = 0; j < cols; ++j) {
                step[j] += monomial_in(ring, e, (*x)[j]);
            }
        }
        if (greedy) {
            for (std::size_t j = 0; j < cols; ++j) {
                A[j] += step[j];
            }
            out.verified_order = k;
            continue;
        }

        // Coupled step: also re-choose the previous order by closed forms.
        bool solved = false;
        if (k >= 2 && !ker0.empty()) {
            const auto mk = monomials_of_degree(nvars, k);
            const auto mprev = monomials_of_degree(nvars, k - 1);
            std::map<Exponents, std::size_t> block;
            for (std::size_t b = 0; b < mk.size(); ++b) {
                block[mk[b]] = b;
            }
            const std::size_t nx = mk.size() * cols;
            const std::size_t nc = mprev.size() * ker0.size();
            QMatrix sys(mk.size() * rows, nx + nc);
            QVec b(mk.size() * rows);
            for (std::size_t blk = 0; blk < mk.size(); ++blk) {
                for (std::size_t r = 0; r < rows; ++r) {
                    for (std::size_t c = 0; c < cols; ++c) {
                        sys(blk * rows + r, blk * cols + c) = d0(r, c);
                    }
                }
            }
            for (const auto& [e, v] : rhs) {
                const std::size_t blk = block.at(e);
                for (std::size_t r = 0; r < rows; ++r) {
                    b[blk * rows + r] = -v[r];
                }
            }
            for (const auto& [e, dv] : parts) {
                if (total_degree(e) != 1) {
                    continue;
                }
                for (std::size_t pi = 0; pi < mprev.size(); ++pi) {
                    const std::size_t blk = block.at(add_exponents(mprev[pi], e));
                    for (std::size_t kb = 0; kb < ker0.size(); ++kb) {
                        const QVec img = dv.apply(ker0[kb]);
                        for (std::size_t r = 0; r < rows; ++r) {
                            sys(blk * rows + r, nx + pi * ker0.size() + kb) += img[r];
                        }
                    }
                }
            }
            if (auto x = solve(sys, b)) {
                solved = true;
                for (std::size_t blk = 0; blk < mk.size(); ++blk) {
                    for (std::size_t c = 0; c < cols; ++c) {
                        A[c] += monomial_in(ring, mk[blk], (*x)[blk * cols + c]);
                    }
                }
                for (std::size_t pi = 0; pi < mprev.size(); ++pi) {
                    for (std::size_t kb = 0; kb < ker0.size(); ++kb) {
                        const GR& w = (*x)[nx + pi * ker0.size() + kb];
                        if (w.is_zero()) {
                            continue;
                        }
                        for (std::size_t c = 0; c < cols; ++c) {
                            A[c] += monomial_in(ring, mprev[pi], w * ker0[kb][c]);
                        }
                    }
                }
            }
        }
        if (!solved) {
            out.failing_order = k;
            out.obstruction = cls;
            break;
        }
        out.verified_order = k;
    }
    out.jets.clear();
    for (unsigned k = 0; k <= out.verified_order; ++k) {
        out.jets.push_back(homogeneous(A, k));
    }
    return out;
}

// --- second class, jumps --------------------------------------------------------

SecondClassSubspace second_class_subspace(const DolbeaultModel& model, const VectorForm<Poly>& psi1, int p, int q) {
    SecondClassSubspace out;
    out.bidegree = {p, q};
    if (q == 0) {
        return out;
    }
    ObstructionReport rep = obstruction_o1(model, psi1, p, q - 1);
    for (auto c : independent_columns(rep.matrix)) {
        out.generic_basis.push_back(rep.matrix.column(c));
    }
    out.generic_dim = out.generic_basis.size();
    return out;
}

std::vector<QVec> second_class_at(const DolbeaultModel& model, const VectorForm<Poly>& psi1, int p, int q,
                                  const Point& point) {
    std::vector<QVec> out;
    if (q == 0) {
        return out;
    }
    ObstructionReport rep = obstruction_o1(model, psi1, p, q - 1);
    const QMatrix m = evaluate(rep.matrix, complete_point(ring_of(psi1), point));
    for (auto c : rref(m).pivots) {
        out.push_back(m.column(c));
    }
    return out;
}

const JumpEntry& JumpTable::at(int p, int q) const {
    for (const auto& e : entries) {
        if (e.bidegree.p == p && e.bidegree.q == q) {
            return e;
        }
    }
    throw std::out_of_range("JumpTable: no entry for bidegree");
}

HodgeTable JumpTable::predicted_table() const {
    HodgeTable t;
    t.n = n;
    t.h.assign(static_cast<std::size_t>(n + 1), std::vector<std::size_t>(static_cast<std::size_t>(n + 1)));
    for (const auto& e : entries) {
        t.h[static_cast<std::size_t>(e.bidegree.p)][static_cast<std::size_t>(e.bidegree.q)] =
            static_cast<std::size_t>(e.predicted);
    }
    return t;
}

JumpTable jump_report(const DolbeaultModel& model, const VectorForm<Poly>& psi1, const Point& point) {
    const int n = model.dim();
    JumpTable t;
    t.n = n;
    t.point = complete_point(ring_of(psi1), point);
    std::map<Bidegree, std::size_t> ranks;
    for (int p = 0; p <= n; ++p) {
        for (int q = 0; q < n; ++q) {
            ranks[{p, q}] = specialized_rank(obstruction_o1(model, psi1, p, q).matrix, t.point);
        }
    }
    for (int p = 0; p <= n; ++p) {
        for (int q = 0; q <= n; ++q) {
            JumpEntry e;
            e.bidegree = {p, q};
            e.h0 = model.group(p, q).dim();
            e.first_class = q < n ? ranks.at({p, q}) : 0;
            e.second_class = q > 0 ? ranks.at({p, q - 1}) : 0;
            e.predicted = static_cast<long>(e.h0) - static_cast<long>(e.first_class) - static_cast<long>(e.second_class);
            if (e.predicted < 0) {
                throw InvariantError("jump accounting is negative at (" + std::to_string(p) + "," + std::to_string(q) +
                                     ")");
            }
            t.entries.push_back(e);
        }
    }
    return t;
}

// --- oracle -------------------------------------------------------------------

OracleResult oracle_hodge_at_point(const DeformationFamily& family, const Point& point) {
    const Point full = complete_point(ring_of(family.psi), point);
    constexpr long kMaxSteps = 16;
    for (long den = 1; den <= kMaxSteps; ++den) {
        const GR s(Rational(1, den));
        Point scaled;
        for (const auto& [name, v] : full) {
            scaled[name] = v * s;
        }
        VectorForm<GR> num = family.psi.map_coefficients([&](const Poly& c) { return c.eval(scaled); });
        DeformedStructure ds;
        try {
            ds = deformed_structure_at(family.spec, num);
        } catch (const NonInvertibleCoframe&) {
            continue;
        }
        if (!ds.structure) {
            std::string msg;
            for (std::size_t i = 0; i < ds.defect.size(); ++i) {
                if (!ds.defect[i].is_zero()) {
                    msg += " (0,2)-part of d f" + std::to_string(i + 1) + "(t) = " + ds.defect[i].str();
                }
            }
            throw IntegrabilityError("family is not integrable at this point:" + msg);
        }
        return {hodge_table(ds.structure->frame()), s, *ds.structure};
    }
    throw NonInvertibleCoframe("deformed coframe is degenerate along the whole sampled ray");
}

// --- Froelicher, witness --------------------------------------------------------

QMatrix frolicher_d1(const DolbeaultModel& model, int p, int q) {
    const int n = model.dim();
    const DolbeaultGroup& src = model.group(p, q);
    if (p == n) {
        return QMatrix(0, src.dim());
    }
    const DolbeaultGroup& dst = model.group(p + 1, q);
    std::vector<QVec> cols;
    for (const auto& alpha : src.representatives()) {
        cols.push_back(dst.project(model.spec().frame().del(alpha)));
    }
    return QMatrix::from_columns(dst.dim(), cols);
}

std::optional<Witness> parallelisable_witness(const DolbeaultModel& model) {
    const auto& spec = model.spec();
    const int n = spec.dim();
    if (!spec.is_parallelisable()) {
        throw std::invalid_argument("witness search needs a parallelisable structure (d phi of type (2,0) only)");
    }
    std::vector<int> closed;
    bool abelian = true;
    for (int j = 0; j < n; ++j) {
        if (spec.dphi(j).is_zero()) {
            closed.push_back(j);
        } else {
            abelian = false;
        }
    }
    if (abelian) {
        return std::nullopt;
    }
    const DolbeaultGroup& h11 = model.group(1, 1);
    for (int i = 0; i < n; ++i) {
        for (const auto& [m, c] : spec.dphi(i).terms()) {
            for (int k = 0; k < n; ++k) {
                if (!(m & (Mask{1} << k))) {
                    continue;
                }
                for (int j : closed) {
                    VectorForm<Poly> psi(n, 1);
                    psi.add(k, Mask{1} << (n + j), Poly(1));
                    if (!dbar_vector(spec, psi).is_zero()) {
                        continue;
                    }
                    Form<Poly> o = o1_form(model, psi, lift(phi(n, i + 1)));
                    PVec cls = h11.project(o);
                    if (std::any_of(cls.begin(), cls.end(), [](const Poly& x) { return !x.is_zero(); })) {
                        return Witness{i, k, j, psi, o, cls};
                    }
                }
            }
        }
    }
    throw InvariantError("no witness found although del is nonzero");
}

// --- points -------------------------------------------------------------------

Point complete_point(const RingPtr& ring, const Point& partial) {
    Point out;
    for (const auto& [name, v] : partial) {
        if (!ring || !ring->index_of(name)) {
            throw std::invalid_argument("unknown parameter '" + name + "'");
        }
    }
    if (!ring) {
        return out;
    }
    for (const auto& name : ring->names) {
        auto it = partial.find(name);
        out[name] = it == partial.end() ? GR() : it->second;
    }
    return out;
}

RingPtr ring_of(const VectorForm<Poly>& psi) {
    for (const auto& [k, c] : psi.terms()) {
        if (c.ring()) {
            return c.ring();
        }
    }
    return nullptr;
}

}  // namespace nilhodge
