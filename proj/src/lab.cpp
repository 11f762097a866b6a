#include "nilhodge/lab.hpp"

#include <algorithm>

namespace nilhodge {

namespace {

using GR = GaussianRational;

Poly t_power(const RingPtr& ring, unsigned k, const GR& c) { return Poly::monomial(ring, Exponents{k}, c); }

std::vector<QVec> span_basis(std::size_t ambient, const std::vector<QVec>& vs) {
    SpanBuilder span(ambient);
    std::vector<QVec> out;
    for (const auto& v : vs) {
        if (span.add(v)) {
            out.push_back(v);
        }
    }
    return out;
}

bool same_span(std::size_t ambient, const std::vector<QVec>& a, const std::vector<QVec>& b) {
    SpanBuilder sa(ambient);
    SpanBuilder sb(ambient);
    for (const auto& v : a) {
        sa.add(v);
    }
    for (const auto& v : b) {
        sb.add(v);
    }
    if (sa.dim() != sb.dim()) {
        return false;
    }
    return std::all_of(b.begin(), b.end(), [&](const QVec& v) { return sa.contains(v); });
}

QVec project_or_breach(const CohomologyBasis& h, const QVec& v, const char* what) {
    try {
        return h.project(v);
    } catch (const NotClosedError&) {
        throw InvariantError(std::string(what) + " is not closed at t = 0");
    }
}

}  // namespace

FreeComplex::FreeComplex(std::string parameter, std::vector<std::size_t> ranks, std::vector<PMatrix> d)
    : parameter_(std::move(parameter)), ranks_(std::move(ranks)) {
    if (ranks_.empty()) {
        throw std::invalid_argument("free complex needs at least one term");
    }
    if (d.size() + 1 != ranks_.size()) {
        throw std::invalid_argument("free complex with " + std::to_string(ranks_.size()) + " terms needs " +
                                    std::to_string(ranks_.size() - 1) + " differentials, got " +
                                    std::to_string(d.size()));
    }
    ring_ = make_ring({parameter_});
    for (std::size_t q = 0; q < d.size(); ++q) {
        const PMatrix& m = d[q];
        if (m.rows() != ranks_[q + 1] || m.cols() != ranks_[q]) {
            throw std::invalid_argument("d^" + std::to_string(q) + " must be " + std::to_string(ranks_[q + 1]) + "x" +
                                        std::to_string(ranks_[q]));
        }
        PMatrix fixed(m.rows(), m.cols());
        for (std::size_t r = 0; r < m.rows(); ++r) {
            for (std::size_t c = 0; c < m.cols(); ++c) {
                const Poly& e = m(r, c);
                if (!e.ring()) {
                    fixed(r, c) = Poly(ring_, e.constant_term());
                } else if (e.ring()->names == ring_->names) {
                    fixed(r, c) = e.untruncated().with_ring(ring_);
                } else {
                    throw std::invalid_argument("d^" + std::to_string(q) + " has an entry outside Q(i)[" +
                                                parameter_ + "]");
                }
            }
        }
        d_.push_back(std::move(fixed));
    }
}

std::size_t FreeComplex::rank(int q) const {
    return q < 0 || q >= length() ? 0 : ranks_[static_cast<std::size_t>(q)];
}

PMatrix FreeComplex::differential(int q) const {
    if (q < 0 || q + 1 >= length()) {
        return PMatrix(rank(q + 1), rank(q));
    }
    return d_[static_cast<std::size_t>(q)];
}

QMatrix FreeComplex::coefficient(int q, unsigned k) const {
    QMatrix out(rank(q + 1), rank(q));
    if (q < 0 || q + 1 >= length()) {
        return out;
    }
    const PMatrix& m = d_[static_cast<std::size_t>(q)];
    const Exponents e{k};
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            auto it = m(r, c).terms().find(e);
            if (it != m(r, c).terms().end()) {
                out(r, c) = it->second;
            }
        }
    }
    return out;
}

unsigned FreeComplex::max_degree() const {
    int deg = 0;
    for (const auto& m : d_) {
        for (std::size_t r = 0; r < m.rows(); ++r) {
            for (std::size_t c = 0; c < m.cols(); ++c) {
                deg = std::max(deg, m(r, c).degree());
            }
        }
    }
    return static_cast<unsigned>(deg);
}

std::size_t FreeComplex::total_rank() const {
    std::size_t s = 0;
    for (auto r : ranks_) {
        s += r;
    }
    return s;
}

unsigned FreeComplex::order_bound() const { return max_degree() * static_cast<unsigned>(total_rank()) + 1; }

std::vector<Diagnostic> validate_complex(const FreeComplex& c) {
    std::vector<Diagnostic> out;
    for (int q = 0; q + 2 < c.length(); ++q) {
        const PMatrix comp = c.differential(q + 1) * c.differential(q);
        for (std::size_t r = 0; r < comp.rows() && out.empty(); ++r) {
            for (std::size_t col = 0; col < comp.cols(); ++col) {
                if (!comp(r, col).is_zero()) {
                    out.push_back({Diagnostic::Severity::Error, "composition",
                                   "d^" + std::to_string(q + 1) + " * d^" + std::to_string(q) + " is nonzero at (q=" +
                                       std::to_string(q) + ", row=" + std::to_string(r) + ", col=" +
                                       std::to_string(col) + "): " + comp(r, col).str()});
                    break;
                }
            }
        }
        if (!out.empty()) {
            break;
        }
    }
    return out;
}

std::vector<HDims> h_dims(const FreeComplex& c) {
    std::vector<HDims> out;
    for (int q = 0; q < c.length(); ++q) {
        const std::size_t p = c.rank(q);
        HDims h;
        h.at_zero = p - rank(c.at_zero(q)) - rank(c.at_zero(q - 1));
        h.generic = p - generic_rank(c.differential(q)) - generic_rank(c.differential(q - 1));
        out.push_back(h);
    }
    return out;
}

CohomologyBasis central_cohomology(const FreeComplex& c, int q) {
    return CohomologyBasis::compute(c.at_zero(q - 1), c.at_zero(q));
}

QVec coefficient(const PVec& v, unsigned k) {
    QVec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (const auto& [e, c] : v[i].terms()) {
            if (total_degree(e) == k) {
                out[i] = c;
            }
        }
    }
    return out;
}

PVec truncate(const PVec& v, unsigned degree) {
    PVec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (unsigned k = 0; k <= degree; ++k) {
            out[i] += v[i].homogeneous_part(k);
        }
    }
    return out;
}

QMatrix toeplitz(const FreeComplex& c, int q, unsigned blocks) {
    const std::size_t P = c.rank(q);
    const std::size_t R = c.rank(q + 1);
    QMatrix t(R * blocks, P * blocks);
    for (unsigned k = 0; k < blocks; ++k) {
        const QMatrix dk = c.coefficient(q, k);
        if (dk.is_zero_matrix()) {
            continue;
        }
        for (unsigned col = 0; col + k < blocks; ++col) {
            const unsigned row = col + k;
            for (std::size_t i = 0; i < R; ++i) {
                for (std::size_t j = 0; j < P; ++j) {
                    t(row * R + i, col * P + j) = dk(i, j);
                }
            }
        }
    }
    return t;
}

LabObstruction o_n_q(const FreeComplex& c, int q, const PVec& alpha, unsigned n) {
    if (n == 0) {
        throw std::invalid_argument("o_n needs n >= 1");
    }
    if (alpha.size() != c.rank(q)) {
        throw std::invalid_argument("cochain has " + std::to_string(alpha.size()) + " entries, E^" +
                                    std::to_string(q) + " has rank " + std::to_string(c.rank(q)));
    }
    const PVec image = c.differential(q).apply(truncate(alpha, n - 1));
    for (unsigned k = 0; k < n; ++k) {
        if (!is_zero_vec(coefficient(image, k))) {
            throw ExtensionOrderError("d^" + std::to_string(q) + "(alpha) has a nonzero t^" + std::to_string(k) +
                                          " coefficient: alpha is not an extension of order " + std::to_string(n - 1),
                                      k);
        }
    }
    LabObstruction ob;
    ob.n = n;
    ob.q = q;
    ob.representative = coefficient(image, n);
    ob.coordinates = project_or_breach(central_cohomology(c, q + 1), ob.representative, "o_n representative");
    return ob;
}

std::optional<PVec> rho_preimage(const FreeComplex& c, int q, const QVec& sigma, unsigned i) {
    const std::size_t P = c.rank(q);
    const std::size_t R = c.rank(q + 1);
    QVec rhs(R * (i + 1));
    for (std::size_t r = 0; r < R; ++r) {
        rhs[i * R + r] = sigma[r];
    }
    auto x = solve(toeplitz(c, q, i + 1), rhs);
    if (!x) {
        return std::nullopt;
    }
    PVec gamma(P, Poly(c.ring(), GR()));
    for (unsigned k = 0; k <= i; ++k) {
        for (std::size_t j = 0; j < P; ++j) {
            gamma[j] += t_power(c.ring(), k, (*x)[k * P + j]);
        }
    }
    return gamma;
}

bool o_n_i_vanishes(const FreeComplex& c, int q, const PVec& alpha, unsigned n, unsigned i) {
    if (i > n) {
        throw std::invalid_argument("o_{n,i} needs i <= n");
    }
    const LabObstruction ob = o_n_q(c, q, alpha, n);
    if (ob.is_zero()) {
        return true;
    }
    return rho_preimage(c, q, ob.representative, i).has_value();
}

ExtendStep extend_step(const FreeComplex& c, int q, const PVec& alpha, unsigned n) {
    ExtendStep out;
    LabObstruction ob = o_n_q(c, q, alpha, n);
    QVec rhs = ob.representative;
    for (auto& x : rhs) {
        x = -x;
    }
    auto x = solve(c.at_zero(q), rhs);
    if (!x) {
        out.obstruction = std::move(ob);
        return out;
    }
    PVec next = truncate(alpha, n - 1);
    for (std::size_t j = 0; j < next.size(); ++j) {
        next[j] += t_power(c.ring(), n, (*x)[j]);
    }
    out.extension = std::move(next);
    return out;
}

ClassSplit classify_first_class(const FreeComplex& c, int q, unsigned order_bound) {
    ClassSplit out;
    out.q = q;
    out.order_bound = order_bound;
    const CohomologyBasis h = central_cohomology(c, q);
    const std::size_t P = c.rank(q);
    std::vector<QVec> reached;
    for (const auto& v : kernel_basis(toeplitz(c, q, order_bound + 1))) {
        QVec v0(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(P));
        reached.push_back(project_or_breach(h, v0, "constant term of an extension"));
    }
    SpanBuilder span(h.dim());
    for (const auto& v : reached) {
        if (span.add(v)) {
            out.complement.push_back(v);
        }
    }
    for (std::size_t k = 0; k < h.dim(); ++k) {
        QVec e(h.dim());
        e[k] = GR(1);
        if (span.add(e)) {
            out.subspace.push_back(e);
        }
    }
    return out;
}

SecondClass classify_second_class(const FreeComplex& c, int q) {
    SecondClass out;
    out.q = q;
    out.order_bound = c.order_bound();
    if (q < 1 || q > c.top()) {
        return out;
    }
    const CohomologyBasis h = central_cohomology(c, q);
    const std::size_t P = c.rank(q);
    const RingPtr ring = c.ring();

    // (a) Saturate Im d^{q-1}: whenever a constant combination of generators
    // vanishes at 0, divide it by t and let it replace a generator.
    const PMatrix d = c.differential(q - 1);
    // Independent generators span the same K-space; each division by t then
    // lowers the t-order of their determinant, so the loop terminates.
    std::vector<PVec> gens;
    for (auto j : independent_columns(d)) {
        gens.push_back(d.column(j));
    }
    const std::size_t guard = 64 + 4 * static_cast<std::size_t>(out.order_bound) * (gens.size() + 1);
    for (std::size_t it = 0;; ++it) {
        if (it > guard) {
            throw InvariantError("saturation of the image did not terminate");
        }
        std::vector<QVec> at0;
        for (const auto& g : gens) {
            at0.push_back(coefficient(g, 0));
        }
        const auto ker = kernel_basis(QMatrix::from_columns(P, at0));
        if (gens.empty() || ker.empty()) {
            break;
        }
        const QVec& w = ker.front();
        std::size_t free = 0;
        for (std::size_t j = 0; j < w.size(); ++j) {
            if (!w[j].is_zero()) {
                free = j;
            }
        }
        PVec comb(P, Poly(ring, GR()));
        for (std::size_t j = 0; j < gens.size(); ++j) {
            if (w[j].is_zero()) {
                continue;
            }
            for (std::size_t r = 0; r < P; ++r) {
                comb[r] += gens[j][r] * Poly(ring, w[j]);
            }
        }
        if (std::all_of(comb.begin(), comb.end(), [](const Poly& x) { return x.is_zero(); })) {
            throw InvariantError("independent generators became dependent during saturation");
        }
        const Poly t = Poly::variable(ring, c.parameter());
        for (auto& x : comb) {
            x = Poly::divide_exact(x, t);
        }
        gens[free] = std::move(comb);
    }
    std::vector<QVec> sat;
    for (const auto& g : gens) {
        sat.push_back(project_or_breach(h, coefficient(g, 0), "saturated image vector"));
    }
    out.saturation = span_basis(h.dim(), sat);

    // (b) Classes o_n^{q-1}(alpha) over all extensions alpha of order n-1.
    const std::size_t Pm = c.rank(q - 1);
    std::vector<QVec> hits;
    for (unsigned n = 1; n <= out.order_bound; ++n) {
        for (const auto& v : kernel_basis(toeplitz(c, q - 1, n))) {
            QVec top(P);
            for (unsigned k = 0; k < n; ++k) {
                const QMatrix dk = c.coefficient(q - 1, n - k);
                QVec ak(v.begin() + static_cast<std::ptrdiff_t>(k * Pm),
                        v.begin() + static_cast<std::ptrdiff_t>((k + 1) * Pm));
                const QVec img = dk.apply(ak);
                for (std::size_t r = 0; r < P; ++r) {
                    top[r] += img[r];
                }
            }
            hits.push_back(project_or_breach(h, top, "jet obstruction"));
        }
    }
    out.jet_search = span_basis(h.dim(), hits);

    if (!same_span(h.dim(), out.saturation, out.jet_search)) {
        throw InvariantError("second-class methods disagree in degree " + std::to_string(q) + ": saturation gives " +
                             std::to_string(out.saturation.size()) + ", jet search gives " +
                             std::to_string(out.jet_search.size()));
    }
    out.basis = out.saturation;
    return out;
}

Primitive reduce_to_primitive(const FreeComplex& c, int q, const PVec& alpha, unsigned n) {
    const LabObstruction start = o_n_q(c, q, alpha, n);
    if (start.is_zero()) {
        throw std::invalid_argument("reduce_to_primitive needs o_n(alpha) != 0");
    }
    Primitive out;
    out.n = n;
    out.alpha = truncate(alpha, n - 1);
    // Invariant: o_m(current) has representative start.representative.
    for (unsigned m = n; m >= 1; --m) {
        auto gamma = rho_preimage(c, q, start.representative, m - 1);
        if (!gamma) {
            out.n = m;
            break;
        }
        if (m == 1) {
            throw InvariantError("rho_0 of a nonzero class vanished");
        }
        out.alpha = truncate(*gamma, m - 2);
        ++out.steps;
    }
    out.leading = o_n_q(c, q, out.alpha, out.n);
    if (!(out.leading.coordinates == start.coordinates)) {
        throw InvariantError("descent changed the obstruction class");
    }
    if (o_n_i_vanishes(c, q, out.alpha, out.n, out.n - 1)) {
        throw InvariantError("descent ended on a vanishing leading obstruction");
    }
    return out;
}

JumpAccounting jump_accounting(const FreeComplex& c, int q) {
    JumpAccounting a;
    a.q = q;
    a.order_bound = c.order_bound();
    const std::size_t P = c.rank(q);
    const std::size_t k0 = P - rank(c.at_zero(q));
    const std::size_t kg = P - generic_rank(c.differential(q));
    const std::size_t r0 = rank(c.at_zero(q - 1));
    const std::size_t rg = generic_rank(c.differential(q - 1));
    a.h_zero = k0 - r0;
    a.h_generic = kg - rg;
    a.kernel_drop = k0 - kg;
    a.image_rise = rg - r0;
    a.first_class = classify_first_class(c, q, a.order_bound).subspace.size();
    a.second_class = classify_second_class(c, q).basis.size();
    if (a.h_zero - a.h_generic != a.kernel_drop + a.image_rise) {
        a.consistent = false;
        a.note += "h-drop differs from kernel-drop + image-rise; ";
    }
    if (a.first_class != a.kernel_drop) {
        a.consistent = false;
        a.note += "first-class dimension differs from kernel drop; ";
    }
    if (a.second_class != a.image_rise) {
        a.consistent = false;
        a.note += "second-class dimension differs from image rise; ";
    }
    return a;
}

}  // namespace nilhodge
