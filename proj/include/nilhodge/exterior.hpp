#pragma once

// Bigraded invariant exterior algebra of a Lie algebra with complex
// structure. A frame has 2n generators: bit k (k < n) is phi_{k+1}, bit n+k
// is its conjugate. Monomials are bitmasks, so the canonical order (all
// holomorphic factors first, each index set increasing) is bit order.

#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nilhodge/coeff.hpp"
#include "nilhodge/linalg.hpp"

namespace nilhodge {

using Mask = std::uint32_t;
inline constexpr int kMaxDim = 12;

struct Bidegree {
    int p = 0;
    int q = 0;
    friend auto operator<=>(const Bidegree&, const Bidegree&) = default;
};

inline Mask hol_bits(int n) { return (Mask{1} << n) - 1; }
inline Mask anti_bits(int n) { return hol_bits(n) << n; }
inline int hol_count(Mask m, int n) { return std::popcount(m & hol_bits(n)); }
inline int anti_count(Mask m, int n) { return std::popcount(m & anti_bits(n)); }
inline Bidegree bidegree_of(Mask m, int n) { return {hol_count(m, n), anti_count(m, n)}; }

/// Sign of mono(a) ^ mono(b) relative to mono(a|b); 0 when they share a factor.
int wedge_sign(Mask a, Mask b);

/// `f1^f2^c1` (f = phi, c = conj phi, 1-based); `1` for the empty monomial.
std::string monomial_str(Mask m, int n);

/// Parses a wedge monomial such as `f2^f1` or `c1^f3`; returns the canonical
/// mask and the reordering sign (0 if a factor repeats).
std::pair<Mask, int> parse_monomial(std::string_view text, int n);

/// Canonical basis of Lambda^{p,q}, sorted by (I, J) lexicographically.
std::vector<Mask> bidegree_basis(int n, int p, int q);

/// Differential form with invariant coefficients in C.
template <class C>
class Form {
  public:
    using Terms = std::map<Mask, C>;

    Form() = default;
    explicit Form(int n) : n_(n) {}

    static Form monomial(int n, Mask m, C c = C(1)) {
        Form f(n);
        f.add(m, c);
        return f;
    }

    int dim() const { return n_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    C coefficient(Mask m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? C() : it->second;
    }

    void add(Mask m, const C& c) {
        if (nilhodge::is_zero(c)) {
            return;
        }
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (nilhodge::is_zero(it->second)) {
                terms_.erase(it);
            }
        }
    }

    /// Bidegree when homogeneous and nonzero.
    std::optional<Bidegree> bidegree() const {
        std::optional<Bidegree> b;
        for (const auto& [m, c] : terms_) {
            Bidegree bm = bidegree_of(m, n_);
            if (b && *b != bm) {
                return std::nullopt;
            }
            b = bm;
        }
        return b;
    }

    Form component(Bidegree b) const {
        Form out(n_);
        for (const auto& [m, c] : terms_) {
            if (bidegree_of(m, n_) == b) {
                out.terms_.emplace(m, c);
            }
        }
        return out;
    }

    Form operator-() const {
        Form out(n_);
        for (const auto& [m, c] : terms_) {
            out.terms_.emplace(m, -c);
        }
        return out;
    }
    Form& operator+=(const Form& o) {
        check_dim(o);
        for (const auto& [m, c] : o.terms_) {
            add(m, c);
        }
        return *this;
    }
    Form& operator-=(const Form& o) { return *this += -o; }
    friend Form operator+(Form a, const Form& b) { return a += b; }
    friend Form operator-(Form a, const Form& b) { return a -= b; }

    Form scaled(const C& s) const {
        Form out(n_);
        if (nilhodge::is_zero(s)) {
            return out;
        }
        for (const auto& [m, c] : terms_) {
            out.add(m, c * s);
        }
        return out;
    }

    template <class F>
    auto map_coefficients(F&& f) const -> Form<decltype(f(std::declval<const C&>()))> {
        Form<decltype(f(std::declval<const C&>()))> out(n_);
        for (const auto& [m, c] : terms_) {
            out.add(m, f(c));
        }
        return out;
    }

    friend bool operator==(const Form& a, const Form& b) { return a.n_ == b.n_ && a.terms_ == b.terms_; }

    /// Canonical text, e.g. `-t21*f1^f2^c1-t22*f1^f2^c2`.
    std::string str() const {
        if (terms_.empty()) {
            return "0";
        }
        std::string out;
        for (const auto& [m, c] : terms_) {
            std::string coef = to_string(c);
            std::string mono = monomial_str(m, n_);
            std::string term;
            if (m == 0) {
                term = needs_parens(coef) ? "(" + coef + ")" : coef;
            } else if (coef == "1") {
                term = mono;
            } else if (coef == "-1") {
                term = "-" + mono;
            } else {
                term = (needs_parens(coef) ? "(" + coef + ")" : coef) + "*" + mono;
            }
            if (!out.empty() && term.front() != '-') {
                out += '+';
            }
            out += term;
        }
        return out;
    }

  private:
    static bool needs_parens(const std::string& s) {
        return s.find_first_of("+-", 1) != std::string::npos;
    }
    void check_dim(const Form& o) const {
        if (o.n_ != n_ && !o.terms_.empty() && !terms_.empty()) {
            throw std::invalid_argument("Form: dimension mismatch");
        }
    }
    template <class D>
    friend class Form;

    int n_ = 0;
    Terms terms_;
};

template <class C>
Form<C> wedge(const Form<C>& a, const Form<C>& b) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("wedge: forms belong to different algebras");
    }
    Form<C> out(a.dim());
    for (const auto& [ma, ca] : a.terms()) {
        for (const auto& [mb, cb] : b.terms()) {
            int s = wedge_sign(ma, mb);
            if (s == 0) {
                continue;
            }
            C c = ca * cb;
            out.add(ma | mb, s > 0 ? c : -c);
        }
    }
    return out;
}

/// phi_k and its conjugate, k 1-based.
template <class C = GaussianRational>
Form<C> phi(int n, int k) {
    return Form<C>::monomial(n, Mask{1} << (k - 1));
}
template <class C = GaussianRational>
Form<C> phibar(int n, int k) {
    return Form<C>::monomial(n, Mask{1} << (n + k - 1));
}

template <class C>
struct DifferentialParts {
    Form<C> del;     // bidegree (+1, 0)
    Form<C> delbar;  // bidegree (0, +1)
    Form<C> defect;  // bidegree (-1, +2); zero for integrable frames
};

/// Differential graded algebra on 2n generators with d given on generators.
template <class C>
class Frame {
  public:
    Frame() = default;
    Frame(int n, std::vector<Form<C>> d_generators) : n_(n), dgen_(std::move(d_generators)) {
        if (static_cast<int>(dgen_.size()) != 2 * n_) {
            throw std::invalid_argument("Frame: need d of all 2n generators");
        }
    }

    int dim() const { return n_; }
    const Form<C>& d_generator(int g) const { return dgen_[static_cast<std::size_t>(g)]; }

    /// Leibniz extension of d to arbitrary forms.
    Form<C> d(const Form<C>& a) const {
        Form<C> out(n_);
        for (const auto& [m, c] : a.terms()) {
            out += d_monomial(m).scaled(c);
        }
        return out;
    }

    DifferentialParts<C> split(const Form<C>& a) const {
        DifferentialParts<C> parts{Form<C>(n_), Form<C>(n_), Form<C>(n_)};
        for (const auto& [m, c] : a.terms()) {
            const int h = hol_count(m, n_);
            const Form<C> dmono = d_monomial(m);
            for (const auto& [dm, dc] : dmono.terms()) {
                const int dh = hol_count(dm, n_) - h;
                C v = dc * c;
                if (dh == 1) {
                    parts.del.add(dm, v);
                } else if (dh == 0) {
                    parts.delbar.add(dm, v);
                } else {
                    parts.defect.add(dm, v);
                }
            }
        }
        return parts;
    }

    Form<C> del(const Form<C>& a) const { return split(a).del; }
    Form<C> delbar(const Form<C>& a) const { return split(a).delbar; }

  private:
    Form<C> d_monomial(Mask m) const {
        Form<C> out(n_);
        // d(g1 ^ ... ^ gk) = sum_j (-1)^(j-1) g1 ^ .. ^ d(gj) ^ .. ^ gk
        int position = 0;
        for (int g = 0; g < 2 * n_; ++g) {
            const Mask bit = Mask{1} << g;
            if (!(m & bit)) {
                continue;
            }
            const Mask before = m & (bit - 1);
            const Mask after = m & ~(bit | (bit - 1));
            Form<C> left = Form<C>::monomial(n_, before);
            Form<C> right = Form<C>::monomial(n_, after);
            Form<C> term = wedge(wedge(left, dgen_[static_cast<std::size_t>(g)]), right);
            out += (position % 2 == 0) ? term : -term;
            ++position;
        }
        return out;
    }

    int n_ = 0;
    std::vector<Form<C>> dgen_;
};

/// Matrix of the (0,1)- or (1,0)-part of d between canonical bases.
template <class C>
Matrix<C> delbar_matrix(const Frame<C>& frame, int p, int q) {
    const int n = frame.dim();
    auto src = bidegree_basis(n, p, q);
    auto dst = bidegree_basis(n, p, q + 1);
    Matrix<C> m(dst.size(), src.size());
    if (dst.empty() || src.empty()) {
        return m;
    }
    std::map<Mask, std::size_t> row_of;
    for (std::size_t r = 0; r < dst.size(); ++r) {
        row_of[dst[r]] = r;
    }
    for (std::size_t j = 0; j < src.size(); ++j) {
        Form<C> img = frame.delbar(Form<C>::monomial(n, src[j]));
        for (const auto& [mask, c] : img.terms()) {
            m(row_of.at(mask), j) = c;
        }
    }
    return m;
}

template <class C>
Matrix<C> del_matrix(const Frame<C>& frame, int p, int q) {
    const int n = frame.dim();
    auto src = bidegree_basis(n, p, q);
    auto dst = bidegree_basis(n, p + 1, q);
    Matrix<C> m(dst.size(), src.size());
    if (dst.empty() || src.empty()) {
        return m;
    }
    std::map<Mask, std::size_t> row_of;
    for (std::size_t r = 0; r < dst.size(); ++r) {
        row_of[dst[r]] = r;
    }
    for (std::size_t j = 0; j < src.size(); ++j) {
        Form<C> img = frame.del(Form<C>::monomial(n, src[j]));
        for (const auto& [mask, c] : img.terms()) {
            m(row_of.at(mask), j) = c;
        }
    }
    return m;
}

/// Coordinates of a (p,q)-form in the canonical basis; throws if the form has
/// other components.
template <class C>
Vec<C> coordinates(const Form<C>& f, int p, int q) {
    auto basis = bidegree_basis(f.dim(), p, q);
    std::map<Mask, std::size_t> idx;
    for (std::size_t k = 0; k < basis.size(); ++k) {
        idx[basis[k]] = k;
    }
    Vec<C> v(basis.size());
    for (const auto& [m, c] : f.terms()) {
        auto it = idx.find(m);
        if (it == idx.end()) {
            throw std::invalid_argument("coordinates: form has a component outside the requested bidegree");
        }
        v[it->second] = c;
    }
    return v;
}

template <class C>
Form<C> form_from_coordinates(int n, int p, int q, const Vec<C>& v) {
    auto basis = bidegree_basis(n, p, q);
    if (basis.size() != v.size()) {
        throw std::invalid_argument("form_from_coordinates: dimension mismatch");
    }
    Form<C> f(n);
    for (std::size_t k = 0; k < v.size(); ++k) {
        f.add(basis[k], v[k]);
    }
    return f;
}

// ---------------------------------------------------------------------------

struct Diagnostic {
    enum class Severity { Error, Warning };
    Severity severity = Severity::Error;
    std::string code;
    std::string message;
};

bool has_errors(const std::vector<Diagnostic>& diags);

/// Structure constants dphi_k = sum A^k_ij phi_i^phi_j + sum B^k_ij phi_i^conj(phi_j).
/// The stored shape excludes conj^conj components (integrability).
class ComplexStructureSpec {
  public:
    ComplexStructureSpec() = default;
    /// dphi[k] is d(phi_{k+1}); throws std::invalid_argument on a
    /// (0,2)-component or a non-2-form.
    ComplexStructureSpec(int n, std::vector<Form<GaussianRational>> dphi);

    static ComplexStructureSpec torus(int n);

    int dim() const { return n_; }
    const Form<GaussianRational>& dphi(int k) const { return dphi_[static_cast<std::size_t>(k)]; }
    const std::vector<Form<GaussianRational>>& dphis() const { return dphi_; }

    /// 0-based indices; A for i<j.
    GaussianRational holo_constant(int k, int i, int j) const;
    GaussianRational mixed_constant(int k, int i, int j) const;

    /// Frame with d(conj phi_k) = conj(d phi_k).
    const Frame<GaussianRational>& frame() const { return frame_; }

    bool is_parallelisable() const;

    friend bool operator==(const ComplexStructureSpec& a, const ComplexStructureSpec& b) {
        return a.n_ == b.n_ && a.dphi_ == b.dphi_;
    }

  private:
    int n_ = 0;
    std::vector<Form<GaussianRational>> dphi_;
    Frame<GaussianRational> frame_;
};

Form<GaussianRational> conjugate(const Form<GaussianRational>& f);

/// d^2 = 0 on every generator and conjugate (errors); nilpotent shape
/// (warnings).
std::vector<Diagnostic> validate_spec(const ComplexStructureSpec& spec);

/// Sum of psi^i_J theta_i (x) conj(phi)_J, a T^{1,0}-valued (0,q)-form.
template <class C>
class VectorForm {
  public:
    using Key = std::pair<int, Mask>;  // (i 0-based, anti-holomorphic mask)

    VectorForm() = default;
    VectorForm(int n, int q) : n_(n), q_(q) {}

    int dim() const { return n_; }
    int degree() const { return q_; }
    const std::map<Key, C>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    /// i 0-based; `anti` must be a mask of q conjugate generators.
    void add(int i, Mask anti, const C& c) {
        if (anti & ~anti_bits(n_) || std::popcount(anti) != q_ || i < 0 || i >= n_) {
            throw std::invalid_argument("VectorForm::add: bad index");
        }
        if (nilhodge::is_zero(c)) {
            return;
        }
        auto [it, inserted] = terms_.try_emplace(Key{i, anti}, c);
        if (!inserted) {
            it->second += c;
            if (nilhodge::is_zero(it->second)) {
                terms_.erase(it);
            }
        }
    }

    C coefficient(int i, Mask anti) const {
        auto it = terms_.find(Key{i, anti});
        return it == terms_.end() ? C() : it->second;
    }

    /// The (0,q)-form psi^i.
    Form<C> component(int i) const {
        Form<C> f(n_);
        for (const auto& [k, c] : terms_) {
            if (k.first == i) {
                f.add(k.second, c);
            }
        }
        return f;
    }

    VectorForm& operator+=(const VectorForm& o) {
        for (const auto& [k, c] : o.terms_) {
            add(k.first, k.second, c);
        }
        return *this;
    }
    friend VectorForm operator+(VectorForm a, const VectorForm& b) { return a += b; }
    friend bool operator==(const VectorForm& a, const VectorForm& b) {
        return a.n_ == b.n_ && a.q_ == b.q_ && a.terms_ == b.terms_;
    }

    template <class F>
    auto map_coefficients(F&& f) const -> VectorForm<decltype(f(std::declval<const C&>()))> {
        VectorForm<decltype(f(std::declval<const C&>()))> out(n_, q_);
        for (const auto& [k, c] : terms_) {
            out.add(k.first, k.second, f(c));
        }
        return out;
    }

    /// e.g. `t11*th1.c1-(t11*t22-t12*t21)*th3.c3`.
    std::string str() const {
        if (terms_.empty()) {
            return "0";
        }
        std::string out;
        for (const auto& [k, c] : terms_) {
            std::string coef = to_string(c);
            std::string basis = "th" + std::to_string(k.first + 1) + "." + monomial_str(k.second, n_);
            std::string term;
            if (coef == "1") {
                term = basis;
            } else if (coef == "-1") {
                term = "-" + basis;
            } else if (coef.find_first_of("+-", 1) != std::string::npos) {
                term = "(" + coef + ")*" + basis;
            } else {
                term = coef + "*" + basis;
            }
            if (!out.empty() && term.front() != '-') {
                out += '+';
            }
            out += term;
        }
        return out;
    }

  private:
    int n_ = 0;
    int q_ = 0;
    std::map<Key, C> terms_;
};

/// theta_i contracted into a monomial: sign and remaining mask, or nullopt.
std::optional<std::pair<int, Mask>> interior(int i, Mask m);

/// iota_psi(alpha) = sum psi^i_J (theta_i -| alpha) ^ conj(phi)_J.
template <class C>
Form<C> contract(const VectorForm<C>& psi, const Form<C>& alpha) {
    if (psi.dim() != alpha.dim() && !psi.is_zero() && !alpha.is_zero()) {
        throw std::invalid_argument("contract: dimension mismatch");
    }
    const int n = alpha.dim();
    Form<C> out(n);
    for (const auto& [key, pc] : psi.terms()) {
        for (const auto& [m, ac] : alpha.terms()) {
            auto in = interior(key.first, m);
            if (!in) {
                continue;
            }
            const int s2 = wedge_sign(in->second, key.second);
            if (s2 == 0) {
                continue;
            }
            C c = pc * ac;
            out.add(in->second | key.second, in->first * s2 > 0 ? c : -c);
        }
    }
    return out;
}

/// Algebra homomorphism given by images of the 2n generators.
template <class C>
Form<C> substitute(const Form<C>& f, const std::vector<Form<C>>& images) {
    const int n = f.dim();
    Form<C> out(n);
    for (const auto& [m, c] : f.terms()) {
        Form<C> acc = Form<C>::monomial(n, 0, c);
        for (int g = 0; g < 2 * n; ++g) {
            if (m & (Mask{1} << g)) {
                acc = wedge(acc, images[static_cast<std::size_t>(g)]);
            }
        }
        out += acc;
    }
    return out;
}

/// Deformed structure over a polynomial/jet coefficient ring in the mixed
/// coframe a_i = phi_i + psi^i, b_j = conj(phi_j). Generator bits keep the
/// same meaning (a_i in the holomorphic slots, b_j in the conjugate slots).
/// d on F^p/F^{p+1} (the delbar part of `frame`) is the Dolbeault operator
/// of the deformed structure; `defect[i]` is the (0,2)-part of d a_i.
struct MixedFrame {
    Frame<Poly> frame;
    std::vector<Form<Poly>> defect;

    bool integrable() const;
};

MixedFrame deformed_coframe(const ComplexStructureSpec& spec, const VectorForm<Poly>& psi);

/// Frame of the undeformed spec with polynomial coefficients.
Frame<Poly> lift_frame(const Frame<GaussianRational>& frame);
Form<Poly> lift(const Form<GaussianRational>& f);

class NonInvertibleCoframe : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

struct DeformedStructure {
    std::optional<ComplexStructureSpec> structure;  // set when the defect vanishes
    std::vector<Form<GaussianRational>> defect;
};

/// Deformed structure at a numeric point, in the genuine coframe
/// {phi_i + psi^i, conj}. Throws NonInvertibleCoframe when that coframe is
/// degenerate.
DeformedStructure deformed_structure_at(const ComplexStructureSpec& spec, const VectorForm<GaussianRational>& psi);

}  // namespace nilhodge
