#include "nilhodge/exterior.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

namespace nilhodge {

int wedge_sign(Mask a, Mask b) {
    if (a & b) {
        return 0;
    }
    int inversions = 0;
    for (Mask rest = b; rest; rest &= rest - 1) {
        const int y = std::countr_zero(rest);
        const Mask above = ~((Mask{2} << y) - 1);
        inversions += std::popcount(a & above);
    }
    return inversions % 2 == 0 ? 1 : -1;
}

std::string monomial_str(Mask m, int n) {
    if (m == 0) {
        return "1";
    }
    std::string out;
    for (int g = 0; g < 2 * n; ++g) {
        if (!(m & (Mask{1} << g))) {
            continue;
        }
        if (!out.empty()) {
            out += '^';
        }
        out += g < n ? "f" + std::to_string(g + 1) : "c" + std::to_string(g - n + 1);
    }
    return out;
}

std::pair<Mask, int> parse_monomial(std::string_view text, int n) {
    Mask acc = 0;
    int sign = 1;
    std::size_t pos = 0;
    auto fail = [&](const std::string& msg) {
        throw ParseError("column " + std::to_string(pos + 1) + ": " + msg + " in '" + std::string(text) + "'",
                         pos + 1);
    };
    if (text == "1") {
        return {0, 1};
    }
    while (pos < text.size()) {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
            ++pos;
        }
        if (pos >= text.size()) {
            fail("expected a generator");
        }
        const char kind = text[pos];
        if (kind != 'f' && kind != 'c') {
            fail("expected 'f<k>' or 'c<k>'");
        }
        ++pos;
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            ++pos;
        }
        if (start == pos) {
            fail("expected a generator index");
        }
        const int k = std::stoi(std::string(text.substr(start, pos - start)));
        if (k < 1 || k > n) {
            fail("generator index out of range 1.." + std::to_string(n));
        }
        const Mask bit = Mask{1} << (kind == 'f' ? k - 1 : n + k - 1);
        const int s = wedge_sign(acc, bit);
        if (s == 0) {
            return {acc | bit, 0};
        }
        sign *= s;
        acc |= bit;
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
            ++pos;
        }
        if (pos < text.size()) {
            if (text[pos] != '^') {
                fail("expected '^'");
            }
            ++pos;
        }
    }
    return {acc, sign};
}

namespace {

void combinations(int n, int k, int start, Mask acc, std::vector<Mask>& out) {
    if (k == 0) {
        out.push_back(acc);
        return;
    }
    for (int i = start; i <= n - k; ++i) {
        combinations(n, k - 1, i + 1, acc | (Mask{1} << i), out);
    }
}

}  // namespace

std::vector<Mask> bidegree_basis(int n, int p, int q) {
    std::vector<Mask> out;
    if (p < 0 || q < 0 || p > n || q > n) {
        return out;
    }
    std::vector<Mask> hol;
    std::vector<Mask> anti;
    combinations(n, p, 0, 0, hol);
    combinations(n, q, 0, 0, anti);
    for (Mask i : hol) {
        for (Mask j : anti) {
            out.push_back(i | (j << n));
        }
    }
    return out;
}

bool has_errors(const std::vector<Diagnostic>& diags) {
    return std::any_of(diags.begin(), diags.end(),
                       [](const Diagnostic& d) { return d.severity == Diagnostic::Severity::Error; });
}

Form<GaussianRational> conjugate(const Form<GaussianRational>& f) {
    const int n = f.dim();
    Form<GaussianRational> out(n);
    for (const auto& [m, c] : f.terms()) {
        const Mask hol = m & hol_bits(n);
        const Mask anti = (m & anti_bits(n)) >> n;
        const int moves = std::popcount(hol) * std::popcount(anti);
        const Mask swapped = anti | (hol << n);
        out.add(swapped, moves % 2 == 0 ? c.conj() : -c.conj());
    }
    return out;
}

ComplexStructureSpec::ComplexStructureSpec(int n, std::vector<Form<GaussianRational>> dphi)
    : n_(n), dphi_(std::move(dphi)) {
    if (n_ < 1 || n_ > kMaxDim) {
        throw std::invalid_argument("complex dimension must be in 1.." + std::to_string(kMaxDim));
    }
    if (static_cast<int>(dphi_.size()) != n_) {
        throw std::invalid_argument("need one structure equation per generator");
    }
    std::vector<Form<GaussianRational>> dgen;
    for (int k = 0; k < n_; ++k) {
        auto& f = dphi_[static_cast<std::size_t>(k)];
        if (f.dim() != n_) {
            f = Form<GaussianRational>(n_) + f;
        }
        for (const auto& [m, c] : f.terms()) {
            if (std::popcount(m) != 2) {
                throw std::invalid_argument("d f" + std::to_string(k + 1) + " must be a 2-form");
            }
            if (anti_count(m, n_) == 2) {
                throw std::invalid_argument("d f" + std::to_string(k + 1) +
                                            " has a (0,2) component: the structure is not integrable");
            }
        }
        dgen.push_back(f);
    }
    for (int k = 0; k < n_; ++k) {
        dgen.push_back(conjugate(dphi_[static_cast<std::size_t>(k)]));
    }
    frame_ = Frame<GaussianRational>(n_, std::move(dgen));
}

ComplexStructureSpec ComplexStructureSpec::torus(int n) {
    return {n, std::vector<Form<GaussianRational>>(static_cast<std::size_t>(n), Form<GaussianRational>(n))};
}

GaussianRational ComplexStructureSpec::holo_constant(int k, int i, int j) const {
    if (i == j) {
        return {};
    }
    GaussianRational c = dphi(k).coefficient((Mask{1} << i) | (Mask{1} << j));
    return i < j ? c : -c;
}

GaussianRational ComplexStructureSpec::mixed_constant(int k, int i, int j) const {
    return dphi(k).coefficient((Mask{1} << i) | (Mask{1} << (n_ + j)));
}

bool ComplexStructureSpec::is_parallelisable() const {
    for (const auto& f : dphi_) {
        for (const auto& [m, c] : f.terms()) {
            if (anti_count(m, n_) != 0) {
                return false;
            }
        }
    }
    return true;
}

std::vector<Diagnostic> validate_spec(const ComplexStructureSpec& spec) {
    std::vector<Diagnostic> out;
    const int n = spec.dim();
    const auto& frame = spec.frame();
    for (int g = 0; g < 2 * n; ++g) {
        Form<GaussianRational> dd = frame.d(frame.d_generator(g));
        if (!dd.is_zero()) {
            const std::string name = monomial_str(Mask{1} << g, n);
            out.push_back({Diagnostic::Severity::Error, "d-squared",
                           "d^2(" + name + ") = " + dd.str() + " is nonzero (Jacobi identity fails)"});
        }
    }
    for (int k = 0; k < n; ++k) {
        for (const auto& [m, c] : spec.dphi(k).terms()) {
            const Mask hol = m & hol_bits(n);
            const Mask anti = (m & anti_bits(n)) >> n;
            if ((hol | anti) >> k) {
                out.push_back({Diagnostic::Severity::Warning, "non-nilpotent",
                               "d f" + std::to_string(k + 1) + " contains " + monomial_str(m, n) +
                                   " with an index >= " + std::to_string(k + 1) +
                                   "; invariant forms may not compute Dolbeault cohomology"});
            }
        }
    }
    return out;
}

std::optional<std::pair<int, Mask>> interior(int i, Mask m) {
    const Mask bit = Mask{1} << i;
    if (!(m & bit)) {
        return std::nullopt;
    }
    const int before = std::popcount(m & (bit - 1));
    return std::pair<int, Mask>{before % 2 == 0 ? 1 : -1, m ^ bit};
}

Form<Poly> lift(const Form<GaussianRational>& f) {
    return f.map_coefficients([](const GaussianRational& c) { return Poly(c); });
}

Frame<Poly> lift_frame(const Frame<GaussianRational>& frame) {
    std::vector<Form<Poly>> d;
    for (int g = 0; g < 2 * frame.dim(); ++g) {
        d.push_back(lift(frame.d_generator(g)));
    }
    return {frame.dim(), std::move(d)};
}

bool MixedFrame::integrable() const {
    return std::all_of(defect.begin(), defect.end(), [](const Form<Poly>& f) { return f.is_zero(); });
}

MixedFrame deformed_coframe(const ComplexStructureSpec& spec, const VectorForm<Poly>& psi) {
    const int n = spec.dim();
    if (psi.degree() != 1 || (psi.dim() != n && !psi.is_zero())) {
        throw std::invalid_argument("deformed_coframe: psi must be a vector-valued (0,1)-form on the same algebra");
    }
    const Frame<Poly> old = lift_frame(spec.frame());

    // Old generators in terms of the mixed coframe.
    std::vector<Form<Poly>> images;
    for (int k = 0; k < n; ++k) {
        images.push_back(Form<Poly>::monomial(n, Mask{1} << k) - psi.component(k));
    }
    for (int k = 0; k < n; ++k) {
        images.push_back(Form<Poly>::monomial(n, Mask{1} << (n + k)));
    }

    std::vector<Form<Poly>> dgen;
    for (int i = 0; i < n; ++i) {
        Form<Poly> da = old.d_generator(i);
        for (const auto& [key, c] : psi.terms()) {
            if (key.first != i) {
                continue;
            }
            const int mu = std::countr_zero(key.second) - n;
            da += old.d_generator(n + mu).scaled(c);
        }
        dgen.push_back(substitute(da, images));
    }
    for (int j = 0; j < n; ++j) {
        dgen.push_back(substitute(old.d_generator(n + j), images));
    }

    MixedFrame out;
    for (int i = 0; i < n; ++i) {
        out.defect.push_back(dgen[static_cast<std::size_t>(i)].component({0, 2}));
    }
    out.frame = Frame<Poly>(n, std::move(dgen));
    return out;
}

DeformedStructure deformed_structure_at(const ComplexStructureSpec& spec, const VectorForm<GaussianRational>& psi) {
    const int n = spec.dim();
    if (psi.degree() != 1 || (psi.dim() != n && !psi.is_zero())) {
        throw std::invalid_argument("deformed_structure_at: psi must be a vector-valued (0,1)-form");
    }
    const std::size_t N = static_cast<std::size_t>(2 * n);
    QMatrix change = QMatrix::identity(N);
    for (const auto& [key, c] : psi.terms()) {
        const auto i = static_cast<std::size_t>(key.first);
        const auto mu = static_cast<std::size_t>(std::countr_zero(key.second) - n);
        change(i, static_cast<std::size_t>(n) + mu) = c;
        change(static_cast<std::size_t>(n) + i, mu) = c.conj();
    }
    QMatrix back;
    try {
        back = inverse(change);
    } catch (const std::domain_error&) {
        throw NonInvertibleCoframe("deformed coframe is degenerate at this point (phi(t) and its conjugate are dependent)");
    }

    std::vector<Form<GaussianRational>> images;
    for (std::size_t g = 0; g < N; ++g) {
        Form<GaussianRational> img(n);
        for (std::size_t h = 0; h < N; ++h) {
            img.add(Mask{1} << h, back(g, h));
        }
        images.push_back(std::move(img));
    }

    const auto& old = spec.frame();
    DeformedStructure out;
    std::vector<Form<GaussianRational>> dphi;
    bool integrable = true;
    for (int i = 0; i < n; ++i) {
        Form<GaussianRational> d(n);
        for (std::size_t g = 0; g < N; ++g) {
            const auto& c = change(static_cast<std::size_t>(i), g);
            if (!c.is_zero()) {
                d += old.d_generator(static_cast<int>(g)).scaled(c);
            }
        }
        Form<GaussianRational> fresh = substitute(d, images);
        Form<GaussianRational> defect = fresh.component({0, 2});
        integrable = integrable && defect.is_zero();
        dphi.push_back(fresh - defect);
        out.defect.push_back(std::move(defect));
    }
    if (integrable) {
        out.structure = ComplexStructureSpec(n, std::move(dphi));
    }
    return out;
}

}  // namespace nilhodge
