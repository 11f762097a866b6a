#include "nilhodge/coeff.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

namespace nilhodge {

// ---------------------------------------------------------------------------
// GaussianRational
// ---------------------------------------------------------------------------

GaussianRational::GaussianRational(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
}

GaussianRational GaussianRational::inv() const {
    if (is_zero()) {
        throw DivisionByZero("GaussianRational: inverse of zero");
    }
    Rational n = norm();
    return {re_ / n, -im_ / n};
}

GaussianRational& GaussianRational::operator+=(const GaussianRational& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
}

GaussianRational& GaussianRational::operator-=(const GaussianRational& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
}

GaussianRational& GaussianRational::operator*=(const GaussianRational& o) {
    if (o.is_real()) {
        re_ *= o.re_;
        im_ *= o.re_;
        return *this;
    }
    Rational r = re_ * o.re_ - im_ * o.im_;
    Rational i = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
}

GaussianRational& GaussianRational::operator/=(const GaussianRational& o) {
    if (o.is_zero()) {
        throw DivisionByZero("GaussianRational: division by zero");
    }
    return *this *= o.inv();
}

std::string rational_str(const Rational& q) {
    if (q.get_den() == 1) {
        return q.get_num().get_str();
    }
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string GaussianRational::str() const {
    if (sgn(im_) == 0) {
        return rational_str(re_);
    }
    auto imag = [](const Rational& a) -> std::string {
        return a == 1 ? "i" : rational_str(a) + "*i";
    };
    if (sgn(re_) == 0) {
        if (im_ == -1) {
            return "-i";
        }
        return imag(im_);
    }
    Rational mag = abs(im_);
    return rational_str(re_) + (sgn(im_) > 0 ? "+" : "-") + imag(mag);
}

GaussianRational GaussianRational::parse(std::string_view text) {
    Poly p = parse_poly(text, nullptr);
    if (!p.is_constant()) {
        throw ParseError("expected a Gaussian rational, got '" + std::string(text) + "'", 0);
    }
    return p.constant_term();
}

std::size_t GaussianRational::hash() const {
    return std::hash<std::string>{}(str());
}

std::ostream& operator<<(std::ostream& os, const GaussianRational& z) {
    return os << z.str();
}

// ---------------------------------------------------------------------------
// Rings and monomials
// ---------------------------------------------------------------------------

std::optional<std::size_t> PolyRing::index_of(std::string_view name) const {
    for (std::size_t k = 0; k < names.size(); ++k) {
        if (names[k] == name) {
            return k;
        }
    }
    return std::nullopt;
}

RingPtr make_ring(std::vector<std::string> names, std::optional<unsigned> order) {
    return std::make_shared<const PolyRing>(PolyRing{std::move(names), order});
}

unsigned total_degree(const Exponents& e) {
    return std::accumulate(e.begin(), e.end(), 0U);
}

bool GrlexLess::operator()(const Exponents& a, const Exponents& b) const {
    unsigned da = total_degree(a);
    unsigned db = total_degree(b);
    if (da != db) {
        return da < db;
    }
    // Within a degree the monomial with the larger leading exponent is larger.
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// ---------------------------------------------------------------------------
// Poly
// ---------------------------------------------------------------------------

Poly::Poly(const GaussianRational& c) {
    if (!c.is_zero()) {
        terms_.emplace(Exponents{}, c);
    }
}

Poly::Poly(RingPtr ring, const GaussianRational& c) : ring_(std::move(ring)) {
    if (!c.is_zero()) {
        terms_.emplace(Exponents(nvars(), 0), c);
    }
}

Poly Poly::variable(const RingPtr& ring, std::string_view name) {
    auto k = ring ? ring->index_of(name) : std::nullopt;
    if (!k) {
        throw std::invalid_argument("unknown parameter '" + std::string(name) + "'");
    }
    Exponents e(ring->names.size(), 0);
    e[*k] = 1;
    return monomial(ring, std::move(e), GaussianRational(1));
}

Poly Poly::monomial(const RingPtr& ring, Exponents e, const GaussianRational& c) {
    if (e.size() != (ring ? ring->names.size() : 0)) {
        throw std::invalid_argument("Poly::monomial: exponent length does not match ring");
    }
    Poly p;
    p.ring_ = ring;
    p.add_term(e, c);
    p.enforce_order();
    return p;
}

bool Poly::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && total_degree(terms_.begin()->first) == 0);
}

GaussianRational Poly::constant_term() const {
    if (terms_.empty()) {
        return {};
    }
    const auto& [e, c] = *terms_.begin();
    return total_degree(e) == 0 ? c : GaussianRational{};
}

int Poly::degree() const {
    return terms_.empty() ? -1 : static_cast<int>(total_degree(terms_.rbegin()->first));
}

int Poly::low_degree() const {
    return terms_.empty() ? -1 : static_cast<int>(total_degree(terms_.begin()->first));
}

Poly Poly::homogeneous_part(unsigned n) const {
    Poly out;
    out.ring_ = ring_;
    for (const auto& [e, c] : terms_) {
        if (total_degree(e) == n) {
            out.terms_.emplace(e, c);
        }
    }
    return out;
}

Poly Poly::truncated(unsigned order) const {
    Poly out;
    out.ring_ = make_ring(ring_ ? ring_->names : std::vector<std::string>{}, order);
    for (const auto& [e, c] : terms_) {
        if (total_degree(e) <= order) {
            out.terms_.emplace(e.empty() ? Exponents(out.nvars(), 0) : e, c);
        }
    }
    return out;
}

Poly Poly::untruncated() const {
    if (!ring_ || !ring_->order) {
        return *this;
    }
    Poly out = *this;
    out.ring_ = make_ring(ring_->names);
    return out;
}

Poly Poly::with_ring(const RingPtr& ring) const {
    if (ring_ && ring && ring_->names != ring->names) {
        throw RingMismatch("Poly::with_ring: parameter lists differ");
    }
    Poly out;
    out.ring_ = ring;
    for (const auto& [e, c] : terms_) {
        out.terms_.emplace(e.empty() ? Exponents(out.nvars(), 0) : e, c);
    }
    out.enforce_order();
    return out;
}

GaussianRational Poly::eval(const Point& point) const {
    std::vector<GaussianRational> values(nvars());
    for (std::size_t k = 0; k < nvars(); ++k) {
        auto it = point.find(ring_->names[k]);
        if (it == point.end()) {
            throw std::invalid_argument("missing assignment for parameter '" + ring_->names[k] + "'");
        }
        values[k] = it->second;
    }
    GaussianRational sum;
    for (const auto& [e, c] : terms_) {
        GaussianRational m = c;
        for (std::size_t k = 0; k < e.size(); ++k) {
            for (unsigned j = 0; j < e[k]; ++j) {
                m *= values[k];
            }
        }
        sum += m;
    }
    return sum;
}

Poly Poly::substitute(const Point& point) const {
    Poly out;
    out.ring_ = ring_;
    for (const auto& [e, c] : terms_) {
        Exponents rest = e;
        GaussianRational m = c;
        for (std::size_t k = 0; k < e.size(); ++k) {
            auto it = point.find(ring_->names[k]);
            if (it == point.end()) {
                continue;
            }
            for (unsigned j = 0; j < e[k]; ++j) {
                m *= it->second;
            }
            rest[k] = 0;
        }
        out.add_term(rest, m);
    }
    return out;
}

Poly Poly::compose(const std::vector<Poly>& images, const RingPtr& target) const {
    if (images.size() != nvars()) {
        throw std::invalid_argument("Poly::compose: need one image per parameter");
    }
    Poly out(target, GaussianRational{});
    for (const auto& [e, c] : terms_) {
        Poly m(target, c);
        for (std::size_t k = 0; k < e.size(); ++k) {
            for (unsigned j = 0; j < e[k]; ++j) {
                m *= images[k];
            }
        }
        out += m;
    }
    return out;
}

Poly Poly::conj_coefficients() const {
    Poly out = *this;
    for (auto& [e, c] : out.terms_) {
        c = c.conj();
    }
    return out;
}

RingPtr Poly::unify(const RingPtr& a, const RingPtr& b) {
    if (!a) {
        return b;
    }
    if (!b || a == b || *a == *b) {
        return a;
    }
    throw RingMismatch("polynomial ring mismatch: parameter lists or truncation orders differ");
}

void Poly::adopt(const RingPtr& r) {
    if (ring_ == r) {
        return;
    }
    if (!ring_) {
        Terms moved;
        for (auto& [e, c] : terms_) {
            moved.emplace(Exponents(r ? r->names.size() : 0, 0), c);
        }
        terms_ = std::move(moved);
    }
    ring_ = r;
}

void Poly::add_term(const Exponents& e, const GaussianRational& c) {
    if (c.is_zero()) {
        return;
    }
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) {
            terms_.erase(it);
        }
    }
}

void Poly::enforce_order() {
    if (!ring_ || !ring_->order) {
        return;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (total_degree(it->first) > *ring_->order) {
            it = terms_.erase(it);
        } else {
            ++it;
        }
    }
}

Poly Poly::operator-() const {
    Poly out = *this;
    for (auto& [e, c] : out.terms_) {
        c = -c;
    }
    return out;
}

Poly& Poly::operator+=(const Poly& o) {
    RingPtr r = unify(ring_, o.ring_);
    adopt(r);
    Poly other = o;
    other.adopt(r);
    for (const auto& [e, c] : other.terms_) {
        add_term(e, c);
    }
    enforce_order();
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    return *this += -o;
}

Poly operator*(const Poly& a, const Poly& b) {
    RingPtr r = Poly::unify(a.ring_, b.ring_);
    Poly x = a;
    Poly y = b;
    x.adopt(r);
    y.adopt(r);
    Poly out;
    out.ring_ = r;
    const std::optional<unsigned> order = r ? r->order : std::nullopt;
    for (const auto& [ea, ca] : x.terms_) {
        for (const auto& [eb, cb] : y.terms_) {
            Exponents e(ea.size());
            for (std::size_t k = 0; k < e.size(); ++k) {
                e[k] = ea[k] + eb[k];
            }
            if (order && total_degree(e) > *order) {
                continue;
            }
            out.add_term(e, ca * cb);
        }
    }
    return out;
}

Poly& Poly::operator*=(const Poly& o) {
    *this = *this * o;
    return *this;
}

bool operator==(const Poly& a, const Poly& b) {
    if (a.terms_.empty() || b.terms_.empty()) {
        return a.terms_.empty() && b.terms_.empty();
    }
    if (a.is_constant() && b.is_constant()) {
        return a.constant_term() == b.constant_term();
    }
    RingPtr r = Poly::unify(a.ring_, b.ring_);
    Poly x = a;
    Poly y = b;
    x.adopt(r);
    y.adopt(r);
    return x.terms_ == y.terms_;
}

Poly Poly::divide_exact(const Poly& a, const Poly& b) {
    if (b.is_zero()) {
        throw DivisionByZero("Poly::divide_exact: division by zero");
    }
    RingPtr r = unify(a.ring_, b.ring_);
    Poly rem = a;
    Poly den = b;
    rem.adopt(r);
    den.adopt(r);
    Poly quot;
    quot.ring_ = r;
    const auto& [lb_e, lb_c] = *den.terms_.rbegin();
    const GaussianRational lb_inv = lb_c.inv();
    while (!rem.is_zero()) {
        const auto [lr_e, lr_c] = *rem.terms_.rbegin();
        Exponents q_e(lr_e.size());
        for (std::size_t k = 0; k < q_e.size(); ++k) {
            if (lr_e[k] < lb_e[k]) {
                throw std::domain_error("Poly::divide_exact: not divisible");
            }
            q_e[k] = lr_e[k] - lb_e[k];
        }
        Poly step;
        step.ring_ = r;
        step.add_term(q_e, lr_c * lb_inv);
        quot += step;
        rem -= step * den;
    }
    return quot;
}

std::string Poly::str() const {
    if (terms_.empty()) {
        return "0";
    }
    std::string out;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [e, c] = *it;
        std::string mono;
        for (std::size_t k = 0; k < e.size(); ++k) {
            if (e[k] == 0) {
                continue;
            }
            if (!mono.empty()) {
                mono += '*';
            }
            mono += ring_->names[k];
            if (e[k] > 1) {
                mono += '^' + std::to_string(e[k]);
            }
        }
        std::string term;
        if (mono.empty()) {
            term = c.str();
            if (!c.is_real() && sgn(c.re()) != 0 && !first) {
                term = "(" + term + ")";
            }
        } else if (c.is_one()) {
            term = mono;
        } else if (c == GaussianRational(-1)) {
            term = "-" + mono;
        } else if (c.is_real() || sgn(c.re()) == 0) {
            term = c.str() + "*" + mono;
        } else {
            term = "(" + c.str() + ")*" + mono;
        }
        if (!first && term.front() != '-') {
            out += '+';
        }
        out += term;
        first = false;
    }
    return out;
}

std::ostream& operator<<(std::ostream& os, const Poly& p) {
    return os << p.str();
}

Jet jet_mul(const Jet& a, const Jet& b) {
    const bool a_jet = a.ring() && a.ring()->order;
    const bool b_jet = b.ring() && b.ring()->order;
    if (!a_jet || !b_jet) {
        throw RingMismatch("jet_mul: both operands must be jets (truncated rings)");
    }
    if (!(*a.ring() == *b.ring())) {
        throw RingMismatch("jet_mul: parameter lists or orders differ");
    }
    return a * b;
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

class PolyParser {
  public:
    PolyParser(std::string_view text, RingPtr ring) : text_(text), ring_(std::move(ring)) {}

    Poly parse() {
        skip_ws();
        if (at_end()) {
            fail("empty expression");
        }
        Poly p = expr();
        skip_ws();
        if (!at_end()) {
            fail(std::string("unexpected '") + peek() + "'");
        }
        return p;
    }

  private:
    Poly expr() {
        Poly acc = term();
        for (;;) {
            skip_ws();
            if (accept('+')) {
                acc += term();
            } else if (accept('-')) {
                acc -= term();
            } else {
                return acc;
            }
        }
    }

    Poly term() {
        Poly acc = power();
        for (;;) {
            skip_ws();
            if (accept('*')) {
                acc *= power();
            } else {
                return acc;
            }
        }
    }

    Poly power() {
        skip_ws();
        if (accept('-')) {
            return -power();
        }
        if (accept('+')) {
            return power();
        }
        Poly base = atom();
        skip_ws();
        if (accept('^')) {
            skip_ws();
            unsigned e = unsigned_int();
            Poly out(GaussianRational(1));
            for (unsigned k = 0; k < e; ++k) {
                out *= base;
            }
            return out;
        }
        return base;
    }

    Poly atom() {
        skip_ws();
        if (at_end()) {
            fail("unexpected end of expression");
        }
        char c = peek();
        if (c == '(') {
            ++pos_;
            Poly inner = expr();
            skip_ws();
            if (!accept(')')) {
                fail("expected ')'");
            }
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            Rational q = number();
            Poly value{GaussianRational(q)};
            // `1/4i` and `2t` style implicit products after a literal.
            if (!at_end() && (std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_')) {
                value *= identifier();
            }
            return value;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            return identifier();
        }
        fail(std::string("unexpected '") + c + "'");
    }

    Poly identifier() {
        std::size_t start = pos_;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) {
            ++pos_;
        }
        std::string_view name = text_.substr(start, pos_ - start);
        if (name == "i") {
            return Poly(GaussianRational::imag_unit());
        }
        if (!ring_ || !ring_->index_of(name)) {
            pos_ = start;
            fail("unknown parameter '" + std::string(name) + "'");
        }
        return Poly::variable(ring_, name);
    }

    Rational number() {
        mpz_class num(digits());
        if (!at_end() && peek() == '/') {
            ++pos_;
            if (at_end() || !std::isdigit(static_cast<unsigned char>(peek()))) {
                fail("expected denominator digits after '/'");
            }
            mpz_class den(digits());
            if (den == 0) {
                fail("zero denominator");
            }
            Rational q(num, den);
            q.canonicalize();
            return q;
        }
        return Rational(num);
    }

    std::string digits() {
        std::size_t start = pos_;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
            ++pos_;
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    unsigned unsigned_int() {
        if (at_end() || !std::isdigit(static_cast<unsigned char>(peek()))) {
            fail("expected a non-negative integer exponent");
        }
        std::string d = digits();
        if (d.size() > 4) {
            fail("exponent too large");
        }
        return static_cast<unsigned>(std::stoul(d));
    }

    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) {
            ++pos_;
        }
    }
    bool accept(char c) {
        if (!at_end() && peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("column " + std::to_string(pos_ + 1) + ": " + msg + " in '" + std::string(text_) + "'",
                         pos_ + 1);
    }

    std::string_view text_;
    RingPtr ring_;
    std::size_t pos_ = 0;
};

}  // namespace

Poly parse_poly(std::string_view text, const RingPtr& ring) {
    Poly p = PolyParser(text, ring).parse();
    if (ring) {
        p = p.with_ring(ring);
    }
    return p;
}

}  // namespace nilhodge
