// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any
// criterion fails.

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "nilhodge/cli.hpp"
#include "nilhodge/defo.hpp"
#include "nilhodge/lab.hpp"
#include "nilhodge/manifest.hpp"
#include "random_complex.hpp"

using namespace nilhodge;
using GR = GaussianRational;
using json = nlohmann::json;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

const std::vector<std::size_t> row_i{3, 2, 3, 6, 2, 1, 6, 6, 1};
const std::vector<std::size_t> row_ii{2, 2, 2, 5, 2, 1, 5, 5, 1};
const std::vector<std::size_t> row_iii{2, 2, 1, 5, 2, 1, 4, 4, 1};

std::string show(const std::vector<std::size_t>& v) {
    std::string s;
    for (auto x : v) s += (s.empty() ? "" : " ") + std::to_string(x);
    return s;
}

Manifest builtin(const std::string& name) { return load_manifest(name, default_data_dir()); }

Point named(const Manifest& m, const std::string& name) {
    const NamedPoint* p = m.find_point(name);
    if (!p) throw std::runtime_error("manifest " + m.name + " has no point " + name);
    return complete_point(m.ring, p->values);
}

bool all_zero(const PVec& v) {
    for (const auto& c : v)
        if (!c.is_zero()) return false;
    return true;
}

Form<Poly> with_ring(const RingPtr& ring, const Form<GR>& f) {
    return f.map_coefficients([&](const GR& c) { return Poly(ring, c); });
}

Form<GR> homogeneous(const Form<GR>& f, int degree) {
    Form<GR> out(f.dim());
    for (const auto& [m, c] : f.terms())
        if (std::popcount(m) == degree) out.add(m, c);
    return out;
}

Form<GR> random_form(std::mt19937& rng, int n) {
    Form<GR> f(n);
    const Mask all = (Mask{1} << (2 * n)) - 1;
    for (int k = 0; k < 3; ++k) f.add(static_cast<Mask>(rng()) & all, GR(static_cast<long>(rng() % 5) - 2));
    return f;
}

// --- criteria ------------------------------------------------------------------

Outcome baseline_hodge() {
    Outcome o;
    const auto t0 = Clock::now();
    std::ostringstream out, err;
    const int code = run_command({"nilhodge", "--format", "json", "hodge", "iwasawa.json"}, out, err);
    const double dt = seconds_since(t0);
    o.require(code == 0, "exit code " + std::to_string(code));
    const auto j = json::parse(out.str());
    const auto summary = j.at("summary").get<std::vector<std::size_t>>();
    o.require(summary == row_i, "summary " + show(summary));
    o.require(dt < 2.0, "took " + std::to_string(dt) + " s");
    std::ostringstream text, terr;
    run_command({"nilhodge", "hodge", "iwasawa.json"}, text, terr);
    o.require(text.str().find(": 3 2 3 6 2 1 6 6 1\n") != std::string::npos, "text table summary");
    o.detail = o.pass ? "(" + show(summary) + ") in " + std::to_string(dt) + " s" : o.detail;
    return o;
}

Outcome obstruction_values() {
    Outcome o;
    const Manifest m = builtin("iwasawa");
    const DolbeaultModel model(m.spec());
    const auto psi = m.psi1();
    const auto r = obstruction_o1(model, psi, 2, 0);
    const auto src = model.group(2, 0).representatives();
    const auto dst = model.group(2, 1).representatives();
    o.require(src.size() == 3 && src[0].str() == "f1^f2" && src[1].str() == "f1^f3" && src[2].str() == "f2^f3",
              "H^{2,0} basis");
    o.require(dst.size() == 6 && dst[0].str() == "f1^f2^c1" && dst[1].str() == "f1^f2^c2", "H^{2,1} basis");
    o.require(all_zero(r.matrix.column(0)), "o1(f1^f2) != 0");
    PVec expect(6, Poly(m.ring, GR()));
    expect[0] = parse_poly("-t21", m.ring);
    expect[1] = parse_poly("-t22", m.ring);
    o.require(r.matrix.column(2) == expect, "o1(f2^f3) mismatch");
    // t11 o1(f2^f3) - t21 o1(f1^f3) = c * det.
    const Poly det = parse_poly("t11*t22-t21*t12", m.ring);
    bool proportional = false;
    for (std::size_t row = 0; row < 6; ++row) {
        const Poly e = parse_poly("t11", m.ring) * r.matrix(row, 2) - parse_poly("t21", m.ring) * r.matrix(row, 1);
        if (e.is_zero()) continue;
        try {
            const Poly c = Poly::divide_exact(e, det);
            o.require(c.homogeneous_part(0) == c, "quotient by det is not constant");
            proportional = true;
        } catch (const std::domain_error&) {
            o.require(false, "combination not divisible by det");
        }
    }
    o.require(proportional, "combination vanishes identically");
    if (o.pass) o.detail = "o1(f1^f2) = 0, o1(f2^f3) = -t21 f1^f2^c1 - t22 f1^f2^c2, combination ~ det";
    return o;
}

Outcome jump_rows() {
    Outcome o;
    const Manifest m = builtin("iwasawa");
    const DolbeaultModel model(m.spec());
    double worst = 0;
    for (const auto& [name, row] : {std::pair{"ii", row_ii}, std::pair{"iii", row_iii}}) {
        const auto t0 = Clock::now();
        const auto jt = jump_report(model, m.psi1(), named(m, name));
        const double dt = seconds_since(t0);
        worst = std::max(worst, dt);
        const auto got = jt.predicted_table().summary();
        o.require(got == row, std::string(name) + ": " + show(got));
        o.require(dt < 5.0, std::string(name) + " took " + std::to_string(dt) + " s");
    }
    if (o.pass) o.detail = "ii (" + show(row_ii) + "), iii (" + show(row_iii) + "), slowest " + std::to_string(worst) + " s";
    return o;
}

Outcome oracle_rows() {
    Outcome o;
    const Manifest m = builtin("iwasawa");
    const auto mc = mc_extend(m.spec(), m.psi1(), 2);
    o.require(mc.family.has_value(), "family obstructed");
    if (!mc.family) return o;
    std::string scales;
    for (const auto& [name, row] : {std::pair{"ii", row_ii}, std::pair{"iii", row_iii}}) {
        const auto r = oracle_hodge_at_point(*mc.family, named(m, name));
        o.require(r.table.summary() == row, std::string(name) + ": " + show(r.table.summary()));
        o.require(validate_spec(r.deformed).empty(), std::string(name) + ": deformed structure invalid");
        scales += std::string(scales.empty() ? "" : ", ") + name + " at s=" + r.scale.str();
    }
    if (o.pass) o.detail = "deformed structures recomputed from scratch (" + scales + ")";
    return o;
}

Outcome maurer_cartan() {
    Outcome o;
    const Manifest m = builtin("iwasawa");
    const auto r = mc_extend(m.spec(), m.psi1(), 3);
    o.require(r.family.has_value() && !r.obstructed_order, "obstructed");
    o.require(r.corrections.size() == 2, "expected corrections for orders 2 and 3");
    if (r.corrections.size() == 2) {
        VectorForm<Poly> expect(3, 1);
        expect.add(2, Mask{1} << 5, parse_poly("-(t11*t22-t21*t12)", m.ring));
        o.require(r.corrections[0] == expect, "psi_2 = " + r.corrections[0].str());
        o.require(r.corrections[1].is_zero(), "psi_3 = " + r.corrections[1].str());
    }
    if (r.family) o.require(deformed_coframe(m.spec(), r.family->psi).integrable(), "completed family not integrable");
    if (o.pass) o.detail = "psi_2 = " + r.corrections[0].str() + ", psi_3 = 0";
    return o;
}

Outcome remark_one() {
    Outcome o;
    const Manifest m = builtin("iwasawa");
    const DolbeaultModel model(m.spec());
    const auto psi = m.psi1();
    const auto sc = second_class_subspace(model, psi, 1, 1);
    o.require(sc.generic_dim == 1, "second-class dimension " + std::to_string(sc.generic_dim));
    const PVec o3 = model.group(1, 1).project(o1_form(model, psi, lift(phi(3, 3))));
    o.require(!all_zero(o3), "o1(f3) is exact");
    if (sc.generic_basis.size() == 1) {
        const PMatrix both = PMatrix::from_columns(o3.size(), {sc.generic_basis[0], o3});
        o.require(generic_rank(both) == 1, "span differs from [o1(f3)]");
    }
    for (const char* name : {"ii", "iii"}) {
        const auto jt = jump_report(model, psi, named(m, name));
        const auto& e = jt.at(1, 1);
        o.require(e.first_class == 0, std::string(name) + ": first class " + std::to_string(e.first_class));
        o.require(e.second_class == 1, std::string(name) + ": second class " + std::to_string(e.second_class));
        o.require(e.h0 == 6 && e.predicted == 5, std::string(name) + ": h11 not 6 -> 5");
    }
    if (o.pass) o.detail = "second class at (1,1) = span[o1(f3)], first class 0, h11 6 -> 5";
    return o;
}

Outcome remark_two() {
    Outcome o;
    const DolbeaultModel iw(builtin("iwasawa").spec());
    const auto w = parallelisable_witness(iw);
    o.require(w.has_value(), "no witness for iwasawa");
    if (w) {
        o.require(!all_zero(w->obstruction_class), "certificate class is zero");
        o.require(!w->obstruction.is_zero(), "certificate form is zero");
    }
    const DolbeaultModel torus(builtin("torus3").spec());
    o.require(!parallelisable_witness(torus).has_value(), "torus3 has a witness");
    if (o.pass) o.detail = "psi1 = " + w->psi.str() + ", o1(f" + std::to_string(w->i + 1) + ") = " + w->obstruction.str() + "; torus3: none";
    return o;
}

Outcome froelicher() {
    Outcome o;
    const Manifest tm = builtin("torus3");
    const DolbeaultModel torus(tm.spec());
    for (int p = 0; p < 3; ++p)
        for (int q = 0; q <= 3; ++q) o.require(frolicher_d1(torus, p, q).is_zero_matrix(), "torus d1 != 0");
    std::mt19937 rng(20261019);
    const RingPtr ring = make_ring({"u", "v"});
    int checked = 0;
    for (int trial = 0; trial < 50; ++trial) {
        VectorForm<Poly> psi(3, 1);
        for (int i = 0; i < 3; ++i)
            for (int l = 0; l < 3; ++l) {
                Exponents e{static_cast<unsigned>(rng() % 2), 0};
                e[1] = 1 - e[0];
                psi.add(i, Mask{1} << (3 + l), Poly::monomial(ring, e, GR(static_cast<long>(rng() % 5) - 2)));
            }
        if (!validate_first_order(torus.spec(), psi).empty()) {
            o.require(false, "random psi1 rejected on the torus");
            continue;
        }
        for (int p = 0; p <= 3; ++p)
            for (int q = 0; q < 3; ++q)
                o.require(obstruction_o1(torus, psi, p, q).matrix.is_zero_matrix(), "torus o1 != 0");
        ++checked;
    }
    const DolbeaultModel iw(builtin("iwasawa").spec());
    o.require(!frolicher_d1(iw, 1, 0).is_zero_matrix(), "iwasawa d1(1,0) = 0");
    if (o.pass) o.detail = "torus3: d1 = 0 and o1 = 0 for " + std::to_string(checked) + " random psi1; iwasawa d1(1,0) != 0";
    return o;
}

Outcome invariant_suite() {
    Outcome o;
    std::mt19937 rng(9);
    // d-squared identities on every basis form of every builtin spec.
    std::size_t forms = 0;
    for (const char* name : {"iwasawa", "torus3"}) {
        const auto spec = builtin(name).spec();
        const auto& fr = spec.frame();
        const int n = spec.dim();
        for (int p = 0; p <= n; ++p)
            for (int q = 0; q <= n; ++q)
                for (Mask mk : bidegree_basis(n, p, q)) {
                    const Form<GR> a = Form<GR>::monomial(n, mk);
                    const bool ok = fr.d(fr.d(a)).is_zero() && fr.del(fr.del(a)).is_zero() &&
                                    fr.delbar(fr.delbar(a)).is_zero() &&
                                    (fr.del(fr.delbar(a)) + fr.delbar(fr.del(a))).is_zero();
                    o.require(ok, std::string(name) + ": d-squared identity fails on " + a.str());
                    ++forms;
                }
    }
    // o1 well defined under exact perturbations.
    int perturbations = 0;
    const RingPtr tr = make_ring({"t"});
    for (const char* name : {"iwasawa", "torus3"}) {
        const auto spec = builtin(name).spec();
        const DolbeaultModel model(spec);
        const int top = std::string(name) == "iwasawa" ? 2 : 3;  // th_i.c3 is not closed on iwasawa
        for (int trial = 0; trial < 80; ++trial) {
            VectorForm<Poly> psi(3, 1);
            for (int i = 0; i < 3; ++i)
                for (int l = 0; l < top; ++l)
                    psi.add(i, Mask{1} << (3 + l), Poly::variable(tr, "t") * Poly(tr, GR(static_cast<long>(rng() % 5) - 2)));
            const int p = static_cast<int>(rng() % 4), q = 1 + static_cast<int>(rng() % 2);
            if (model.group(p, q).dim() == 0) continue;
            const auto reps = model.group(p, q).representatives();
            const Form<GR> alpha = reps[rng() % reps.size()];
            Form<GR> beta(3);
            for (Mask mk : bidegree_basis(3, p, q - 1)) beta.add(mk, GR(static_cast<long>(rng() % 7) - 3));
            const Form<GR> moved = alpha + spec.frame().delbar(beta);
            const auto& target = model.group(p, q + 1);
            o.require(target.project(o1_form(model, psi, with_ring(tr, alpha))) ==
                          target.project(o1_form(model, psi, with_ring(tr, moved))),
                      std::string(name) + ": o1 not well defined");
            ++perturbations;
        }
    }
    o.require(perturbations >= 100, "only " + std::to_string(perturbations) + " perturbations");
    // Leibniz and graded antisymmetry on random forms.
    const auto iw = builtin("iwasawa").spec();
    for (int trial = 0; trial < 200; ++trial) {
        const Form<GR> a = random_form(rng, 3), b = random_form(rng, 3);
        for (int da = 0; da <= 6; ++da) {
            const Form<GR> ha = homogeneous(a, da);
            Form<GR> rhs = wedge(iw.frame().d(ha), b);
            const Form<GR> second = wedge(ha, iw.frame().d(b));
            rhs += da % 2 ? -second : second;
            o.require(iw.frame().d(wedge(ha, b)) == rhs, "Leibniz fails");
            for (int db = 0; db <= 6; ++db) {
                const Form<GR> hb = homogeneous(b, db);
                const Form<GR> ba = wedge(hb, ha);
                o.require(wedge(ha, hb) == ((da * db) % 2 ? -ba : ba), "graded antisymmetry fails");
            }
        }
    }
    // Semicontinuity on random complexes with d^2 = 0 by construction.
    std::mt19937 lab_rng(20261019);
    int complexes = 0;
    for (int trial = 0; trial < 120; ++trial) {
        const auto k = testing::random_complex(lab_rng);
        o.require(validate_complex(k.complex).empty(), "random complex with d^2 != 0");
        for (const auto& h : h_dims(k.complex)) o.require(h.at_zero >= h.generic, "h(0) < h(generic)");
        ++complexes;
    }
    if (o.pass)
        o.detail = std::to_string(forms) + " basis forms, " + std::to_string(perturbations) +
                   " exact perturbations, 200 Leibniz/antisymmetry pairs, " + std::to_string(complexes) +
                   " random complexes";
    return o;
}

Outcome lab_equivalences() {
    Outcome o;
    std::mt19937 rng(424242);
    int instances = 0, primitives = 0;
    for (int trial = 0; trial < 120; ++trial) {
        const auto k = testing::random_complex(rng);
        const auto& c = k.complex;
        for (int q = 0; q < c.length(); ++q) {
            try {
                const SecondClass sc = classify_second_class(c, q);
                o.require(sc.saturation.size() == sc.jet_search.size(), "second-class methods differ in dimension");
            } catch (const InvariantError& e) {
                o.require(false, e.what());
            }
            const JumpAccounting a = jump_accounting(c, q);
            o.require(a.consistent, "accounting: " + a.note);
            o.require(a.kernel_drop + a.image_rise == a.h_zero - a.h_generic, "kernel drop + image rise != h drop");
            o.require(a.first_class == a.kernel_drop && a.second_class == a.image_rise, "obstructed dimensions");
            ++instances;
            if (q + 1 >= c.length()) continue;
            const CohomologyBasis h = central_cohomology(c, q);
            for (std::size_t r = 0; r < h.dim(); ++r) {
                PVec alpha;
                for (const auto& x : h.representatives()[r]) alpha.push_back(Poly(c.ring(), x));
                unsigned n = 1;
                for (; n <= c.order_bound(); ++n) {
                    const auto step = extend_step(c, q, alpha, n);
                    if (!step.extension) break;
                    alpha = *step.extension;
                }
                if (n > c.order_bound()) continue;
                const Primitive prim = reduce_to_primitive(c, q, alpha, n);
                o.require(prim.n >= 1 && prim.n <= n, "primitive order out of range");
                o.require(prim.steps <= n, "too many descents");
                o.require(!prim.leading.is_zero(), "zero leading obstruction");
                o.require(!o_n_i_vanishes(c, q, prim.alpha, prim.n, prim.n - 1), "o_{n',n'-1} vanishes");
                ++primitives;
            }
        }
    }
    if (o.pass)
        o.detail = std::to_string(instances) + " (complex, degree) instances, " + std::to_string(primitives) +
                   " primitive reductions";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"baseline Iwasawa Hodge table", baseline_hodge},
        {"o1 values at (2,0)", obstruction_values},
        {"jump rows ii and iii", jump_rows},
        {"oracle cross-check", oracle_rows},
        {"Maurer-Cartan completion", maurer_cartan},
        {"second class at (1,1)", remark_one},
        {"parallelisable witness", remark_two},
        {"Froelicher d1 and the torus", froelicher},
        {"invariant suite", invariant_suite},
        {"lab equivalences", lab_equivalences},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome out;
        try {
            out = criteria[k].second();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        failed += out.pass ? 0 : 1;
        std::cout << (out.pass ? "PASS" : "FAIL") << " [" << k + 1 << "] " << criteria[k].first << ": " << out.detail
                  << std::endl;
    }
    std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << std::endl;
    return failed ? 1 : 0;
}
