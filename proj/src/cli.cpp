#include "nilhodge/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "nilhodge/defo.hpp"
#include "nilhodge/lab.hpp"
#include "nilhodge/manifest.hpp"

namespace nilhodge {

namespace {

using json = nlohmann::ordered_json;
using GR = GaussianRational;

struct Options {
    std::string format = "text";
    std::string data_dir;
    std::string manifest;
    int p = -1;
    int q = -1;
    std::vector<std::string> points;
    unsigned order = 0;
};

bool as_json(const Options& o) { return o.format == "json"; }

std::string key(int p, int q) { return std::to_string(p) + "," + std::to_string(q); }

// Aligned text table; the first column is left-aligned.
class Table {
  public:
    explicit Table(std::vector<std::string> header) : rows_{std::move(header)} {}
    void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

    void print(std::ostream& out) const {
        std::vector<std::size_t> width;
        for (const auto& r : rows_) {
            width.resize(std::max(width.size(), r.size()), 0);
            for (std::size_t c = 0; c < r.size(); ++c) {
                width[c] = std::max(width[c], r[c].size());
            }
        }
        for (const auto& r : rows_) {
            std::string line;
            for (std::size_t c = 0; c < r.size(); ++c) {
                const std::string pad(width[c] - r[c].size(), ' ');
                line += c == 0 ? r[c] + pad : "  " + pad + r[c];
            }
            out << line << '\n';
        }
    }

  private:
    std::vector<std::vector<std::string>> rows_;
};

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        out += (k ? sep : "") + parts[k];
    }
    return out;
}

template <class T>
std::vector<std::string> strings(const std::vector<T>& v) {
    std::vector<std::string> out;
    for (const auto& x : v) {
        if constexpr (std::is_arithmetic_v<T>) {
            out.push_back(std::to_string(x));
        } else {
            out.push_back(to_string(x));
        }
    }
    return out;
}

json matrix_json(const PMatrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) {
            row.push_back(m(r, c).str());
        }
        rows.push_back(row);
    }
    return rows;
}

json matrix_json(const QMatrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) {
            row.push_back(m(r, c).str());
        }
        rows.push_back(row);
    }
    return rows;
}

json point_json(const Point& p, const std::vector<std::string>& order) {
    json j = json::object();
    for (const auto& name : order) {
        if (auto it = p.find(name); it != p.end()) {
            j[name] = it->second.str();
        }
    }
    return j;
}

std::string point_text(const Point& p, const std::vector<std::string>& order) {
    std::vector<std::string> parts;
    for (const auto& name : order) {
        if (auto it = p.find(name); it != p.end() && !it->second.is_zero()) {
            parts.push_back(name + "=" + it->second.str());
        }
    }
    return parts.empty() ? "0" : join(parts, ",");
}

std::vector<std::string> form_strings(const std::vector<Form<GR>>& forms) {
    std::vector<std::string> out;
    for (const auto& f : forms) {
        out.push_back(f.str());
    }
    return out;
}

Manifest load(const Options& o) {
    const std::filesystem::path dir = o.data_dir.empty() ? default_data_dir() : std::filesystem::path(o.data_dir);
    return load_manifest(o.manifest, dir);
}

void need_lie(const Manifest& m, const std::string& command) {
    if (m.kind != Manifest::Kind::LieAlgebra) {
        throw UsageError(command + " needs a lie-algebra manifest; '" + m.name + "' is a free complex (try `lab`)");
    }
}

// "ii" (a named point of the manifest) or "t11=1,t22=1/2"; missing
// parameters are zero.
Point parse_point(const Manifest& m, const std::string& text) {
    if (text.find('=') == std::string::npos) {
        if (const NamedPoint* np = m.find_point(text)) {
            return complete_point(m.ring, np->values);
        }
        throw UsageError("unknown point '" + text + "' (expected a named point of the manifest or name=value,...)");
    }
    Point p;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw UsageError("bad point assignment '" + item + "'");
        }
        const std::string name = item.substr(0, eq);
        if (std::find(m.parameters.begin(), m.parameters.end(), name) == m.parameters.end()) {
            throw UsageError("unknown parameter '" + name + "' in --point");
        }
        try {
            p[name] = GR::parse(item.substr(eq + 1));
        } catch (const std::exception& e) {
            throw UsageError("bad value in '" + item + "': " + e.what());
        }
    }
    return complete_point(m.ring, p);
}

// --- subcommands -------------------------------------------------------------

int cmd_validate(const Options& o, std::ostream& out) {
    const Manifest m = load(o);
    if (as_json(o)) {
        json j;
        j["name"] = m.name;
        j["kind"] = std::string(kind_name(m.kind));
        j["valid"] = true;
        json warnings = json::array();
        for (const auto& w : m.warnings) {
            warnings.push_back({{"code", w.code}, {"message", w.message}});
        }
        j["warnings"] = warnings;
        if (m.kind == Manifest::Kind::LieAlgebra) {
            j["dimension"] = m.dimension;
            j["parameters"] = m.parameters;
            j["psi1"] = m.psi1().str();
        } else {
            j["ranks"] = m.ranks;
        }
        out << j.dump(2) << '\n';
        return kExitOk;
    }
    out << "ok: " << m.name << " (" << kind_name(m.kind);
    if (m.kind == Manifest::Kind::LieAlgebra) {
        out << ", n=" << m.dimension << ", " << m.parameters.size() << " parameters)\n";
        const auto spec = m.spec();
        for (int k = 0; k < m.dimension; ++k) {
            out << "  d f" << k + 1 << " = " << spec.dphi(k).str() << '\n';
        }
        out << "  psi1 = " << m.psi1().str() << '\n';
    } else {
        out << ", ranks " << join(strings(m.ranks), " ") << ")\n";
    }
    for (const auto& w : m.warnings) {
        out << "warning [" << w.code << "]: " << w.message << '\n';
    }
    return kExitOk;
}

int cmd_hodge(const Options& o, std::ostream& out) {
    const Manifest m = load(o);
    need_lie(m, "hodge");
    const DolbeaultModel model(m.spec());
    const HodgeTable h = model.hodge();
    const int n = m.dimension;
    if (as_json(o)) {
        json j;
        j["name"] = m.name;
        j["n"] = n;
        json t = json::object();
        for (int p = 0; p <= n; ++p)
            for (int q = 0; q <= n; ++q) t[key(p, q)] = h.at(p, q);
        j["hodge"] = t;
        j["summary_order"] = json::array();
        for (const auto& b : summary_order(n)) j["summary_order"].push_back(key(b.p, b.q));
        j["summary"] = h.summary();
        out << j.dump(2) << '\n';
        return kExitOk;
    }
    std::vector<std::string> header{"h^{p,q}"};
    for (int q = 0; q <= n; ++q) header.push_back("q=" + std::to_string(q));
    Table t(header);
    for (int p = 0; p <= n; ++p) {
        std::vector<std::string> row{"p=" + std::to_string(p)};
        for (int q = 0; q <= n; ++q) row.push_back(std::to_string(h.at(p, q)));
        t.add(row);
    }
    out << m.name << ": invariant Dolbeault cohomology\n";
    t.print(out);
    std::vector<std::string> labels;
    for (const auto& b : summary_order(n)) labels.push_back("h" + std::to_string(b.p) + std::to_string(b.q));
    out << "summary (" << join(labels, " ") << "): " << join(strings(h.summary()), " ") << '\n';
    return kExitOk;
}

int cmd_obstruct(const Options& o, std::ostream& out) {
    const Manifest m = load(o);
    need_lie(m, "obstruct");
    const int n = m.dimension;
    if (o.p < 0 || o.p > n || o.q < 0 || o.q >= n) {
        throw UsageError("need 0 <= p <= " + std::to_string(n) + " and 0 <= q < " + std::to_string(n));
    }
    const DolbeaultModel model(m.spec());
    std::vector<Point> pts;
    for (const auto& s : o.points) pts.push_back(parse_point(m, s));
    const ObstructionReport r = obstruction_o1(model, m.psi1(), o.p, o.q, pts);
    const auto src = form_strings(model.group(o.p, o.q).representatives());
    const auto dst = form_strings(model.group(o.p, o.q + 1).representatives());
    if (as_json(o)) {
        json j;
        j["name"] = m.name;
        j["source"] = key(o.p, o.q);
        j["target"] = key(o.p, o.q + 1);
        j["source_basis"] = src;
        j["target_basis"] = dst;
        j["matrix"] = matrix_json(r.matrix);
        j["generic_rank"] = r.generic_rank;
        json ker = json::array();
        for (const auto& v : r.kernel) ker.push_back(strings(v));
        j["kernel"] = ker;
        json pr = json::array();
        for (const auto& x : r.point_ranks) pr.push_back({{"point", point_json(x.point, m.parameters)}, {"rank", x.rank}});
        j["point_ranks"] = pr;
        out << j.dump(2) << '\n';
        return kExitOk;
    }
    out << "o1 : H^{" << key(o.p, o.q) << "} -> H^{" << key(o.p, o.q + 1) << "}  (" << src.size() << " -> "
        << dst.size() << ")\n";
    std::vector<std::string> header{"class"};
    for (const auto& s : src) header.push_back("[" + s + "]");
    Table t(header);
    for (std::size_t row = 0; row < dst.size(); ++row) {
        std::vector<std::string> cells{"[" + dst[row] + "]"};
        for (std::size_t c = 0; c < src.size(); ++c) cells.push_back(r.matrix(row, c).str());
        t.add(cells);
    }
    if (!src.empty() && !dst.empty()) t.print(out);
    out << "generic rank: " << r.generic_rank << '\n';
    for (const auto& v : r.kernel) out << "kernel: (" << join(strings(v), ", ") << ")\n";
    for (const auto& x : r.point_ranks)
        out << "rank at " << point_text(x.point, m.parameters) << ": " << x.rank << '\n';
    return kExitOk;
}

int cmd_mc(const Options& o, std::ostream& out) {
    const Manifest m = load(o);
    need_lie(m, "mc");
    const unsigned order = o.order ? o.order : m.order;
    const MaurerCartanResult r = mc_extend(m.spec(), m.psi1(), order);
    if (as_json(o)) {
        json j;
        j["name"] = m.name;
        j["order"] = order;
        j["psi1"] = m.psi1().str();
        json c = json::object();
        for (std::size_t k = 0; k < r.corrections.size(); ++k) c[std::to_string(k + 2)] = r.corrections[k].str();
        j["corrections"] = c;
        j["psi"] = r.family ? json(r.family->psi.str()) : json(nullptr);
        j["obstructed_order"] = r.obstructed_order ? json(*r.obstructed_order) : json(nullptr);
        json ob = json::array();
        for (const auto& f : r.obstruction) ob.push_back(f.str());
        j["obstruction"] = ob;
        out << j.dump(2) << '\n';
        return kExitOk;
    }
    out << "psi_1 = " << m.psi1().str() << '\n';
    for (std::size_t k = 0; k < r.corrections.size(); ++k) {
        out << "psi_" << k + 2 << " = " << r.corrections[k].str() << '\n';
    }
    if (r.obstructed_order) {
        out << "obstructed at order " << *r.obstructed_order << ":\n";
        for (std::size_t i = 0; i < r.obstruction.size(); ++i) {
            if (!r.obstruction[i].is_zero()) out << "  component " << i + 1 << ": " << r.obstruction[i].str() << '\n';
        }
    } else {
        out << "integrable to order " << order << '\n';
    }
    return kExitOk;
}

int cmd_jump(const Options& o, std::ostream& out) {
    const Manifest m = load(o);
    need_lie(m, "jump");
    if (o.points.size() != 1) {
        throw UsageError("jump needs exactly one --point");
    }
    const Point pt = parse_point(m, o.points.front());
    const DolbeaultModel model(m.spec());
    const JumpTable jt = jump_report(model, m.psi1(), pt);
    const HodgeTable predicted = jt.predicted_table();

    std::optional<OracleResult> oracle;
    std::string oracle_note;
    const unsigned order = o.order ? o.order : m.order;
    const MaurerCartanResult mc = mc_extend(m.spec(), m.psi1(), order);
    if (!mc.family) {
        oracle_note = "family obstructed at order " + std::to_string(*mc.obstructed_order);
    } else {
        try {
            oracle = oracle_hodge_at_point(*mc.family, pt);
        } catch (const IntegrabilityError& e) {
            oracle_note = e.what();
        }
    }
    const int n = m.dimension;
    const bool agree = oracle && oracle->table == predicted;
    if (as_json(o)) {
        json j;
        j["name"] = m.name;
        j["point"] = point_json(pt, m.parameters);
        json entries = json::object();
        for (const auto& e : jt.entries) {
            json x{{"h0", e.h0},
                   {"first_class", e.first_class},
                   {"second_class", e.second_class},
                   {"predicted", e.predicted}};
            x["oracle"] = oracle ? json(oracle->table.at(e.bidegree.p, e.bidegree.q)) : json(nullptr);
            entries[key(e.bidegree.p, e.bidegree.q)] = x;
        }
        j["entries"] = entries;
        j["summary_order"] = json::array();
        for (const auto& b : summary_order(n)) j["summary_order"].push_back(key(b.p, b.q));
        j["baseline"] = model.hodge().summary();
        j["predicted"] = predicted.summary();
        j["oracle"] = oracle ? json(oracle->table.summary()) : json(nullptr);
        j["oracle_order"] = order;
        j["oracle_scale"] = oracle ? json(oracle->scale.str()) : json(nullptr);
        if (!oracle_note.empty()) j["oracle_note"] = oracle_note;
        j["agree"] = agree;
        out << j.dump(2) << '\n';
        return kExitOk;
    }
    out << m.name << " at " << point_text(pt, m.parameters) << '\n';
    Table t({"(p,q)", "h(0)", "first", "second", "predicted", "oracle"});
    for (const auto& b : summary_order(n)) {
        const JumpEntry& e = jt.at(b.p, b.q);
        t.add({"(" + key(b.p, b.q) + ")", std::to_string(e.h0), std::to_string(e.first_class),
               std::to_string(e.second_class), std::to_string(e.predicted),
               oracle ? std::to_string(oracle->table.at(b.p, b.q)) : "-"});
    }
    t.print(out);
    out << "predicted: " << join(strings(predicted.summary()), " ") << '\n';
    if (oracle) {
        out << "oracle:    " << join(strings(oracle->table.summary()), " ") << "  (order " << order
            << " family at " << oracle->scale.str() << " * point)\n";
        out << (agree ? "oracle agrees\n" : "oracle DISAGREES with the first-order prediction\n");
    } else {
        out << "oracle unavailable: " << oracle_note << '\n';
    }
    return kExitOk;
}

int cmd_d1(const Options& o, std::ostream& out) {
    const Manifest m = load(o);
    need_lie(m, "d1");
    const DolbeaultModel model(m.spec());
    const int n = m.dimension;
    bool vanishes = true;
    json maps = json::object();
    std::vector<std::string> header{"rank d1"};
    for (int q = 0; q <= n; ++q) header.push_back("q=" + std::to_string(q));
    Table t(header);
    std::ostringstream detail;
    for (int p = 0; p < n; ++p) {
        std::vector<std::string> row{"p=" + std::to_string(p)};
        for (int q = 0; q <= n; ++q) {
            const QMatrix d1 = frolicher_d1(model, p, q);
            const std::size_t r = rank(d1);
            vanishes = vanishes && r == 0;
            row.push_back(std::to_string(r));
            maps[key(p, q)] = {{"rank", r}, {"matrix", matrix_json(d1)}};
            if (r > 0) {
                detail << "d1 : H^{" << key(p, q) << "} -> H^{" << key(p + 1, q) << "} = " << d1.str() << '\n';
            }
        }
        t.add(row);
    }
    if (as_json(o)) {
        json j;
        j["name"] = m.name;
        j["d1"] = maps;
        j["vanishes"] = vanishes;
        out << j.dump(2) << '\n';
        return kExitOk;
    }
    t.print(out);
    out << detail.str();
    out << (vanishes ? "d1 vanishes identically\n" : "d1 is nonzero\n");
    return kExitOk;
}

int cmd_witness(const Options& o, std::ostream& out) {
    const Manifest m = load(o);
    need_lie(m, "witness");
    const DolbeaultModel model(m.spec());
    std::optional<Witness> w;
    try {
        w = parallelisable_witness(model);
    } catch (const std::invalid_argument& e) {
        throw ValidationError(std::string(e.what()));
    }
    if (as_json(o)) {
        json j;
        j["name"] = m.name;
        if (w) {
            j["witness"] = {{"i", w->i + 1},
                            {"k", w->k + 1},
                            {"j", w->j + 1},
                            {"psi", w->psi.str()},
                            {"obstruction", w->obstruction.str()},
                            {"class", strings(w->obstruction_class)}};
        } else {
            j["witness"] = nullptr;
        }
        out << j.dump(2) << '\n';
        return kExitOk;
    }
    if (!w) {
        out << "none: del vanishes identically\n";
        return kExitOk;
    }
    out << "psi1 = " << w->psi.str() << '\n';
    out << "o1(f" << w->i + 1 << ") = " << w->obstruction.str() << '\n';
    out << "class in H^{1,1}: (" << join(strings(w->obstruction_class), ", ") << ")\n";
    return kExitOk;
}

// First order at which the constant extension of a class stops, or nullopt.
std::optional<unsigned> first_failing_order(const FreeComplex& c, int q, PVec alpha, unsigned bound) {
    for (unsigned n = 1; n <= bound; ++n) {
        const ExtendStep step = extend_step(c, q, alpha, n);
        if (!step.extension) {
            return n;
        }
        alpha = *step.extension;
    }
    return std::nullopt;
}

int cmd_lab(const Options& o, std::ostream& out) {
    const Manifest m = load(o);
    if (m.kind != Manifest::Kind::FreeComplex) {
        throw UsageError("lab needs a free-complex manifest; '" + m.name + "' is a lie algebra");
    }
    const FreeComplex c = m.complex();
    if (o.q >= c.length()) {
        throw UsageError("--q must be below " + std::to_string(c.length()));
    }
    std::vector<int> qs;
    for (int q = 0; q < c.length(); ++q) {
        if (o.q < 0 || o.q == q) qs.push_back(q);
    }
    json reports = json::object();
    Table t({"q", "h(0)", "h(gen)", "ker drop", "im rise", "first", "second", "bound", "consistent"});
    std::ostringstream detail;
    for (int q : qs) {
        const JumpAccounting a = jump_accounting(c, q);
        if (!a.consistent) {
            throw InvariantError("jump accounting fails at q=" + std::to_string(q) + ": " + a.note);
        }
        const SecondClass sc = classify_second_class(c, q);
        json classes = json::array();
        const CohomologyBasis h = central_cohomology(c, q);
        for (std::size_t r = 0; r < h.dim(); ++r) {
            PVec alpha;
            for (const auto& x : h.representatives()[r]) alpha.push_back(Poly(c.ring(), x));
            const auto fail = q + 1 < c.length() ? first_failing_order(c, q, alpha, c.order_bound())
                                                 : std::optional<unsigned>{};
            json cls{{"representative", strings(h.representatives()[r])}};
            cls["obstructed_at"] = fail ? json(*fail) : json(nullptr);
            detail << "  q=" << q << " class (" << join(strings(h.representatives()[r]), ", ") << "): "
                   << (fail ? "obstructed at order " + std::to_string(*fail)
                            : "extends to order " + std::to_string(c.order_bound()))
                   << '\n';
            classes.push_back(cls);
        }
        reports[std::to_string(q)] = {{"h_zero", a.h_zero},
                                      {"h_generic", a.h_generic},
                                      {"kernel_drop", a.kernel_drop},
                                      {"image_rise", a.image_rise},
                                      {"first_class", a.first_class},
                                      {"second_class", a.second_class},
                                      {"order_bound", a.order_bound},
                                      {"consistent", a.consistent},
                                      {"second_class_methods_agree", sc.saturation.size() == sc.jet_search.size()},
                                      {"classes", classes}};
        t.add({std::to_string(q), std::to_string(a.h_zero), std::to_string(a.h_generic), std::to_string(a.kernel_drop),
               std::to_string(a.image_rise), std::to_string(a.first_class), std::to_string(a.second_class),
               std::to_string(a.order_bound), a.consistent ? "yes" : "no"});
    }
    if (as_json(o)) {
        json j;
        j["name"] = m.name;
        j["parameter"] = c.parameter();
        j["ranks"] = c.ranks();
        j["reports"] = reports;
        out << j.dump(2) << '\n';
        return kExitOk;
    }
    out << m.name << ": free complex over Q(i)[" << c.parameter() << "], ranks " << join(strings(c.ranks()), " ")
        << '\n';
    t.print(out);
    out << detail.str();
    return kExitOk;
}

void report_error(std::ostream& out, std::ostream& err, bool json_out, int code, const std::string& kind,
                  const std::string& message, const ManifestError* me = nullptr) {
    err << "nilhodge: " << kind << " error: " << message << '\n';
    if (json_out) {
        json j{{"code", code}, {"kind", kind}, {"message", message}};
        if (me) {
            j["source"] = me->source();
            j["line"] = me->line();
            j["pointer"] = me->pointer();
        }
        out << json{{"error", j}}.dump(2) << '\n';
    }
}

std::string error_kind(int code) {
    switch (code) {
        case kExitUsage: return "usage";
        case kExitValidation: return "validation";
        default: return "internal";
    }
}

}  // namespace

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const UsageError*>(&e)) return kExitUsage;
    if (dynamic_cast<const ValidationError*>(&e)) return kExitValidation;
    return kExitInternal;
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const auto started = std::chrono::steady_clock::now();
    CLI::App app{"Invariant Dolbeault cohomology, deformation obstructions and Hodge-number jumps of nilmanifolds",
                 "nilhodge"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
    app.add_option("--data-dir", o.data_dir, "Directory of builtin manifests");

    auto manifest = [&](CLI::App* sub) {
        sub->add_option("manifest", o.manifest, "Manifest path or builtin name")->required();
        sub->fallthrough();
    };
    CLI::App* validate = app.add_subcommand("validate", "Parse and validate a manifest");
    manifest(validate);
    CLI::App* hodge = app.add_subcommand("hodge", "Hodge numbers of the central fiber");
    manifest(hodge);
    CLI::App* obstruct = app.add_subcommand("obstruct", "First-order obstruction map H^{p,q} -> H^{p,q+1}");
    manifest(obstruct);
    obstruct->add_option("--p", o.p)->required();
    obstruct->add_option("--q", o.q)->required();
    obstruct->add_option("--point", o.points, "Named point or name=value,... (repeatable)");
    CLI::App* mc = app.add_subcommand("mc", "Maurer-Cartan completion of the first-order deformation");
    manifest(mc);
    mc->add_option("--order", o.order, "Target order (default: manifest option)")->check(CLI::Range(1u, 8u));
    CLI::App* jump = app.add_subcommand("jump", "Predicted Hodge numbers near a point, with oracle");
    manifest(jump);
    jump->add_option("--point", o.points, "Named point or name=value,...")->required();
    jump->add_option("--order", o.order, "Order of the family used by the oracle")->check(CLI::Range(1u, 8u));
    CLI::App* d1 = app.add_subcommand("d1", "Froelicher d1 on the central fiber");
    manifest(d1);
    CLI::App* witness = app.add_subcommand("witness", "Nonvanishing o1 certificate for a parallelisable structure");
    manifest(witness);
    CLI::App* lab = app.add_subcommand("lab", "Obstruction calculus on a free complex");
    manifest(lab);
    lab->add_option("--q", o.q, "Restrict to one degree");

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        // --help and --version exit 0; every other parse failure is a usage error.
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    const bool json_out = as_json(o);
    int code = kExitOk;
    try {
        if (validate->parsed()) code = cmd_validate(o, out);
        else if (hodge->parsed()) code = cmd_hodge(o, out);
        else if (obstruct->parsed()) code = cmd_obstruct(o, out);
        else if (mc->parsed()) code = cmd_mc(o, out);
        else if (jump->parsed()) code = cmd_jump(o, out);
        else if (d1->parsed()) code = cmd_d1(o, out);
        else if (witness->parsed()) code = cmd_witness(o, out);
        else if (lab->parsed()) code = cmd_lab(o, out);
    } catch (const std::exception& e) {
        code = exit_code_for(e);
        report_error(out, err, json_out, code, error_kind(code), e.what(), dynamic_cast<const ManifestError*>(&e));
    }
    if (const char* v = std::getenv("NILHODGE_VERBOSE"); v && *v && std::string(v) != "0") {
        const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
        err << "nilhodge: " << ms.count() << " ms\n";
    }
    return code;
}

}  // namespace nilhodge
