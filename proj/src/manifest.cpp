#include "nilhodge/manifest.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "nilhodge/defo.hpp"

#ifndef NILHODGE_DATA_DIR
#define NILHODGE_DATA_DIR "data"
#endif

namespace nilhodge {

namespace {

using json = nlohmann::ordered_json;

// Iterator over the manifest text that records how far the parser has read,
// so parse callbacks can be mapped back to a line.
class CountingIterator {
  public:
    using iterator_category = std::input_iterator_tag;
    using value_type = char;
    using difference_type = std::ptrdiff_t;
    using pointer = const char*;
    using reference = const char&;

    CountingIterator() = default;
    CountingIterator(const char* p, std::size_t* consumed) : p_(p), consumed_(consumed) {}

    reference operator*() const { return *p_; }
    CountingIterator& operator++() {
        ++p_;
        if (consumed_) {
            ++*consumed_;
        }
        return *this;
    }
    CountingIterator operator++(int) {
        CountingIterator old = *this;
        ++*this;
        return old;
    }
    friend bool operator==(const CountingIterator& a, const CountingIterator& b) { return a.p_ == b.p_; }
    friend bool operator!=(const CountingIterator& a, const CountingIterator& b) { return a.p_ != b.p_; }

  private:
    const char* p_ = nullptr;
    std::size_t* consumed_ = nullptr;
};

std::string escape_token(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '~') {
            out += "~0";
        } else if (c == '/') {
            out += "~1";
        } else {
            out += c;
        }
    }
    return out;
}

struct Frame {
    bool array = false;
    std::string pointer;
    std::string key;
    std::size_t index = 0;

    std::string child() const { return pointer + "/" + (array ? std::to_string(index) : escape_token(key)); }
};

struct Document {
    json root;
    std::map<std::string, int> lines;  // JSON pointer -> line of the value
};

int line_at(std::string_view text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

Document parse_document(std::string_view text, const std::string& source) {
    Document doc;
    std::size_t consumed = 0;
    std::vector<Frame> stack;
    bool at_root = true;
    auto current_pointer = [&]() -> std::string {
        if (stack.empty()) {
            return "";
        }
        return stack.back().child();
    };
    auto after_value = [&] {
        if (!stack.empty() && stack.back().array) {
            ++stack.back().index;
        }
    };
    json::parser_callback_t cb = [&](int, json::parse_event_t event, json& parsed) {
        const int line = line_at(text, consumed == 0 ? 0 : consumed - 1);
        switch (event) {
            case json::parse_event_t::object_start:
            case json::parse_event_t::array_start: {
                const std::string ptr = at_root ? "" : current_pointer();
                at_root = false;
                doc.lines.try_emplace(ptr, line);
                stack.push_back({event == json::parse_event_t::array_start, ptr, "", 0});
                break;
            }
            case json::parse_event_t::key:
                stack.back().key = parsed.get<std::string>();
                doc.lines.try_emplace(stack.back().child(), line);
                break;
            case json::parse_event_t::value:
                doc.lines.try_emplace(current_pointer(), line);
                after_value();
                break;
            case json::parse_event_t::object_end:
            case json::parse_event_t::array_end:
                stack.pop_back();
                after_value();
                break;
        }
        return true;
    };
    try {
        doc.root = json::parse(CountingIterator(text.data(), &consumed),
                               CountingIterator(text.data() + text.size(), nullptr), cb);
    } catch (const json::parse_error& e) {
        const std::size_t byte = e.byte == 0 ? 0 : e.byte - 1;
        std::string what = e.what();
        // "[json.exception.parse_error.101] parse error at line 3, column 5: ..." -> keep the tail.
        if (auto pos = what.find(": "); pos != std::string::npos) {
            what = what.substr(pos + 2);
        }
        throw ManifestError(source, line_at(text, byte), "", "malformed JSON: " + what);
    }
    return doc;
}

std::string display_pointer(const std::string& ptr) { return ptr.empty() ? "/" : ptr; }

class Reader {
  public:
    Reader(const Document& doc, std::string source) : doc_(doc), source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& ptr, const std::string& message) const {
        throw ManifestError(source_, line_of(ptr), display_pointer(ptr), message);
    }

    int line_of(std::string ptr) const {
        while (true) {
            if (auto it = doc_.lines.find(ptr); it != doc_.lines.end()) {
                return it->second;
            }
            if (ptr.empty()) {
                return 0;
            }
            ptr = ptr.substr(0, ptr.rfind('/'));
        }
    }

    const json& object(const json& j, const std::string& ptr, std::initializer_list<std::string_view> required,
                       std::initializer_list<std::string_view> optional) const {
        if (!j.is_object()) {
            fail(ptr, "expected an object");
        }
        for (const auto& [key, value] : j.items()) {
            const bool known = std::find(required.begin(), required.end(), key) != required.end() ||
                               std::find(optional.begin(), optional.end(), key) != optional.end();
            if (!known) {
                fail(ptr + "/" + escape_token(key), "unknown field '" + key + "'");
            }
        }
        for (auto key : required) {
            if (!j.contains(std::string(key))) {
                fail(ptr, "missing required field '" + std::string(key) + "'");
            }
        }
        return j;
    }

    std::string string(const json& j, const std::string& ptr) const {
        if (!j.is_string()) {
            fail(ptr, "expected a string");
        }
        return j.get<std::string>();
    }

    long integer(const json& j, const std::string& ptr, long lo, long hi) const {
        if (!j.is_number_integer()) {
            fail(ptr, "expected an integer");
        }
        const long v = j.get<long>();
        if (v < lo || v > hi) {
            fail(ptr, "expected an integer in " + std::to_string(lo) + ".." + std::to_string(hi) + ", got " +
                          std::to_string(v));
        }
        return v;
    }

    const json& array(const json& j, const std::string& ptr) const {
        if (!j.is_array()) {
            fail(ptr, "expected an array");
        }
        return j;
    }

    GaussianRational scalar(const json& j, const std::string& ptr) const {
        if (j.is_number_integer()) {
            return GaussianRational(j.get<long>());
        }
        const std::string s = string(j, ptr);
        try {
            return GaussianRational::parse(s);
        } catch (const std::exception& e) {
            fail(ptr, "bad coefficient '" + s + "': " + e.what());
        }
    }

    Poly poly(const json& j, const std::string& ptr, const RingPtr& ring) const {
        if (j.is_number_integer()) {
            return Poly(ring, GaussianRational(j.get<long>()));
        }
        const std::string s = string(j, ptr);
        try {
            return parse_poly(s, ring);
        } catch (const std::exception& e) {
            fail(ptr, "bad polynomial '" + s + "': " + e.what());
        }
    }

  private:
    const Document& doc_;
    std::string source_;
};

std::string ptr_join(const std::string& base, std::string_view key) { return base + "/" + std::string(key); }
std::string ptr_join(const std::string& base, std::size_t index) { return base + "/" + std::to_string(index); }

void read_options(const Reader& rd, const json& root, Manifest& m) {
    if (!root.contains("options")) {
        return;
    }
    const json& opts = rd.object(root["options"], "/options", {}, {"order", "points"});
    if (opts.contains("order")) {
        m.order = static_cast<unsigned>(rd.integer(opts["order"], "/options/order", 1, 8));
    }
    if (opts.contains("points")) {
        const json& pts = rd.array(opts["points"], "/options/points");
        std::set<std::string> seen;
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const std::string ptr = ptr_join("/options/points", k);
            const json& p = rd.object(pts[k], ptr, {"name", "values"}, {});
            NamedPoint np;
            np.name = rd.string(p["name"], ptr + "/name");
            if (np.name.empty() || np.name.find('=') != std::string::npos) {
                rd.fail(ptr + "/name", "point names must be nonempty and contain no '='");
            }
            if (!seen.insert(np.name).second) {
                rd.fail(ptr + "/name", "duplicate point '" + np.name + "'");
            }
            if (!p["values"].is_object()) {
                rd.fail(ptr + "/values", "expected an object of parameter values");
            }
            for (const auto& [key, v] : p["values"].items()) {
                const std::string vptr = ptr + "/values/" + escape_token(key);
                if (std::find(m.parameters.begin(), m.parameters.end(), key) == m.parameters.end()) {
                    rd.fail(vptr, "unknown parameter '" + key + "'");
                }
                np.values[key] = rd.scalar(v, vptr);
            }
            m.points.push_back(std::move(np));
        }
    }
}

}  // namespace

ManifestError::ManifestError(std::string source, int line, std::string pointer, const std::string& message)
    : ValidationError(source + ":" + (line > 0 ? std::to_string(line) + ":" : std::string()) + " " +
                      (pointer.empty() ? std::string() : pointer + ": ") + message),
      source_(std::move(source)),
      line_(line),
      pointer_(std::move(pointer)),
      detail_(message) {}

std::string_view kind_name(Manifest::Kind kind) {
    return kind == Manifest::Kind::LieAlgebra ? "lie-algebra" : "free-complex";
}

ComplexStructureSpec Manifest::spec() const {
    if (kind != Kind::LieAlgebra) {
        throw std::invalid_argument("manifest '" + name + "' is not a lie-algebra manifest");
    }
    std::vector<Form<GaussianRational>> dphi(static_cast<std::size_t>(dimension), Form<GaussianRational>(dimension));
    for (const auto& e : structure) {
        dphi[static_cast<std::size_t>(e.k - 1)].add(e.monomial, e.coeff);
    }
    return ComplexStructureSpec(dimension, std::move(dphi));
}

VectorForm<Poly> Manifest::psi1() const {
    VectorForm<Poly> psi(dimension, 1);
    for (const auto& e : deformation) {
        psi.add(e.i - 1, Mask{1} << (dimension + e.lambda - 1), e.coeff);
    }
    return psi;
}

FreeComplex Manifest::complex() const {
    if (kind != Kind::FreeComplex) {
        throw std::invalid_argument("manifest '" + name + "' is not a free-complex manifest");
    }
    return FreeComplex(parameter, ranks, differentials);
}

const NamedPoint* Manifest::find_point(std::string_view n) const {
    for (const auto& p : points) {
        if (p.name == n) {
            return &p;
        }
    }
    return nullptr;
}

namespace {

// Diagnostics name generators as "d^2(f2)"; point at the entries defining it.
std::string pointer_for_generator(const Manifest& m, const std::string& message) {
    const auto open = message.find("d^2(");
    if (open != std::string::npos) {
        const auto close = message.find(')', open);
        const std::string gen = message.substr(open + 4, close - open - 4);
        if (gen.size() >= 2 && (gen[0] == 'f' || gen[0] == 'c')) {
            const int k = std::stoi(gen.substr(1));
            for (std::size_t idx = 0; idx < m.structure.size(); ++idx) {
                if (m.structure[idx].k == k) {
                    return ptr_join("/structure", idx);
                }
            }
        }
    }
    return "/structure";
}

void read_lie_algebra(const Reader& rd, const json& root, Manifest& m) {
    rd.object(root, "", {"name", "kind", "dimension", "structure"},
              {"description", "parameters", "deformation", "options"});
    m.dimension = static_cast<int>(rd.integer(root["dimension"], "/dimension", 1, kMaxDim));
    const int n = m.dimension;
    if (root.contains("parameters")) {
        const json& ps = rd.array(root["parameters"], "/parameters");
        std::set<std::string> seen;
        for (std::size_t k = 0; k < ps.size(); ++k) {
            const std::string ptr = ptr_join("/parameters", k);
            std::string name = rd.string(ps[k], ptr);
            const bool ident = !name.empty() && std::isalpha(static_cast<unsigned char>(name[0])) &&
                               std::all_of(name.begin(), name.end(), [](char c) {
                                   return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
                               });
            if (!ident || name == "i") {
                rd.fail(ptr, "parameter names must be identifiers other than 'i'");
            }
            if (!seen.insert(name).second) {
                rd.fail(ptr, "duplicate parameter '" + name + "'");
            }
            m.parameters.push_back(std::move(name));
        }
    }
    m.ring = make_ring(m.parameters);

    const json& st = rd.array(root["structure"], "/structure");
    for (std::size_t idx = 0; idx < st.size(); ++idx) {
        const std::string ptr = ptr_join("/structure", idx);
        const json& e = rd.object(st[idx], ptr, {"k", "form", "coeff"}, {});
        StructureEntry entry;
        entry.k = static_cast<int>(rd.integer(e["k"], ptr + "/k", 1, n));
        const std::string form = rd.string(e["form"], ptr + "/form");
        int sign = 0;
        try {
            std::tie(entry.monomial, sign) = parse_monomial(form, n);
        } catch (const std::exception& ex) {
            rd.fail(ptr + "/form", ex.what());
        }
        if (sign == 0) {
            rd.fail(ptr + "/form", "'" + form + "' repeats a factor");
        }
        if (std::popcount(entry.monomial) != 2) {
            rd.fail(ptr + "/form", "structure equations need 2-forms, got '" + form + "'");
        }
        if (anti_count(entry.monomial, n) == 2) {
            rd.fail(ptr + "/form", "(0,2)-component '" + form + "': the structure is not integrable");
        }
        entry.coeff = rd.scalar(e["coeff"], ptr + "/coeff");
        if (sign < 0) {
            entry.coeff = -entry.coeff;
        }
        for (std::size_t prev = 0; prev < m.structure.size(); ++prev) {
            if (m.structure[prev].k == entry.k && m.structure[prev].monomial == entry.monomial) {
                rd.fail(ptr, "duplicate entry for d f" + std::to_string(entry.k) + " on " + monomial_str(entry.monomial, n));
            }
        }
        m.structure.push_back(entry);
    }

    if (root.contains("deformation")) {
        const json& df = rd.array(root["deformation"], "/deformation");
        for (std::size_t idx = 0; idx < df.size(); ++idx) {
            const std::string ptr = ptr_join("/deformation", idx);
            const json& e = rd.object(df[idx], ptr, {"i", "lambda", "coeff"}, {});
            DeformationEntry entry;
            entry.i = static_cast<int>(rd.integer(e["i"], ptr + "/i", 1, n));
            entry.lambda = static_cast<int>(rd.integer(e["lambda"], ptr + "/lambda", 1, n));
            entry.coeff = rd.poly(e["coeff"], ptr + "/coeff", m.ring);
            for (const auto& prev : m.deformation) {
                if (prev.i == entry.i && prev.lambda == entry.lambda) {
                    rd.fail(ptr, "duplicate deformation entry");
                }
            }
            m.deformation.push_back(std::move(entry));
        }
    }
    read_options(rd, root, m);

    const ComplexStructureSpec spec = m.spec();
    for (const auto& d : validate_spec(spec)) {
        if (d.severity == Diagnostic::Severity::Error) {
            rd.fail(pointer_for_generator(m, d.message), d.message);
        }
        m.warnings.push_back(d);
    }
    if (!m.deformation.empty()) {
        const auto diags = validate_first_order(spec, m.psi1());
        if (!diags.empty()) {
            rd.fail("/deformation", diags.front().message);
        }
    }
}

void read_free_complex(const Reader& rd, const json& root, Manifest& m) {
    rd.object(root, "", {"name", "kind", "ranks", "differentials"}, {"description", "parameter"});
    if (root.contains("parameter")) {
        m.parameter = rd.string(root["parameter"], "/parameter");
        if (m.parameter.empty() || !std::isalpha(static_cast<unsigned char>(m.parameter[0])) || m.parameter == "i") {
            rd.fail("/parameter", "parameter must be an identifier other than 'i'");
        }
    }
    const RingPtr ring = make_ring({m.parameter});
    const json& rk = rd.array(root["ranks"], "/ranks");
    if (rk.empty()) {
        rd.fail("/ranks", "need at least one term");
    }
    for (std::size_t q = 0; q < rk.size(); ++q) {
        m.ranks.push_back(static_cast<std::size_t>(rd.integer(rk[q], ptr_join("/ranks", q), 0, 64)));
    }
    const json& ds = rd.array(root["differentials"], "/differentials");
    if (ds.size() + 1 != m.ranks.size()) {
        rd.fail("/differentials", "expected " + std::to_string(m.ranks.size() - 1) + " differentials for " +
                                      std::to_string(m.ranks.size()) + " terms");
    }
    for (std::size_t q = 0; q < ds.size(); ++q) {
        const std::string ptr = ptr_join("/differentials", q);
        const json& rows = rd.array(ds[q], ptr);
        const std::size_t nr = m.ranks[q + 1], nc = m.ranks[q];
        if (rows.size() != nr) {
            rd.fail(ptr, "d^" + std::to_string(q) + " needs " + std::to_string(nr) + " rows, got " +
                             std::to_string(rows.size()));
        }
        PMatrix mat(nr, nc);
        for (std::size_t r = 0; r < nr; ++r) {
            const std::string rptr = ptr_join(ptr, r);
            const json& row = rd.array(rows[r], rptr);
            if (row.size() != nc) {
                rd.fail(rptr, "row needs " + std::to_string(nc) + " entries, got " + std::to_string(row.size()));
            }
            for (std::size_t c = 0; c < nc; ++c) {
                mat(r, c) = rd.poly(row[c], ptr_join(rptr, c), ring);
            }
        }
        m.differentials.push_back(std::move(mat));
    }
    const FreeComplex complex = m.complex();
    for (const auto& d : validate_complex(complex)) {
        std::string ptr = "/differentials";
        const auto at = d.message.find("(q=");
        if (at != std::string::npos) {
            ptr = ptr_join(ptr, static_cast<std::size_t>(std::stoul(d.message.substr(at + 3))));
        }
        rd.fail(ptr, d.message);
    }
}

}  // namespace

Manifest parse_manifest(std::string_view text, const std::string& source) {
    const Document doc = parse_document(text, source);
    const Reader rd(doc, source);
    const json& root = doc.root;
    if (!root.is_object()) {
        rd.fail("", "a manifest must be a JSON object");
    }
    Manifest m;
    m.source = source;
    if (!root.contains("kind")) {
        rd.fail("", "missing required field 'kind'");
    }
    const std::string kind = rd.string(root["kind"], "/kind");
    if (!root.contains("name")) {
        rd.fail("", "missing required field 'name'");
    }
    m.name = rd.string(root["name"], "/name");
    if (root.contains("description")) {
        m.description = rd.string(root["description"], "/description");
    }
    if (kind == "lie-algebra") {
        m.kind = Manifest::Kind::LieAlgebra;
        read_lie_algebra(rd, root, m);
    } else if (kind == "free-complex") {
        m.kind = Manifest::Kind::FreeComplex;
        read_free_complex(rd, root, m);
    } else {
        rd.fail("/kind", "kind must be 'lie-algebra' or 'free-complex', got '" + kind + "'");
    }
    return m;
}

std::string serialize_manifest(const Manifest& m) {
    json j;
    j["name"] = m.name;
    j["kind"] = std::string(kind_name(m.kind));
    if (!m.description.empty()) {
        j["description"] = m.description;
    }
    if (m.kind == Manifest::Kind::LieAlgebra) {
        j["dimension"] = m.dimension;
        j["parameters"] = m.parameters;
        json st = json::array();
        for (const auto& e : m.structure) {
            st.push_back({{"k", e.k}, {"form", monomial_str(e.monomial, m.dimension)}, {"coeff", e.coeff.str()}});
        }
        j["structure"] = st;
        json df = json::array();
        for (const auto& e : m.deformation) {
            df.push_back({{"i", e.i}, {"lambda", e.lambda}, {"coeff", e.coeff.str()}});
        }
        j["deformation"] = df;
        json pts = json::array();
        for (const auto& p : m.points) {
            json values = json::object();
            // Parameter order, not map order.
            for (const auto& name : m.parameters) {
                if (auto it = p.values.find(name); it != p.values.end()) {
                    values[name] = it->second.str();
                }
            }
            pts.push_back({{"name", p.name}, {"values", values}});
        }
        j["options"] = {{"order", m.order}, {"points", pts}};
    } else {
        j["parameter"] = m.parameter;
        j["ranks"] = m.ranks;
        json ds = json::array();
        for (const auto& d : m.differentials) {
            json rows = json::array();
            for (std::size_t r = 0; r < d.rows(); ++r) {
                json row = json::array();
                for (std::size_t c = 0; c < d.cols(); ++c) {
                    row.push_back(d(r, c).str());
                }
                rows.push_back(row);
            }
            ds.push_back(rows);
        }
        j["differentials"] = ds;
    }
    return j.dump(2) + "\n";
}

std::filesystem::path default_data_dir() { return std::filesystem::path(NILHODGE_DATA_DIR); }

std::filesystem::path resolve_manifest(const std::string& where, const std::filesystem::path& data_dir) {
    namespace fs = std::filesystem;
    const fs::path direct(where);
    if (fs::exists(direct)) {
        return direct;
    }
    if (direct.has_parent_path()) {
        return direct;  // an explicit path that does not exist; reported on open
    }
    for (const fs::path& candidate : {data_dir / where, data_dir / (where + ".json")}) {
        if (fs::exists(candidate)) {
            return candidate;
        }
    }
    return direct;
}

Manifest load_manifest(const std::string& where, const std::filesystem::path& data_dir) {
    const auto path = resolve_manifest(where, data_dir);
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ManifestError(where, 0, "", "cannot open manifest (not a file and not a builtin in " + data_dir.string() + ")");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_manifest(buf.str(), path.filename().string());
}

}  // namespace nilhodge
