#ifndef BIHARM_SCENARIO_HPP
#define BIHARM_SCENARIO_HPP

// Scenario files: sectioned key = value text. Grammar in docs/scenario-format.md.
// Errors carry section, key and a 1-based line:column offset.

#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <variant>

#include "biharm/variational.hpp"

namespace biharm {

struct ScenarioError : std::runtime_error {
    std::string section, key;
    int line = 0, column = 0;
    ScenarioError(const std::string& msg, std::string sec, std::string k, int l, int c)
        : std::runtime_error(format(msg, sec, k, l, c)), section(std::move(sec)), key(std::move(k)), line(l), column(c) {}
    static std::string format(const std::string& msg, const std::string& sec, const std::string& k, int l, int c) {
        std::string s = std::to_string(l) + ":" + std::to_string(c);
        if (!sec.empty()) s += " [" + sec + "]";
        if (!k.empty()) s += " " + k;
        return s + ": " + msg;
    }
};

// validation failure naming the invariant that was checked
struct ValidationError : std::runtime_error {
    std::string invariant;
    ValidationError(std::string inv, const std::string& msg)
        : std::runtime_error(inv + ": " + msg), invariant(std::move(inv)) {}
};

// ---------------------------------------------------------------------------
// raw document

struct Value;
using Array = std::vector<Value>;

struct Value {
    enum class Kind { integer, real, boolean, string, unknown, array } kind = Kind::unknown;
    long long i = 0;
    double d = 0;
    bool b = false;
    std::string s;
    Array a;
    int line = 0, column = 0;
};

inline const char* kind_name(Value::Kind k) {
    switch (k) {
        case Value::Kind::integer: return "integer";
        case Value::Kind::real: return "number";
        case Value::Kind::boolean: return "boolean";
        case Value::Kind::string: return "string";
        case Value::Kind::unknown: return "unknown";
        case Value::Kind::array: return "array";
    }
    return "?";
}

struct Entry {
    std::string key;
    Value value;
    int line = 0, column = 0;
};

struct Section {
    std::string name;
    std::vector<Entry> entries;
    int line = 0, column = 0;
    const Entry* find(const std::string& k) const {
        for (const auto& e : entries)
            if (e.key == k) return &e;
        return nullptr;
    }
};

struct Document {
    std::vector<Section> sections;
    const Section* find(const std::string& n) const {
        for (const auto& s : sections)
            if (s.name == n) return &s;
        return nullptr;
    }
};

namespace scn_detail {

class Reader {
public:
    explicit Reader(std::string_view src) : s_(src) {}

    Document run() {
        Document doc;
        while (true) {
            skip_blank();
            if (eof()) break;
            char c = peek();
            if (c == '[') {
                int l = line_, col = col_;
                get();
                std::string name = ident("section name");
                skip_ws();
                expect(']', "']' after section name");
                end_of_line();
                for (const auto& s : doc.sections)
                    if (s.name == name) fail("duplicate section", name, "", l, col);
                doc.sections.push_back({name, {}, l, col});
                sec_ = name;
            } else {
                int l = line_, col = col_;
                if (doc.sections.empty()) fail("key outside any section", "", "", l, col);
                std::string key = ident("key");
                key_ = key;
                skip_ws();
                expect('=', "'=' after key");
                skip_ws();
                Value v = value(false);
                end_of_line();
                auto& sec = doc.sections.back();
                if (sec.find(key)) fail("duplicate key", sec.name, key, l, col);
                sec.entries.push_back({key, std::move(v), l, col});
                key_.clear();
            }
        }
        return doc;
    }

private:
    std::string_view s_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    std::string sec_, key_;

    bool eof() const { return pos_ >= s_.size(); }
    char peek() const { return eof() ? '\0' : s_[pos_]; }
    char get() {
        char c = s_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }
    [[noreturn]] void fail(const std::string& msg, const std::string& sec, const std::string& key, int l, int c) const {
        throw ScenarioError(msg, sec, key, l, c);
    }
    [[noreturn]] void fail(const std::string& msg) const { fail(msg, sec_, key_, line_, col_); }

    void skip_ws() {
        while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) get();
    }
    void skip_comment() {
        if (peek() == '#')
            while (!eof() && peek() != '\n') get();
    }
    // whitespace, comments and newlines
    void skip_blank() {
        while (!eof()) {
            skip_ws();
            skip_comment();
            if (peek() == '\n')
                get();
            else
                break;
        }
    }
    void end_of_line() {
        skip_ws();
        skip_comment();
        if (eof()) return;
        if (peek() != '\n') fail(std::string("unexpected '") + peek() + "'");
        get();
    }
    void expect(char c, const char* what) {
        if (peek() != c) fail(std::string("expected ") + what);
        get();
    }
    static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
    static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; }
    std::string ident(const char* what) {
        if (!ident_start(peek())) fail(std::string("expected ") + what);
        std::string r;
        while (!eof() && ident_char(peek())) r += get();
        return r;
    }

    Value value(bool in_array) {
        Value v;
        v.line = line_;
        v.column = col_;
        if (eof()) fail("missing value");
        char c = peek();
        if (c == '"') {
            get();
            v.kind = Value::Kind::string;
            while (true) {
                if (eof() || peek() == '\n') fail("unterminated string", sec_, key_, v.line, v.column);
                char ch = get();
                if (ch == '"') break;
                if (ch == '\\') {
                    if (eof()) fail("unterminated escape");
                    char e = get();
                    switch (e) {
                        case '"': v.s += '"'; break;
                        case '\\': v.s += '\\'; break;
                        case 'n': v.s += '\n'; break;
                        case 't': v.s += '\t'; break;
                        default: fail(std::string("unknown escape \\") + e);
                    }
                } else {
                    v.s += ch;
                }
            }
            return v;
        }
        if (c == '[') {
            if (in_array) fail("nested arrays are not allowed");
            get();
            v.kind = Value::Kind::array;
            skip_blank();
            if (peek() == ']') {
                get();
                return v;
            }
            while (true) {
                skip_blank();
                v.a.push_back(value(true));
                skip_blank();
                if (peek() == ',') {
                    get();
                    skip_blank();
                    if (peek() == ']') {
                        get();
                        break;
                    }
                    continue;
                }
                if (peek() == ']') {
                    get();
                    break;
                }
                if (eof()) fail("unterminated array", sec_, key_, v.line, v.column);
                fail("expected ',' or ']' in array");
            }
            return v;
        }
        if (ident_start(c)) {
            std::string w;
            while (!eof() && ident_char(peek())) w += get();
            if (w == "true" || w == "false") {
                v.kind = Value::Kind::boolean;
                v.b = w == "true";
            } else if (w == "unknown") {
                v.kind = Value::Kind::unknown;
            } else {
                fail("bare word '" + w + "' (strings need quotes)", sec_, key_, v.line, v.column);
            }
            return v;
        }
        if (c == '+' || c == '-' || c == '.' || std::isdigit(static_cast<unsigned char>(c))) {
            std::string t;
            while (!eof()) {
                char ch = peek();
                if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '+' || ch == '-' || ch == '.')
                    t += get();
                else
                    break;
            }
            bool is_int = t.find_first_of(".eE") == std::string::npos;
            errno = 0;
            char* end = nullptr;
            if (is_int) {
                long long x = std::strtoll(t.c_str(), &end, 10);
                if (end != t.c_str() + t.size() || errno == ERANGE || t == "+" || t == "-")
                    fail("malformed integer '" + t + "'", sec_, key_, v.line, v.column);
                v.kind = Value::Kind::integer;
                v.i = x;
                v.d = static_cast<double>(x);
            } else {
                double x = std::strtod(t.c_str(), &end);
                if (end != t.c_str() + t.size() || !std::isfinite(x) || t.find_first_of("xXpP") != std::string::npos)
                    fail("malformed number '" + t + "'", sec_, key_, v.line, v.column);
                v.kind = Value::Kind::real;
                v.d = x;
            }
            return v;
        }
        fail(std::string("unexpected '") + c + "'");
    }
};

}  // namespace scn_detail

inline Document parse_document(std::string_view text) { return scn_detail::Reader(text).run(); }

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char b[17];
    std::snprintf(b, sizeof b, "%016llx", static_cast<unsigned long long>(v));
    return b;
}

// ---------------------------------------------------------------------------
// typed scenario

struct Tolerances {
    double residual = 1e-6;    // direct residual vanishing (biharmonic etc.)
    double agreement = 1e-6;   // theorem vs direct
    double coherence = 1e-10;  // corollary vs parent
    double flag = 1e-8;        // flag pre-checks
    double identity = 1e-8;    // proposition identities
    double audit = 1e-6;
    double periodicity = 1e-10;
};

struct VariationSpec {
    bool present = false;
    std::vector<std::string> functionals = {"E", "E2", "E2f", "Ef", "Ef2"};
    std::vector<std::string> field;
    std::vector<int> nodes;
    std::vector<double> steps = {1e-2, 1e-3, 1e-4};
    double tol = 1e-5;
};

struct Expectations {
    // tri-state: asserted = residual <= tol everywhere, denied = residual > tol somewhere
    Tri biharmonic = Tri::unknown, f_biharmonic = Tri::unknown, bi_f_harmonic = Tri::unknown;
    double min_biharmonic_residual = -1;  // max over samples must reach this
    std::string rejection;                 // scenario must fail validation naming this flag
};

struct Scenario {
    std::string path, name, description;
    std::string source;
    std::string digest;
    AmbientSpec ambient;
    std::vector<std::string> params, components;
    std::string weight = "1";
    std::vector<Axis> ranges;
    std::map<Flag, Tri> flags;
    std::vector<int> grid;
    double margin = 0.05;
    std::uint64_t seed = 1;
    int random_points = 0;
    Tolerances tol;
    std::string mode = "both";
    bool errata = true;
    Expectations expect;
    VariationSpec variation;

    Immersion imm;
    std::vector<Vec> samples;
};

namespace scn_detail {

struct Binder {
    const Document& doc;
    [[noreturn]] static void fail(const std::string& msg, const Section& s, const Entry& e) {
        throw ScenarioError(msg, s.name, e.key, e.value.line, e.value.column);
    }
    static void require_kind(const Section& s, const Entry& e, std::initializer_list<Value::Kind> ks) {
        for (auto k : ks)
            if (e.value.kind == k) return;
        std::string want;
        for (auto k : ks) want += (want.empty() ? "" : " or ") + std::string(kind_name(k));
        fail("expected " + want + ", got " + kind_name(e.value.kind), s, e);
    }
    static std::string str(const Section& s, const Entry& e) {
        require_kind(s, e, {Value::Kind::string});
        return e.value.s;
    }
    static double num(const Section& s, const Entry& e) {
        require_kind(s, e, {Value::Kind::integer, Value::Kind::real});
        return e.value.d;
    }
    static long long integer(const Section& s, const Entry& e) {
        require_kind(s, e, {Value::Kind::integer});
        return e.value.i;
    }
    static bool boolean(const Section& s, const Entry& e) {
        require_kind(s, e, {Value::Kind::boolean});
        return e.value.b;
    }
    static Tri tri(const Section& s, const Entry& e) {
        require_kind(s, e, {Value::Kind::boolean, Value::Kind::unknown});
        if (e.value.kind == Value::Kind::unknown) return Tri::unknown;
        return e.value.b ? Tri::asserted : Tri::denied;
    }
    static std::vector<std::string> strings(const Section& s, const Entry& e) {
        require_kind(s, e, {Value::Kind::array});
        std::vector<std::string> r;
        for (const auto& v : e.value.a) {
            if (v.kind != Value::Kind::string)
                throw ScenarioError("array elements must be strings", s.name, e.key, v.line, v.column);
            r.push_back(v.s);
        }
        return r;
    }
    static std::vector<double> numbers(const Section& s, const Entry& e) {
        require_kind(s, e, {Value::Kind::array});
        std::vector<double> r;
        for (const auto& v : e.value.a) {
            if (v.kind != Value::Kind::integer && v.kind != Value::Kind::real)
                throw ScenarioError("array elements must be numbers", s.name, e.key, v.line, v.column);
            r.push_back(v.d);
        }
        return r;
    }
    static std::vector<int> ints(const Section& s, const Entry& e) {
        require_kind(s, e, {Value::Kind::array});
        std::vector<int> r;
        for (const auto& v : e.value.a) {
            if (v.kind != Value::Kind::integer || v.i < -1000000 || v.i > 1000000)
                throw ScenarioError("array elements must be integers", s.name, e.key, v.line, v.column);
            r.push_back(static_cast<int>(v.i));
        }
        return r;
    }
    // constant expression like "2*pi" or a plain number
    static double constant(const Section& s, const Entry& e, const Value& v) {
        if (v.kind == Value::Kind::integer || v.kind == Value::Kind::real) return v.d;
        if (v.kind != Value::Kind::string)
            throw ScenarioError("expected a number or a constant expression", s.name, e.key, v.line, v.column);
        try {
            double x = eval_constant(v.s);
            if (!std::isfinite(x)) throw std::runtime_error("not finite");
            return x;
        } catch (const std::exception& ex) {
            throw ScenarioError(std::string("bad constant expression: ") + ex.what(), s.name, e.key, v.line, v.column);
        }
    }
};

inline void check_keys(const Section& s, std::initializer_list<const char*> allowed, bool prefix_ok = false,
                       const std::string& prefix = "") {
    for (const auto& e : s.entries) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || e.key == a;
        if (prefix_ok && e.key.rfind(prefix, 0) == 0) ok = true;
        if (!ok) throw ScenarioError("unknown key", s.name, e.key, e.line, e.column);
    }
}

}  // namespace scn_detail

// parse and bind, no geometry yet
inline Scenario bind_scenario(const std::string& text, const std::string& path = "") {
    using B = scn_detail::Binder;
    Document doc = parse_document(text);
    Scenario sc;
    sc.path = path;
    sc.source = text;
    sc.digest = hex64(fnv1a(text));
    static const std::vector<std::string> known = {"scenario", "ambient",    "immersion", "weight",   "flags",
                                                   "sampling", "tolerances", "mode",      "expect",   "variation"};
    for (const auto& s : doc.sections)
        if (std::find(known.begin(), known.end(), s.name) == known.end())
            throw ScenarioError("unknown section", s.name, "", s.line, s.column);
    auto need = [&](const char* n) -> const Section& {
        const Section* s = doc.find(n);
        if (!s) throw ScenarioError(std::string("missing section [") + n + "]", n, "", 1, 1);
        return *s;
    };
    auto need_key = [&](const Section& s, const char* k) -> const Entry& {
        const Entry* e = s.find(k);
        if (!e) throw ScenarioError("missing key", s.name, k, s.line, s.column);
        return *e;
    };

    if (const Section* s = doc.find("scenario")) {
        scn_detail::check_keys(*s, {"name", "description", "expect_rejection"});
        if (auto e = s->find("name")) sc.name = B::str(*s, *e);
        if (auto e = s->find("description")) sc.description = B::str(*s, *e);
        if (auto e = s->find("expect_rejection")) sc.expect.rejection = B::str(*s, *e);
    }

    {
        const Section& s = need("ambient");
        scn_detail::check_keys(s, {"kind", "n", "c", "coefficients"});
        sc.ambient.kind = B::str(s, need_key(s, "kind"));
        if (auto e = s.find("n")) {
            long long n = B::integer(s, *e);
            if (n < 1 || n > 8) B::fail("n must be in 1..8", s, *e);
            sc.ambient.n = static_cast<int>(n);
        }
        if (auto e = s.find("c")) {
            sc.ambient.c = B::num(s, *e);
            sc.ambient.has_c = true;
        }
        if (auto e = s.find("coefficients")) sc.ambient.coefficients = B::strings(s, *e);
    }

    {
        const Section& s = need("immersion");
        scn_detail::check_keys(s, {"params", "components", "periodic"}, true, "range.");
        sc.params = B::strings(s, need_key(s, "params"));
        const Entry& pe = need_key(s, "params");
        if (sc.params.empty() || sc.params.size() > 6) B::fail("need 1..6 parameters", s, pe);
        for (size_t i = 0; i < sc.params.size(); ++i) {
            const auto& p = sc.params[i];
            if (p.empty() || !(std::isalpha(static_cast<unsigned char>(p[0])) || p[0] == '_'))
                B::fail("bad parameter name '" + p + "'", s, pe);
            for (char ch : p)
                if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_')) B::fail("bad parameter name '" + p + "'", s, pe);
            for (size_t j = 0; j < i; ++j)
                if (sc.params[j] == p) B::fail("repeated parameter '" + p + "'", s, pe);
        }
        sc.components = B::strings(s, need_key(s, "components"));
        std::vector<std::string> periodic;
        if (auto e = s.find("periodic")) {
            periodic = B::strings(s, *e);
            for (const auto& p : periodic)
                if (std::find(sc.params.begin(), sc.params.end(), p) == sc.params.end())
                    B::fail("periodic names unknown parameter '" + p + "'", s, *e);
        }
        for (const auto& p : sc.params) {
            const Entry* e = s.find("range." + p);
            if (!e) throw ScenarioError("missing range for parameter '" + p + "'", s.name, "range." + p, s.line, s.column);
            B::require_kind(s, *e, {Value::Kind::array});
            if (e->value.a.size() != 2) B::fail("range needs [lo, hi]", s, *e);
            Axis ax;
            ax.lo = B::constant(s, *e, e->value.a[0]);
            ax.hi = B::constant(s, *e, e->value.a[1]);
            if (!(ax.hi > ax.lo)) B::fail("range needs lo < hi", s, *e);
            ax.periodic = std::find(periodic.begin(), periodic.end(), p) != periodic.end();
            sc.ranges.push_back(ax);
        }
        for (const auto& e : s.entries)
            if (e.key.rfind("range.", 0) == 0 &&
                std::find(sc.params.begin(), sc.params.end(), e.key.substr(6)) == sc.params.end())
                B::fail("range for unknown parameter", s, e);
    }

    if (const Section* s = doc.find("weight")) {
        scn_detail::check_keys(*s, {"f"});
        if (auto e = s->find("f")) sc.weight = B::str(*s, *e);
    }

    if (const Section* s = doc.find("flags")) {
        for (const auto& e : s->entries) {
            bool found = false;
            for (const auto& [fl, nm] : flag_names())
                if (e.key == nm) {
                    sc.flags[fl] = B::tri(*s, e);
                    found = true;
                }
            if (!found) throw ScenarioError("unknown flag", s->name, e.key, e.line, e.column);
        }
    }

    {
        const Section& s = need("sampling");
        scn_detail::check_keys(s, {"grid", "margin", "seed", "random"});
        const Entry& ge = need_key(s, "grid");
        sc.grid = B::ints(s, ge);
        if (sc.grid.size() != sc.params.size()) B::fail("grid needs one size per parameter", s, ge);
        long long total = 1;
        for (int g : sc.grid) {
            if (g < 4 || g > 64) B::fail("grid sizes must be in 4..64", s, ge);
            total *= g;
        }
        if (total > 4096) B::fail("grid has more than 4096 points", s, ge);
        if (auto e = s.find("margin")) {
            sc.margin = B::num(s, *e);
            if (!(sc.margin >= 0 && sc.margin < 0.5)) B::fail("margin must be in [0, 0.5)", s, *e);
        }
        if (auto e = s.find("seed")) {
            long long v = B::integer(s, *e);
            if (v < 0) B::fail("seed must be non-negative", s, *e);
            sc.seed = static_cast<std::uint64_t>(v);
        }
        if (auto e = s.find("random")) {
            long long v = B::integer(s, *e);
            if (v < 0 || v > 10000) B::fail("random must be in 0..10000", s, *e);
            sc.random_points = static_cast<int>(v);
        }
    }

    if (const Section* s = doc.find("tolerances")) {
        scn_detail::check_keys(*s, {"residual", "agreement", "coherence", "flag", "identity", "audit", "periodicity"});
        auto set = [&](const char* k, double& dst) {
            if (auto e = s->find(k)) {
                dst = B::num(*s, *e);
                if (!(dst > 0)) B::fail("tolerance must be positive", *s, *e);
            }
        };
        set("residual", sc.tol.residual);
        set("agreement", sc.tol.agreement);
        set("coherence", sc.tol.coherence);
        set("flag", sc.tol.flag);
        set("identity", sc.tol.identity);
        set("audit", sc.tol.audit);
        set("periodicity", sc.tol.periodicity);
    }

    if (const Section* s = doc.find("mode")) {
        scn_detail::check_keys(*s, {"mode", "errata"});
        if (auto e = s->find("mode")) {
            sc.mode = B::str(*s, *e);
            bool ok = sc.mode == "direct" || sc.mode == "theorem" || sc.mode == "both";
            for (const auto& t : theorem_catalog()) ok = ok || t.id == sc.mode;
            if (!ok) B::fail("mode must be direct, theorem, both or a theorem/corollary id", *s, *e);
        }
        if (auto e = s->find("errata")) sc.errata = B::boolean(*s, *e);
    }

    if (const Section* s = doc.find("expect")) {
        scn_detail::check_keys(*s, {"biharmonic", "f_biharmonic", "bi_f_harmonic", "min_biharmonic_residual"});
        if (auto e = s->find("biharmonic")) sc.expect.biharmonic = B::tri(*s, *e);
        if (auto e = s->find("f_biharmonic")) sc.expect.f_biharmonic = B::tri(*s, *e);
        if (auto e = s->find("bi_f_harmonic")) sc.expect.bi_f_harmonic = B::tri(*s, *e);
        if (auto e = s->find("min_biharmonic_residual")) sc.expect.min_biharmonic_residual = B::num(*s, *e);
    }

    if (const Section* s = doc.find("variation")) {
        scn_detail::check_keys(*s, {"functionals", "field", "nodes", "steps", "tol"});
        auto& v = sc.variation;
        v.present = true;
        if (auto e = s->find("functionals")) {
            v.functionals = B::strings(*s, *e);
            for (const auto& f : v.functionals) {
                try {
                    functional_from_string(f);
                } catch (const QuadratureError& ex) {
                    B::fail(ex.what(), *s, *e);
                }
            }
        }
        v.field = B::strings(*s, need_key(*s, "field"));
        const Entry& ne = need_key(*s, "nodes");
        v.nodes = B::ints(*s, ne);
        if (v.nodes.size() != sc.params.size()) B::fail("nodes needs one count per parameter", *s, ne);
        long long total = 1;
        for (int n : v.nodes) {
            if (n < 2 || n > 4096) B::fail("node counts must be in 2..4096", *s, ne);
            total *= n;
        }
        if (total > 65536) B::fail("quadrature grid has more than 65536 nodes", *s, ne);
        if (auto e = s->find("steps")) {
            v.steps = B::numbers(*s, *e);
            if (v.steps.size() < 2) B::fail("need at least two steps", *s, *e);
            for (double h : v.steps)
                if (!(h > 0)) B::fail("steps must be positive", *s, *e);
        }
        if (auto e = s->find("tol")) v.tol = B::num(*s, *e);
    }
    return sc;
}

// ---------------------------------------------------------------------------
// geometry-dependent validation

inline std::vector<Vec> sample_points(const Scenario& sc) {
    const int m = static_cast<int>(sc.params.size());
    std::vector<std::vector<double>> X(m);
    for (int a = 0; a < m; ++a) {
        const auto& ax = sc.ranges[a];
        int n = sc.grid[a];
        double L = ax.hi - ax.lo;
        for (int i = 0; i < n; ++i) {
            if (ax.periodic)
                X[a].push_back(ax.lo + L * i / n);
            else
                X[a].push_back(ax.lo + L * sc.margin + L * (1 - 2 * sc.margin) * i / (n - 1));
        }
    }
    std::vector<Vec> pts;
    std::vector<int> idx(m, 0);
    while (true) {
        Vec p(m);
        for (int a = 0; a < m; ++a) p[a] = X[a][idx[a]];
        pts.push_back(p);
        int a = m - 1;
        while (a >= 0 && ++idx[a] == sc.grid[a]) idx[a--] = 0;
        if (a < 0) break;
    }
    std::mt19937_64 rng(sc.seed);
    for (int k = 0; k < sc.random_points; ++k) {
        Vec p(m);
        for (int a = 0; a < m; ++a) {
            const auto& ax = sc.ranges[a];
            double L = ax.hi - ax.lo;
            double lo = ax.periodic ? ax.lo : ax.lo + L * sc.margin;
            double hi = ax.periodic ? ax.hi : ax.hi - L * sc.margin;
            // fixed mapping from raw bits, independent of the standard library's distributions
            double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            p[a] = lo + (hi - lo) * u;
        }
        pts.push_back(p);
    }
    return pts;
}

inline std::string format_number(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.6g", v);
    return b;
}

inline std::string point_string(const Vec& p) {
    std::string s = "(";
    for (int i = 0; i < p.size(); ++i) s += (i ? ", " : "") + format_number(p[i]);
    return s + ")";
}

inline void validate(Scenario& sc) {
    std::shared_ptr<AmbientSpace> amb;
    try {
        amb = make_space(sc.ambient);
    } catch (const std::exception& e) {
        throw ValidationError("ambient", e.what());
    }
    try {
        sc.imm = make_immersion(amb, sc.params, sc.components, sc.weight);
    } catch (const ParseError& e) {
        throw ValidationError("expression", e.what());
    } catch (const GeometryError& e) {
        throw ValidationError("components", e.what());
    }
    sc.imm.flags = sc.flags;
    sc.samples = sample_points(sc);

    // contact-only flags
    for (const auto& [fl, t] : sc.flags) {
        if (t == Tri::unknown) continue;
        if ((fl == Flag::xi_tangent || fl == Flag::xi_normal) && amb->structure_kind() != StructureKind::contact)
            throw ValidationError(std::string("flag:") + to_string(fl), "needs a contact ambient");
    }

    // periodicity: psi and f agree at the two ends of each periodic range
    const int m = sc.imm.m();
    for (int a = 0; a < m; ++a) {
        if (!sc.ranges[a].periodic) continue;
        double worst = 0;
        Vec where;
        for (const auto& p : sc.samples) try {
            std::vector<double> lo(p.data(), p.data() + m), hi = lo;
            lo[a] = sc.ranges[a].lo;
            hi[a] = sc.ranges[a].hi;
            for (const auto& c : sc.imm.components) {
                double d = std::abs(eval(c, lo) - eval(c, hi));
                if (!(d <= worst)) {
                    worst = d;
                    where = p;
                }
            }
            double d = std::abs(eval(sc.imm.weight, lo) - eval(sc.imm.weight, hi));
            if (!(d <= worst)) {
                worst = d;
                where = p;
            }
        } catch (const JetError& e) {
            throw ValidationError("domain", std::string(e.what()) + " at an end of the " + sc.params[a] + " range");
        }
        if (!(worst <= sc.tol.periodicity))
            throw ValidationError("periodicity", "psi(" + sc.params[a] + " = lo) != psi(" + sc.params[a] +
                                                     " = hi), gap " + format_number(worst) + " near " +
                                                     point_string(where));
    }

    // pointwise: chart, rank, f > 0, asserted flags
    std::map<Flag, bool> denied_seen_failing;
    for (const auto& [fl, t] : sc.flags)
        if (t == Tri::denied) denied_seen_failing[fl] = false;
    for (const auto& p : sc.samples) try {
        std::vector<double> pv(p.data(), p.data() + m);
        double f = eval(sc.imm.weight, pv);
        if (!(f > 0)) throw ValidationError("weight", "f must be positive, f = " + format_number(f) + " at " + point_string(p));
        try {
            Vec x(sc.imm.N());
            for (int i = 0; i < sc.imm.N(); ++i) x[i] = eval(sc.imm.components[i], pv);
            if (!x.allFinite()) throw SpaceError("non-finite component value");
            amb->check_point(x);
        } catch (const SpaceError& e) {
            throw ValidationError("chart", std::string(e.what()) + " at " + point_string(p));
        }
        bool need_geometry = false;
        for (const auto& [fl, t] : sc.flags) need_geometry = need_geometry || t != Tri::unknown;
        if (!need_geometry && !amb->concrete()) continue;
        try {
            PointGeometry pg(sc.imm, p, need_geometry ? kMaxJetOrder : 2);
            if (!need_geometry) continue;
            auto fd = fundamental_data_at(sc.imm, pg);
            auto q = point_quantities(pg, fd);
            for (const auto& [fl, t] : sc.flags) {
                if (t == Tri::unknown) continue;
                FlagCheck fc;
                try {
                    fc = check_flag(fl, pg, q, sc.tol.flag);
                } catch (const ResidualError& e) {
                    throw ValidationError(std::string("flag:") + to_string(fl), e.what());
                }
                if (t == Tri::asserted && !fc.holds)
                    throw ValidationError(std::string("flag:") + to_string(fl),
                                          "asserted but " + fc.what + " = " + format_number(fc.value) + " > " +
                                              format_number(sc.tol.flag) + " at " + point_string(p));
                if (t == Tri::denied && !fc.holds) denied_seen_failing[fl] = true;
            }
        } catch (const GeometryError& e) {
            throw ValidationError("rank", std::string(e.what()) + " at " + point_string(p));
        } catch (const SpaceError& e) {
            if (amb->concrete()) throw ValidationError("chart", std::string(e.what()) + " at " + point_string(p));
        }
    } catch (const JetError& e) {
        throw ValidationError("domain", std::string(e.what()) + " at " + point_string(p));
    }
    for (const auto& [fl, seen] : denied_seen_failing)
        if (!seen)
            throw ValidationError(std::string("flag:") + to_string(fl),
                                  "denied but the check holds at every sample point");

    if (sc.variation.present) {
        try {
            parse_variation(sc.imm, sc.variation.field);
        } catch (const std::exception& e) {
            throw ValidationError("variation", e.what());
        }
    }
}

inline Scenario load_scenario_text(const std::string& text, const std::string& path = "") {
    Scenario sc = bind_scenario(text, path);
    validate(sc);
    return sc;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError("cannot read file '" + path + "'", "", "", 0, 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Scenario load_scenario(const std::string& path) { return load_scenario_text(read_file(path), path); }

}  // namespace biharm

#endif
