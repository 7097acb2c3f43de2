#ifndef BIHARM_EXPRESSION_HPP
#define BIHARM_EXPRESSION_HPP

// Small expression language for immersion components and coefficient fields.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' exponent)*
//   exponent:= ['-'] number | '(' ['-'] number ')'
//   primary := number | name | name '(' expr ')' | '(' expr ')'
//
// Names resolve to declared parameters or the constants pi and e.
// Functions: sin cos tan exp log sqrt atan. Error offsets are 1-based byte columns.

#include <charconv>
#include <cmath>
#include <cstring>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "biharm/jet.hpp"

namespace biharm {

struct ParseError : std::runtime_error {
    enum class Kind { syntax, unknown_identifier, arity };
    Kind kind;
    size_t offset;
    ParseError(Kind k, size_t off, const std::string& msg)
        : std::runtime_error(msg + " at offset " + std::to_string(off)), kind(k), offset(off) {}
};

enum class NodeKind { var, lit, constant, neg, add, sub, mul, div, pow, call };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    NodeKind kind;
    double value = 0;   // literal value, constant value, or pow exponent
    int var = -1;       // parameter index
    std::string name;   // variable/constant/function name as written
    JetOp fn = JetOp::add;
    ExprPtr a, b;
};

namespace detail {

inline bool function_op(std::string_view n, JetOp& op) {
    static const std::pair<const char*, JetOp> table[] = {
        {"sin", JetOp::sin}, {"cos", JetOp::cos}, {"tan", JetOp::tan}, {"exp", JetOp::exp},
        {"log", JetOp::log}, {"sqrt", JetOp::sqrt}, {"atan", JetOp::atan}};
    for (const auto& [s, o] : table)
        if (n == s) {
            op = o;
            return true;
        }
    return false;
}

inline std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct Token {
    enum Type { num, name, op, end } type;
    std::string text;
    double value = 0;
    size_t pos = 0;  // 0-based
};

inline std::vector<Token> tokenize(std::string_view s) {
    std::vector<Token> out;
    size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            ++i;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t start = i;
            while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) ++i;
            if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
                size_t j = i + 1;
                if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
                if (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
                    i = j;
                    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
                }
            }
            Token t{Token::num, std::string(s.substr(start, i - start)), 0, start};
            double v = 0;
            auto r = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
            if (r.ec != std::errc() || r.ptr != t.text.data() + t.text.size())
                throw ParseError(ParseError::Kind::syntax, start + 1, "malformed number '" + t.text + "'");
            t.value = v;
            out.push_back(t);
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = i;
            while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
            out.push_back({Token::name, std::string(s.substr(start, i - start)), 0, start});
            continue;
        }
        if (std::strchr("+-*/^(),", c) && c != '\0') {
            out.push_back({Token::op, std::string(1, c), 0, i});
            ++i;
            continue;
        }
        throw ParseError(ParseError::Kind::syntax, i + 1, std::string("unexpected character '") + c + "'");
    }
    out.push_back({Token::end, "", 0, s.size()});
    return out;
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

    ExprPtr parse_all() {
        auto e = expr();
        if (peek().type != Token::end) fail("unexpected '" + peek().text + "'");
        return e;
    }

private:
    std::vector<Token> t_;
    size_t k_ = 0;
    int depth_ = 0;

    const Token& peek() const { return t_[k_]; }
    bool is_op(const char* s) const { return peek().type == Token::op && peek().text == s; }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(ParseError::Kind::syntax, peek().pos + 1, msg);
    }
    void expect(const char* s) {
        if (!is_op(s)) fail(std::string("expected '") + s + "'");
        ++k_;
    }

    static ExprPtr node(NodeKind k, ExprPtr a = nullptr, ExprPtr b = nullptr) {
        auto n = std::make_shared<ExprNode>();
        n->kind = k;
        n->a = std::move(a);
        n->b = std::move(b);
        return n;
    }

    ExprPtr expr() {
        if (++depth_ > 200) fail("expression nested too deeply");
        auto e = term();
        while (is_op("+") || is_op("-")) {
            NodeKind k = is_op("+") ? NodeKind::add : NodeKind::sub;
            ++k_;
            e = node(k, e, term());
        }
        --depth_;
        return e;
    }

    ExprPtr term() {
        auto e = unary();
        while (is_op("*") || is_op("/")) {
            NodeKind k = is_op("*") ? NodeKind::mul : NodeKind::div;
            ++k_;
            e = node(k, e, unary());
        }
        return e;
    }

    ExprPtr unary() {
        if (is_op("-")) {
            ++k_;
            if (++depth_ > 200) fail("expression nested too deeply");
            auto e = node(NodeKind::neg, unary());
            --depth_;
            return e;
        }
        return power();
    }

    ExprPtr power() {
        auto e = primary();
        while (is_op("^")) {
            ++k_;
            double v = exponent();
            auto n = std::make_shared<ExprNode>();
            n->kind = NodeKind::pow;
            n->a = e;
            n->value = v;
            e = n;
        }
        return e;
    }

    double signed_number() {
        double sign = 1;
        if (is_op("-")) {
            sign = -1;
            ++k_;
        }
        if (peek().type != Token::num) fail("exponent must be a numeric literal");
        double v = peek().value;
        ++k_;
        return sign * v;
    }

    double exponent() {
        if (is_op("(")) {
            ++k_;
            double v = signed_number();
            expect(")");
            return v;
        }
        return signed_number();
    }

    ExprPtr primary() {
        const Token& tk = peek();
        if (tk.type == Token::num) {
            auto n = std::make_shared<ExprNode>();
            n->kind = NodeKind::lit;
            n->value = tk.value;
            n->name = tk.text;
            ++k_;
            return n;
        }
        if (tk.type == Token::name) {
            auto n = std::make_shared<ExprNode>();
            n->name = tk.text;
            size_t pos = tk.pos;
            ++k_;
            if (is_op("(")) {
                ++k_;
                n->kind = NodeKind::call;
                std::vector<ExprPtr> args;
                if (!is_op(")")) {
                    args.push_back(expr());
                    while (is_op(",")) {
                        ++k_;
                        args.push_back(expr());
                    }
                }
                expect(")");
                if (!function_op(n->name, n->fn))
                    throw ParseError(ParseError::Kind::unknown_identifier, pos + 1,
                                     "unknown function '" + n->name + "'");
                if (args.size() != 1)
                    throw ParseError(ParseError::Kind::arity, pos + 1,
                                     "function '" + n->name + "' takes 1 argument, got " +
                                         std::to_string(args.size()));
                n->a = args[0];
                return n;
            }
            n->kind = NodeKind::var;
            n->value = static_cast<double>(pos);  // resolved later
            return n;
        }
        if (is_op("(")) {
            ++k_;
            auto e = expr();
            expect(")");
            return e;
        }
        if (tk.type == Token::end) fail("unexpected end of input");
        fail("unexpected '" + tk.text + "'");
    }
};

inline ExprPtr resolve(const ExprPtr& e, const std::vector<std::string>& params) {
    if (!e) return e;
    if (e->kind == NodeKind::var) {
        auto n = std::make_shared<ExprNode>(*e);
        size_t pos = static_cast<size_t>(e->value);
        n->value = 0;
        for (size_t i = 0; i < params.size(); ++i)
            if (params[i] == e->name) {
                n->var = static_cast<int>(i);
                return n;
            }
        JetOp dummy;
        if (e->name == "pi" || e->name == "e") {
            n->kind = NodeKind::constant;
            n->value = e->name == "pi" ? std::numbers::pi : std::numbers::e;
            return n;
        }
        if (function_op(e->name, dummy))
            throw ParseError(ParseError::Kind::arity, pos + 1,
                             "function '" + e->name + "' used without an argument");
        throw ParseError(ParseError::Kind::unknown_identifier, pos + 1,
                         "unknown identifier '" + e->name + "'");
    }
    auto a = resolve(e->a, params), b = resolve(e->b, params);
    if (a == e->a && b == e->b) return e;
    auto n = std::make_shared<ExprNode>(*e);
    n->a = a;
    n->b = b;
    return n;
}

}  // namespace detail

class Expression {
public:
    Expression() = default;
    Expression(ExprPtr root, std::vector<std::string> params)
        : root_(std::move(root)), params_(std::move(params)) {}

    const ExprPtr& root() const { return root_; }
    const std::vector<std::string>& params() const { return params_; }
    bool empty() const { return !root_; }

private:
    ExprPtr root_;
    std::vector<std::string> params_;
};

inline Expression parse(std::string_view source, const std::vector<std::string>& params) {
    auto toks = detail::tokenize(source);
    if (toks.size() == 1) throw ParseError(ParseError::Kind::syntax, 1, "empty expression");
    detail::Parser p(std::move(toks));
    auto tree = p.parse_all();
    return Expression(detail::resolve(tree, params), params);
}

namespace detail {

inline std::string print_node(const ExprNode& n) {
    auto bin = [&](const char* op) { return "(" + print_node(*n.a) + " " + op + " " + print_node(*n.b) + ")"; };
    switch (n.kind) {
        case NodeKind::var: return n.name;
        case NodeKind::constant: return n.name;
        case NodeKind::lit: return format_number(n.value);
        case NodeKind::neg: return "(-" + print_node(*n.a) + ")";
        case NodeKind::add: return bin("+");
        case NodeKind::sub: return bin("-");
        case NodeKind::mul: return bin("*");
        case NodeKind::div: return bin("/");
        case NodeKind::pow:
            return "(" + print_node(*n.a) + "^" +
                   (n.value < 0 ? "(" + format_number(n.value) + ")" : format_number(n.value)) + ")";
        case NodeKind::call: return n.name + "(" + print_node(*n.a) + ")";
    }
    return "?";
}

inline bool equal_nodes(const ExprNode* x, const ExprNode* y) {
    if (!x || !y) return x == y;
    if (x->kind != y->kind) return false;
    switch (x->kind) {
        case NodeKind::var: return x->var == y->var;
        case NodeKind::lit:
        case NodeKind::constant: return x->value == y->value;
        case NodeKind::pow: return x->value == y->value && equal_nodes(x->a.get(), y->a.get());
        case NodeKind::call: return x->fn == y->fn && equal_nodes(x->a.get(), y->a.get());
        default: return equal_nodes(x->a.get(), y->a.get()) && equal_nodes(x->b.get(), y->b.get());
    }
}

template <class T>
T eval_node(const ExprNode& n, const std::vector<T>& vars, const T& one) {
    using std::atan, std::cos, std::exp, std::log, std::pow, std::sin, std::sqrt, std::tan;
    switch (n.kind) {
        case NodeKind::var:
            if (n.var < 0 || n.var >= static_cast<int>(vars.size()))
                throw std::invalid_argument("unbound variable '" + n.name + "'");
            if constexpr (std::is_same_v<T, Jet>) {
                if (!vars[n.var].valid()) throw std::invalid_argument("unbound variable '" + n.name + "'");
            }
            return vars[n.var];
        case NodeKind::lit:
        case NodeKind::constant: return one * n.value;
        case NodeKind::neg: return -eval_node(*n.a, vars, one);
        case NodeKind::add: return eval_node(*n.a, vars, one) + eval_node(*n.b, vars, one);
        case NodeKind::sub: return eval_node(*n.a, vars, one) - eval_node(*n.b, vars, one);
        case NodeKind::mul: return eval_node(*n.a, vars, one) * eval_node(*n.b, vars, one);
        case NodeKind::div: {
            T den = eval_node(*n.b, vars, one);
            if constexpr (std::is_same_v<T, double>) {
                if (den == 0.0) throw JetError("division by zero");
            }
            return eval_node(*n.a, vars, one) / den;
        }
        case NodeKind::pow: {
            T base = eval_node(*n.a, vars, one);
            if constexpr (std::is_same_v<T, double>) {
                if (base <= 0 && n.value != std::floor(n.value))
                    throw JetError("non-integer power of nonpositive value");
            }
            return pow(base, n.value);
        }
        case NodeKind::call: {
            T x = eval_node(*n.a, vars, one);
            if constexpr (std::is_same_v<T, double>) {
                if (n.fn == JetOp::log && !(x > 0)) throw JetError("log of nonpositive value");
                if (n.fn == JetOp::sqrt && x < 0) throw JetError("sqrt of negative value");
            }
            switch (n.fn) {
                case JetOp::sin: return sin(x);
                case JetOp::cos: return cos(x);
                case JetOp::tan: return tan(x);
                case JetOp::exp: return exp(x);
                case JetOp::log: return log(x);
                case JetOp::sqrt: return sqrt(x);
                case JetOp::atan: return atan(x);
                default: break;
            }
        }
    }
    throw std::logic_error("bad expression node");
}

}  // namespace detail

inline std::string print(const Expression& e) { return detail::print_node(*e.root()); }

inline bool structurally_equal(const Expression& a, const Expression& b) {
    return detail::equal_nodes(a.root().get(), b.root().get());
}

// vars are positional, matching the declared parameter order; `proto` supplies the jet layout
inline Jet eval_on_jets(const Expression& e, const std::vector<Jet>& vars, const Jet& proto) {
    for (const auto& v : vars)
        if (v.layout_ptr() != proto.layout_ptr()) throw JetError("eval_on_jets: jets do not share a layout");
    return detail::eval_node<Jet>(*e.root(), vars, proto.constant_like(1.0));
}

inline Jet eval_on_jets(const Expression& e, const std::vector<std::pair<std::string, Jet>>& env, const Jet& proto) {
    std::vector<Jet> vars;
    for (const auto& p : e.params()) {
        bool found = false;
        for (const auto& [name, j] : env)
            if (name == p) {
                vars.push_back(j);
                found = true;
                break;
            }
        if (!found) vars.push_back(Jet());
    }
    // unbound variables surface only if the tree references them
    return detail::eval_node<Jet>(*e.root(), vars, proto.constant_like(1.0));
}

inline double eval(const Expression& e, const std::vector<double>& vars) {
    return detail::eval_node<double>(*e.root(), vars, 1.0);
}

inline double eval_constant(std::string_view source) { return eval(parse(source, {}), {}); }

}  // namespace biharm

#endif
