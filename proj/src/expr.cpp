#include "bconvex/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>

namespace bconvex {

struct Expr::Node {
    enum class Kind { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Exp, Log, Sqrt, Abs, Min, Max };
    Kind kind = Kind::Const;
    double value = 0.0;
    int var = -1;
    std::shared_ptr<const Node> a, b;
};

namespace {

using Node = Expr::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

class Parser {
public:
    Parser(const std::string& src, const std::vector<std::string>& vars) : src_(src) {
        for (std::size_t i = 0; i < vars.size(); ++i) var_index_[vars[i]] = static_cast<int>(i);
    }

    NodePtr run() {
        NodePtr e = expression();
        skip_ws();
        if (pos_ != src_.size()) fail("trailing input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("expression error at position " + std::to_string(pos_) + ": " + what +
                         " in \"" + src_ + "\"");
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) { ++pos_; return true; }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    NodePtr expression() {
        NodePtr left = term();
        for (;;) {
            if (accept('+')) left = make({Node::Kind::Add, 0, -1, left, term()});
            else if (accept('-')) left = make({Node::Kind::Sub, 0, -1, left, term()});
            else return left;
        }
    }

    NodePtr term() {
        NodePtr left = unary();
        for (;;) {
            if (accept('*')) left = make({Node::Kind::Mul, 0, -1, left, unary()});
            else if (accept('/')) left = make({Node::Kind::Div, 0, -1, left, unary()});
            else return left;
        }
    }

    NodePtr unary() {
        if (accept('-')) return make({Node::Kind::Neg, 0, -1, unary(), nullptr});
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = atom();
        if (accept('^')) return make({Node::Kind::Pow, 0, -1, base, unary()}); // right assoc
        return base;
    }

    NodePtr atom() {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expression();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail("unexpected character");
    }

    NodePtr number() {
        const char* begin = src_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("bad number");
        pos_ += static_cast<std::size_t>(end - begin);
        return make({Node::Kind::Const, v, -1, nullptr, nullptr});
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string name = src_.substr(start, pos_ - start);
        if (peek() == '(') return call(name);
        if (name == "pi") return make({Node::Kind::Const, 3.14159265358979323846, -1, nullptr, nullptr});
        auto it = var_index_.find(name);
        if (it == var_index_.end()) fail("unknown identifier '" + name + "'");
        return make({Node::Kind::Var, 0, it->second, nullptr, nullptr});
    }

    NodePtr call(const std::string& name) {
        expect('(');
        NodePtr first = expression();
        if (name == "exp" || name == "log" || name == "sqrt" || name == "abs") {
            expect(')');
            const auto kind = name == "exp"    ? Node::Kind::Exp
                              : name == "log"  ? Node::Kind::Log
                              : name == "sqrt" ? Node::Kind::Sqrt
                                               : Node::Kind::Abs;
            return make({kind, 0, -1, first, nullptr});
        }
        if (name == "pow" || name == "min" || name == "max") {
            expect(',');
            NodePtr second = expression();
            expect(')');
            const auto kind = name == "pow"   ? Node::Kind::Pow
                              : name == "min" ? Node::Kind::Min
                                              : Node::Kind::Max;
            return make({kind, 0, -1, first, second});
        }
        fail("unknown function '" + name + "'");
    }

    const std::string& src_;
    std::size_t pos_ = 0;
    std::map<std::string, int> var_index_;
};

double eval_node(const Node& n, const Eigen::VectorXd& env) {
    switch (n.kind) {
        case Node::Kind::Const: return n.value;
        case Node::Kind::Var: return env[n.var];
        case Node::Kind::Neg: return -eval_node(*n.a, env);
        case Node::Kind::Add: return eval_node(*n.a, env) + eval_node(*n.b, env);
        case Node::Kind::Sub: return eval_node(*n.a, env) - eval_node(*n.b, env);
        case Node::Kind::Mul: return eval_node(*n.a, env) * eval_node(*n.b, env);
        case Node::Kind::Div: return eval_node(*n.a, env) / eval_node(*n.b, env);
        case Node::Kind::Pow: return std::pow(eval_node(*n.a, env), eval_node(*n.b, env));
        case Node::Kind::Exp: return std::exp(eval_node(*n.a, env));
        case Node::Kind::Log: return std::log(eval_node(*n.a, env));
        case Node::Kind::Sqrt: return std::sqrt(eval_node(*n.a, env));
        case Node::Kind::Abs: return std::abs(eval_node(*n.a, env));
        case Node::Kind::Min: return std::min(eval_node(*n.a, env), eval_node(*n.b, env));
        case Node::Kind::Max: return std::max(eval_node(*n.a, env), eval_node(*n.b, env));
    }
    return 0.0;
}

} // namespace

Expr Expr::parse(const std::string& source, const std::vector<std::string>& variables) {
    Expr e;
    e.source_ = source;
    e.root_ = Parser(source, variables).run();
    return e;
}

double Expr::eval(const Eigen::VectorXd& env) const {
    if (!root_) throw ParseError("evaluating an empty expression");
    return eval_node(*root_, env);
}

} // namespace bconvex
