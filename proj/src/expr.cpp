#include "harnack/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace harnack {

ParseError::ParseError(const std::string& what, std::size_t position)
    : std::runtime_error(what + " at position " + std::to_string(position)),
      position_(position)
{
}

UnknownIdentifierError::UnknownIdentifierError(const std::string& name,
                                               std::size_t position)
    : ParseError("unknown identifier '" + name + "'", position), name_(name)
{
}

namespace {

NodePtr make_constant(double v)
{
    return std::make_shared<const Node>(Node{NodeKind::Constant, v, 0, {}, {}});
}

NodePtr make_variable(std::size_t index)
{
    return std::make_shared<const Node>(
        Node{NodeKind::Variable, 0.0, index, {}, {}});
}

NodePtr make_unary(NodeKind kind, NodePtr arg)
{
    return std::make_shared<const Node>(Node{kind, 0.0, 0, std::move(arg), {}});
}

NodePtr make_binary(NodeKind kind, NodePtr lhs, NodePtr rhs)
{
    return std::make_shared<const Node>(
        Node{kind, 0.0, 0, std::move(lhs), std::move(rhs)});
}

bool is_unary(NodeKind k)
{
    return k >= NodeKind::Negate && k <= NodeKind::Sqrt;
}

const char* function_name(NodeKind k)
{
    switch (k)
    {
        case NodeKind::Sin: return "sin";
        case NodeKind::Cos: return "cos";
        case NodeKind::Exp: return "exp";
        case NodeKind::Cosh: return "cosh";
        case NodeKind::Sinh: return "sinh";
        case NodeKind::Sqrt: return "sqrt";
        default: return "";
    }
}

char operator_symbol(NodeKind k)
{
    switch (k)
    {
        case NodeKind::Add: return '+';
        case NodeKind::Sub: return '-';
        case NodeKind::Mul: return '*';
        case NodeKind::Div: return '/';
        case NodeKind::Pow: return '^';
        default: return '?';
    }
}

double checked(double v, const char* op)
{
    if (!std::isfinite(v))
    {
        throw DomainError(std::string("non-finite result in ") + op);
    }
    return v;
}

double apply_unary(NodeKind kind, double a)
{
    switch (kind)
    {
        case NodeKind::Negate: return -a;
        case NodeKind::Sin: return std::sin(a);
        case NodeKind::Cos: return std::cos(a);
        case NodeKind::Exp: return checked(std::exp(a), "exp");
        case NodeKind::Cosh: return checked(std::cosh(a), "cosh");
        case NodeKind::Sinh: return checked(std::sinh(a), "sinh");
        case NodeKind::Sqrt:
            if (a < 0.0)
            {
                throw DomainError("sqrt of negative value");
            }
            return std::sqrt(a);
        default: break;
    }
    throw DomainError("invalid unary node");
}

bool is_integer(double v)
{
    return std::isfinite(v) && v == std::nearbyint(v);
}

double apply_binary(NodeKind kind, double a, double b)
{
    switch (kind)
    {
        case NodeKind::Add: return checked(a + b, "+");
        case NodeKind::Sub: return checked(a - b, "-");
        case NodeKind::Mul: return checked(a * b, "*");
        case NodeKind::Div:
            if (b == 0.0)
            {
                throw DomainError("division by zero");
            }
            return checked(a / b, "/");
        case NodeKind::Pow:
            if (!is_integer(b) && a < 0.0)
            {
                throw DomainError("non-integer power of a negative base");
            }
            if (a == 0.0 && b < 0.0)
            {
                throw DomainError("negative power of zero");
            }
            return checked(std::pow(a, b), "^");
        default: break;
    }
    throw DomainError("invalid binary node");
}

double eval_node(const Node& n, std::span<const double> point)
{
    switch (n.kind)
    {
        case NodeKind::Constant: return n.value;
        case NodeKind::Variable: return point[n.variable];
        default: break;
    }
    if (is_unary(n.kind))
    {
        return apply_unary(n.kind, eval_node(*n.lhs, point));
    }
    double a = eval_node(*n.lhs, point);
    double b = eval_node(*n.rhs, point);
    return apply_binary(n.kind, a, b);
}

std::string format_number(double v)
{
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

void print_node(const Node& n, const std::vector<std::string>& vars,
                std::string& out)
{
    switch (n.kind)
    {
        case NodeKind::Constant:
            if (std::signbit(n.value))
            {
                out += "(-" + format_number(-n.value) + ")";
            }
            else
            {
                out += format_number(n.value);
            }
            return;
        case NodeKind::Variable: out += vars[n.variable]; return;
        case NodeKind::Negate:
            out += "(-";
            print_node(*n.lhs, vars, out);
            out += ")";
            return;
        default: break;
    }
    if (is_unary(n.kind))
    {
        out += function_name(n.kind);
        out += "(";
        print_node(*n.lhs, vars, out);
        out += ")";
        return;
    }
    out += "(";
    print_node(*n.lhs, vars, out);
    out += operator_symbol(n.kind);
    print_node(*n.rhs, vars, out);
    out += ")";
}

bool node_depends_on(const Node& n, std::size_t var)
{
    if (n.kind == NodeKind::Variable)
    {
        return n.variable == var;
    }
    if (n.kind == NodeKind::Constant)
    {
        return false;
    }
    if (node_depends_on(*n.lhs, var))
    {
        return true;
    }
    return n.rhs && node_depends_on(*n.rhs, var);
}

//---------------------------------------------------------------------------//
// Recursive-descent parser
//
//   expr    := term (('+'|'-') term)*
//   term    := unary (('*'|'/') unary)*
//   unary   := ('-'|'+') unary | power
//   power   := primary ('^' unary)?
//   primary := number | identifier | function '(' expr ')' | '(' expr ')'
//---------------------------------------------------------------------------//
class Parser
{
  public:
    Parser(std::string_view text, const std::vector<std::string>& vars)
        : text_(text), vars_(vars)
    {
    }

    NodePtr run()
    {
        skip_space();
        if (pos_ >= text_.size())
        {
            throw ParseError("empty expression", pos_);
        }
        NodePtr n = expr();
        skip_space();
        if (pos_ < text_.size())
        {
            throw ParseError(std::string("unexpected '") + text_[pos_] + "'",
                             pos_);
        }
        return n;
    }

  private:
    void skip_space()
    {
        while (pos_ < text_.size()
               && std::isspace(static_cast<unsigned char>(text_[pos_])))
        {
            ++pos_;
        }
    }

    bool accept(char c)
    {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c)
        {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr()
    {
        NodePtr lhs = term();
        for (;;)
        {
            if (accept('+'))
            {
                lhs = make_binary(NodeKind::Add, lhs, term());
            }
            else if (accept('-'))
            {
                lhs = make_binary(NodeKind::Sub, lhs, term());
            }
            else
            {
                return lhs;
            }
        }
    }

    NodePtr term()
    {
        NodePtr lhs = unary();
        for (;;)
        {
            if (accept('*'))
            {
                lhs = make_binary(NodeKind::Mul, lhs, unary());
            }
            else if (accept('/'))
            {
                lhs = make_binary(NodeKind::Div, lhs, unary());
            }
            else
            {
                return lhs;
            }
        }
    }

    NodePtr unary()
    {
        if (accept('-'))
        {
            return make_unary(NodeKind::Negate, unary());
        }
        if (accept('+'))
        {
            return unary();
        }
        return power();
    }

    NodePtr power()
    {
        NodePtr base = primary();
        if (accept('^'))
        {
            return make_binary(NodeKind::Pow, base, unary());
        }
        return base;
    }

    NodePtr primary()
    {
        skip_space();
        if (pos_ >= text_.size())
        {
            throw ParseError("unexpected end of expression", pos_);
        }
        char c = text_[pos_];
        if (c == '(')
        {
            ++pos_;
            NodePtr inner = expr();
            if (!accept(')'))
            {
                throw ParseError("expected ')'", pos_);
            }
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
        {
            return number();
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
        {
            return identifier();
        }
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    NodePtr number()
    {
        std::size_t start = pos_;
        auto digits = [&] {
            while (pos_ < text_.size()
                   && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            {
                ++pos_;
            }
        };
        digits();
        if (pos_ < text_.size() && text_[pos_] == '.')
        {
            ++pos_;
            digits();
        }
        // Exponent only when digits follow, so "2e" stays 2 followed by e.
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E'))
        {
            std::size_t mark = pos_++;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-'))
            {
                ++pos_;
            }
            if (pos_ < text_.size()
                && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            {
                digits();
            }
            else
            {
                pos_ = mark;
            }
        }
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(text_.data() + start,
                                         text_.data() + pos_, v);
        if (ec != std::errc{} || ptr != text_.data() + pos_)
        {
            throw ParseError("malformed number", start);
        }
        return make_constant(v);
    }

    NodePtr identifier()
    {
        std::size_t start = pos_;
        while (pos_ < text_.size()
               && (std::isalnum(static_cast<unsigned char>(text_[pos_]))
                   || text_[pos_] == '_'))
        {
            ++pos_;
        }
        std::string name(text_.substr(start, pos_ - start));

        skip_space();
        if (pos_ < text_.size() && text_[pos_] == '(')
        {
            static constexpr std::array<NodeKind, 6> functions{
                NodeKind::Sin, NodeKind::Cos, NodeKind::Exp,
                NodeKind::Cosh, NodeKind::Sinh, NodeKind::Sqrt};
            for (NodeKind f : functions)
            {
                if (name == function_name(f))
                {
                    ++pos_;
                    NodePtr arg = expr();
                    if (!accept(')'))
                    {
                        throw ParseError("expected ')'", pos_);
                    }
                    return make_unary(f, arg);
                }
            }
            throw UnknownIdentifierError(name, start);
        }

        auto it = std::find(vars_.begin(), vars_.end(), name);
        if (it != vars_.end())
        {
            return make_variable(
                static_cast<std::size_t>(std::distance(vars_.begin(), it)));
        }
        if (name == "pi")
        {
            return make_constant(std::numbers::pi);
        }
        if (name == "e")
        {
            return make_constant(std::numbers::e);
        }
        throw UnknownIdentifierError(name, start);
    }

    std::string_view text_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;
};

//---------------------------------------------------------------------------//
// Differentiation
//---------------------------------------------------------------------------//
NodePtr derive(const NodePtr& n, std::size_t var)
{
    const NodePtr zero = make_constant(0.0);
    switch (n->kind)
    {
        case NodeKind::Constant: return zero;
        case NodeKind::Variable:
            return make_constant(n->variable == var ? 1.0 : 0.0);
        case NodeKind::Negate:
            return make_unary(NodeKind::Negate, derive(n->lhs, var));
        default: break;
    }

    if (is_unary(n->kind))
    {
        const NodePtr& f = n->lhs;
        NodePtr df = derive(f, var);
        NodePtr outer;
        switch (n->kind)
        {
            case NodeKind::Sin: outer = make_unary(NodeKind::Cos, f); break;
            case NodeKind::Cos:
                outer = make_unary(NodeKind::Negate,
                                   make_unary(NodeKind::Sin, f));
                break;
            case NodeKind::Exp: outer = n; break;
            case NodeKind::Cosh: outer = make_unary(NodeKind::Sinh, f); break;
            case NodeKind::Sinh: outer = make_unary(NodeKind::Cosh, f); break;
            case NodeKind::Sqrt:
                return make_binary(
                    NodeKind::Div, df,
                    make_binary(NodeKind::Mul, make_constant(2.0), n));
            default: break;
        }
        return make_binary(NodeKind::Mul, outer, df);
    }

    const NodePtr& f = n->lhs;
    const NodePtr& g = n->rhs;
    switch (n->kind)
    {
        case NodeKind::Add:
        case NodeKind::Sub:
            return make_binary(n->kind, derive(f, var), derive(g, var));
        case NodeKind::Mul:
            return make_binary(
                NodeKind::Add, make_binary(NodeKind::Mul, derive(f, var), g),
                make_binary(NodeKind::Mul, f, derive(g, var)));
        case NodeKind::Div:
            return make_binary(
                NodeKind::Div,
                make_binary(NodeKind::Sub,
                            make_binary(NodeKind::Mul, derive(f, var), g),
                            make_binary(NodeKind::Mul, f, derive(g, var))),
                make_binary(NodeKind::Pow, g, make_constant(2.0)));
        case NodeKind::Pow:
        {
            if (!node_depends_on(*g, var))
            {
                // d(f^c) = c * f^(c-1) * f'
                NodePtr reduced = make_binary(
                    NodeKind::Pow, f,
                    make_binary(NodeKind::Sub, g, make_constant(1.0)));
                return make_binary(
                    NodeKind::Mul, make_binary(NodeKind::Mul, g, reduced),
                    derive(f, var));
            }
            if (f->kind == NodeKind::Constant && f->value > 0.0)
            {
                // b^g = exp(g log b); log b is folded to a literal.
                NodePtr scale = f->value == std::numbers::e
                                    ? derive(g, var)
                                    : make_binary(NodeKind::Mul,
                                                  make_constant(std::log(f->value)),
                                                  derive(g, var));
                return make_binary(NodeKind::Mul, n, scale);
            }
            throw DomainError(
                "derivative of a power with variable exponent needs a "
                "positive constant base");
        }
        default: break;
    }
    throw DomainError("invalid node in differentiate");
}

//---------------------------------------------------------------------------//
// Simplification
//---------------------------------------------------------------------------//
bool is_const(const NodePtr& n, double v)
{
    return n->kind == NodeKind::Constant && n->value == v;
}

NodePtr fold(const NodePtr& n)
{
    if (n->kind == NodeKind::Constant || n->kind == NodeKind::Variable)
    {
        return n;
    }

    if (is_unary(n->kind))
    {
        NodePtr a = fold(n->lhs);
        if (n->kind == NodeKind::Negate && a->kind == NodeKind::Negate)
        {
            return a->lhs;
        }
        if (a->kind == NodeKind::Constant)
        {
            try
            {
                return make_constant(apply_unary(n->kind, a->value));
            }
            catch (const DomainError&)
            {
                // Keep the node so evaluation still reports the error.
            }
        }
        return a == n->lhs ? n : make_unary(n->kind, a);
    }

    NodePtr a = fold(n->lhs);
    NodePtr b = fold(n->rhs);
    if (a->kind == NodeKind::Constant && b->kind == NodeKind::Constant)
    {
        try
        {
            return make_constant(apply_binary(n->kind, a->value, b->value));
        }
        catch (const DomainError&)
        {
        }
    }
    switch (n->kind)
    {
        case NodeKind::Add:
            if (is_const(a, 0.0)) return b;
            if (is_const(b, 0.0)) return a;
            break;
        case NodeKind::Sub:
            if (is_const(b, 0.0)) return a;
            if (is_const(a, 0.0)) return fold(make_unary(NodeKind::Negate, b));
            break;
        case NodeKind::Mul:
            if (is_const(a, 0.0) || is_const(b, 0.0)) return make_constant(0.0);
            if (is_const(a, 1.0)) return b;
            if (is_const(b, 1.0)) return a;
            break;
        case NodeKind::Div:
            if (is_const(b, 1.0)) return a;
            break;
        case NodeKind::Pow:
            if (is_const(b, 1.0)) return a;
            if (is_const(b, 0.0)) return make_constant(1.0);
            break;
        default: break;
    }
    if (a == n->lhs && b == n->rhs)
    {
        return n;
    }
    return make_binary(n->kind, a, b);
}

void compile_node(const Node& n, auto& emit)
{
    if (n.lhs)
    {
        compile_node(*n.lhs, emit);
    }
    if (n.rhs)
    {
        compile_node(*n.rhs, emit);
    }
    emit(n);
}

} // namespace

//---------------------------------------------------------------------------//
Expr::Expr(NodePtr root, std::shared_ptr<const std::vector<std::string>> variables)
    : root_(std::move(root)), variables_(std::move(variables))
{
}

double Expr::eval(std::span<const double> point) const
{
    if (point.size() < variables_->size())
    {
        throw std::invalid_argument("expression expects "
                                    + std::to_string(variables_->size())
                                    + " coordinates");
    }
    return eval_node(*root_, point);
}

std::string Expr::print() const
{
    std::string out;
    print_node(*root_, *variables_, out);
    return out;
}

bool Expr::depends_on(std::size_t variable) const
{
    return node_depends_on(*root_, variable);
}

std::size_t Expr::variable_index(std::string_view name) const
{
    auto it = std::find(variables_->begin(), variables_->end(), name);
    if (it == variables_->end())
    {
        throw UnknownIdentifierError(std::string(name), 0);
    }
    return static_cast<std::size_t>(std::distance(variables_->begin(), it));
}

Expr parse(std::string_view text, std::vector<std::string> variables)
{
    auto vars = std::make_shared<const std::vector<std::string>>(
        std::move(variables));
    Parser parser(text, *vars);
    return Expr(parser.run(), vars);
}

Expr differentiate(const Expr& e, std::string_view variable)
{
    std::size_t index = e.variable_index(variable);
    auto vars = std::make_shared<const std::vector<std::string>>(e.variables());
    return Expr(derive(e.root(), index), vars);
}

Expr simplify(const Expr& e)
{
    auto vars = std::make_shared<const std::vector<std::string>>(e.variables());
    return Expr(fold(e.root()), vars);
}

CompiledExpr::CompiledExpr(const Expr& e) : arity_(e.variables().size())
{
    std::size_t depth = 0;
    auto emit = [&](const Node& n) {
        program_.push_back({n.kind, n.value, n.variable});
        if (n.kind == NodeKind::Constant || n.kind == NodeKind::Variable)
        {
            ++depth;
        }
        else if (!is_unary(n.kind))
        {
            --depth;
        }
        max_depth_ = std::max(max_depth_, depth);
    };
    compile_node(*e.root(), emit);
}

double CompiledExpr::operator()(std::span<const double> point) const
{
    constexpr std::size_t inline_depth = 32;
    std::array<double, inline_depth> small{};
    std::vector<double> large;
    double* stack = small.data();
    if (max_depth_ > inline_depth)
    {
        large.resize(max_depth_);
        stack = large.data();
    }

    std::size_t top = 0;
    for (const Instruction& ins : program_)
    {
        switch (ins.kind)
        {
            case NodeKind::Constant: stack[top++] = ins.value; break;
            case NodeKind::Variable: stack[top++] = point[ins.variable]; break;
            default:
                if (is_unary(ins.kind))
                {
                    stack[top - 1] = apply_unary(ins.kind, stack[top - 1]);
                }
                else
                {
                    --top;
                    stack[top - 1]
                        = apply_binary(ins.kind, stack[top - 1], stack[top]);
                }
        }
    }
    return stack[0];
}

std::vector<std::string> coordinate_names(std::size_t y_count, bool with_x)
{
    std::vector<std::string> names;
    if (with_x)
    {
        names.emplace_back("x");
    }
    for (std::size_t i = 1; i <= y_count; ++i)
    {
        names.push_back("y" + std::to_string(i));
    }
    return names;
}

} // namespace harnack
