#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace harnack {

/// Raised by the parser; carries the byte offset of the offending token.
class ParseError : public std::runtime_error
{
  public:
    ParseError(const std::string& what, std::size_t position);
    std::size_t position() const noexcept { return position_; }

  private:
    std::size_t position_;
};

class UnknownIdentifierError : public ParseError
{
  public:
    UnknownIdentifierError(const std::string& name, std::size_t position);
    const std::string& name() const noexcept { return name_; }

  private:
    std::string name_;
};

/// Evaluation outside the domain of an operation (sqrt of a negative
/// number, division by zero, non-integer power of a negative base, ...).
class DomainError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

enum class NodeKind
{
    Constant,
    Variable,
    Negate,
    Sin,
    Cos,
    Exp,
    Cosh,
    Sinh,
    Sqrt,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node
{
    NodeKind kind;
    double value = 0.0;       // Constant
    std::size_t variable = 0; // Variable
    NodePtr lhs;              // unary operand or left operand
    NodePtr rhs;
};

/*!
 * Immutable arithmetic expression over a fixed list of named variables.
 *
 * Evaluation takes the variable values in declaration order. Copies share
 * the underlying tree, so expressions are cheap to pass around and safe to
 * read from several threads.
 */
class Expr
{
  public:
    Expr(NodePtr root, std::shared_ptr<const std::vector<std::string>> variables);

    double eval(std::span<const double> point) const;

    /// Fully parenthesized infix form; parses back to an equivalent tree.
    std::string print() const;

    const std::vector<std::string>& variables() const { return *variables_; }
    const NodePtr& root() const { return root_; }

    bool is_constant() const { return root_->kind == NodeKind::Constant; }
    bool depends_on(std::size_t variable) const;
    std::size_t variable_index(std::string_view name) const;

  private:
    NodePtr root_;
    std::shared_ptr<const std::vector<std::string>> variables_;
};

Expr parse(std::string_view text, std::vector<std::string> variables);

/// Exact symbolic partial derivative with respect to a declared variable.
Expr differentiate(const Expr& e, std::string_view variable);

/// Constant folding and identity elimination only.
Expr simplify(const Expr& e);

/*!
 * Flattened postfix form of an expression for the simulation hot loops.
 *
 * Produces bitwise the same values as Expr::eval.
 */
class CompiledExpr
{
  public:
    CompiledExpr() = default;
    explicit CompiledExpr(const Expr& e);

    double operator()(std::span<const double> point) const;
    std::size_t arity() const { return arity_; }

  private:
    struct Instruction
    {
        NodeKind kind;
        double value;
        std::size_t variable;
    };
    std::vector<Instruction> program_;
    std::size_t max_depth_ = 0;
    std::size_t arity_ = 0;
};

/// Variable names y1..y{count}, optionally preceded by x.
std::vector<std::string> coordinate_names(std::size_t y_count, bool with_x);

} // namespace harnack
