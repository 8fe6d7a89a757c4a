// modelspec.hpp — Operator-expression mini-language and model file loading.
//
// Grammar (precedence: ^ above unary minus above * above binary ±):
//   expr    := term (("+" | "-") term)*
//   term    := factor ("*" factor)*
//   factor  := "-" factor | power
//   power   := primary ("^" uint)?
//   primary := "(" expr ")" | "dag" "(" expr ")" | ident | number
// Atoms: Xk Yk Zk Spk Smk on qubit sites, ak adk nk on Fock sites (1-based
// site labels), I for the full identity; other identifiers are parameters.

#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "lindblad/liouvillian.hpp"
#include "lindblad/operator_core.hpp"

namespace lindblad::expr {

struct parse_error : model_error {
    int position;  // 1-based column in the source string

    parse_error(const std::string& message, int pos)
        : model_error(message + " (column " + std::to_string(pos) + ")"), position(pos) {}
};

enum class TokenKind { ident, number, plus, minus, star, caret, lparen, rparen, end };

struct Token {
    TokenKind kind;
    std::string text;
    Complex value;  // for number tokens
    int position;   // 1-based column
};

std::vector<Token> tokenize(const std::string& src);

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    enum class Kind { add, sub, mul, pow, neg, dag, atom, scalar, param };

    Kind kind;
    NodePtr lhs;        // add/sub/mul left, pow/neg/dag operand
    NodePtr rhs;        // add/sub/mul right
    int exponent = 0;   // pow
    std::string name;   // atom symbol or parameter name
    int site = 0;       // atom site, 1-based
    Complex value;      // scalar
    int position = 0;

    static NodePtr binary(Kind k, NodePtr a, NodePtr b, int pos);
    static NodePtr unary(Kind k, NodePtr a, int pos);
    static NodePtr power(NodePtr a, int e, int pos);
    static NodePtr atom_node(std::string symbol, int site, int pos);
    static NodePtr scalar_node(Complex v, int pos);
    static NodePtr param_node(std::string name, int pos);
};

NodePtr parse(const std::vector<Token>& tokens);
NodePtr parse(const std::string& src);

// True for identifiers the evaluator reserves: operator atoms, "I", "i", "dag".
bool is_reserved_identifier(const std::string& word);

// Minimal-parenthesis printer; re-parsing the output reproduces the tree.
std::string to_string(const Node& node);

bool tree_equal(const Node& a, const Node& b);

Operator evaluate(const Node& node, const HilbertSpace& space,
                  const std::map<std::string, double>& params);
Operator evaluate(const std::string& src, const HilbertSpace& space,
                  const std::map<std::string, double>& params);

}  // namespace lindblad::expr

namespace lindblad {

// JSON model file: keys name, spaces, parameters (optional), hamiltonian
// (optional, default 0), jump_operators (optional, default none). Unknown
// keys are rejected; schema errors name the offending field path.
Model load_model(const std::string& path);
Model parse_model_text(const std::string& text, const std::string& origin);

}  // namespace lindblad
