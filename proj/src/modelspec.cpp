// modelspec.cpp — Tokenizer, recursive-descent parser, evaluator, file loader

#include "lindblad/modelspec.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace lindblad::expr {

std::vector<Token> tokenize(const std::string& src) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < src.size()) {
        const char c = src[i];
        const int pos = static_cast<int>(i) + 1;
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t j = i + 1;
            while (j < src.size() && std::isalnum(static_cast<unsigned char>(src[j]))) ++j;
            std::string word = src.substr(i, j - i);
            if (word == "i") {
                tokens.push_back({TokenKind::number, word, Complex(0.0, 1.0), pos});
            } else {
                tokens.push_back({TokenKind::ident, std::move(word), 0.0, pos});
            }
            i = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            if (j < src.size() && src[j] == '.') {
                ++j;
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            }
            bool imaginary = false;
            if (j < src.size() && src[j] == 'i' &&
                (j + 1 >= src.size() || !std::isalnum(static_cast<unsigned char>(src[j + 1])))) {
                imaginary = true;
                ++j;
            }
            const std::string text = src.substr(i, j - i);
            const double mag = std::stod(imaginary ? text.substr(0, text.size() - 1) : text);
            tokens.push_back({TokenKind::number, text,
                              imaginary ? Complex(0.0, mag) : Complex(mag, 0.0), pos});
            i = j;
            continue;
        }
        TokenKind kind;
        switch (c) {
            case '+': kind = TokenKind::plus; break;
            case '-': kind = TokenKind::minus; break;
            case '*': kind = TokenKind::star; break;
            case '^': kind = TokenKind::caret; break;
            case '(': kind = TokenKind::lparen; break;
            case ')': kind = TokenKind::rparen; break;
            default:
                throw parse_error(std::string("illegal character '") + c + "'", pos);
        }
        tokens.push_back({kind, std::string(1, c), 0.0, pos});
        ++i;
    }
    tokens.push_back({TokenKind::end, "", 0.0, static_cast<int>(src.size()) + 1});
    return tokens;
}

NodePtr Node::binary(Kind k, NodePtr a, NodePtr b, int pos) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    n->position = pos;
    return n;
}

NodePtr Node::unary(Kind k, NodePtr a, int pos) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->lhs = std::move(a);
    n->position = pos;
    return n;
}

NodePtr Node::power(NodePtr a, int e, int pos) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::pow;
    n->lhs = std::move(a);
    n->exponent = e;
    n->position = pos;
    return n;
}

NodePtr Node::atom_node(std::string symbol, int site, int pos) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::atom;
    n->name = std::move(symbol);
    n->site = site;
    n->position = pos;
    return n;
}

NodePtr Node::scalar_node(Complex v, int pos) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::scalar;
    n->value = v;
    n->position = pos;
    return n;
}

NodePtr Node::param_node(std::string name, int pos) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::param;
    n->name = std::move(name);
    n->position = pos;
    return n;
}

namespace {

// Identifier classification shared by the parser and the evaluator. An atom
// is one of the operator symbols followed by a 1-based site label; "I" is the
// full identity; everything else is a parameter reference.
bool split_atom(const std::string& word, std::string& symbol, int& site) {
    static const char* kSymbols[] = {"Sp", "Sm", "ad", "X", "Y", "Z", "a", "n"};
    for (const char* s : kSymbols) {
        const std::string sym(s);
        if (word.size() > sym.size() && word.compare(0, sym.size(), sym) == 0) {
            const std::string digits = word.substr(sym.size());
            if (std::all_of(digits.begin(), digits.end(),
                            [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
                symbol = sym;
                site = std::stoi(digits);
                return true;
            }
        }
    }
    return false;
}

class Parser {
public:
    explicit Parser(const std::vector<Token>& tokens) : tokens_(tokens) {}

    NodePtr run() {
        NodePtr e = expression();
        if (peek().kind != TokenKind::end) {
            throw parse_error("unexpected token '" + peek().text + "' after expression",
                              peek().position);
        }
        return e;
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    const Token& advance() { return tokens_[pos_++]; }
    bool match(TokenKind k) {
        if (peek().kind == k) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expression() {
        NodePtr lhs = term();
        while (peek().kind == TokenKind::plus || peek().kind == TokenKind::minus) {
            const Token op = advance();
            lhs = Node::binary(op.kind == TokenKind::plus ? Node::Kind::add : Node::Kind::sub,
                               std::move(lhs), term(), op.position);
        }
        return lhs;
    }

    NodePtr term() {
        NodePtr lhs = factor();
        while (peek().kind == TokenKind::star) {
            const Token op = advance();
            lhs = Node::binary(Node::Kind::mul, std::move(lhs), factor(), op.position);
        }
        return lhs;
    }

    NodePtr factor() {
        if (peek().kind == TokenKind::minus) {
            const Token op = advance();
            return Node::unary(Node::Kind::neg, factor(), op.position);
        }
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (match(TokenKind::caret)) {
            const Token& e = peek();
            if (e.kind != TokenKind::number || e.value.imag() != 0.0 ||
                e.value.real() != std::floor(e.value.real()) || e.value.real() < 0.0 ||
                e.text.find('.') != std::string::npos) {
                throw parse_error("exponent must be a nonnegative integer", e.position);
            }
            advance();
            base = Node::power(std::move(base), static_cast<int>(e.value.real()), e.position);
        }
        return base;
    }

    NodePtr primary() {
        const Token& t = peek();
        switch (t.kind) {
            case TokenKind::lparen: {
                advance();
                NodePtr e = expression();
                expect_rparen();
                return e;
            }
            case TokenKind::number:
                advance();
                return Node::scalar_node(t.value, t.position);
            case TokenKind::ident: {
                advance();
                if (t.text == "dag") {
                    if (!match(TokenKind::lparen)) {
                        throw parse_error("expected '(' after dag", peek().position);
                    }
                    NodePtr e = expression();
                    expect_rparen();
                    return Node::unary(Node::Kind::dag, std::move(e), t.position);
                }
                std::string symbol;
                int site = 0;
                if (t.text == "I") {
                    return Node::atom_node("I", 0, t.position);
                }
                if (split_atom(t.text, symbol, site)) {
                    return Node::atom_node(symbol, site, t.position);
                }
                return Node::param_node(t.text, t.position);
            }
            default:
                throw parse_error("expected expression, found '" +
                                      (t.kind == TokenKind::end ? std::string("end of input")
                                                                : t.text) +
                                      "'",
                                  t.position);
        }
    }

    void expect_rparen() {
        if (!match(TokenKind::rparen)) {
            throw parse_error("expected ')', found '" +
                                  (peek().kind == TokenKind::end ? std::string("end of input")
                                                                 : peek().text) +
                                  "'",
                              peek().position);
        }
    }

    const std::vector<Token>& tokens_;
    std::size_t pos_ = 0;
};

int precedence_rank(Node::Kind k) {
    switch (k) {
        case Node::Kind::add:
        case Node::Kind::sub: return 0;
        case Node::Kind::mul: return 1;
        case Node::Kind::neg: return 2;
        case Node::Kind::pow: return 3;
        default: return 4;
    }
}

std::string format_scalar(Complex v) {
    char buf[64];
    if (v.imag() == 0.0) {
        std::snprintf(buf, sizeof buf, "%.17g", v.real());
    } else if (v.real() == 0.0) {
        std::snprintf(buf, sizeof buf, "%.17gi", v.imag());
    } else {
        std::snprintf(buf, sizeof buf, "(%.17g + %.17gi)", v.real(), v.imag());
    }
    return buf;
}

std::string print_node(const Node& n, int parent_rank) {
    std::string out;
    const int rank = precedence_rank(n.kind);
    switch (n.kind) {
        case Node::Kind::add:
            out = print_node(*n.lhs, rank) + " + " + print_node(*n.rhs, rank + 1);
            break;
        case Node::Kind::sub:
            out = print_node(*n.lhs, rank) + " - " + print_node(*n.rhs, rank + 1);
            break;
        case Node::Kind::mul:
            out = print_node(*n.lhs, rank) + "*" + print_node(*n.rhs, rank + 1);
            break;
        case Node::Kind::neg:
            out = "-" + print_node(*n.lhs, rank);
            break;
        case Node::Kind::pow:
            out = print_node(*n.lhs, rank + 1) + "^" + std::to_string(n.exponent);
            break;
        case Node::Kind::dag:
            out = "dag(" + print_node(*n.lhs, 0) + ")";
            break;
        case Node::Kind::atom:
            out = n.name == "I" ? n.name : n.name + std::to_string(n.site);
            break;
        case Node::Kind::scalar:
            out = format_scalar(n.value);
            break;
        case Node::Kind::param:
            out = n.name;
            break;
    }
    if (rank < parent_rank) return "(" + out + ")";
    return out;
}

// Scalars stay symbolic through products so expressions like 2*0.5*X1
// evaluate without building scaled identities.
struct Value {
    bool is_scalar;
    Complex scalar;
    Operator op;

    Operator as_operator(const HilbertSpace& space) const {
        if (!is_scalar) return op;
        return scalar * identity(space);
    }
};

Value eval_node(const Node& n, const HilbertSpace& space,
                const std::map<std::string, double>& params) {
    switch (n.kind) {
        case Node::Kind::scalar:
            return {true, n.value, {}};
        case Node::Kind::param: {
            const auto it = params.find(n.name);
            if (it == params.end()) {
                throw parse_error("unknown identifier '" + n.name + "'", n.position);
            }
            return {true, Complex(it->second, 0.0), {}};
        }
        case Node::Kind::atom: {
            if (n.name == "I") return {false, 0.0, identity(space)};
            if (n.site < 1 || n.site > space.factor_count()) {
                throw parse_error("site label " + std::to_string(n.site) + " out of range for '" +
                                      n.name + std::to_string(n.site) + "'",
                                  n.position);
            }
            const int site = n.site - 1;
            const Factor& f = space.factor(site);
            const bool qubit_atom = n.name == "X" || n.name == "Y" || n.name == "Z" ||
                                    n.name == "Sp" || n.name == "Sm";
            if (qubit_atom && f.kind != FactorKind::qubit) {
                throw parse_error("qubit atom '" + n.name + "' applied to a fock site", n.position);
            }
            if (!qubit_atom && f.kind != FactorKind::fock) {
                throw parse_error("fock atom '" + n.name + "' applied to a qubit site", n.position);
            }
            Operator local;
            if (n.name == "X") local = pauli_x();
            else if (n.name == "Y") local = pauli_y();
            else if (n.name == "Z") local = pauli_z();
            else if (n.name == "Sp") local = sigma_plus();
            else if (n.name == "Sm") local = sigma_minus();
            else if (n.name == "a") local = annihilation(f.dim);
            else if (n.name == "ad") local = annihilation(f.dim).dagger();
            else if (n.name == "n") local = number_operator(f.dim);
            else throw parse_error("unknown atom '" + n.name + "'", n.position);
            return {false, 0.0, embed(site, local, space)};
        }
        case Node::Kind::neg: {
            Value v = eval_node(*n.lhs, space, params);
            if (v.is_scalar) return {true, -v.scalar, {}};
            return {false, 0.0, -v.op};
        }
        case Node::Kind::dag: {
            Value v = eval_node(*n.lhs, space, params);
            if (v.is_scalar) return {true, std::conj(v.scalar), {}};
            return {false, 0.0, v.op.dagger()};
        }
        case Node::Kind::pow: {
            Value v = eval_node(*n.lhs, space, params);
            if (v.is_scalar) return {true, std::pow(v.scalar, n.exponent), {}};
            return {false, 0.0, pow(v.op, n.exponent)};
        }
        case Node::Kind::mul: {
            Value a = eval_node(*n.lhs, space, params);
            Value b = eval_node(*n.rhs, space, params);
            if (a.is_scalar && b.is_scalar) return {true, a.scalar * b.scalar, {}};
            if (a.is_scalar) return {false, 0.0, a.scalar * b.op};
            if (b.is_scalar) return {false, 0.0, b.scalar * a.op};
            return {false, 0.0, a.op * b.op};
        }
        case Node::Kind::add:
        case Node::Kind::sub: {
            const Operator a = eval_node(*n.lhs, space, params).as_operator(space);
            const Operator b = eval_node(*n.rhs, space, params).as_operator(space);
            return {false, 0.0, n.kind == Node::Kind::add ? a + b : a - b};
        }
    }
    throw parse_error("internal: unhandled node", n.position);
}

}  // namespace

NodePtr parse(const std::vector<Token>& tokens) { return Parser(tokens).run(); }

NodePtr parse(const std::string& src) { return parse(tokenize(src)); }

bool is_reserved_identifier(const std::string& word) {
    std::string symbol;
    int site = 0;
    return word == "I" || word == "i" || word == "dag" || split_atom(word, symbol, site);
}

std::string to_string(const Node& node) { return print_node(node, 0); }

bool tree_equal(const Node& a, const Node& b) {
    if (a.kind != b.kind || a.exponent != b.exponent || a.name != b.name || a.site != b.site ||
        a.value != b.value) {
        return false;
    }
    if (static_cast<bool>(a.lhs) != static_cast<bool>(b.lhs) ||
        static_cast<bool>(a.rhs) != static_cast<bool>(b.rhs)) {
        return false;
    }
    if (a.lhs && !tree_equal(*a.lhs, *b.lhs)) return false;
    if (a.rhs && !tree_equal(*a.rhs, *b.rhs)) return false;
    return true;
}

Operator evaluate(const Node& node, const HilbertSpace& space,
                  const std::map<std::string, double>& params) {
    return eval_node(node, space, params).as_operator(space);
}

Operator evaluate(const std::string& src, const HilbertSpace& space,
                  const std::map<std::string, double>& params) {
    return evaluate(*parse(src), space, params);
}

}  // namespace lindblad::expr

namespace lindblad {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& origin, const std::string& path,
                               const std::string& message) {
    throw model_error(origin + ": " + path + ": " + message);
}

}  // namespace

Model parse_model_text(const std::string& text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw model_error(origin + ": " + e.what());
    }
    if (!doc.is_object()) schema_error(origin, "$", "top level must be an object");

    static const std::vector<std::string> kKnown = {"name", "spaces", "parameters", "hamiltonian",
                                                    "jump_operators"};
    for (const auto& [key, _] : doc.items()) {
        if (std::find(kKnown.begin(), kKnown.end(), key) == kKnown.end()) {
            schema_error(origin, key, "unknown key");
        }
    }

    if (!doc.contains("name") || !doc["name"].is_string()) {
        schema_error(origin, "name", "missing or not a string");
    }
    const std::string name = doc["name"].get<std::string>();

    if (!doc.contains("spaces") || !doc["spaces"].is_array() || doc["spaces"].empty()) {
        schema_error(origin, "spaces", "missing, not an array, or empty");
    }
    std::vector<Factor> factors;
    for (std::size_t i = 0; i < doc["spaces"].size(); ++i) {
        const json& s = doc["spaces"][i];
        const std::string path = "spaces[" + std::to_string(i) + "]";
        if (!s.is_object() || !s.contains("kind") || !s["kind"].is_string()) {
            schema_error(origin, path, "expected an object with a \"kind\" string");
        }
        const std::string kind = s["kind"].get<std::string>();
        if (kind == "qubit") {
            for (const auto& [key, _] : s.items()) {
                if (key != "kind") schema_error(origin, path + "." + key, "unknown key");
            }
            factors.push_back({FactorKind::qubit, 2});
        } else if (kind == "fock") {
            if (!s.contains("dim") || !s["dim"].is_number_integer()) {
                schema_error(origin, path + ".dim", "fock factor needs an integer dim");
            }
            for (const auto& [key, _] : s.items()) {
                if (key != "kind" && key != "dim") {
                    schema_error(origin, path + "." + key, "unknown key");
                }
            }
            const int dim = s["dim"].get<int>();
            if (dim < 2) schema_error(origin, path + ".dim", "must be >= 2");
            factors.push_back({FactorKind::fock, dim});
        } else {
            schema_error(origin, path + ".kind", "must be \"qubit\" or \"fock\"");
        }
    }
    HilbertSpace space(std::move(factors));

    std::map<std::string, double> params;
    if (doc.contains("parameters")) {
        if (!doc["parameters"].is_object()) schema_error(origin, "parameters", "must be an object");
        for (const auto& [key, value] : doc["parameters"].items()) {
            if (!value.is_number()) {
                schema_error(origin, "parameters." + key, "must be a number");
            }
            if (expr::is_reserved_identifier(key)) {
                schema_error(origin, "parameters." + key, "collides with an operator atom");
            }
            if (key.empty() || !std::isalpha(static_cast<unsigned char>(key[0])) ||
                !std::all_of(key.begin(), key.end(), [](char c) {
                    return std::isalnum(static_cast<unsigned char>(c));
                })) {
                schema_error(origin, "parameters." + key, "not a valid identifier");
            }
            params[key] = value.get<double>();
        }
    }

    Operator hamiltonian = zero(space);
    if (doc.contains("hamiltonian")) {
        if (!doc["hamiltonian"].is_string()) schema_error(origin, "hamiltonian", "must be a string");
        try {
            hamiltonian = expr::evaluate(doc["hamiltonian"].get<std::string>(), space, params);
        } catch (const expr::parse_error& e) {
            schema_error(origin, "hamiltonian", e.what());
        }
    }

    std::vector<Operator> jumps;
    if (doc.contains("jump_operators")) {
        if (!doc["jump_operators"].is_array()) {
            schema_error(origin, "jump_operators", "must be an array of strings");
        }
        for (std::size_t l = 0; l < doc["jump_operators"].size(); ++l) {
            const std::string path = "jump_operators[" + std::to_string(l) + "]";
            if (!doc["jump_operators"][l].is_string()) schema_error(origin, path, "must be a string");
            try {
                jumps.push_back(
                    expr::evaluate(doc["jump_operators"][l].get<std::string>(), space, params));
            } catch (const expr::parse_error& e) {
                schema_error(origin, path, e.what());
            }
        }
    }

    try {
        return Model(name, std::move(space), std::move(hamiltonian), std::move(jumps));
    } catch (const model_error& e) {
        throw model_error(origin + ": " + e.what());
    }
}

Model load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw model_error("load_model: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model_text(buf.str(), path);
}

}  // namespace lindblad
