#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "heraklit/composition.hpp"
#include "heraklit/error.hpp"
#include "heraklit/invariants.hpp"
#include "heraklit/service_system.hpp"

namespace heraklit::dsl {

// Textual model syntax. A source file declares one signature, any number
// of structures and modules, optional invariants, and exactly one system
// composition expression:
//
//   signature Sig { sorts C, E; constant EX : set(E);
//                   function f : S -> set(E); variable c : C; }
//   structure Default : Sig { carrier C = {c1}; EX = {e1}; f(s1) = {e1}; }
//   module clients : Sig { place A : (C, S); transition b { in A : (c, s); }
//                          right { transition b; } }
//   invariant twin forall x in EX: count(R, x) + count(T, x) == 1;
//   system Name = clients . admin . [rooms] . experts;
//
// `.` composes (the bullet operator is accepted as an alias), `[m]`
// abstracts.

struct CompExpr {
    enum class Kind { Ref, Abstract, Compose };
    Kind kind = Kind::Ref;
    std::string name;
    std::vector<CompExpr> children;

    static CompExpr ref(std::string name) {
        CompExpr e;
        e.kind = Kind::Ref;
        e.name = std::move(name);
        return e;
    }
    static CompExpr abstracted(CompExpr inner) {
        CompExpr e;
        e.kind = Kind::Abstract;
        e.children.push_back(std::move(inner));
        return e;
    }
    static CompExpr composed(CompExpr l, CompExpr r) {
        CompExpr e;
        e.kind = Kind::Compose;
        e.children.push_back(std::move(l));
        e.children.push_back(std::move(r));
        return e;
    }

    std::string str() const {
        switch (kind) {
            case Kind::Ref: return name;
            case Kind::Abstract: return "[" + children[0].str() + "]";
            case Kind::Compose: {
                std::string l = children[0].str();
                std::string r = children[1].kind == Kind::Compose ? "(" + children[1].str() + ")"
                                                                  : children[1].str();
                return l + " . " + r;
            }
        }
        return "?";
    }
};

struct ParsedSystem {
    std::string name;
    Signature signature;
    std::string signature_name;
    std::map<std::string, Structure> structures;
    std::vector<std::string> structure_order;
    std::vector<std::pair<std::string, Module>> modules;
    std::vector<Invariant> invariants;
    CompExpr expression;
    std::optional<Module> composed;

    const Module* find_module(const std::string& name) const {
        for (const auto& [n, m] : modules)
            if (n == name) return &m;
        return nullptr;
    }

    const Structure& structure(const std::string& name = "") const {
        if (structures.empty()) throw ModelError("model declares no structure");
        if (name.empty()) return structures.at(structure_order.front());
        auto it = structures.find(name);
        if (it == structures.end()) throw ModelError("unknown structure " + name);
        return it->second;
    }
};

// --- lexer -------------------------------------------------------------------

namespace detail {

struct Token {
    enum class Kind { Ident, Number, Punct, End };
    Kind kind = Kind::End;
    std::string text;
    std::size_t line = 1;
    std::size_t column = 1;
};

class Lexer {
  public:
    explicit Lexer(const std::string& source) : source_(source) { advance(); }

    const Token& peek() const { return current_; }

    Token next() {
        Token t = current_;
        advance();
        return t;
    }

  private:
    void advance() {
        skip_trivia();
        current_.line = line_;
        current_.column = column_;
        if (pos_ >= source_.size()) {
            current_.kind = Token::Kind::End;
            current_.text.clear();
            return;
        }
        char c = source_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < source_.size() &&
                   (std::isalnum(static_cast<unsigned char>(source_[pos_])) || source_[pos_] == '_'))
                take();
            current_.kind = Token::Kind::Ident;
            current_.text = source_.substr(start, pos_ - start);
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < source_.size() && std::isdigit(static_cast<unsigned char>(source_[pos_])))
                take();
            current_.kind = Token::Kind::Number;
            current_.text = source_.substr(start, pos_ - start);
            return;
        }
        // The bullet composition operator aliases '.'.
        if (source_.compare(pos_, 3, "\xe2\x80\xa2") == 0) {
            take();
            take();
            take();
            current_.kind = Token::Kind::Punct;
            current_.text = ".";
            return;
        }
        if (source_.compare(pos_, 2, "->") == 0 || source_.compare(pos_, 2, "==") == 0) {
            current_.kind = Token::Kind::Punct;
            current_.text = source_.substr(pos_, 2);
            take();
            take();
            return;
        }
        current_.kind = Token::Kind::Punct;
        current_.text = std::string(1, c);
        take();
    }

    void skip_trivia() {
        while (pos_ < source_.size()) {
            char c = source_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                take();
            } else if (c == '/' && pos_ + 1 < source_.size() && source_[pos_ + 1] == '/') {
                while (pos_ < source_.size() && source_[pos_] != '\n') take();
            } else if (c == '/' && pos_ + 1 < source_.size() && source_[pos_ + 1] == '*') {
                take();
                take();
                while (pos_ + 1 < source_.size() &&
                       !(source_[pos_] == '*' && source_[pos_ + 1] == '/'))
                    take();
                if (pos_ + 1 < source_.size()) {
                    take();
                    take();
                }
            } else {
                break;
            }
        }
    }

    void take() {
        if (source_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    const std::string& source_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
    Token current_;
};

}  // namespace detail

// --- parser ------------------------------------------------------------------

namespace detail {

class Parser {
  public:
    explicit Parser(const std::string& source) : lexer_(source) {}

    ParsedSystem parse() {
        ParsedSystem out;
        bool have_signature = false;
        bool have_system = false;
        while (lexer_.peek().kind != Token::Kind::End) {
            const Token& t = lexer_.peek();
            if (is_ident(t, "signature")) {
                if (have_signature) fail(t, "only one signature block is supported");
                parse_signature(out);
                have_signature = true;
            } else if (is_ident(t, "structure")) {
                require_signature(have_signature, t);
                parse_structure(out);
            } else if (is_ident(t, "module")) {
                require_signature(have_signature, t);
                parse_module(out);
            } else if (is_ident(t, "invariant")) {
                require_signature(have_signature, t);
                parse_invariant(out);
            } else if (is_ident(t, "system")) {
                if (have_system) fail(t, "only one system declaration is allowed");
                parse_system_decl(out);
                have_system = true;
            } else {
                fail(t, "expected signature, structure, module, invariant or system");
            }
        }
        if (!have_system) {
            Token t = lexer_.peek();
            fail(t, "missing system declaration");
        }
        out.composed = evaluate(out, out.expression);
        return out;
    }

  private:
    [[noreturn]] void fail(const Token& t, const std::string& message) {
        throw ParseError(t.line, t.column, message);
    }

    void require_signature(bool have, const Token& t) {
        if (!have) fail(t, "the signature block must come first");
    }

    static bool is_ident(const Token& t, const char* word) {
        return t.kind == Token::Kind::Ident && t.text == word;
    }

    Token expect_ident() {
        Token t = lexer_.next();
        if (t.kind != Token::Kind::Ident) fail(t, "expected identifier, got '" + t.text + "'");
        return t;
    }

    Token expect_keyword(const char* word) {
        Token t = lexer_.next();
        if (!is_ident(t, word)) fail(t, std::string("expected '") + word + "', got '" + t.text + "'");
        return t;
    }

    Token expect_punct(const char* text) {
        Token t = lexer_.next();
        if (t.kind != Token::Kind::Punct || t.text != text)
            fail(t, std::string("expected '") + text + "', got '" + t.text + "'");
        return t;
    }

    bool peek_punct(const char* text) {
        const Token& t = lexer_.peek();
        return t.kind == Token::Kind::Punct && t.text == text;
    }

    bool accept_punct(const char* text) {
        if (!peek_punct(text)) return false;
        lexer_.next();
        return true;
    }

    bool accept_keyword(const char* word) {
        if (!is_ident(lexer_.peek(), word)) return false;
        lexer_.next();
        return true;
    }

    std::size_t expect_number() {
        Token t = lexer_.next();
        if (t.kind != Token::Kind::Number) fail(t, "expected a number, got '" + t.text + "'");
        return static_cast<std::size_t>(std::stoull(t.text));
    }

    // sortExpr := 'bool' | 'set' '(' IDENT ')' | '(' sortExpr (',' sortExpr)+ ')' | IDENT
    Sort parse_sort(const Signature& sig) {
        const Token t = lexer_.peek();
        if (accept_keyword("bool")) return Sort::boolean();
        if (accept_keyword("set")) {
            expect_punct("(");
            Token name = expect_ident();
            expect_punct(")");
            if (!sig.declares_sort(name.text)) fail(name, "unknown sort " + name.text);
            return Sort::powerset(name.text);
        }
        if (accept_punct("(")) {
            std::vector<Sort> components;
            components.push_back(parse_sort(sig));
            while (accept_punct(",")) components.push_back(parse_sort(sig));
            expect_punct(")");
            if (components.size() < 2) fail(t, "tuple sort needs at least two components");
            return Sort::tuple(std::move(components));
        }
        Token name = expect_ident();
        if (!sig.declares_sort(name.text)) fail(name, "unknown sort " + name.text);
        return Sort::basic(name.text);
    }

    // --- terms ---

    // boolterm := cmp ('and' cmp)* ; cmp := term (('in'|'=='|'subset') term)?
    Term parse_bool_term(const Signature& sig) {
        std::vector<Term> conjuncts;
        conjuncts.push_back(parse_cmp_term(sig));
        while (accept_keyword("and")) conjuncts.push_back(parse_cmp_term(sig));
        if (conjuncts.size() == 1) return conjuncts[0];
        return Term::conjunction(std::move(conjuncts));
    }

    Term parse_cmp_term(const Signature& sig) {
        Term lhs = parse_term(sig);
        if (accept_keyword("in")) return Term::membership(std::move(lhs), parse_term(sig));
        if (accept_punct("==")) return Term::equality(std::move(lhs), parse_term(sig));
        if (accept_keyword("subset")) return Term::subset_of(std::move(lhs), parse_term(sig));
        return lhs;
    }

    Term parse_term(const Signature& sig) {
        const Token t = lexer_.peek();
        if (accept_keyword("true")) return Term::truth();
        if (accept_punct("(")) {
            Term first = parse_bool_term(sig);
            if (peek_punct(",")) {
                std::vector<Term> components{std::move(first)};
                while (accept_punct(",")) components.push_back(parse_bool_term(sig));
                expect_punct(")");
                return Term::tuple(std::move(components));
            }
            expect_punct(")");
            return first;
        }
        Token name = expect_ident();
        if (accept_punct("(")) {
            std::vector<Term> args;
            args.push_back(parse_bool_term(sig));
            while (accept_punct(",")) args.push_back(parse_bool_term(sig));
            expect_punct(")");
            if (sig.functions.find(name.text) == sig.functions.end())
                fail(name, "unknown function " + name.text);
            return Term::apply(name.text, std::move(args));
        }
        if (sig.variables.count(name.text)) return Term::variable(name.text);
        if (sig.constants.count(name.text)) return Term::constant(name.text);
        fail(name, "unresolved name " + name.text);
    }

    // --- declarations ---

    void parse_signature(ParsedSystem& out) {
        expect_keyword("signature");
        out.signature_name = expect_ident().text;
        expect_punct("{");
        Signature& sig = out.signature;
        while (!accept_punct("}")) {
            const Token t = lexer_.peek();
            if (accept_keyword("sorts")) {
                sig.sorts.insert(expect_ident().text);
                while (accept_punct(",")) sig.sorts.insert(expect_ident().text);
                expect_punct(";");
            } else if (accept_keyword("constant")) {
                Token name = expect_ident();
                expect_punct(":");
                Sort sort = parse_sort(sig);
                if (!sig.constants.emplace(name.text, std::move(sort)).second)
                    fail(name, "duplicate constant " + name.text);
                expect_punct(";");
            } else if (accept_keyword("function")) {
                Token name = expect_ident();
                expect_punct(":");
                FunctionType type{{}, Sort::boolean()};
                type.arguments.push_back(parse_sort(sig));
                while (accept_punct("*")) type.arguments.push_back(parse_sort(sig));
                expect_punct("->");
                type.result = parse_sort(sig);
                if (!sig.functions.emplace(name.text, std::move(type)).second)
                    fail(name, "duplicate function " + name.text);
                expect_punct(";");
            } else if (accept_keyword("variable")) {
                std::vector<Token> names{expect_ident()};
                while (accept_punct(",")) names.push_back(expect_ident());
                expect_punct(":");
                Sort sort = parse_sort(sig);
                for (const auto& name : names)
                    if (!sig.variables.emplace(name.text, sort).second)
                        fail(name, "duplicate variable " + name.text);
                expect_punct(";");
            } else if (accept_keyword("requirement")) {
                sig.requirements.push_back(parse_bool_term(sig));
                expect_punct(";");
            } else {
                fail(t, "expected sorts, constant, function, variable or requirement");
            }
        }
        ValidationReport report = sig.validate();
        if (!report.ok()) {
            Token t = lexer_.peek();
            fail(t, "signature invalid:\n" + report.str());
        }
    }

    // Atom identifiers in structure blocks are taken at face value; carrier
    // membership is validate_structure's business, so invalid structures
    // stay expressible for `check` to diagnose.
    Value parse_value_lenient(const Sort& sort) {
        const Token t = lexer_.peek();
        switch (sort.kind()) {
            case Sort::Kind::Boolean:
                if (accept_keyword("true")) return Value::boolean(true);
                if (accept_keyword("false")) return Value::boolean(false);
                fail(t, "expected boolean value");
            case Sort::Kind::Basic: return Value::atom(expect_ident().text, sort.name());
            case Sort::Kind::Tuple: {
                expect_punct("(");
                std::vector<Value> components;
                for (std::size_t i = 0; i < sort.components().size(); ++i) {
                    if (i) expect_punct(",");
                    components.push_back(parse_value_lenient(sort.components()[i]));
                }
                expect_punct(")");
                return Value::tuple(std::move(components));
            }
            case Sort::Kind::Powerset: {
                expect_punct("{");
                std::vector<Value> elements;
                if (!peek_punct("}")) {
                    elements.push_back(parse_value_lenient(Sort::basic(sort.name())));
                    while (accept_punct(",")) elements.push_back(parse_value_lenient(Sort::basic(sort.name())));
                }
                expect_punct("}");
                return Value::set(std::move(elements));
            }
        }
        fail(t, "unsupported sort for a value");
    }

    void parse_structure(ParsedSystem& out) {
        expect_keyword("structure");
        Token name = expect_ident();
        expect_punct(":");
        Token sig_name = expect_ident();
        if (sig_name.text != out.signature_name)
            fail(sig_name, "unknown signature " + sig_name.text);
        expect_punct("{");

        Structure st;
        st.signature = out.signature;

        while (!accept_punct("}")) {
            if (accept_keyword("carrier")) {
                Token sort = expect_ident();
                if (!out.signature.declares_sort(sort.text)) fail(sort, "unknown sort " + sort.text);
                expect_punct("=");
                expect_punct("{");
                std::vector<std::string> atoms;
                if (!peek_punct("}")) {
                    atoms.push_back(expect_ident().text);
                    while (accept_punct(",")) atoms.push_back(expect_ident().text);
                }
                expect_punct("}");
                expect_punct(";");
                st.set_carrier(sort.text, atoms);
                continue;
            }
            Token name_token = expect_ident();
            if (accept_punct("(")) {
                auto fn = out.signature.functions.find(name_token.text);
                if (fn == out.signature.functions.end())
                    fail(name_token, "unknown function " + name_token.text);
                std::vector<Value> args;
                for (std::size_t i = 0; i < fn->second.arguments.size(); ++i) {
                    if (i) expect_punct(",");
                    args.push_back(parse_value_lenient(fn->second.arguments[i]));
                }
                expect_punct(")");
                expect_punct("=");
                Value result = parse_value_lenient(fn->second.result);
                expect_punct(";");
                st.function_tables[name_token.text].entries[std::move(args)] = std::move(result);
                continue;
            }
            auto constant = out.signature.constants.find(name_token.text);
            if (constant == out.signature.constants.end())
                fail(name_token, "unknown constant " + name_token.text);
            expect_punct("=");
            Value value = parse_value_lenient(constant->second);
            expect_punct(";");
            st.constant_values[name_token.text] = std::move(value);
        }
        if (out.structures.count(name.text)) fail(name, "duplicate structure " + name.text);
        out.structures.emplace(name.text, std::move(st));
        out.structure_order.push_back(name.text);
    }

    InscriptionItem parse_inscription_item(const Signature& sig) {
        if (accept_keyword("elm")) {
            expect_punct("(");
            Term t = parse_bool_term(sig);
            expect_punct(")");
            return InscriptionItem::spread(std::move(t));
        }
        return InscriptionItem::plain(parse_bool_term(sig));
    }

    ArcInscription parse_inscription(const Signature& sig) {
        ArcInscription arc;
        arc.push_back(parse_inscription_item(sig));
        while (accept_punct(",")) arc.push_back(parse_inscription_item(sig));
        return arc;
    }

    void parse_module(ParsedSystem& out) {
        Token keyword = expect_keyword("module");
        Token name = expect_ident();
        expect_punct(":");
        Token sig_name = expect_ident();
        if (sig_name.text != out.signature_name)
            fail(sig_name, "unknown signature " + sig_name.text);
        expect_punct("{");

        NetSchema schema;
        schema.name = name.text;
        schema.signature = out.signature;
        Surface surface;

        while (!accept_punct("}")) {
            const Token t = lexer_.peek();
            if (accept_keyword("place")) {
                Token place_name = expect_ident();
                expect_punct(":");
                Sort sort = parse_sort(out.signature);
                expect_punct(";");
                if (schema.find_place(place_name.text))
                    fail(place_name, "duplicate place " + place_name.text);
                schema.places.push_back({place_name.text, std::move(sort)});
            } else if (accept_keyword("init")) {
                Token place_name = expect_ident();
                if (!schema.find_place(place_name.text))
                    fail(place_name, "initial marking for unknown place " + place_name.text);
                expect_punct("=");
                ArcInscription items = parse_inscription(out.signature);
                expect_punct(";");
                auto& into = schema.initial_marking[place_name.text];
                into.insert(into.end(), items.begin(), items.end());
            } else if (accept_keyword("transition")) {
                Token transition_name = expect_ident();
                if (schema.find_transition(transition_name.text))
                    fail(transition_name, "duplicate transition " + transition_name.text);
                Transition transition;
                transition.name = transition_name.text;
                expect_punct("{");
                while (!accept_punct("}")) {
                    const Token inner = lexer_.peek();
                    if (accept_keyword("guard")) {
                        transition.guard = parse_bool_term(out.signature);
                        expect_punct(";");
                    } else if (accept_keyword("in")) {
                        Token place_name = expect_ident();
                        expect_punct(":");
                        ArcInscription arc = parse_inscription(out.signature);
                        expect_punct(";");
                        auto& into = transition.input_arcs[place_name.text];
                        into.insert(into.end(), arc.begin(), arc.end());
                    } else if (accept_keyword("out")) {
                        Token place_name = expect_ident();
                        expect_punct(":");
                        ArcInscription arc = parse_inscription(out.signature);
                        expect_punct(";");
                        auto& into = transition.output_arcs[place_name.text];
                        into.insert(into.end(), arc.begin(), arc.end());
                    } else {
                        fail(inner, "expected guard, in or out");
                    }
                }
                schema.transitions.push_back(std::move(transition));
            } else if (is_ident(t, "left") || is_ident(t, "right")) {
                bool left = is_ident(t, "left");
                lexer_.next();
                expect_punct("{");
                auto& side = left ? surface.left : surface.right;
                while (!accept_punct("}")) {
                    GateKind kind;
                    if (accept_keyword("place")) {
                        kind = GateKind::Place;
                    } else {
                        expect_keyword("transition");
                        kind = GateKind::Transition;
                    }
                    Token element = expect_ident();
                    std::string label = element.text;
                    if (accept_keyword("as")) label = expect_ident().text;
                    expect_punct(";");
                    side.push_back({label, kind, element.text});
                }
            } else {
                fail(t, "expected place, init, transition, left or right");
            }
        }

        ValidationReport report = check_well_formed(schema);
        if (!report.ok())
            fail(keyword, "module " + name.text + " ill-formed:\n" + report.str());
        try {
            out.modules.push_back({name.text, Module::net(name.text, std::move(schema), std::move(surface))});
        } catch (const CompositionError& e) {
            fail(keyword, e.what());
        }
        for (std::size_t i = 0; i + 1 < out.modules.size(); ++i)
            if (out.modules[i].first == name.text)
                fail(name, "duplicate module " + name.text);
    }

    CountTerm parse_count_term() {
        expect_keyword("count");
        expect_punct("(");
        CountTerm term;
        term.place = expect_ident().text;
        if (accept_punct(".")) term.component = expect_number();
        if (accept_punct(",")) {
            expect_keyword("x");
            term.match_atom = true;
        }
        expect_punct(")");
        return term;
    }

    void parse_invariant(ParsedSystem& out) {
        expect_keyword("invariant");
        Token name = expect_ident();

        if (accept_keyword("forall")) {
            expect_keyword("x");
            expect_keyword("in");
            Token constant = expect_ident();
            if (!out.signature.constants.count(constant.text))
                fail(constant, "unknown constant " + constant.text);
            expect_punct(":");
            PlaceSumInvariant inv;
            inv.name = name.text;
            inv.quantified_constant = constant.text;
            inv.terms.push_back(parse_count_term());
            while (accept_punct("+")) inv.terms.push_back(parse_count_term());
            expect_punct("==");
            inv.expected_count = expect_number();
            expect_punct(";");
            out.invariants.push_back(std::move(inv));
            return;
        }

        if (accept_keyword("when")) {
            Token transition = expect_ident();
            expect_keyword("enabled");
            expect_punct(":");
            EnabledImplicationInvariant inv;
            inv.name = name.text;
            inv.transition = transition.text;
            if (accept_keyword("disjoint")) {
                inv.is_disjoint = true;
                expect_punct("(");
                inv.lhs = parse_set_expr(out.signature);
                expect_punct(",");
                inv.rhs = parse_set_expr(out.signature);
                expect_punct(")");
            } else {
                inv.guard_term = parse_bool_term(out.signature);
            }
            expect_punct(";");
            out.invariants.push_back(std::move(inv));
            return;
        }

        expect_punct(":");
        if (accept_keyword("well_typed")) {
            expect_punct(";");
            out.invariants.push_back(TypingInvariant{name.text});
            return;
        }

        PlaceSumInvariant inv;
        inv.name = name.text;
        inv.terms.push_back(parse_count_term());
        while (accept_punct("+")) inv.terms.push_back(parse_count_term());
        expect_punct("==");
        if (accept_keyword("size")) {
            expect_punct("(");
            Token constant = expect_ident();
            if (!out.signature.constants.count(constant.text))
                fail(constant, "unknown constant " + constant.text);
            expect_punct(")");
            inv.expected_size_of = constant.text;
        } else {
            inv.expected_count = expect_number();
        }
        expect_punct(";");
        out.invariants.push_back(std::move(inv));
    }

    EnabledImplicationInvariant::SetExpr parse_set_expr(const Signature& sig) {
        EnabledImplicationInvariant::SetExpr e;
        if (accept_keyword("tokens")) {
            expect_punct("(");
            e.tokens_of_place = true;
            e.place = expect_ident().text;
            expect_punct(")");
            return e;
        }
        e.term = parse_bool_term(sig);
        return e;
    }

    void parse_system_decl(ParsedSystem& out) {
        expect_keyword("system");
        out.name = expect_ident().text;
        expect_punct("=");
        out.expression = parse_comp_expr(out);
        expect_punct(";");
    }

  public:
    // Entry point for a bare composition expression over an already
    // parsed system's modules.
    CompExpr parse_standalone_expression(const ParsedSystem& system) {
        CompExpr expr = parse_comp_expr(system);
        Token t = lexer_.next();
        if (t.kind != Token::Kind::End) fail(t, "trailing input after composition expression");
        return expr;
    }

    static Module evaluate(const ParsedSystem& out, const CompExpr& expr) {
        switch (expr.kind) {
            case CompExpr::Kind::Ref: return *out.find_module(expr.name);
            case CompExpr::Kind::Abstract: return abstract(evaluate(out, expr.children[0]));
            case CompExpr::Kind::Compose:
                return compose(evaluate(out, expr.children[0]), evaluate(out, expr.children[1]));
        }
        throw ModelError("unreachable composition expression");
    }

  private:
    CompExpr parse_comp_expr(const ParsedSystem& out) {
        CompExpr lhs = parse_comp_atom(out);
        while (accept_punct(".")) lhs = CompExpr::composed(std::move(lhs), parse_comp_atom(out));
        return lhs;
    }

    CompExpr parse_comp_atom(const ParsedSystem& out) {
        if (accept_punct("[")) {
            CompExpr inner = parse_comp_expr(out);
            expect_punct("]");
            return CompExpr::abstracted(std::move(inner));
        }
        if (accept_punct("(")) {
            CompExpr inner = parse_comp_expr(out);
            expect_punct(")");
            return inner;
        }
        Token name = expect_ident();
        if (!out.find_module(name.text)) fail(name, "unknown module " + name.text);
        return CompExpr::ref(name.text);
    }

    Lexer lexer_;
};

}  // namespace detail

inline ParsedSystem parse_system(const std::string& source) {
    return detail::Parser(source).parse();
}

// Evaluates a composition expression such as "[clients] . [admin]" against
// the modules of a parsed system.
inline Module evaluate_expression(const ParsedSystem& system, const std::string& text) {
    detail::Parser parser(text);
    CompExpr expr = parser.parse_standalone_expression(system);
    return detail::Parser::evaluate(system, expr);
}

// --- printer -----------------------------------------------------------------

namespace detail {

inline void print_sort_decl(std::ostringstream& out, const Signature& sig) {
    out << "  sorts ";
    bool first = true;
    for (const auto& s : sig.sorts) {
        if (!first) out << ", ";
        first = false;
        out << s;
    }
    out << ";\n";
}

inline std::string function_type_str(const FunctionType& type) {
    std::string out;
    for (std::size_t i = 0; i < type.arguments.size(); ++i) {
        if (i) out += " * ";
        out += type.arguments[i].str();
    }
    return out + " -> " + type.result.str();
}

inline void print_module(std::ostringstream& out, const std::string& name, const Module& m,
                         const std::string& signature_name) {
    const NetSchema& schema = m.net_inner();
    out << "module " << name << " : " << signature_name << " {\n";
    for (const auto& p : schema.places) out << "  place " << p.name << " : " << p.token_sort.str() << ";\n";
    for (const auto& [place, items] : schema.initial_marking)
        out << "  init " << place << " = " << inscription_str(items) << ";\n";
    for (const auto& t : schema.transitions) {
        out << "  transition " << t.name << " {\n";
        if (!t.guard.is_truth()) out << "    guard " << t.guard.str() << ";\n";
        for (const auto& [place, arc] : t.input_arcs)
            out << "    in " << place << " : " << inscription_str(arc) << ";\n";
        for (const auto& [place, arc] : t.output_arcs)
            out << "    out " << place << " : " << inscription_str(arc) << ";\n";
        out << "  }\n";
    }
    auto print_side = [&](const std::vector<Gate>& side, const char* which) {
        if (side.empty()) return;
        out << "  " << which << " {\n";
        for (const auto& g : side) {
            out << "    " << gate_kind_str(g.kind) << " " << g.bound_element;
            if (g.label != g.bound_element) out << " as " << g.label;
            out << ";\n";
        }
        out << "  }\n";
    };
    print_side(m.surface().left, "left");
    print_side(m.surface().right, "right");
    out << "}\n\n";
}

inline void print_invariant(std::ostringstream& out, const Invariant& inv) {
    if (const auto* sum = std::get_if<PlaceSumInvariant>(&inv)) {
        out << "invariant " << sum->name;
        if (sum->quantified_constant) out << " forall x in " << *sum->quantified_constant;
        out << ": ";
        for (std::size_t i = 0; i < sum->terms.size(); ++i) {
            if (i) out << " + ";
            out << sum->terms[i].str();
        }
        out << " == ";
        if (sum->expected_count)
            out << *sum->expected_count;
        else
            out << "size(" << *sum->expected_size_of << ")";
        out << ";\n";
        return;
    }
    if (const auto* imp = std::get_if<EnabledImplicationInvariant>(&inv)) {
        out << "invariant " << imp->name << " when " << imp->transition << " enabled: ";
        if (imp->is_disjoint)
            out << "disjoint(" << imp->lhs.str() << ", " << imp->rhs.str() << ")";
        else
            out << imp->guard_term.str();
        out << ";\n";
        return;
    }
    out << "invariant " << std::get<TypingInvariant>(inv).name << ": well_typed;\n";
}

}  // namespace detail

// Prints a parsed system back to source; reparsing yields a canonically
// equal system.
inline std::string print_system(const ParsedSystem& system) {
    std::ostringstream out;
    out << "signature " << system.signature_name << " {\n";
    detail::print_sort_decl(out, system.signature);
    for (const auto& [name, sort] : system.signature.constants)
        out << "  constant " << name << " : " << sort.str() << ";\n";
    for (const auto& [name, type] : system.signature.functions)
        out << "  function " << name << " : " << detail::function_type_str(type) << ";\n";
    for (const auto& [name, sort] : system.signature.variables)
        out << "  variable " << name << " : " << sort.str() << ";\n";
    for (const auto& req : system.signature.requirements)
        out << "  requirement " << req.str() << ";\n";
    out << "}\n\n";

    for (const auto& name : system.structure_order) {
        const Structure& st = system.structures.at(name);
        out << "structure " << name << " : " << system.signature_name << " {\n";
        for (const auto& [sort, atoms] : st.carriers) {
            out << "  carrier " << sort << " = {";
            for (std::size_t i = 0; i < atoms.size(); ++i) {
                if (i) out << ", ";
                out << atoms[i].str();
            }
            out << "};\n";
        }
        for (const auto& [constant, value] : st.constant_values)
            out << "  " << constant << " = " << value.str() << ";\n";
        for (const auto& [function, table] : st.function_tables) {
            for (const auto& [args, result] : table.entries) {
                out << "  " << function << "(";
                for (std::size_t i = 0; i < args.size(); ++i) {
                    if (i) out << ", ";
                    out << args[i].str();
                }
                out << ") = " << result.str() << ";\n";
            }
        }
        out << "}\n\n";
    }

    for (const auto& [name, m] : system.modules)
        detail::print_module(out, name, m, system.signature_name);

    for (const auto& inv : system.invariants) detail::print_invariant(out, inv);
    if (!system.invariants.empty()) out << "\n";

    out << "system " << system.name << " = " << system.expression.str() << ";\n";
    return out.str();
}

// The shipped service-system model, generated from the programmatic
// fixture so the two stay in lockstep. Besides the default instantiation
// it carries a two-room variant, under which both experts can be engaged
// at once.
inline std::string service_system_source() {
    ParsedSystem system;
    auto fixture = service_system::build_system();
    system.name = "ServiceSystem";
    system.signature = fixture.signature;
    system.signature_name = "ServiceSig";
    system.structures.emplace("Default", fixture.default_structure);
    system.structure_order.push_back("Default");
    Structure two_rooms = fixture.default_structure;
    two_rooms.set_carrier("R", {"r1", "r2"});
    two_rooms.constant_values["RO"] = Value::set({Value::atom("r1", "R"), Value::atom("r2", "R")});
    system.structures.emplace("TwoRooms", std::move(two_rooms));
    system.structure_order.push_back("TwoRooms");
    system.modules = {{"clients", fixture.clients},
                      {"admin", fixture.admin},
                      {"rooms", fixture.rooms},
                      {"experts", fixture.experts}};
    system.invariants = fixture.invariants;
    system.expression = CompExpr::composed(
        CompExpr::composed(CompExpr::composed(CompExpr::ref("clients"), CompExpr::ref("admin")),
                           CompExpr::ref("rooms")),
        CompExpr::ref("experts"));
    return print_system(system);
}

}  // namespace heraklit::dsl
