#pragma once

#include <cctype>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "chasegate/core.hpp"

namespace chasegate {

class ParseError : public ProgramError {
public:
    ParseError(std::uint32_t line, std::uint32_t col, const std::string& msg)
        : ProgramError("line " + std::to_string(line) + ", col " + std::to_string(col) + ": " + msg),
          line(line),
          col(col) {}

    std::uint32_t line;
    std::uint32_t col;
};

struct StatementSpan {
    std::uint32_t line = 0;
    std::uint32_t col = 0;
};

struct SourceProgram {
    Symbols syms;
    Database db;
    Program prog;
    std::vector<StatementSpan> factSpans;  // parallel to db.facts()
    std::vector<StatementSpan> ruleSpans;  // parallel to prog.tgds
};

namespace detail {

enum class Tok { Ident, Number, SQuote, DQuote, LParen, RParen, Comma, Arrow, Colon, Dot, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::uint32_t line = 1;
    std::uint32_t col = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skipSpaceAndComments();
        Token t;
        t.line = line_;
        t.col = col_;
        if (pos_ >= src_.size()) {
            t.kind = Tok::End;
            return t;
        }
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c))) {
            auto start = pos_;
            while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                          src_[pos_] == '_'))
                advance();
            t.kind = Tok::Ident;
            t.text = std::string(src_.substr(start, pos_ - start));
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            auto start = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                advance();
            t.kind = Tok::Number;
            t.text = std::string(src_.substr(start, pos_ - start));
            return t;
        }
        switch (c) {
            case '(': advance(); t.kind = Tok::LParen; return t;
            case ')': advance(); t.kind = Tok::RParen; return t;
            case ',': advance(); t.kind = Tok::Comma; return t;
            case ':': advance(); t.kind = Tok::Colon; return t;
            case '.': advance(); t.kind = Tok::Dot; return t;
            case '-':
                advance();
                if (pos_ >= src_.size() || src_[pos_] != '>')
                    throw ParseError(t.line, t.col, "expected '->'");
                advance();
                t.kind = Tok::Arrow;
                return t;
            case '\'':
            case '"': {
                char quote = c;
                advance();
                auto start = pos_;
                while (pos_ < src_.size() && src_[pos_] != quote && src_[pos_] != '\n') advance();
                if (pos_ >= src_.size() || src_[pos_] != quote)
                    throw ParseError(t.line, t.col, "unterminated quoted name");
                t.kind = quote == '\'' ? Tok::SQuote : Tok::DQuote;
                t.text = std::string(src_.substr(start, pos_ - start));
                advance();
                return t;
            }
            default:
                throw ParseError(t.line, t.col,
                                 std::string("unexpected character '") + c + "'");
        }
    }

private:
    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skipSpaceAndComments() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '%') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::uint32_t line_ = 1;
    std::uint32_t col_ = 1;
};

struct RawTerm {
    bool isVariable = false;
    std::string text;  // variable name, or constant name with quotes resolved
    std::uint32_t line = 0;
    std::uint32_t col = 0;
};

struct RawAtom {
    std::string pred;
    std::vector<RawTerm> terms;
    std::uint32_t line = 0;
    std::uint32_t col = 0;
};

}  // namespace detail

class Parser {
public:
    explicit Parser(std::string_view src) : lex_(src) { shift(); }

    SourceProgram parse() {
        std::size_t ruleCount = 0;
        while (cur_.kind != detail::Tok::End) {
            parseStatement(out_, ruleCount);
        }
        return std::move(out_);
    }

private:
    using Tok = detail::Tok;

    void shift() { cur_ = lex_.next(); }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(cur_.line, cur_.col, msg);
    }

    void expect(Tok kind, const char* what) {
        if (cur_.kind != kind) fail(std::string("expected ") + what);
        shift();
    }

    detail::RawAtom parseAtom() {
        detail::RawAtom a;
        a.line = cur_.line;
        a.col = cur_.col;
        if (cur_.kind == Tok::Ident || cur_.kind == Tok::DQuote) {
            a.pred = cur_.text;
            shift();
        } else {
            fail("expected predicate name");
        }
        expect(Tok::LParen, "'('");
        while (true) {
            detail::RawTerm t;
            t.line = cur_.line;
            t.col = cur_.col;
            if (cur_.kind == Tok::Ident) {
                t.isVariable = std::isupper(static_cast<unsigned char>(cur_.text[0])) != 0;
                t.text = cur_.text;
            } else if (cur_.kind == Tok::Number || cur_.kind == Tok::SQuote) {
                t.isVariable = false;
                t.text = cur_.text;
            } else {
                fail("expected term");
            }
            shift();
            a.terms.push_back(std::move(t));
            if (cur_.kind == Tok::Comma) {
                shift();
                continue;
            }
            break;
        }
        expect(Tok::RParen, "')'");
        return a;
    }

    std::vector<detail::RawAtom> parseAtomList() {
        std::vector<detail::RawAtom> atoms;
        atoms.push_back(parseAtom());
        while (cur_.kind == Tok::Comma) {
            shift();
            atoms.push_back(parseAtom());
        }
        return atoms;
    }

    void parseStatement(SourceProgram& out, std::size_t& ruleCount) {
        StatementSpan span{cur_.line, cur_.col};
        auto first = parseAtomList();
        if (cur_.kind == Tok::Dot && first.size() == 1) {
            shift();
            addFact(out, first[0], span);
            return;
        }
        if (cur_.kind != Tok::Arrow) {
            fail(first.size() == 1 ? "expected '->' or '.'" : "expected '->' after rule body");
        }
        shift();

        std::vector<detail::Token> exVarTokens;
        if (cur_.kind == Tok::Ident && cur_.text == "exists") {
            auto save = cur_;
            shift();
            if (cur_.kind == Tok::LParen) {
                // 'exists' used as a predicate name; re-parse the atom from it.
                pendingPred_ = save;
                hasPendingPred_ = true;
            } else {
                while (true) {
                    if (cur_.kind != Tok::Ident ||
                        !std::isupper(static_cast<unsigned char>(cur_.text[0])))
                        fail("expected existential variable");
                    exVarTokens.push_back(cur_);
                    shift();
                    if (cur_.kind == Tok::Comma) {
                        shift();
                        continue;
                    }
                    break;
                }
                expect(Tok::Colon, "':'");
            }
        }

        auto head = hasPendingPred_ ? parseHeadWithPendingPred() : parseAtomList();
        expect(Tok::Dot, "'.'");
        addRule(out, first, head, exVarTokens, span, ++ruleCount);
    }

    std::vector<detail::RawAtom> parseHeadWithPendingPred() {
        // cur_ is '(' and pendingPred_ holds the predicate token.
        detail::RawAtom a;
        a.pred = pendingPred_.text;
        a.line = pendingPred_.line;
        a.col = pendingPred_.col;
        hasPendingPred_ = false;
        expect(Tok::LParen, "'('");
        while (true) {
            detail::RawTerm t;
            t.line = cur_.line;
            t.col = cur_.col;
            if (cur_.kind == Tok::Ident) {
                t.isVariable = std::isupper(static_cast<unsigned char>(cur_.text[0])) != 0;
                t.text = cur_.text;
            } else if (cur_.kind == Tok::Number || cur_.kind == Tok::SQuote) {
                t.isVariable = false;
                t.text = cur_.text;
            } else {
                fail("expected term");
            }
            shift();
            a.terms.push_back(std::move(t));
            if (cur_.kind == Tok::Comma) {
                shift();
                continue;
            }
            break;
        }
        expect(Tok::RParen, "')'");
        std::vector<detail::RawAtom> atoms{std::move(a)};
        while (cur_.kind == Tok::Comma) {
            shift();
            atoms.push_back(parseAtom());
        }
        return atoms;
    }

    void addFact(SourceProgram& out, const detail::RawAtom& raw, StatementSpan span) {
        Atom a;
        a.pred = internPred(raw);
        for (const auto& t : raw.terms) {
            if (t.isVariable)
                throw ParseError(t.line, t.col, "variable '" + t.text + "' in fact");
            a.args.push_back(out.syms.terms.constant(t.text));
        }
        if (out.db.add(a)) out.factSpans.push_back(span);
    }

    void addRule(SourceProgram& out, const std::vector<detail::RawAtom>& body,
                 const std::vector<detail::RawAtom>& head,
                 const std::vector<detail::Token>& exVarTokens, StatementSpan span,
                 std::size_t index) {
        Tgd t;
        t.label = "r" + std::to_string(index);
        std::unordered_map<std::string, VarId> vars;
        auto var = [&](const std::string& name) {
            auto it = vars.find(name);
            if (it != vars.end()) return it->second;
            auto v = static_cast<VarId>(t.varNames.size());
            t.varNames.push_back(name);
            vars.emplace(name, v);
            return v;
        };
        auto convert = [&](const detail::RawAtom& raw) {
            RuleAtom a;
            a.pred = internPred(raw);
            for (const auto& term : raw.terms) {
                if (!term.isVariable)
                    throw ParseError(term.line, term.col,
                                     "constant '" + term.text + "' in rule");
                a.args.push_back(var(term.text));
            }
            return a;
        };
        for (const auto& raw : body) t.body.push_back(convert(raw));
        for (const auto& raw : head) t.head.push_back(convert(raw));
        for (const auto& tok : exVarTokens) {
            auto it = vars.find(tok.text);
            if (it == vars.end())
                throw ParseError(tok.line, tok.col,
                                 "existential variable '" + tok.text + "' does not occur in the rule");
            t.exVars.push_back(it->second);
        }
        try {
            finalizeTgd(t);
        } catch (const ParseError&) {
            throw;
        } catch (const ProgramError& e) {
            throw ParseError(span.line, span.col, e.what());
        }
        out.prog.tgds.push_back(std::move(t));
        out.ruleSpans.push_back(span);
    }

    PredId internPred(const detail::RawAtom& raw) {
        try {
            return out_.syms.preds.intern(raw.pred, static_cast<std::uint32_t>(raw.terms.size()));
        } catch (const ProgramError& e) {
            throw ParseError(raw.line, raw.col, e.what());
        }
    }

    SourceProgram out_;
    detail::Lexer lex_;
    detail::Token cur_;
    detail::Token pendingPred_;
    bool hasPendingPred_ = false;
};

inline SourceProgram parseProgram(std::string_view text) { return Parser(text).parse(); }

// ---------------------------------------------------------------------------
// Rendering. Output is parseable and normalized: facts first (insertion
// order), then rules; compact argument lists; quoting only where required.

namespace detail {

inline bool plainConstant(const std::string& s) {
    if (s.empty()) return false;
    if (std::isdigit(static_cast<unsigned char>(s[0]))) {
        for (char c : s)
            if (!std::isdigit(static_cast<unsigned char>(c))) return false;
        return true;
    }
    if (!std::islower(static_cast<unsigned char>(s[0]))) return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

inline bool plainPredicate(const std::string& s) {
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

inline bool plainVariable(const std::string& s) {
    if (s.empty() || !std::isupper(static_cast<unsigned char>(s[0]))) return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

}  // namespace detail

inline std::string renderConstant(const std::string& name) {
    return detail::plainConstant(name) ? name : "'" + name + "'";
}

inline std::string renderPredicate(const std::string& name) {
    return detail::plainPredicate(name) ? name : "\"" + name + "\"";
}

// Nulls render as ?n<k>: display-only, deliberately outside the grammar.
inline std::string renderTerm(TermId t, const TermTable& terms) {
    if (isNull(t)) return "?n" + std::to_string(termIndex(t));
    return renderConstant(terms.constantName(t));
}

inline std::string renderAtom(const Atom& a, const Symbols& syms) {
    std::string out = renderPredicate(syms.preds.name(a.pred)) + "(";
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (i) out += ",";
        out += renderTerm(a.args[i], syms.terms);
    }
    return out + ")";
}

inline std::string renderRuleAtom(const RuleAtom& a, const Tgd& t, const PredTable& preds) {
    std::string out = renderPredicate(preds.name(a.pred)) + "(";
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (i) out += ",";
        const auto& name = t.varNames[a.args[i]];
        if (!detail::plainVariable(name))
            throw ProgramError("variable name '" + name + "' is not renderable");
        out += name;
    }
    return out + ")";
}

inline std::string renderRule(const Tgd& t, const PredTable& preds) {
    std::string out;
    for (std::size_t i = 0; i < t.body.size(); ++i) {
        if (i) out += ", ";
        out += renderRuleAtom(t.body[i], t, preds);
    }
    out += " -> ";
    if (!t.exVars.empty()) {
        out += "exists ";
        for (std::size_t i = 0; i < t.exVars.size(); ++i) {
            if (i) out += ",";
            out += t.varNames[t.exVars[i]];
        }
        out += ": ";
    }
    for (std::size_t i = 0; i < t.head.size(); ++i) {
        if (i) out += ", ";
        out += renderRuleAtom(t.head[i], t, preds);
    }
    return out + ".";
}

inline std::string renderFact(const Atom& a, const Symbols& syms) {
    return renderAtom(a, syms) + ".";
}

inline std::string renderProgram(const SourceProgram& sp) {
    std::ostringstream out;
    for (const auto& f : sp.db.facts()) out << renderFact(f, sp.syms) << "\n";
    for (const auto& t : sp.prog.tgds) out << renderRule(t, sp.syms.preds) << "\n";
    return out.str();
}

}  // namespace chasegate
