#include "cdchase/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <vector>

#include "cdchase/query.hpp"

namespace cdchase {

namespace {

bool is_word_char(unsigned char c) { return std::isalnum(c) || c == '_' || c == '\''; }

struct Token {
    enum class Kind { Word, Quoted, Punct, Newline, End };
    Kind kind = Kind::End;
    std::string text;
    std::size_t line = 0;
    std::size_t column = 0;
};

std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    std::size_t line = 1, col = 1, i = 0;
    auto advance = [&](std::size_t n = 1) {
        i += n;
        col += n;
    };
    while (i < src.size()) {
        const char c = src[i];
        if (c == '\n') {
            out.push_back({Token::Kind::Newline, "\n", line, col});
            ++i;
            ++line;
            col = 1;
        } else if (c == '#') {
            while (i < src.size() && src[i] != '\n') advance();
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            advance();
        } else if (c == '"') {
            Token t{Token::Kind::Quoted, {}, line, col};
            advance();
            bool closed = false;
            while (i < src.size() && src[i] != '\n') {
                if (src[i] == '\\' && i + 1 < src.size() && (src[i + 1] == '"' || src[i + 1] == '\\')) {
                    t.text += src[i + 1];
                    advance(2);
                } else if (src[i] == '"') {
                    advance();
                    closed = true;
                    break;
                } else {
                    t.text += src[i];
                    advance();
                }
            }
            if (!closed) throw InputError(InputErrorKind::Syntax, t.line, t.column, "unterminated string");
            out.push_back(std::move(t));
        } else if (is_word_char(static_cast<unsigned char>(c))) {
            Token t{Token::Kind::Word, {}, line, col};
            while (i < src.size() && is_word_char(static_cast<unsigned char>(src[i]))) {
                t.text += src[i];
                advance();
            }
            out.push_back(std::move(t));
        } else if (src.substr(i, 2) == "<=" || src.substr(i, 2) == ":-") {
            out.push_back({Token::Kind::Punct, std::string(src.substr(i, 2)), line, col});
            advance(2);
        } else if (std::string_view("()[]{},/.").find(c) != std::string_view::npos) {
            out.push_back({Token::Kind::Punct, std::string(1, c), line, col});
            advance();
        } else {
            throw InputError(InputErrorKind::Syntax, line, col, std::string("unexpected character '") + c + "'");
        }
    }
    out.push_back({Token::Kind::End, {}, line, col});
    return out;
}

class Cursor {
public:
    explicit Cursor(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool at_end() const { return peek().kind == Token::Kind::End; }

    bool skip_newlines() {
        bool any = false;
        while (peek().kind == Token::Kind::Newline) {
            next();
            any = true;
        }
        return any;
    }

    bool accept_punct(std::string_view p) {
        if (peek().kind == Token::Kind::Punct && peek().text == p) {
            next();
            return true;
        }
        return false;
    }

    const Token& expect_punct(std::string_view p) {
        if (peek().kind != Token::Kind::Punct || peek().text != p) fail("expected '" + std::string(p) + "'");
        return next();
    }

    const Token& expect_word(const std::string& what) {
        if (peek().kind != Token::Kind::Word) fail("expected " + what);
        return next();
    }

    void expect_end_of_statement() {
        if (peek().kind != Token::Kind::Newline && peek().kind != Token::Kind::End)
            fail("unexpected '" + peek().text + "' after statement");
    }

    std::size_t expect_position() {
        const Token& t = peek();
        if (t.kind != Token::Kind::Word || !std::all_of(t.text.begin(), t.text.end(), ::isdigit))
            fail("expected a positive integer");
        std::size_t v = 0;
        for (char c : t.text) {
            v = v * 10 + static_cast<std::size_t>(c - '0');
            if (v > 1'000'000) fail("integer too large");
        }
        if (v == 0) fail("positions and arities start at 1");
        next();
        return v;
    }

    [[noreturn]] void fail(const std::string& msg, InputErrorKind kind = InputErrorKind::Syntax) const {
        fail_at(peek(), msg, kind);
    }

    [[noreturn]] static void fail_at(const Token& t, const std::string& msg,
                                     InputErrorKind kind = InputErrorKind::Syntax) {
        throw InputError(kind, t.line, t.column, msg);
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

const Token& expect_predicate_name(Cursor& cur) {
    const Token& t = cur.expect_word("a predicate name");
    if (std::isdigit(static_cast<unsigned char>(t.text[0])) || t.text[0] == '\'')
        Cursor::fail_at(t, "predicate names must start with a letter or '_'");
    return t;
}

std::size_t known_arity(const Schema& schema, const Token& name) {
    auto a = schema.arity(name.text);
    if (!a) Cursor::fail_at(name, "unknown predicate " + name.text, InputErrorKind::UnknownPredicate);
    return *a;
}

std::vector<std::size_t> position_list(Cursor& cur, std::string_view open, std::string_view close) {
    std::vector<std::size_t> out;
    cur.expect_punct(open);
    out.push_back(cur.expect_position());
    while (cur.accept_punct(",")) out.push_back(cur.expect_position());
    cur.expect_punct(close);
    return out;
}

Constant constant_from(const Token& t) {
    if (t.kind != Token::Kind::Word && t.kind != Token::Kind::Quoted) Cursor::fail_at(t, "expected a constant");
    if (is_reserved_constant_name(t.text))
        Cursor::fail_at(t, "'" + t.text + "' is reserved for engine-generated constants",
                        InputErrorKind::ReservedConstant);
    return Constant::domain(t.text);
}

bool is_variable_token(const Token& t) {
    return t.kind == Token::Kind::Word && std::isupper(static_cast<unsigned char>(t.text[0]));
}

}  // namespace

std::string_view to_string(InputErrorKind k) noexcept {
    switch (k) {
        case InputErrorKind::Syntax: return "syntax";
        case InputErrorKind::UnknownPredicate: return "unknown_predicate";
        case InputErrorKind::ArityMismatch: return "arity_mismatch";
        case InputErrorKind::DuplicatePredicate: return "duplicate_predicate";
        case InputErrorKind::DuplicateKey: return "duplicate_key";
        case InputErrorKind::ReservedConstant: return "reserved_constant";
        case InputErrorKind::InvalidDependency: return "invalid_dependency";
        case InputErrorKind::InvalidQuery: return "invalid_query";
        case InputErrorKind::Io: return "io";
    }
    return "unknown";
}

InputError::InputError(InputErrorKind kind, std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      kind_(kind),
      line_(line),
      column_(column),
      message_(message) {}

Schema parse_schema(std::string_view text) {
    Cursor cur(tokenize(text));
    Schema schema;
    while (cur.skip_newlines(), !cur.at_end()) {
        const Token& kw = cur.expect_word("'predicate'");
        if (kw.text != "predicate") Cursor::fail_at(kw, "expected 'predicate', got '" + kw.text + "'");
        const Token& name = expect_predicate_name(cur);
        cur.expect_punct("/");
        const std::size_t arity = cur.expect_position();
        if (schema.contains(name.text))
            Cursor::fail_at(name, "duplicate predicate " + name.text, InputErrorKind::DuplicatePredicate);
        schema.add(Predicate{name.text, arity});
        cur.expect_end_of_statement();
    }
    return schema;
}

DependencySet parse_dependencies(std::string_view text, const Schema& schema) {
    Cursor cur(tokenize(text));
    DependencySet deps;
    while (cur.skip_newlines(), !cur.at_end()) {
        const Token& kw = cur.expect_word("'key' or 'inclusion'");
        if (kw.text == "key") {
            const Token& name = expect_predicate_name(cur);
            known_arity(schema, name);
            KeyDependency kd{name.text, position_list(cur, "{", "}")};
            try {
                check_well_formed(kd, schema);
            } catch (const ModelError& e) {
                Cursor::fail_at(kw, e.what(), InputErrorKind::InvalidDependency);
            }
            if (deps.key_of(kd.pred))
                Cursor::fail_at(kw, "second key for predicate " + kd.pred, InputErrorKind::DuplicateKey);
            deps.add(std::move(kd));
        } else if (kw.text == "inclusion") {
            const Token& lhs = expect_predicate_name(cur);
            known_arity(schema, lhs);
            auto lhs_attrs = position_list(cur, "[", "]");
            cur.expect_punct("<=");
            const Token& rhs = expect_predicate_name(cur);
            known_arity(schema, rhs);
            auto rhs_attrs = position_list(cur, "[", "]");
            InclusionDependency id{lhs.text, std::move(lhs_attrs), rhs.text, std::move(rhs_attrs)};
            try {
                check_well_formed(id, schema);
            } catch (const ModelError& e) {
                Cursor::fail_at(kw, e.what(), InputErrorKind::InvalidDependency);
            }
            deps.add(std::move(id));
        } else {
            Cursor::fail_at(kw, "expected 'key' or 'inclusion', got '" + kw.text + "'");
        }
        cur.expect_end_of_statement();
    }
    return deps;
}

Database parse_instance(std::string_view text, const Schema& schema) {
    Cursor cur(tokenize(text));
    Database db;
    while (cur.skip_newlines(), !cur.at_end()) {
        const Token& name = expect_predicate_name(cur);
        const std::size_t arity = known_arity(schema, name);
        cur.expect_punct("(");
        Tuple args;
        do {
            args.push_back(constant_from(cur.next()));
        } while (cur.accept_punct(","));
        cur.expect_punct(")");
        cur.accept_punct(".");
        if (args.size() != arity)
            Cursor::fail_at(name,
                            name.text + " expects " + std::to_string(arity) + " arguments, got " +
                                std::to_string(args.size()),
                            InputErrorKind::ArityMismatch);
        db.insert(schema, name.text, std::move(args));
        cur.expect_end_of_statement();
    }
    return db;
}

ConjunctiveQuery parse_query(std::string_view text, const Schema& schema) {
    auto toks = tokenize(text);
    std::erase_if(toks, [](const Token& t) { return t.kind == Token::Kind::Newline; });
    Cursor cur(std::move(toks));

    ConjunctiveQuery q;
    const Token& head = expect_predicate_name(cur);
    q.name = head.text;
    cur.expect_punct("(");
    if (!cur.accept_punct(")")) {
        do {
            const Token& v = cur.next();
            if (!is_variable_token(v))
                Cursor::fail_at(v, "head arguments must be variables", InputErrorKind::InvalidQuery);
            q.head.push_back(v.text);
        } while (cur.accept_punct(","));
        cur.expect_punct(")");
    }
    cur.expect_punct(":-");
    do {
        const Token& name = expect_predicate_name(cur);
        const std::size_t arity = known_arity(schema, name);
        Atom atom{name.text, {}};
        cur.expect_punct("(");
        do {
            const Token& t = cur.next();
            if (is_variable_token(t))
                atom.terms.emplace_back(Variable{t.text});
            else
                atom.terms.emplace_back(constant_from(t));
        } while (cur.accept_punct(","));
        cur.expect_punct(")");
        if (atom.terms.size() != arity)
            Cursor::fail_at(name,
                            name.text + " expects " + std::to_string(arity) + " arguments, got " +
                                std::to_string(atom.terms.size()),
                            InputErrorKind::ArityMismatch);
        q.body.push_back(std::move(atom));
    } while (cur.accept_punct(","));
    cur.accept_punct(".");
    if (!cur.at_end()) cur.fail("unexpected '" + cur.peek().text + "' after query");

    try {
        check_well_formed(q, schema);
    } catch (const ModelError& e) {
        Cursor::fail_at(head, e.what(), InputErrorKind::InvalidQuery);
    }
    return q;
}

std::string serialize(const Schema& schema) {
    std::string out;
    for (const auto& p : schema.predicates()) out += "predicate " + p.name + "/" + std::to_string(p.arity) + "\n";
    return out;
}

std::string serialize(const DependencySet& deps) {
    std::vector<std::pair<std::string, std::string>> lines;
    for (const auto& id : deps.ids()) lines.emplace_back(dependency_sort_key(id), to_string(id));
    for (const auto& kd : deps.kds()) lines.emplace_back(dependency_sort_key(kd), to_string(kd));
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const auto& [_, l] : lines) out += l + "\n";
    return out;
}

std::string serialize(const Database& db) {
    std::string out;
    for (const auto& f : db.facts()) {
        out += f.predicate + "(";
        for (std::size_t i = 0; i < f.args.size(); ++i) out += (i ? "," : "") + constant_literal(f.args[i]);
        out += ")\n";
    }
    return out;
}

std::string constant_literal(const Constant& c) {
    if (c.is_fresh()) return c.to_string();
    const auto& n = c.name();
    const bool bare = !n.empty() && !std::isupper(static_cast<unsigned char>(n[0])) && n[0] != '\'' &&
                      std::all_of(n.begin(), n.end(), [](unsigned char ch) { return is_word_char(ch); }) &&
                      !is_reserved_constant_name(n);
    if (bare) return n;
    std::string out = "\"";
    for (char ch : n) {
        if (ch == '"' || ch == '\\') out += '\\';
        out += ch;
    }
    return out + "\"";
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(InputErrorKind::Io, 0, 0, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace cdchase
