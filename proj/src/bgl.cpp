#include <cctype>
#include <charconv>
#include <fmt/format.h>
#include <map>

#include "beliefgraph/format.hpp"

namespace beliefgraph {

std::string format_double(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

namespace {

enum class Tok {
    Ident,
    String,
    Number,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Colon,
    Comma,
    Equals,
    ArrowSupport,  // ->
    ArrowQualify,  // ~>
    ArrowContra,   // -|
    End,
};

struct Token {
    Tok type = Tok::End;
    std::string text;   // ident name or decoded string payload
    double number = 0;
    int line = 1;
    int column = 1;
};

[[noreturn]] void syntax_error(int line, int column, std::string message) {
    Error err(Errc::SyntaxError, fmt::format("line {}, col {}: {}", line, column, message));
    err.line = line;
    err.column = column;
    throw err;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)); }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next() {
        skip_blank();
        Token tok;
        tok.line = line_;
        tok.column = column_;
        if (pos_ >= text_.size()) {
            tok.type = Tok::End;
            return tok;
        }
        char c = text_[pos_];
        if (ident_start(c)) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && ident_char(text_[pos_]))
                advance();
            tok.type = Tok::Ident;
            tok.text = std::string(text_.substr(start, pos_ - start));
            return tok;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' ||
            ((c == '+' || c == '-') && pos_ + 1 < text_.size() &&
             (std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])) || text_[pos_ + 1] == '.'))) {
            return lex_number(tok);
        }
        switch (c) {
        case '"': return lex_string(tok);
        case '{': advance(); tok.type = Tok::LBrace; return tok;
        case '}': advance(); tok.type = Tok::RBrace; return tok;
        case '[': advance(); tok.type = Tok::LBracket; return tok;
        case ']': advance(); tok.type = Tok::RBracket; return tok;
        case ':': advance(); tok.type = Tok::Colon; return tok;
        case ',': advance(); tok.type = Tok::Comma; return tok;
        case '=': advance(); tok.type = Tok::Equals; return tok;
        case '-':
            advance();
            if (pos_ < text_.size() && text_[pos_] == '>') {
                advance();
                tok.type = Tok::ArrowSupport;
                return tok;
            }
            if (pos_ < text_.size() && text_[pos_] == '|') {
                advance();
                tok.type = Tok::ArrowContra;
                return tok;
            }
            syntax_error(tok.line, tok.column, "expected '->' or '-|'");
        case '~':
            advance();
            if (pos_ < text_.size() && text_[pos_] == '>') {
                advance();
                tok.type = Tok::ArrowQualify;
                return tok;
            }
            syntax_error(tok.line, tok.column, "expected '~>'");
        default:
            syntax_error(tok.line, tok.column, fmt::format("unexpected character '{}'", c));
        }
    }

private:
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void skip_blank() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n')
                    advance();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else {
                break;
            }
        }
    }

    Token lex_number(Token tok) {
        std::size_t start = pos_;
        if (text_[pos_] == '+' || text_[pos_] == '-')
            advance();
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
                text_[pos_] == 'e' || text_[pos_] == 'E' ||
                ((text_[pos_] == '+' || text_[pos_] == '-') &&
                 (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E'))))
            advance();
        std::string_view lexeme = text_.substr(start, pos_ - start);
        double value = 0;
        auto [ptr, ec] = std::from_chars(lexeme.data(), lexeme.data() + lexeme.size(), value);
        if (ec != std::errc{} || ptr != lexeme.data() + lexeme.size())
            syntax_error(tok.line, tok.column, fmt::format("malformed number '{}'", lexeme));
        tok.type = Tok::Number;
        tok.number = value;
        return tok;
    }

    Token lex_string(Token tok) {
        advance(); // opening quote
        std::string out;
        while (true) {
            if (pos_ >= text_.size() || text_[pos_] == '\n')
                syntax_error(tok.line, tok.column, "unterminated string");
            char c = text_[pos_];
            if (c == '"') {
                advance();
                break;
            }
            if (c == '\\') {
                advance();
                if (pos_ >= text_.size())
                    syntax_error(tok.line, tok.column, "unterminated string");
                char esc = text_[pos_];
                switch (esc) {
                case '"': out.push_back('"'); break;
                case '\\': out.push_back('\\'); break;
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                case 'r': out.push_back('\r'); break;
                default:
                    syntax_error(line_, column_, fmt::format("unknown escape '\\{}'", esc));
                }
                advance();
            } else {
                out.push_back(c);
                advance();
            }
        }
        tok.type = Tok::String;
        tok.text = std::move(out);
        return tok;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
};

struct SourcePos {
    int line = 0;
    int column = 0;
};

class Parser {
public:
    explicit Parser(std::string_view text) : lexer_(text) {
        current_ = lexer_.next();
        lookahead_ = lexer_.next();
    }

    ParseReport parse() {
        while (current_.type != Tok::End) {
            if (current_.type != Tok::Ident)
                syntax_error(current_.line, current_.column,
                             "expected a belief declaration or an edge");
            if (current_.text == "belief" && lookahead_.type == Tok::Ident)
                parse_node();
            else
                parse_edge();
        }
        return finish();
    }

private:
    void bump() {
        current_ = std::move(lookahead_);
        lookahead_ = lexer_.next();
    }

    Token expect(Tok type, std::string_view what) {
        if (current_.type != type)
            syntax_error(current_.line, current_.column, fmt::format("expected {}", what));
        Token tok = std::move(current_);
        bump();
        return tok;
    }

    Token expect_keyword(std::string_view word) {
        if (current_.type != Tok::Ident || current_.text != word)
            syntax_error(current_.line, current_.column, fmt::format("expected '{}'", word));
        Token tok = std::move(current_);
        bump();
        return tok;
    }

    void warn(const Token& at, std::string message) {
        warnings_.push_back({at.line, at.column, std::move(message)});
    }

    void parse_node() {
        bump(); // 'belief'
        Token name = expect(Tok::Ident, "a belief name");
        expect(Tok::LBrace, "'{'");
        expect_keyword("text");
        expect(Tok::Colon, "':'");
        Token text = expect(Tok::String, "a quoted string");

        BeliefNode node;
        node.id = NodeId{name.text};
        node.content = std::move(text.text);
        bool seen_cred = false, seen_conf = false;
        while (current_.type == Tok::Comma) {
            bump();
            if (current_.type == Tok::Ident && current_.text == "cred" && !seen_cred && !seen_conf) {
                bump();
                expect(Tok::Colon, "':'");
                node.cred = expect(Tok::Number, "a number").number;
                seen_cred = true;
            } else if (current_.type == Tok::Ident && current_.text == "conf" && !seen_conf) {
                bump();
                expect(Tok::Colon, "':'");
                node.conf = expect(Tok::Number, "a number").number;
                seen_conf = true;
            } else {
                syntax_error(current_.line, current_.column, "expected 'cred' or 'conf'");
            }
        }
        expect(Tok::RBrace, "'}'");

        if (!seen_cred)
            warn(name, fmt::format("belief '{}': cred defaulted to 0.5", node.id.value));
        if (!seen_conf)
            warn(name, fmt::format("belief '{}': conf defaulted to 0.5", node.id.value));
        node_pos_.push_back({name.line, name.column});
        nodes_.push_back(std::move(node));
    }

    void parse_edge() {
        Token src = expect(Tok::Ident, "a belief name");
        EdgeKind kind;
        switch (current_.type) {
        case Tok::ArrowSupport: kind = EdgeKind::Support; break;
        case Tok::ArrowQualify: kind = EdgeKind::Qualification; break;
        case Tok::ArrowContra: kind = EdgeKind::Contradiction; break;
        default:
            syntax_error(current_.line, current_.column, "expected '->', '~>' or '-|'");
        }
        bump();
        Token dst = expect(Tok::Ident, "a belief name");

        Edge edge;
        edge.source = NodeId{src.text};
        edge.target = NodeId{dst.text};
        edge.kind = kind;
        if (current_.type == Tok::LBracket) {
            bump();
            expect_keyword("w");
            expect(Tok::Equals, "'='");
            edge.weight = expect(Tok::Number, "a number").number;
            expect(Tok::RBracket, "']'");
        } else {
            warn(src, fmt::format("edge '{}' -> '{}': weight defaulted to 1.0",
                                  edge.source.value, edge.target.value));
        }
        edge_pos_.push_back({src.line, src.column});
        edges_.push_back(std::move(edge));
    }

    ParseReport finish() {
        try {
            ParseReport report;
            report.system = BeliefSystem::build(std::move(nodes_), std::move(edges_));
            report.warnings = std::move(warnings_);
            return report;
        } catch (Error& err) {
            // Attach the position of the offending declaration.
            SourcePos pos;
            if (err.node_index && *err.node_index < node_pos_.size())
                pos = node_pos_[*err.node_index];
            else if (err.edge_index && *err.edge_index < edge_pos_.size())
                pos = edge_pos_[*err.edge_index];
            Error out(err.code(), fmt::format("line {}, col {}: {}", pos.line, pos.column, err.what()));
            out.line = pos.line;
            out.column = pos.column;
            out.node_index = err.node_index;
            out.edge_index = err.edge_index;
            throw out;
        }
    }

    Lexer lexer_;
    Token current_;
    Token lookahead_;
    std::vector<BeliefNode> nodes_;
    std::vector<Edge> edges_;
    std::vector<SourcePos> node_pos_;
    std::vector<SourcePos> edge_pos_;
    std::vector<ParseWarning> warnings_;
};

bool is_bgl_ident(std::string_view s) {
    if (s.empty() || !ident_start(s.front()))
        return false;
    for (char c : s)
        if (!ident_char(c))
            return false;
    return true;
}

void append_escaped(std::string& out, std::string_view text) {
    for (char c : text) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default: out.push_back(c);
        }
    }
}

} // namespace

ParseReport parse_bgl(std::string_view text) {
    return Parser(text).parse();
}

std::string render_bgl(const BeliefSystem& sys) {
    std::string out;
    for (const BeliefNode& n : sys.nodes()) {
        if (!is_bgl_ident(n.id.value))
            throw Error(Errc::InvalidParameter,
                        fmt::format("node id '{}' is not representable in BGL", n.id.value));
        out += "belief ";
        out += n.id.value;
        out += " { text: \"";
        append_escaped(out, n.content);
        out += "\", cred: ";
        out += format_double(n.cred);
        out += ", conf: ";
        out += format_double(n.conf);
        out += " }\n";
    }
    if (!sys.nodes().empty() && !sys.edges().empty())
        out += "\n";
    for (const Edge& e : sys.edges()) {
        out += e.source.value;
        switch (e.kind) {
        case EdgeKind::Support: out += " -> "; break;
        case EdgeKind::Qualification: out += " ~> "; break;
        case EdgeKind::Contradiction: out += " -| "; break;
        }
        out += e.target.value;
        out += " [w=";
        out += format_double(e.weight);
        out += "]\n";
    }
    return out;
}

} // namespace beliefgraph
