#include "catamerge/parser.hpp"

#include <algorithm>
#include <set>
#include <variant>

#include "catamerge/validate.hpp"
#include "lexer.hpp"

namespace catamerge {

namespace {

using detail::Tok;
using detail::Token;

constexpr int kMaxDepth = 256;

struct SyntaxError
{
    std::string message;
    SourceSpan span;
    std::optional<std::string> hint;
};

struct Name
{
    std::string text;
    SourceSpan span;
};

SourceSpan join(SourceSpan a, SourceSpan b)
{
    if (b.offset + b.length < a.offset) return a;
    return {a.offset, b.offset + b.length - a.offset};
}

struct SchemaAst
{
    Name name;
    std::vector<Name> entities;
    std::vector<ForeignKey> foreign_keys;
    std::vector<Attribute> attributes;
    std::vector<Constraint> constraints;
};

struct FieldAst
{
    enum class Kind { Ref, String, Int, Double, Bool, Null };
    Name member;
    Kind kind = Kind::Null;
    std::string text; // ref id, string body, or null tag
    std::int64_t int_value = 0;
    double double_value = 0;
    SourceSpan span;
};

struct RowAst
{
    Name id;
    std::vector<FieldAst> fields;
};

struct EntityBlockAst
{
    Name entity;
    std::vector<RowAst> rows;
};

struct InstanceAst
{
    Name name;
    Name target;
    std::vector<EntityBlockAst> blocks;
};

struct ExtensionAst
{
    Name name;
    std::vector<Name> includes;
    std::vector<Identification> identifications;
    std::vector<Constraint> constraints;
};

struct QueryAst
{
    Name name;
    Name target;
    QuerySpec spec;
};

using BlockAst = std::variant<SchemaAst, InstanceAst, ExtensionAst, QueryAst>;

bool is_top_level_keyword(std::string_view s)
{
    return s == "schema" || s == "instance" || s == "extension" || s == "query";
}

bool is_schema_section(std::string_view s)
{
    return s == "entities" || s == "foreign_keys" || s == "attributes" || s == "constraints";
}

bool is_reserved(std::string_view s)
{
    return s == "forall" || s == "exists" || s == "where" || s == "and" || s == "attributes";
}

class Parser
{
  public:
    explicit Parser(const std::string &text) : toks_(detail::tokenize(text)) { }

    std::vector<SyntaxError> errors;

    std::vector<BlockAst> parse_file()
    {
        std::vector<BlockAst> blocks;
        while (peek().kind != Tok::End) {
            std::size_t start = pos_;
            try {
                if (is_kw("schema"))
                    blocks.emplace_back(parse_schema_block());
                else if (is_kw("instance"))
                    blocks.emplace_back(parse_instance_block());
                else if (is_kw("extension"))
                    blocks.emplace_back(parse_extension_block());
                else if (is_kw("query"))
                    blocks.emplace_back(parse_query_block());
                else
                    fail(peek(), "expected 'schema', 'instance', 'extension' or 'query'");
            } catch (SyntaxError &e) {
                errors.push_back(std::move(e));
                recover(start);
            }
        }
        return blocks;
    }

    Constraint parse_lone_constraint()
    {
        Constraint c = parse_constraint();
        if (peek().kind != Tok::End) fail(peek(), "expected end of constraint");
        return c;
    }

  private:
    const Token &peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }

    const Token &advance()
    {
        const Token &t = peek();
        last_ = t.span;
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }

    bool is_kw(std::string_view kw, std::size_t k = 0) const
    {
        return peek(k).kind == Tok::Ident && peek(k).text == kw;
    }

    [[noreturn]] void fail(const Token &t, const std::string &message, std::optional<std::string> hint = std::nullopt)
    {
        if (t.kind == Tok::Invalid) throw SyntaxError{t.text, t.span, std::nullopt};
        throw SyntaxError{message + ", found " + detail::describe(t), t.span, std::move(hint)};
    }

    const Token &expect(Tok kind, const std::string &what)
    {
        if (peek().kind != kind) fail(peek(), "expected " + what);
        return advance();
    }

    Name expect_ident(const std::string &what)
    {
        if (peek().kind != Tok::Ident) fail(peek(), "expected " + what);
        const Token &t = advance();
        return {t.text, t.span};
    }

    void expect_kw(std::string_view kw)
    {
        if (!is_kw(kw)) fail(peek(), "expected '" + std::string(kw) + "'");
        advance();
    }

    bool accept(Tok kind)
    {
        if (peek().kind != kind) return false;
        advance();
        return true;
    }

    void recover(std::size_t start)
    {
        if (pos_ == start) advance();
        int depth = 0;
        for (std::size_t i = start; i < pos_; ++i) {
            if (toks_[i].kind == Tok::LBrace) ++depth;
            if (toks_[i].kind == Tok::RBrace) --depth;
        }
        while (peek().kind != Tok::End) {
            if (depth <= 0 && peek().kind == Tok::Ident && is_top_level_keyword(peek().text)) return;
            Tok k = advance().kind;
            if (k == Tok::LBrace) ++depth;
            if (k == Tok::RBrace && --depth == 0) return;
        }
    }

    // --- shared pieces -------------------------------------------------------

    /// `a b : E` groups, optionally separated by commas.
    bool group_follows(std::size_t k) const
    {
        std::size_t n = 0;
        while (peek(k + n).kind == Tok::Ident && !is_reserved(peek(k + n).text))
            ++n;
        return n > 0 && peek(k + n).kind == Tok::Colon;
    }

    bool label_follows() const
    {
        std::size_t k = 0;
        if (peek(k).kind != Tok::Ident || peek(k).text == "forall") return false;
        ++k;
        while (peek(k).kind == Tok::Dot && peek(k + 1).kind == Tok::Ident)
            k += 2;
        return peek(k).kind == Tok::Colon;
    }

    std::vector<VariableDecl> parse_groups()
    {
        std::vector<VariableDecl> out;
        if (!group_follows(0)) fail(peek(), "expected a variable declaration 'x : Entity'");
        do {
            std::vector<Name> names;
            while (peek().kind == Tok::Ident && !is_reserved(peek().text))
                names.push_back(expect_ident("variable name"));
            expect(Tok::Colon, "':'");
            Name entity = expect_ident("entity name");
            for (auto &n : names)
                out.push_back({n.text, entity.text, n.span});
            if (peek().kind == Tok::Comma && group_follows(1)) advance();
        } while (group_follows(0));
        return out;
    }

    Constraint parse_constraint()
    {
        Constraint c;
        SourceSpan start = peek().span;
        if (!is_kw("forall")) {
            if (!label_follows()) fail(peek(), "expected a constraint ('forall' or a label)");
            c.label = expect_ident("constraint label").text;
            while (accept(Tok::Dot))
                c.label += "." + expect_ident("constraint label").text;
            expect(Tok::Colon, "':' after constraint label");
        }
        expect_kw("forall");
        c.universals = parse_groups();
        if (is_kw("where")) {
            advance();
            do
                c.premise.push_back(parse_atom());
            while (accept(Tok::Comma) || accept_kw("and"));
        }
        expect(Tok::Arrow, "'->'");
        if (is_kw("exists")) {
            advance();
            c.existentials = parse_groups();
            accept(Tok::Comma);
        }
        c.conclusion.push_back(parse_equation());
        while (true) {
            if (accept_kw("and")) {
            } else if (peek().kind == Tok::Comma && !(is_kw("forall", 1) || label_follows_at(1))) {
                advance();
            } else {
                break;
            }
            c.conclusion.push_back(parse_equation());
        }
        c.span = join(start, last_);
        return c;
    }

    bool label_follows_at(std::size_t k)
    {
        std::size_t saved = pos_;
        pos_ = std::min(pos_ + k, toks_.size() - 1);
        bool r = label_follows();
        pos_ = saved;
        return r;
    }

    bool accept_kw(std::string_view kw)
    {
        if (!is_kw(kw)) return false;
        advance();
        return true;
    }

    Atom parse_atom()
    {
        Atom a;
        a.lhs = parse_term();
        Comparison op;
        switch (peek().kind) {
        case Tok::Eq: op = Comparison::Eq; break;
        case Tok::Lt: op = Comparison::Lt; break;
        case Tok::Gt: op = Comparison::Gt; break;
        case Tok::Le: op = Comparison::Le; break;
        case Tok::Ge: op = Comparison::Ge; break;
        default: fail(peek(), "expected a comparison ('=', '<', '>', '<=', '>=')");
        }
        advance();
        a.op = op;
        a.rhs = parse_term();
        a.span = join(a.lhs.span, a.rhs.span);
        return a;
    }

    Equation parse_equation()
    {
        Equation e;
        e.lhs = parse_term();
        switch (peek().kind) {
        case Tok::Eq: break;
        case Tok::Lt:
        case Tok::Gt:
        case Tok::Le:
        case Tok::Ge: fail(peek(), "predicates are not allowed in a conclusion", "move the comparison into the premise");
        default: fail(peek(), "expected '='");
        }
        advance();
        e.rhs = parse_term();
        e.span = join(e.lhs.span, e.rhs.span);
        return e;
    }

    struct DepthGuard
    {
        Parser &p;
        explicit DepthGuard(Parser &parser) : p(parser)
        {
            if (++p.depth_ > kMaxDepth) {
                --p.depth_;
                p.fail(p.peek(), "term nesting is too deep");
            }
        }
        ~DepthGuard() { --p.depth_; }
    };

    Term parse_term()
    {
        DepthGuard guard(*this);
        Term lhs = parse_product();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            std::string op = advance().kind == Tok::Plus ? "+" : "-";
            Term rhs = parse_product();
            SourceSpan span = join(lhs.span, rhs.span);
            lhs = Term::apply(op, {std::move(lhs), std::move(rhs)}, span);
        }
        return lhs;
    }

    Term parse_product()
    {
        Term lhs = parse_unary();
        while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
            std::string op = advance().kind == Tok::Star ? "*" : "/";
            Term rhs = parse_unary();
            SourceSpan span = join(lhs.span, rhs.span);
            lhs = Term::apply(op, {std::move(lhs), std::move(rhs)}, span);
        }
        return lhs;
    }

    Term parse_unary()
    {
        if (peek().kind != Tok::Minus) return parse_primary();
        SourceSpan start = advance().span;
        const Token &t = peek();
        if (t.kind == Tok::Int) {
            advance();
            return Term::literal(Value::integer(-t.int_value), join(start, t.span));
        }
        if (t.kind == Tok::Double) {
            advance();
            return Term::literal(Value::real(-t.double_value), join(start, t.span));
        }
        fail(t, "unary minus applies only to numeric literals");
    }

    Term parse_primary()
    {
        const Token &t = peek();
        switch (t.kind) {
        case Tok::String: advance(); return Term::literal(Value::string(t.text), t.span);
        case Tok::Int: advance(); return Term::literal(Value::integer(t.int_value), t.span);
        case Tok::Double: advance(); return Term::literal(Value::real(t.double_value), t.span);
        case Tok::LParen: {
            advance();
            Term inner = parse_term();
            expect(Tok::RParen, "')'");
            return inner;
        }
        case Tok::Ident: break;
        default: fail(t, "expected a term");
        }
        if (t.text == "true" || t.text == "false") {
            advance();
            return Term::literal(Value::boolean(t.text == "true"), t.span);
        }
        if (is_reserved(t.text)) fail(t, "expected a term");
        Name head = expect_ident("a term");
        if (accept(Tok::LParen)) {
            std::vector<Term> args;
            if (peek().kind != Tok::RParen) {
                do
                    args.push_back(parse_term());
                while (accept(Tok::Comma));
            }
            expect(Tok::RParen, "')'");
            return Term::apply(head.text, std::move(args), join(head.span, last_));
        }
        std::vector<std::string> steps;
        while (accept(Tok::Dot))
            steps.push_back(expect_ident("a foreign key or attribute name").text);
        return Term::path(head.text, std::move(steps), join(head.span, last_));
    }

    // --- blocks --------------------------------------------------------------

    SchemaAst parse_schema_block()
    {
        SchemaAst a;
        expect_kw("schema");
        a.name = expect_ident("schema name");
        expect(Tok::LBrace, "'{'");
        auto member_follows = [&] { return peek().kind == Tok::Ident && !is_schema_section(peek().text); };
        while (!accept(Tok::RBrace)) {
            if (accept_kw("entities")) {
                while (member_follows() || peek().kind == Tok::Comma)
                    if (!accept(Tok::Comma)) a.entities.push_back(expect_ident("entity name"));
            } else if (accept_kw("foreign_keys")) {
                while (member_follows()) {
                    ForeignKey fk;
                    Name n = expect_ident("foreign key name");
                    expect(Tok::Colon, "':'");
                    Name src = expect_ident("source entity");
                    expect(Tok::Arrow, "'->'");
                    Name tgt = expect_ident("target entity");
                    a.foreign_keys.push_back({n.text, src.text, tgt.text, n.span, src.span, tgt.span});
                    accept(Tok::Comma);
                }
            } else if (accept_kw("attributes")) {
                while (member_follows()) {
                    Name n = expect_ident("attribute name");
                    expect(Tok::Colon, "':'");
                    Name src = expect_ident("source entity");
                    expect(Tok::Arrow, "'->'");
                    Name type = expect_ident("base type");
                    if (auto t = base_type_from_name(type.text))
                        a.attributes.push_back({n.text, src.text, *t, n.span, src.span});
                    else
                        errors.push_back({"unknown base type '" + type.text + "'", type.span,
                                          "base types are String, Int, Double and Bool"});
                    accept(Tok::Comma);
                }
            } else if (accept_kw("constraints")) {
                while (peek().kind != Tok::RBrace && !(peek().kind == Tok::Ident && is_schema_section(peek().text)))
                    a.constraints.push_back(parse_constraint());
            } else {
                fail(peek(), "expected 'entities', 'foreign_keys', 'attributes', 'constraints' or '}'");
            }
        }
        return a;
    }

    Name parse_row_id()
    {
        if (peek().kind == Tok::String) {
            const Token &t = advance();
            return {t.text, t.span};
        }
        Name id = expect_ident("row id");
        while (peek().kind == Tok::Dot && peek(1).kind == Tok::Ident) {
            advance();
            Name part = expect_ident("row id");
            id.text += "." + part.text;
            id.span = join(id.span, part.span);
        }
        return id;
    }

    FieldAst parse_field()
    {
        FieldAst f;
        f.member = expect_ident("member name");
        expect(Tok::Eq, "'='");
        const Token &t = peek();
        f.span = t.span;
        switch (t.kind) {
        case Tok::String:
            advance();
            f.kind = FieldAst::Kind::String;
            f.text = t.text;
            return f;
        case Tok::Int:
            advance();
            f.kind = FieldAst::Kind::Int;
            f.int_value = t.int_value;
            return f;
        case Tok::Double:
            advance();
            f.kind = FieldAst::Kind::Double;
            f.double_value = t.double_value;
            return f;
        case Tok::Minus: {
            advance();
            const Token &n = peek();
            if (n.kind == Tok::Int) {
                f.kind = FieldAst::Kind::Int;
                f.int_value = -n.int_value;
            } else if (n.kind == Tok::Double) {
                f.kind = FieldAst::Kind::Double;
                f.double_value = -n.double_value;
            } else {
                fail(n, "expected a number after '-'");
            }
            advance();
            f.span = join(t.span, n.span);
            return f;
        }
        case Tok::Ident: break;
        default: fail(t, "expected a value (literal, null or row id)");
        }
        if (t.text == "null") {
            advance();
            f.kind = FieldAst::Kind::Null;
            if (accept(Tok::Colon)) {
                Name tag = expect_ident("null tag");
                f.text = tag.text;
                f.span = join(f.span, tag.span);
            }
            return f;
        }
        Name id = parse_row_id();
        f.kind = (id.text == "true" || id.text == "false") ? FieldAst::Kind::Bool : FieldAst::Kind::Ref;
        f.text = id.text;
        f.span = id.span;
        return f;
    }

    InstanceAst parse_instance_block()
    {
        InstanceAst a;
        expect_kw("instance");
        a.name = expect_ident("instance name");
        expect(Tok::Colon, "':'");
        a.target = expect_ident("schema or extension name");
        expect(Tok::LBrace, "'{'");
        while (!accept(Tok::RBrace)) {
            if (!is_kw("entity")) fail(peek(), "expected 'entity' or '}'");
            advance();
            EntityBlockAst block;
            block.entity = expect_ident("entity name");
            expect(Tok::LBrace, "'{'");
            while (!accept(Tok::RBrace)) {
                if (!is_kw("row")) fail(peek(), "expected 'row' or '}'");
                advance();
                RowAst row;
                row.id = parse_row_id();
                expect(Tok::LBrace, "'{'");
                while (!accept(Tok::RBrace)) {
                    row.fields.push_back(parse_field());
                    accept(Tok::Comma);
                }
                block.rows.push_back(std::move(row));
            }
            a.blocks.push_back(std::move(block));
        }
        return a;
    }

    ExtensionAst parse_extension_block()
    {
        ExtensionAst a;
        expect_kw("extension");
        a.name = expect_ident("extension name");
        expect(Tok::LBrace, "'{'");
        auto item_keyword = [&] { return is_kw("include") || is_kw("identify") || is_kw("constraints"); };
        while (!accept(Tok::RBrace)) {
            if (accept_kw("include")) {
                if (peek().kind != Tok::Ident || item_keyword()) fail(peek(), "expected a schema name");
                while ((peek().kind == Tok::Ident && !item_keyword()) || peek().kind == Tok::Comma)
                    if (!accept(Tok::Comma)) a.includes.push_back(expect_ident("schema name"));
            } else if (accept_kw("identify")) {
                auto ref = [&] {
                    Name s = expect_ident("schema name");
                    expect(Tok::Dot, "'.'");
                    Name e = expect_ident("entity name");
                    return EntityRef{s.text, e.text, join(s.span, e.span)};
                };
                EntityRef left = ref();
                expect(Tok::Eq, "'='");
                EntityRef right = ref();
                a.identifications.push_back({left, right});
            } else if (accept_kw("constraints")) {
                while (peek().kind != Tok::RBrace && !item_keyword())
                    a.constraints.push_back(parse_constraint());
            } else {
                fail(peek(), "expected 'include', 'identify', 'constraints' or '}'");
            }
        }
        return a;
    }

    QueryAst parse_query_block()
    {
        QueryAst a;
        SourceSpan start = peek().span;
        expect_kw("query");
        a.name = expect_ident("query name");
        if (accept(Tok::Eq)) {
            Name kind = expect_ident("query kind");
            if (kind.text != "simple")
                throw SyntaxError{"unsupported query kind '" + kind.text + "'", kind.span, "only 'simple' is supported"};
        }
        expect(Tok::Colon, "':'");
        a.target = expect_ident("extension or schema name");
        expect(Tok::LBrace, "'{'");
        expect_kw("from");
        if (!group_follows(0)) fail(peek(), "a query needs at least one from-variable 'x : Entity'");
        a.spec.from = parse_groups();
        if (accept_kw("where")) {
            do
                a.spec.where.push_back(parse_atom());
            while (accept(Tok::Comma) || accept_kw("and"));
        }
        expect_kw("attributes");
        while (!accept(Tok::RBrace)) {
            Projection p;
            Name col;
            if (peek().kind == Tok::String) {
                const Token &t = advance();
                col = {t.text, t.span};
            } else {
                col = expect_ident("column name or '}'");
            }
            expect(Tok::Arrow, "'->'");
            p.column = col.text;
            p.term = parse_term();
            p.span = join(col.span, p.term.span);
            a.spec.attributes.push_back(std::move(p));
            accept(Tok::Comma);
        }
        a.spec.name = a.name.text;
        a.spec.target = a.target.text;
        a.spec.span = join(start, last_);
        return a;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    SourceSpan last_;
    int depth_ = 0;
};

// --- elaboration -------------------------------------------------------------

class Elaborator
{
  public:
    Elaborator(const SourceDocument &doc, std::vector<Diagnostic> &out) : doc_(doc), out_(out) { }

    void error(SourceSpan span, std::string message, std::optional<std::string> hint = std::nullopt)
    {
        out_.push_back(make_diagnostic(doc_, span, std::move(message), Severity::Error, std::move(hint)));
        ok_ = false;
    }

    void report(const ValidationReport &r, SourceSpan fallback)
    {
        for (const auto &v : r.violations)
            error(v.span == SourceSpan{} ? fallback : v.span, v.message);
    }

    bool ok() const { return ok_; }

    std::optional<Schema> schema(const SchemaAst &a)
    {
        std::vector<std::string> entities;
        std::set<std::string> seen;
        for (const auto &e : a.entities) {
            if (!seen.insert(e.text).second) {
                error(e.span, "entity '" + e.text + "' is declared more than once");
                continue;
            }
            entities.push_back(e.text);
        }
        Schema s(a.name.text, entities, a.foreign_keys, a.attributes, default_labels(a.constraints));
        report(validate_schema(s), a.name.span);
        if (!ok_) return std::nullopt;
        return s;
    }

    std::optional<Instance> instance(const InstanceAst &a, std::shared_ptr<const Schema> schema)
    {
        Instance inst(schema, a.name.text);
        std::vector<std::vector<ElementId>> ids(a.blocks.size());
        std::vector<std::size_t> entities(a.blocks.size(), npos);
        for (std::size_t b = 0; b < a.blocks.size(); ++b) {
            const auto &block = a.blocks[b];
            auto name = schema->resolve_entity(block.entity.text);
            if (!name) {
                error(block.entity.span, "schema '" + schema->name() + "' has no entity '" + block.entity.text + "'");
                continue;
            }
            entities[b] = schema->entity_index(*name);
            for (const auto &row : block.rows) {
                if (inst.find(row.id.text)) {
                    error(row.id.span, "row id '" + row.id.text + "' is already used in this instance");
                    ids[b].push_back(ElementId{});
                    continue;
                }
                ids[b].push_back(inst.add_element(entities[b], row.id.text));
            }
        }
        std::map<std::string, NullLabel> tagged;
        for (std::size_t b = 0; b < a.blocks.size(); ++b) {
            if (entities[b] == npos) continue;
            const std::string &ename = schema->entities()[entities[b]];
            for (std::size_t r = 0; r < a.blocks[b].rows.size(); ++r) {
                const auto &row = a.blocks[b].rows[r];
                if (inst.find(row.id.text) != ids[b][r]) continue; // duplicate row, already reported
                for (const auto &f : row.fields)
                    field(inst, ids[b][r], ename, f, tagged);
            }
        }
        if (!ok_) return std::nullopt;
        return inst;
    }

    std::optional<std::pair<ExtensionSpec, CombinedSchema>>
    extension(const ExtensionAst &a, const std::map<std::string, Schema, std::less<>> &schemas)
    {
        ExtensionSpec x;
        x.name = a.name.text;
        for (const auto &i : a.includes)
            x.includes.push_back(i.text);
        x.identifications = a.identifications;
        x.constraints = default_labels(a.constraints);
        auto report_ = validate_extension(x, schemas);
        for (const auto &v : report_.violations) {
            SourceSpan span = v.span;
            if (span == SourceSpan{})
                for (const auto &i : a.includes)
                    if (i.text == v.subject) span = i.span;
            error(span == SourceSpan{} ? a.name.span : span, v.message);
        }
        if (!ok_) return std::nullopt;
        try {
            CombinedSchema c = combine_schemas(x, schemas);
            for (const auto &bridge : x.constraints)
                for (const auto &err : typecheck(canonicalize_entities(bridge, *c.schema), *c.schema))
                    error(err.span == SourceSpan{} ? bridge.span : err.span,
                          "constraint '" + bridge.label + "': " + err.message);
            if (!ok_) return std::nullopt;
            return std::make_pair(std::move(x), std::move(c));
        } catch (const std::exception &e) {
            error(a.name.span, e.what());
            return std::nullopt;
        }
    }

    std::optional<QuerySpec> query(QuerySpec q, const Schema &schema)
    {
        for (auto &v : q.from)
            if (auto name = schema.resolve_entity(v.entity)) v.entity = *name;
        for (const auto &err : typecheck_query(q, schema))
            error(err.span == SourceSpan{} ? q.span : err.span, "query '" + q.name + "': " + err.message);
        if (!ok_) return std::nullopt;
        return q;
    }

  private:
    static std::vector<Constraint> default_labels(std::vector<Constraint> cs)
    {
        for (std::size_t k = 0; k < cs.size(); ++k)
            if (cs[k].label.empty()) cs[k].label = "C" + std::to_string(k + 1);
        return cs;
    }

    void field(Instance &inst, ElementId x, const std::string &entity, const FieldAst &f,
               std::map<std::string, NullLabel> &tagged)
    {
        const Schema &schema = inst.schema();
        auto m = schema.member(entity, f.member.text);
        if (!m) {
            error(f.member.span, "entity '" + entity + "' has no member '" + f.member.text + "'");
            return;
        }
        try {
            if (m->kind == Member::Kind::ForeignKey) {
                if (f.kind != FieldAst::Kind::Ref && f.kind != FieldAst::Kind::String && f.kind != FieldAst::Kind::Bool) {
                    error(f.span, "foreign key '" + f.member.text + "' expects a row id");
                    return;
                }
                auto target = inst.find(f.text);
                if (!target) {
                    error(f.span, "reference to undeclared row id '" + f.text + "'");
                    return;
                }
                inst.set_fk(x, f.member.text, *target);
                return;
            }
            const Attribute &attr = schema.attributes()[m->index];
            Value v;
            switch (f.kind) {
            case FieldAst::Kind::Null:
                if (!f.text.empty()) {
                    auto [it, fresh] = tagged.try_emplace(f.text, NullLabel{});
                    if (fresh) it->second = inst.fresh_null();
                    inst.set_attr(x, m->index, AttrValue(it->second));
                }
                return;
            case FieldAst::Kind::Ref:
                error(f.span, "attribute '" + f.member.text + "' expects a literal, found identifier '" + f.text + "'",
                      "string values are written in double quotes");
                return;
            case FieldAst::Kind::String: v = Value::string(f.text); break;
            case FieldAst::Kind::Int: v = Value::integer(f.int_value); break;
            case FieldAst::Kind::Double: v = Value::real(f.double_value); break;
            case FieldAst::Kind::Bool: v = Value::boolean(f.text == "true"); break;
            }
            Value coerced = v.coerced_to(attr.type);
            if (coerced.type() != attr.type) {
                error(f.span, "attribute '" + f.member.text + "' has type " + std::string(to_string(attr.type)) +
                                  ", got " + std::string(to_string(v.type())) + " " + render_literal(v));
                return;
            }
            inst.set_attr(x, m->index, AttrValue(coerced));
        } catch (const std::exception &e) {
            error(f.span, e.what());
        }
    }

    const SourceDocument &doc_;
    std::vector<Diagnostic> &out_;
    bool ok_ = true;
};

std::vector<BlockAst> parse_blocks(const SourceDocument &doc, std::vector<Diagnostic> &out)
{
    Parser p(doc.text());
    auto blocks = p.parse_file();
    for (auto &e : p.errors)
        out.push_back(make_diagnostic(doc, e.span, e.message, Severity::Error, e.hint));
    return blocks;
}

template <class Ast> const Ast *single_block(const SourceDocument &doc, const std::vector<BlockAst> &blocks,
                                             std::string_view kind, std::vector<Diagnostic> &out)
{
    const Ast *found = nullptr;
    std::size_t count = 0;
    for (const auto &b : blocks)
        if (auto *a = std::get_if<Ast>(&b)) {
            if (!found) found = a;
            ++count;
        }
    if (count == 1 && blocks.size() == 1) return found;
    if (!has_errors(out))
        out.push_back(make_diagnostic(doc, {}, "expected exactly one " + std::string(kind) + " block, found " +
                                                   std::to_string(blocks.size()) + " block(s)"));
    return nullptr;
}

} // namespace

ParseResult<Schema> parse_schema(const SourceDocument &doc)
{
    ParseResult<Schema> r;
    auto blocks = parse_blocks(doc, r.diagnostics);
    if (auto *a = single_block<SchemaAst>(doc, blocks, "schema", r.diagnostics); a && !has_errors(r.diagnostics))
        r.value = Elaborator(doc, r.diagnostics).schema(*a);
    return r;
}

ParseResult<Constraint> parse_constraint(const std::string &text, const Schema &schema)
{
    ParseResult<Constraint> r;
    SourceDocument doc("<constraint>", text);
    Parser p(text);
    try {
        Constraint c = canonicalize_entities(p.parse_lone_constraint(), schema);
        for (const auto &err : typecheck(c, schema))
            r.diagnostics.push_back(make_diagnostic(doc, err.span, err.message));
        if (!has_errors(r.diagnostics)) r.value = std::move(c);
    } catch (const SyntaxError &e) {
        r.diagnostics.push_back(make_diagnostic(doc, e.span, e.message, Severity::Error, e.hint));
    }
    return r;
}

ParseResult<Instance> parse_instance(const SourceDocument &doc, std::shared_ptr<const Schema> schema)
{
    ParseResult<Instance> r;
    auto blocks = parse_blocks(doc, r.diagnostics);
    auto *a = single_block<InstanceAst>(doc, blocks, "instance", r.diagnostics);
    if (!a || has_errors(r.diagnostics)) return r;
    Elaborator el(doc, r.diagnostics);
    if (a->target.text != schema->name()) {
        el.error(a->target.span, "instance '" + a->name.text + "' is declared over '" + a->target.text +
                                     "' but schema '" + schema->name() + "' was supplied");
        return r;
    }
    if (auto inst = el.instance(*a, std::move(schema))) r.value.emplace(std::move(*inst));
    return r;
}

ParseResult<ExtensionSpec> parse_extension(const SourceDocument &doc,
                                           const std::map<std::string, Schema, std::less<>> &schemas)
{
    ParseResult<ExtensionSpec> r;
    auto blocks = parse_blocks(doc, r.diagnostics);
    auto *a = single_block<ExtensionAst>(doc, blocks, "extension", r.diagnostics);
    if (!a || has_errors(r.diagnostics)) return r;
    if (auto x = Elaborator(doc, r.diagnostics).extension(*a, schemas)) r.value = std::move(x->first);
    return r;
}

ParseResult<QuerySpec> parse_query(const SourceDocument &doc, const Schema &combined)
{
    ParseResult<QuerySpec> r;
    auto blocks = parse_blocks(doc, r.diagnostics);
    auto *a = single_block<QueryAst>(doc, blocks, "query", r.diagnostics);
    if (!a || has_errors(r.diagnostics)) return r;
    r.value = Elaborator(doc, r.diagnostics).query(a->spec, combined);
    return r;
}

Workspace load_workspace(const std::vector<SourceDocument> &docs)
{
    Workspace ws;
    std::vector<std::vector<BlockAst>> parsed;
    for (const auto &doc : docs)
        parsed.push_back(parse_blocks(doc, ws.diagnostics));

    auto each = [&]<class Ast>(std::type_identity<Ast>, auto &&fn) {
        for (std::size_t d = 0; d < docs.size(); ++d)
            for (const auto &b : parsed[d])
                if (auto *a = std::get_if<Ast>(&b)) fn(docs[d], *a);
    };
    std::set<std::string> targets; // schema and extension names share one namespace

    each(std::type_identity<SchemaAst>{}, [&](const SourceDocument &doc, const SchemaAst &a) {
        Elaborator el(doc, ws.diagnostics);
        if (!targets.insert(a.name.text).second) {
            el.error(a.name.span, "'" + a.name.text + "' is declared more than once");
            return;
        }
        if (auto s = el.schema(a)) {
            ws.schema_ptrs[a.name.text] = std::make_shared<const Schema>(*s);
            ws.schemas.emplace(a.name.text, std::move(*s));
            ws.schema_order.push_back(a.name.text);
        }
    });
    each(std::type_identity<ExtensionAst>{}, [&](const SourceDocument &doc, const ExtensionAst &a) {
        Elaborator el(doc, ws.diagnostics);
        if (!targets.insert(a.name.text).second) {
            el.error(a.name.span, "'" + a.name.text + "' is declared more than once");
            return;
        }
        if (auto x = el.extension(a, ws.schemas)) {
            ws.extensions.emplace(a.name.text, std::move(x->first));
            ws.combined.emplace(a.name.text, std::move(x->second));
            ws.extension_order.push_back(a.name.text);
        }
    });
    auto target_schema = [&](const std::string &name) -> std::shared_ptr<const Schema> {
        if (auto it = ws.schema_ptrs.find(name); it != ws.schema_ptrs.end()) return it->second;
        if (auto it = ws.combined.find(name); it != ws.combined.end()) return it->second.schema;
        return nullptr;
    };
    each(std::type_identity<InstanceAst>{}, [&](const SourceDocument &doc, const InstanceAst &a) {
        Elaborator el(doc, ws.diagnostics);
        if (ws.instances.count(a.name.text)) {
            el.error(a.name.span, "instance '" + a.name.text + "' is declared more than once");
            return;
        }
        auto schema = target_schema(a.target.text);
        if (!schema) {
            if (!targets.count(a.target.text))
                el.error(a.target.span, "unknown schema or extension '" + a.target.text + "'");
            return;
        }
        if (auto inst = el.instance(a, schema)) {
            ws.instances.emplace(a.name.text, std::move(*inst));
            ws.instance_order.push_back(a.name.text);
        }
    });
    each(std::type_identity<QueryAst>{}, [&](const SourceDocument &doc, const QueryAst &a) {
        Elaborator el(doc, ws.diagnostics);
        if (ws.queries.count(a.name.text)) {
            el.error(a.name.span, "query '" + a.name.text + "' is declared more than once");
            return;
        }
        auto schema = target_schema(a.target.text);
        if (!schema) {
            if (!targets.count(a.target.text))
                el.error(a.target.span, "unknown schema or extension '" + a.target.text + "'");
            return;
        }
        if (auto q = el.query(a.spec, *schema)) {
            ws.queries.emplace(a.name.text, std::move(*q));
            ws.query_order.push_back(a.name.text);
        }
    });
    return ws;
}

} // namespace catamerge
