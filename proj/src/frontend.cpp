#include <cmc/frontend.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

namespace cmc {

namespace {

class ExprParser {
  public:
    ExprParser(TokenStream& ts, const std::set<std::string>* declared)
        : m_ts(ts), m_declared(declared) {}

    Expr parse_or() {
        Expr e = parse_and();
        while(m_ts.is("|")) {
            m_ts.next();
            Expr r = parse_and();
            require_bool(e);
            require_bool(r);
            e = Expr::binary(ExprKind::Or, e, r);
        }
        return e;
    }

  private:
    Expr parse_and() {
        Expr e = parse_not();
        while(m_ts.is("&")) {
            m_ts.next();
            Expr r = parse_not();
            require_bool(e);
            require_bool(r);
            e = Expr::binary(ExprKind::And, e, r);
        }
        return e;
    }

    Expr parse_not() {
        if(m_ts.accept("!")) {
            Expr e = parse_not();
            require_bool(e);
            return Expr::unary(ExprKind::Not, e);
        }
        return parse_cmp();
    }

    Expr parse_cmp() {
        Expr lhs = parse_sum();
        static const std::pair<const char*, ExprKind> rel[] = {
            {"<", ExprKind::Lt}, {"<=", ExprKind::Le}, {"==", ExprKind::Eq}, {"=", ExprKind::Eq},
            {"!=", ExprKind::Ne}, {">=", ExprKind::Ge}, {">", ExprKind::Gt}};
        for(auto [text, kind] : rel) {
            if(m_ts.is(text)) {
                m_ts.next();
                Expr rhs = parse_sum();
                require_term(lhs);
                require_term(rhs);
                return Expr::binary(kind, lhs, rhs);
            }
        }
        return lhs;
    }

    Expr parse_sum() {
        Expr e = parse_product();
        while(m_ts.is("+") || m_ts.is("-")) {
            ExprKind k = m_ts.next().text == "+" ? ExprKind::Add : ExprKind::Sub;
            Expr r = parse_product();
            require_term(e);
            require_term(r);
            e = Expr::binary(k, e, r);
        }
        return e;
    }

    Expr parse_product() {
        Expr e = parse_unary();
        while(m_ts.accept("*")) {
            Expr r = parse_unary();
            require_term(e);
            require_term(r);
            e = Expr::binary(ExprKind::Mul, e, r);
        }
        return e;
    }

    Expr parse_unary() {
        if(m_ts.accept("-")) {
            if(m_ts.peek().kind == Tok::Int)
                return Expr::constant(-m_ts.next().value);
            Expr e = parse_unary();
            require_term(e);
            return Expr::unary(ExprKind::Neg, e);
        }
        return parse_primary();
    }

    Expr parse_primary() {
        const Token& t = m_ts.peek();
        if(t.kind == Tok::Int)
            return Expr::constant(m_ts.next().value);
        if(t.kind == Tok::Ident) {
            if(t.text == "true" || t.text == "false")
                return Expr::boolean(m_ts.next().text == "true");
            if(t.text == "nondet" && m_ts.is("(", 1))
                m_ts.fail("nondet() is only allowed as the whole right-hand side of an assignment");
            if(m_declared && !m_declared->count(t.text))
                m_ts.fail("use of undeclared variable " + t.text);
            return Expr::var(m_ts.next().text);
        }
        if(m_ts.accept("(")) {
            Expr e = parse_or();
            m_ts.expect(")");
            return e;
        }
        m_ts.fail("expected expression but found '" + t.text + "'");
    }

    void require_bool(const Expr& e) {
        if(!e.is_boolean())
            m_ts.fail("expected a condition, found term " + e.str());
    }

    void require_term(const Expr& e) {
        if(e.is_boolean())
            m_ts.fail("expected a term, found condition " + e.str());
    }

    TokenStream& m_ts;
    const std::set<std::string>* m_declared;
};

Expr parse_condition(TokenStream& ts, const std::set<std::string>* declared) {
    Expr e = parse_expr(ts, declared);
    if(!e.is_boolean())
        ts.fail("expected a condition, found term " + e.str());
    return e;
}

Expr parse_term(TokenStream& ts, const std::set<std::string>* declared) {
    Expr e = parse_expr(ts, declared);
    if(e.is_boolean())
        ts.fail("expected a term, found condition " + e.str());
    return e;
}

// Mini-language statements

struct Stmt;
using Block = std::vector<Stmt>;

struct Stmt {
    enum Kind { Assign, Havoc, Assume, Assert, Skip, If, While } kind;
    std::string var;
    Expr expr;
    Block then_block;
    Block else_block;
};

class ProgramParser {
  public:
    explicit ProgramParser(std::string_view source) : m_ts(tokenize(source)) {}

    Block parse() {
        Block out;
        while(!m_ts.at_end())
            parse_stmt(out);
        return out;
    }

    std::vector<std::string> variables() const { return m_order; }

  private:
    void parse_stmt(Block& out) {
        if(m_ts.accept("int")) {
            do {
                Token name = m_ts.expect_ident();
                if(!m_declared.insert(name.text).second)
                    throw SyntaxError("duplicate declaration of " + name.text, name.line,
                                      name.column);
                m_order.push_back(name.text);
            } while(m_ts.accept(","));
            m_ts.expect(";");
            return;
        }
        if(m_ts.accept("havoc")) {
            Stmt s{Stmt::Havoc, declared_var(), {}, {}, {}};
            m_ts.expect(";");
            out.push_back(std::move(s));
            return;
        }
        if(m_ts.accept("skip")) {
            m_ts.expect(";");
            out.push_back(Stmt{Stmt::Skip, {}, {}, {}, {}});
            return;
        }
        if(m_ts.is("assert") || m_ts.is("assume")) {
            auto kind = m_ts.next().text == "assert" ? Stmt::Assert : Stmt::Assume;
            m_ts.expect("(");
            Expr e = parse_condition(m_ts, &m_declared);
            m_ts.expect(")");
            m_ts.expect(";");
            out.push_back(Stmt{kind, {}, e, {}, {}});
            return;
        }
        if(m_ts.accept("if")) {
            m_ts.expect("(");
            Expr e = parse_condition(m_ts, &m_declared);
            m_ts.expect(")");
            Stmt s{Stmt::If, {}, e, parse_block(), {}};
            if(m_ts.accept("else")) {
                if(m_ts.is("if"))
                    parse_stmt(s.else_block);
                else
                    s.else_block = parse_block();
            }
            out.push_back(std::move(s));
            return;
        }
        if(m_ts.accept("while")) {
            m_ts.expect("(");
            Expr e = parse_condition(m_ts, &m_declared);
            m_ts.expect(")");
            out.push_back(Stmt{Stmt::While, {}, e, parse_block(), {}});
            return;
        }
        if(m_ts.peek().kind == Tok::Ident) {
            std::string v = declared_var();
            m_ts.expect(":=");
            if(m_ts.is("nondet") && m_ts.is("(", 1)) {
                m_ts.next();
                m_ts.next();
                m_ts.expect(")");
                m_ts.expect(";");
                out.push_back(Stmt{Stmt::Havoc, v, {}, {}, {}});
                return;
            }
            Expr t = parse_term(m_ts, &m_declared);
            m_ts.expect(";");
            out.push_back(Stmt{Stmt::Assign, v, t, {}, {}});
            return;
        }
        m_ts.fail("expected statement but found '" + m_ts.peek().text + "'");
    }

    Block parse_block() {
        m_ts.expect("{");
        Block out;
        while(!m_ts.is("}")) {
            if(m_ts.at_end())
                m_ts.fail("unterminated block");
            parse_stmt(out);
        }
        m_ts.expect("}");
        return out;
    }

    std::string declared_var() {
        Token t = m_ts.expect_ident();
        if(!m_declared.count(t.text))
            throw SyntaxError("use of undeclared variable " + t.text, t.line, t.column);
        return t.text;
    }

    TokenStream m_ts;
    std::set<std::string> m_declared;
    std::vector<std::string> m_order;
};

class Compiler {
  public:
    LocationId fresh() { return LocationId{m_next++}; }

    void block(const Block& stmts, LocationId entry, LocationId exit) {
        if(stmts.empty()) {
            if(entry != exit)
                add(entry, exit, Assume{Expr::boolean(true)});
            return;
        }
        LocationId cur = entry;
        for(std::size_t i = 0; i < stmts.size(); ++i) {
            LocationId nxt = i + 1 == stmts.size() ? exit : fresh();
            stmt(stmts[i], cur, nxt);
            cur = nxt;
        }
    }

    void stmt(const Stmt& s, LocationId from, LocationId to) {
        switch(s.kind) {
        case Stmt::Assign: add(from, to, Assign{s.var, s.expr}); break;
        case Stmt::Havoc: add(from, to, Havoc{s.var}); break;
        case Stmt::Assume: add(from, to, Assume{s.expr}); break;
        case Stmt::Skip: add(from, to, Assume{Expr::boolean(true)}); break;
        case Stmt::Assert: {
            LocationId err = fresh();
            m_errors.insert(err);
            add(from, err, Assume{negate(s.expr)});
            add(from, to, Assume{s.expr});
            break;
        }
        case Stmt::If: {
            LocationId t = s.then_block.empty() ? to : fresh();
            add(from, t, Assume{s.expr});
            block(s.then_block, t, to);
            LocationId e = s.else_block.empty() ? to : fresh();
            add(from, e, Assume{negate(s.expr)});
            block(s.else_block, e, to);
            break;
        }
        case Stmt::While: {
            LocationId body = s.then_block.empty() ? from : fresh();
            add(from, body, Assume{s.expr});
            block(s.then_block, body, from);
            add(from, to, Assume{negate(s.expr)});
            break;
        }
        }
    }

    void add(LocationId from, LocationId to, Operation op) {
        m_edges.push_back(Edge{EdgeId{0}, from, to, std::move(op)});
    }

    std::vector<Edge> m_edges;
    std::set<LocationId> m_errors;
    std::uint32_t m_next = 0;
};

LocationId parse_location(TokenStream& ts) {
    Token t = ts.expect_ident();
    if(t.text.size() < 2 || t.text[0] != 'L' ||
       !std::all_of(t.text.begin() + 1, t.text.end(), [](char c) { return c >= '0' && c <= '9'; }))
        throw SyntaxError("expected location name like L3, found '" + t.text + "'", t.line,
                          t.column);
    return LocationId{static_cast<std::uint32_t>(std::stoul(t.text.substr(1)))};
}

std::string loc_str(LocationId l) { return "L" + std::to_string(raw(l)); }

} // namespace

Expr parse_expr(TokenStream& ts, const std::set<std::string>* declared) {
    return ExprParser(ts, declared).parse_or();
}

Cfa parse_program(std::string_view source) {
    ProgramParser parser(source);
    Block program = parser.parse();
    Compiler c;
    LocationId init = c.fresh();
    LocationId exit = c.fresh();
    c.block(program, init, exit);

    // renumber in order of first appearance so listings read top to bottom
    std::map<LocationId, LocationId> renumber;
    auto visit = [&](LocationId l) {
        renumber.emplace(l, LocationId{static_cast<std::uint32_t>(renumber.size())});
    };
    visit(init);
    for(const Edge& g : c.m_edges) {
        visit(g.source);
        visit(g.target);
    }
    visit(exit);
    for(std::uint32_t i = 0; i < c.m_next; ++i)
        visit(LocationId{i});

    std::set<LocationId> locations;
    for(auto& [old, now] : renumber)
        locations.insert(now);
    std::set<LocationId> errors;
    for(LocationId e : c.m_errors)
        errors.insert(renumber.at(e));
    std::vector<Edge> edges = c.m_edges;
    for(Edge& g : edges) {
        g.source = renumber.at(g.source);
        g.target = renumber.at(g.target);
    }
    return Cfa(std::move(locations), renumber.at(init), std::move(errors), std::move(edges),
               parser.variables());
}

Cfa parse_cfa(std::string_view text) {
    TokenStream ts(tokenize(text));
    std::vector<std::string> vars;
    std::set<std::string> declared;
    std::optional<std::set<LocationId>> declared_locs;
    std::set<LocationId> mentioned;
    std::optional<LocationId> init;
    std::set<LocationId> errors;
    std::vector<Edge> edges;
    std::set<std::uint32_t> seen_ids;

    auto location_list = [&]() {
        std::set<LocationId> out;
        if(!ts.is(";")) {
            do {
                out.insert(parse_location(ts));
            } while(ts.accept(","));
        }
        ts.expect(";");
        return out;
    };

    while(!ts.at_end()) {
        if(ts.is("vars") && ts.is(":", 1)) {
            ts.next();
            ts.next();
            if(!ts.is(";")) {
                do {
                    Token v = ts.expect_ident();
                    if(!declared.insert(v.text).second)
                        throw SyntaxError("duplicate variable " + v.text, v.line, v.column);
                    vars.push_back(v.text);
                } while(ts.accept(","));
            }
            ts.expect(";");
            continue;
        }
        if(ts.is("locs") && ts.is(":", 1)) {
            ts.next();
            ts.next();
            declared_locs = location_list();
            continue;
        }
        if(ts.is("init")) {
            ts.next();
            ts.accept(":");
            if(init)
                ts.fail("duplicate init declaration");
            init = parse_location(ts);
            mentioned.insert(*init);
            ts.expect(";");
            continue;
        }
        if(ts.is("error")) {
            ts.next();
            ts.accept(":");
            for(LocationId l : location_list()) {
                errors.insert(l);
                mentioned.insert(l);
            }
            continue;
        }
        std::optional<std::uint32_t> explicit_id;
        if(ts.accept("[")) {
            Token id = ts.peek();
            Value v = ts.expect_int();
            ts.expect("]");
            if(!seen_ids.insert(static_cast<std::uint32_t>(v)).second)
                throw SyntaxError("duplicate edge id " + std::to_string(v), id.line, id.column);
            if(static_cast<std::size_t>(v) != edges.size())
                throw SyntaxError("edge id " + std::to_string(v) + " out of file order", id.line,
                                  id.column);
            explicit_id = static_cast<std::uint32_t>(v);
        }
        LocationId from = parse_location(ts);
        ts.expect("->");
        LocationId to = parse_location(ts);
        ts.expect(":");
        mentioned.insert(from);
        mentioned.insert(to);
        Operation op;
        if(ts.accept("assume")) {
            Expr e = parse_expr(ts, &declared);
            if(!e.is_boolean())
                ts.fail("assume needs a condition");
            op = Assume{e};
        } else if(ts.accept("havoc")) {
            Token v = ts.expect_ident();
            if(!declared.count(v.text))
                throw SyntaxError("use of undeclared variable " + v.text, v.line, v.column);
            op = Havoc{v.text};
        } else {
            Token v = ts.expect_ident();
            if(!declared.count(v.text))
                throw SyntaxError("use of undeclared variable " + v.text, v.line, v.column);
            ts.expect(":=");
            if(ts.is("nondet") && ts.is("(", 1)) {
                ts.next();
                ts.next();
                ts.expect(")");
                op = Havoc{v.text};
            } else {
                Expr e = parse_expr(ts, &declared);
                if(e.is_boolean())
                    ts.fail("assignment needs a term");
                op = Assign{v.text, e};
            }
        }
        ts.expect(";");
        edges.push_back(Edge{EdgeId{explicit_id.value_or(0)}, from, to, std::move(op)});
    }
    if(!init)
        throw SyntaxError("missing init declaration", 1, 1);
    std::set<LocationId> locations;
    if(declared_locs) {
        for(LocationId l : mentioned)
            if(!declared_locs->count(l))
                throw InvalidCfa("dangling location reference " + loc_str(l));
        locations = *declared_locs;
    } else {
        locations = mentioned;
    }
    return Cfa(std::move(locations), *init, std::move(errors), std::move(edges), std::move(vars));
}

std::string serialize_cfa(const Cfa& cfa) {
    std::ostringstream out;
    auto join_locs = [&](const std::set<LocationId>& locs) {
        bool first = true;
        for(LocationId l : locs) {
            out << (first ? " " : ", ") << loc_str(l);
            first = false;
        }
    };
    out << "vars:";
    for(std::size_t i = 0; i < cfa.variables().size(); ++i)
        out << (i ? ", " : " ") << cfa.variables()[i];
    out << ";\nlocs:";
    join_locs(cfa.locations());
    out << ";\ninit: " << loc_str(cfa.initial()) << ";\n";
    if(!cfa.error_locations().empty()) {
        out << "error:";
        join_locs(cfa.error_locations());
        out << ";\n";
    }
    for(const Edge& g : cfa.edges())
        out << loc_str(g.source) << " -> " << loc_str(g.target) << ": " << op_str(g.op) << ";\n";
    return out.str();
}

Cfa load_program(const std::string& path) {
    std::ifstream in(path);
    if(!in)
        throw Error("cannot read " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        if(path.size() >= 4 && path.compare(path.size() - 4, 4, ".cfa") == 0)
            return parse_cfa(buf.str());
        return parse_program(buf.str());
    } catch(const SyntaxError& e) {
        throw Error(path + ":" + e.what());
    }
}

} // namespace cmc
