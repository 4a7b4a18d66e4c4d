#include "random_program.hpp"

#include <cmc/frontend.hpp>

#include <vector>

namespace cmc::testing {

namespace {

class Gen {
  public:
    Gen(std::mt19937_64& rng, const GeneratorOptions& options) : m_rng(rng), m_opt(options) {
        int n = pick(1, options.max_vars);
        for(int i = 0; i < n; ++i)
            m_vars.push_back(std::string(1, static_cast<char>('a' + i)));
    }

    std::string program() {
        std::string out = "int ";
        for(std::size_t i = 0; i < m_vars.size(); ++i)
            out += (i ? ", " : "") + m_vars[i];
        out += ";\n";
        int n = pick(2, 6);
        for(int i = 0; i < n; ++i)
            out += stmt(2);
        return out;
    }

  private:
    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(m_rng); }
    bool chance(int percent) { return pick(1, 100) <= percent; }
    const std::string& var() { return m_vars[static_cast<std::size_t>(pick(0, static_cast<int>(m_vars.size()) - 1))]; }
    std::string num() { return std::to_string(pick(-2, 4)); }

    std::string term() {
        switch(pick(0, 5)) {
        case 0: return num();
        case 1: return var();
        case 2: return var() + " + " + std::to_string(pick(1, 3));
        case 3: return var() + " - " + var();
        case 4: return var() + " + " + var();
        default:
            if(m_opt.nonlinear)
                return var() + " * " + var();
            return std::to_string(pick(2, 3)) + " * " + var();
        }
    }

    std::string cond(int depth) {
        static const char* const rel[] = {"<", "<=", "==", "!=", ">=", ">"};
        std::string r = rel[pick(0, 5)];
        if(depth > 0 && chance(15))
            return "(" + cond(depth - 1) + (chance(50) ? " && " : " || ") + cond(depth - 1) + ")";
        if(depth > 0 && chance(10))
            return "!(" + cond(depth - 1) + ")";
        if(chance(60))
            return var() + " " + r + " " + num();
        return var() + " " + r + " " + term();
    }

    std::string block(int depth) {
        std::string out = "{\n";
        int n = pick(0, 3);
        for(int i = 0; i < n; ++i)
            out += stmt(depth - 1);
        return out + "}\n";
    }

    std::string stmt(int depth) {
        int k = pick(0, 9);
        if(depth <= 0 && k >= 7)
            k = pick(0, 6);
        switch(k) {
        case 0:
        case 1:
        case 2: return var() + " := " + term() + ";\n";
        case 3:
            if(m_opt.havoc)
                return "havoc " + var() + ";\n";
            return var() + " := " + num() + ";\n";
        case 4:
        case 5: return "assert(" + cond(1) + ");\n";
        case 6: return "assume(" + cond(0) + ");\n";
        case 7: return "if (" + cond(1) + ") " + block(depth) + "else " + block(depth);
        default: {
            if(!m_opt.loops)
                return "if (" + cond(1) + ") " + block(depth);
            std::string v = var();
            std::string body = block(depth);
            body.insert(body.size() - 2, v + " := " + v + " + 1;\n");
            return "while (" + v + " < " + std::to_string(pick(0, 5)) + ") " + body;
        }
        }
    }

    std::mt19937_64& m_rng;
    const GeneratorOptions& m_opt;
    std::vector<std::string> m_vars;
};

} // namespace

std::string random_program(std::mt19937_64& rng, const GeneratorOptions& options) {
    while(true) {
        std::string src = Gen(rng, options).program();
        Cfa cfa = parse_program(src);
        if(cfa.locations().size() <= options.max_locations)
            return src;
    }
}

Cfa random_cfa(std::mt19937_64& rng, const GeneratorOptions& options) {
    return parse_program(random_program(rng, options));
}

} // namespace cmc::testing
