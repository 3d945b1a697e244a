#pragma once

#include "rxn/network.hpp"

#include <cctype>
#include <charconv>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rxn {

class ParseError : public std::runtime_error {
public:
    ParseError(std::string msg, int line, int column)
        : std::runtime_error("line " + std::to_string(line) + ", col " + std::to_string(column) +
                             ": " + msg),
          line(line),
          column(column) {}
    int line, column;
};

namespace detail {

inline const std::set<std::string>& element_symbols() {
    static const std::set<std::string> symbols = {
        "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al", "Si", "P", "S",
        "Cl", "Ar", "K", "Ca", "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga",
        "Ge", "As", "Se", "Br", "Kr", "Rb", "Sr", "Y", "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd",
        "Ag", "Cd", "In", "Sn", "Sb", "Te", "I", "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd", "Pm",
        "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W", "Re", "Os",
        "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa",
        "U", "Np", "Pu", "Am", "Cm", "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg",
        "Bh", "Hs", "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og"};
    return symbols;
}

/// Cursor over one line of input; errors carry 1-based line/column.
class Cursor {
public:
    Cursor(std::string_view text, int line) : text_(text), line_(line) {}

    bool done() const { return pos_ >= text_.size(); }
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }
    char take() { return text_[pos_++]; }
    std::size_t pos() const { return pos_; }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, line_, static_cast<int>(pos_) + 1);
    }

    int take_uint() {
        std::size_t start = pos_;
        while (!done() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        if (pos_ == start) fail("expected a number");
        int value = 0;
        auto [p, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (ec != std::errc()) fail("number out of range");
        return value;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    int line_;
};

inline bool charge_marker_next(const Cursor& c) {
    if (c.peek() == '^' || c.peek() == '+') return true;
    if (c.peek() == '-') return true;
    // digits immediately followed by a sign and end-of-token ("2+", "2-")
    std::size_t i = 0;
    while (std::isdigit(static_cast<unsigned char>(c.peek(i)))) ++i;
    if (i == 0) return false;
    char s = c.peek(i);
    return (s == '+' || s == '-') && c.peek(i + 1) == '\0';
}

/// "^2+", "^-", "+", "2-", ... Returns the signed charge.
inline int parse_charge(Cursor& c) {
    if (c.peek() == '^') c.take();
    int magnitude = 1;
    if (std::isdigit(static_cast<unsigned char>(c.peek()))) magnitude = c.take_uint();
    if (c.peek() == '+') {
        c.take();
        return magnitude;
    }
    if (c.peek() == '-') {
        c.take();
        return -magnitude;
    }
    c.fail("malformed charge: expected '+' or '-'");
}

inline Composition parse_formula_units(Cursor& c, char terminator);

/// One member of a bracketed complex, or a whole plain formula.
inline Composition parse_member(Cursor& c, char terminator) {
    Composition comp = parse_formula_units(c, terminator);
    if (!c.done() && c.peek() != terminator && c.peek() != ',' && charge_marker_next(c))
        comp.charge = parse_charge(c);
    return comp;
}

inline Composition parse_formula_units(Cursor& c, char terminator) {
    Composition comp;
    bool any = false;
    while (!c.done() && c.peek() != terminator && c.peek() != ',') {
        if (charge_marker_next(c)) break;
        if (c.peek() == '(') {
            c.take();
            Composition group = parse_formula_units(c, ')');
            if (c.peek() != ')') c.fail("unbalanced parentheses");
            c.take();
            int count = 1;
            if (std::isdigit(static_cast<unsigned char>(c.peek())) && !charge_marker_next(c))
                count = c.take_uint();
            for (const auto& [el, n] : group.atoms) comp.atoms[el] += n * count;
            any = true;
        } else if (std::isupper(static_cast<unsigned char>(c.peek()))) {
            std::string symbol(1, c.take());
            if (std::islower(static_cast<unsigned char>(c.peek()))) symbol += c.take();
            if (!element_symbols().count(symbol)) c.fail("unknown element symbol '" + symbol + "'");
            int count = 1;
            if (std::isdigit(static_cast<unsigned char>(c.peek())) && !charge_marker_next(c))
                count = c.take_uint();
            comp.atoms[symbol] += count;
            any = true;
        } else {
            c.fail(std::string("unexpected character '") + c.peek() + "' in formula");
        }
    }
    if (!any && !charge_marker_next(c)) c.fail("empty formula");
    return comp;
}

}  // namespace detail

/// Parse a chemical formula, e.g. "H2C2O4", "MnO4^-", "[MnC2O4,MnO4^-,H^+]",
/// "[Mn(C2O4)2]^-". A bracketed complex sums the member compositions; an
/// outer charge marker states the total charge of the complex.
inline Composition parse_formula(std::string_view text, int line = 1) {
    detail::Cursor c(text, line);
    Composition comp;
    if (c.peek() == '[') {
        c.take();
        bool outer_charge_seen = false;
        while (true) {
            comp += detail::parse_member(c, ']');
            if (c.peek() == ',') {
                c.take();
                continue;
            }
            if (c.peek() == ']') {
                c.take();
                break;
            }
            c.fail("unbalanced brackets");
        }
        if (!c.done() && detail::charge_marker_next(c)) {
            comp.charge = detail::parse_charge(c);
            outer_charge_seen = true;
        }
        (void)outer_charge_seen;
    } else {
        comp = detail::parse_member(c, '\0');
    }
    if (!c.done()) c.fail("trailing characters after formula");
    if (comp.atoms.empty() && comp.charge == 0) c.fail("formula has no atoms and no charge");
    return comp;
}

namespace detail {

struct SideTerm {
    int coefficient;
    std::string name;
};

inline std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

inline bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
inline bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

/// "2 X + Y", "2X", "0", the empty-set sign. Empty complex -> no terms.
inline std::vector<SideTerm> parse_side(const std::string& text, int line, int col_base) {
    std::string t = trim(text);
    if (t.empty()) throw ParseError("empty reaction side", line, col_base);
    if (t == "0" || t == "∅") return {};
    std::vector<SideTerm> terms;
    std::size_t pos = 0;
    std::string piece;
    auto flush = [&](std::size_t at) {
        std::string term = trim(piece);
        piece.clear();
        if (term.empty()) throw ParseError("empty term in reaction side", line, col_base + (int)at);
        std::size_t i = 0;
        int coef = 1;
        if (std::isdigit(static_cast<unsigned char>(term[0]))) {
            std::size_t j = 0;
            while (j < term.size() && std::isdigit(static_cast<unsigned char>(term[j]))) ++j;
            coef = std::stoi(term.substr(0, j));
            if (coef == 0) throw ParseError("zero stoichiometric coefficient", line, col_base + (int)at);
            i = j;
            while (i < term.size() && std::isspace(static_cast<unsigned char>(term[i]))) ++i;
        }
        std::string name = term.substr(i);
        if (name.empty() || !is_ident_start(name[0]))
            throw ParseError("expected species name in '" + term + "'", line, col_base + (int)at);
        for (char ch : name)
            if (!is_ident_char(ch))
                throw ParseError("bad species name '" + name + "'", line, col_base + (int)at);
        terms.push_back({coef, name});
    };
    for (pos = 0; pos < t.size(); ++pos) {
        if (t[pos] == '+')
            flush(pos);
        else
            piece += t[pos];
    }
    flush(pos);
    return terms;
}

inline double parse_rate(const std::string& text, int line, int col) {
    std::string t = trim(text);
    try {
        std::size_t used = 0;
        double v = std::stod(t, &used);
        if (used != t.size()) throw std::invalid_argument("");
        if (v < 0) throw ParseError("negative rate coefficient", line, col);
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError("nonnumeric rate coefficient '" + t + "'", line, col);
    }
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else
            cur += c;
    }
    out.push_back(cur);
    return out;
}

}  // namespace detail

/// Parse the line-oriented network format:
///   # comment
///   species: A, B, C          (optional explicit ordering)
///   external: A, P            (held at constant concentration)
///   A = H2O                   (composition annotation)
///   2 X <-> X, 0.33, 0.72     (reversible: forward step first)
///   A -> B, 0.04
inline ReactionNetwork parse_network(const std::string& text) {
    ReactionNetwork net;
    std::vector<std::string> externals;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    bool any_reaction = false;

    while (std::getline(in, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw = raw.substr(0, hash);
        std::string line = detail::trim(raw);
        if (line.empty()) continue;

        if (line.rfind("species:", 0) == 0) {
            for (const auto& piece : detail::split(line.substr(8), ',')) {
                std::string name = detail::trim(piece);
                if (name.empty()) throw ParseError("empty species name", line_no, 1);
                net.intern_species(name);
            }
            continue;
        }
        if (line.rfind("external:", 0) == 0) {
            for (const auto& piece : detail::split(line.substr(9), ',')) {
                std::string name = detail::trim(piece);
                if (name.empty()) throw ParseError("empty external species name", line_no, 1);
                for (const auto& e : externals)
                    if (e == name)
                        throw ParseError("duplicate external declaration '" + name + "'", line_no, 1);
                externals.push_back(name);
            }
            continue;
        }

        auto rev = line.find("<->");
        auto irr = line.find("->");
        if (rev != std::string::npos || (irr != std::string::npos && line[irr ? irr - 1 : 0] != '<')) {
            bool reversible = rev != std::string::npos;
            std::size_t arrow = reversible ? rev : irr;
            std::string lhs = line.substr(0, arrow);
            std::string rest = line.substr(arrow + (reversible ? 3 : 2));

            auto pieces = detail::split(rest, ',');
            std::size_t expected = reversible ? 3u : 2u;
            if (pieces.size() != expected)
                throw ParseError(reversible ? "reversible reaction needs exactly two rate coefficients"
                                            : "reaction needs exactly one rate coefficient",
                                 line_no, static_cast<int>(arrow) + 1);

            auto lterms = detail::parse_side(lhs, line_no, 1);
            auto rterms = detail::parse_side(pieces[0], line_no, static_cast<int>(arrow) + 3);

            ReactionStep fwd;
            for (const auto& t : lterms) fwd.reactants[net.intern_species(t.name)] += t.coefficient;
            for (const auto& t : rterms) fwd.products[net.intern_species(t.name)] += t.coefficient;
            fwd.rate_coefficient = detail::parse_rate(pieces[1], line_no, static_cast<int>(arrow) + 3);
            if (fwd.reactants == fwd.products)
                throw ParseError("reaction step with identical sides", line_no, 1);
            net.steps.push_back(fwd);
            if (reversible) {
                ReactionStep bwd;
                bwd.reactants = fwd.products;
                bwd.products = fwd.reactants;
                bwd.rate_coefficient =
                    detail::parse_rate(pieces[2], line_no, static_cast<int>(arrow) + 3);
                net.steps.push_back(bwd);
            }
            any_reaction = true;
            continue;
        }

        if (auto eq = line.find('='); eq != std::string::npos) {
            std::string name = detail::trim(line.substr(0, eq));
            std::string formula = detail::trim(line.substr(eq + 1));
            if (name.empty() || !detail::is_ident_start(name[0]))
                throw ParseError("bad species name in composition annotation", line_no, 1);
            int idx = net.intern_species(name);
            net.species[idx].composition = parse_formula(formula, line_no);
            continue;
        }

        throw ParseError("unrecognized line: '" + line + "'", line_no, 1);
    }

    if (!any_reaction && net.species.empty())
        throw ParseError("no reactions in input", line_no ? line_no : 1, 1);

    for (const auto& name : externals) {
        int idx = net.intern_species(name);
        net.species[idx].external = true;
    }
    net.validate();
    return net;
}

namespace detail {

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_side(const ReactionNetwork& net, const std::map<int, int>& side) {
    if (side.empty()) return "0";
    std::string out;
    for (const auto& [m, coef] : side) {
        if (!out.empty()) out += " + ";
        if (coef != 1) out += std::to_string(coef) + " ";
        out += net.species[m].name;
    }
    return out;
}

inline std::string format_formula(const Composition& c) {
    std::string out;
    for (const auto& [el, n] : c.atoms) {
        out += el;
        if (n != 1) out += std::to_string(n);
    }
    if (c.charge != 0) {
        out += "^";
        if (std::abs(c.charge) != 1) out += std::to_string(std::abs(c.charge));
        out += c.charge > 0 ? "+" : "-";
    }
    return out;
}

}  // namespace detail

/// Canonical text form; parse_network(serialize_network(n)) is structurally
/// identical to n (species order, step order, coefficients).
inline std::string serialize_network(const ReactionNetwork& net) {
    net.validate();
    std::string out = "species:";
    for (int i = 0; i < net.species_count(); ++i)
        out += (i ? ", " : " ") + net.species[i].name;
    out += "\n";

    std::string externals;
    for (const auto& sp : net.species)
        if (sp.external) externals += (externals.empty() ? "" : ", ") + sp.name;
    if (!externals.empty()) out += "external: " + externals + "\n";

    for (const auto& sp : net.species)
        if (sp.composition)
            out += sp.name + " = " + detail::format_formula(*sp.composition) + "\n";

    for (const auto& step : net.steps) {
        out += detail::format_side(net, step.reactants) + " -> " +
               detail::format_side(net, step.products) + ", " +
               detail::format_double(step.rate_coefficient) + "\n";
    }
    return out;
}

}  // namespace rxn
