#include "fggpp/render.hpp"

#include "fggpp/translate.hpp"

#include <sstream>

namespace fgg {

namespace {

std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    return out + "\"";
}

std::string tex_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '$':
        case '#':
        case '%':
        case '&':
        case '_':
        case '{':
        case '}':
            out += '\\';
            out += c;
            break;
        case '~':
            out += "\\textasciitilde{}";
            break;
        case '^':
            out += "\\textasciicircum{}";
            break;
        case '\\':
            out += "\\textbackslash{}";
            break;
        case '<':
            out += "\\textless{}";
            break;
        case '>':
            out += "\\textgreater{}";
            break;
        default:
            out += c;
        }
    }
    return out;
}

bool terminal(const Grammar& g, const std::string& label) {
    const EdgeLabel* l = g.find_label(label);
    return l && l->is_terminal();
}

}  // namespace

std::string render_dot(const Grammar& g) {
    std::ostringstream out;
    for (std::size_t i = 0; i < g.rules.size(); ++i) {
        const Rule& r = g.rules[i];
        out << "digraph rule" << i << " {\n";
        out << "  label=" << dot_quote(r.lhs + " ->") << ";\n  labelloc=t;\n  rankdir=LR;\n";
        out << "  edge [dir=none];\n";
        for (const auto& n : r.rhs.nodes) {
            out << "  " << dot_quote("n:" + n.id) << " [shape=circle, label=" << dot_quote(n.id);
            if (r.rhs.is_external(n.id))
                out << ", peripheries=2, style=filled, fillcolor=lightgray";
            out << "];\n";
        }
        for (const auto& e : r.rhs.edges) {
            std::string id = dot_quote("e:" + e.id);
            if (terminal(g, e.label))
                out << "  " << id << " [shape=square, style=filled, fillcolor=black, width=0.15, label=\"\", xlabel="
                    << dot_quote(factor_kind(e.label)) << "];\n";
            else
                out << "  " << id << " [shape=box, label=" << dot_quote(e.label) << "];\n";
            for (std::size_t k = 0; k < e.att.size(); ++k)
                out << "  " << id << " -> " << dot_quote("n:" + e.att[k]) << " [taillabel=\"" << k + 1 << "\"];\n";
        }
        out << "}\n";
    }
    return out.str();
}

std::string render_latex(const Grammar& g) {
    std::ostringstream out;
    out << "\\documentclass{standalone}\n"
           "\\usepackage{tikz}\n"
           "\\tikzset{var/.style={draw,circle,minimum size=6mm,inner sep=1pt,font=\\scriptsize},\n"
           "  ext/.style={var,fill=gray!30,double},\n"
           "  fac/.style={draw,rectangle,fill=black,minimum size=2mm,inner sep=0pt},\n"
           "  nt/.style={draw,rectangle,minimum size=6mm,font=\\scriptsize}}\n"
           "\\begin{document}\n"
           "\\begin{tabular}{l}\n";
    for (std::size_t i = 0; i < g.rules.size(); ++i) {
        const Rule& r = g.rules[i];
        out << "\\textit{" << tex_escape(r.lhs) << "} $\\longrightarrow$\n";
        out << "\\begin{tikzpicture}[x=1.6cm,y=1.4cm]\n";
        std::map<std::string, std::size_t> name;
        for (std::size_t k = 0; k < r.rhs.nodes.size(); ++k) {
            const Node& n = r.rhs.nodes[k];
            name[n.id] = k;
            out << "\\node[" << (r.rhs.is_external(n.id) ? "ext" : "var") << "] (n" << k << ") at (" << k
                << ",0) {" << tex_escape(n.id) << "};\n";
        }
        for (std::size_t k = 0; k < r.rhs.edges.size(); ++k) {
            const Edge& e = r.rhs.edges[k];
            if (terminal(g, e.label))
                out << "\\node[fac,label={[font=\\scriptsize]above:{" << tex_escape(factor_kind(e.label)) << "}}] (e"
                    << k << ") at (" << k << ",1) {};\n";
            else
                out << "\\node[nt] (e" << k << ") at (" << k << ",1) {" << tex_escape(e.label) << "};\n";
            for (const auto& a : e.att)
                out << "\\draw (e" << k << ") -- (n" << name.at(a) << ");\n";
        }
        out << "\\end{tikzpicture}\\\\\n";
    }
    out << "\\end{tabular}\n\\end{document}\n";
    return out.str();
}

}  // namespace fgg
