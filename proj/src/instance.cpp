#include "testinv/instance.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "testinv/errors.hpp"

namespace testinv::cli {

namespace {

using inv::ActionBlock;
using inv::CharacterComponent;
using inv::TorusFactor;

std::vector<std::string> tokenize(const std::string& line)
{
    std::string body = line.substr(0, line.find('#'));
    std::istringstream is(body);
    std::vector<std::string> toks;
    std::string t;
    while (is >> t)
        toks.push_back(t);
    return toks;
}

std::vector<std::size_t> parse_index_list(const std::string& tok, const std::string& where)
{
    std::vector<std::size_t> out;
    std::string cur;
    std::istringstream is(tok);
    while (std::getline(is, cur, ',')) {
        Int v = parse_integer(cur);
        if (v < 0)
            throw ParseError(where + ": negative index");
        out.push_back(to_ulong(v));
    }
    if (out.empty())
        throw ParseError(where + ": empty index list");
    return out;
}

std::vector<long> parse_long_list(const std::string& tok, const std::string& where)
{
    std::vector<long> out;
    std::string cur;
    std::istringstream is(tok);
    while (std::getline(is, cur, ','))
        out.push_back(to_long(parse_integer(cur)));
    if (out.empty())
        throw ParseError(where + ": empty integer list");
    return out;
}

fields::AbelianFieldSpec parse_field_spec(const std::vector<std::string>& toks, std::size_t from,
                                          const std::string& where)
{
    if (from >= toks.size())
        throw ParseError(where + ": missing field spec");
    const std::string& kind = toks[from];
    if (kind == "quad") {
        if (toks.size() != from + 2)
            throw ParseError(where + ": quad takes one discriminant");
        return fields::AbelianFieldSpec::quadratic(to_long(parse_integer(toks[from + 1])));
    }
    if (kind == "cyclo") {
        if (toks.size() != from + 2)
            throw ParseError(where + ": cyclo takes one modulus");
        return fields::AbelianFieldSpec::cyclotomic(to_ulong(parse_integer(toks[from + 1])));
    }
    if (kind == "abelian") {
        if (toks.size() != from + 3)
            throw ParseError(where + ": abelian takes a modulus and a subgroup list");
        unsigned long n = to_ulong(parse_integer(toks[from + 1]));
        std::vector<unsigned long> h;
        for (std::size_t idx : parse_index_list(toks[from + 2], where))
            h.push_back(idx);
        return fields::AbelianFieldSpec(n, std::move(h));
    }
    throw ParseError(where + ": unknown field kind '" + kind + "'");
}

struct ParserState {
    std::optional<std::pair<std::size_t, std::size_t>> psi_dim;
    std::vector<Rat> psi_tensor;
    std::set<std::string> psi_entries_set;
    std::optional<std::vector<Rat>> w_values;
    std::vector<TorusFactor> torus_factors;
    std::optional<Int> class_number_override;
    std::vector<ActionBlock> action;
    std::vector<exactalg::QVec> wprime;
    inv::LevelSpec level;
    std::set<std::string> level_depth_seen, level_lattice_seen;
    inv::BoundConstants constants;
    std::set<std::string> constants_seen;

    std::size_t dim_w() const
    {
        if (!psi_dim)
            throw ParseError("psi dim must appear before dimension-dependent statements");
        return psi_dim->first + psi_dim->second;
    }
};

void handle_psi(ParserState& st, const std::vector<std::string>& toks, const std::string& where)
{
    if (toks.size() >= 2 && toks[1] == "dim") {
        if (st.psi_dim)
            throw ParseError(where + ": duplicate psi dim");
        if (toks.size() != 4)
            throw ParseError(where + ": psi dim takes two counts");
        std::size_t du = to_ulong(parse_integer(toks[2]));
        std::size_t dv = to_ulong(parse_integer(toks[3]));
        st.psi_dim = {du, dv};
        st.psi_tensor.assign(du * dv * dv, Rat(0));
        return;
    }
    if (!st.psi_dim)
        throw ParseError(where + ": psi entries need psi dim first");
    if (toks.size() != 5)
        throw ParseError(where + ": psi entry takes k i j value");
    auto [du, dv] = *st.psi_dim;
    std::size_t k = to_ulong(parse_integer(toks[1]));
    std::size_t i = to_ulong(parse_integer(toks[2]));
    std::size_t j = to_ulong(parse_integer(toks[3]));
    Rat val = parse_rational(toks[4]);
    if (k >= du || i >= dv || j >= dv)
        throw ParseError(where + ": psi entry out of range");
    if (i == j)
        throw ParseError(where + ": psi diagonal entries are zero by alternation");
    std::string key1 = std::to_string(k) + "," + std::to_string(i) + "," + std::to_string(j);
    std::string key2 = std::to_string(k) + "," + std::to_string(j) + "," + std::to_string(i);
    if (st.psi_entries_set.count(key1) || st.psi_entries_set.count(key2))
        throw ParseError(where + ": duplicate psi entry");
    st.psi_entries_set.insert(key1);
    st.psi_tensor[(k * dv + i) * dv + j] = val;
    st.psi_tensor[(k * dv + j) * dv + i] = -val;
}

void handle_action(ParserState& st, const std::vector<std::string>& toks, const std::string& where)
{
    if (toks.size() < 4)
        throw ParseError(where + ": action takes a part, indices and characters");
    ActionBlock block;
    if (toks[1] == "u")
        block.in_u = true;
    else if (toks[1] == "v")
        block.in_u = false;
    else
        throw ParseError(where + ": action part must be 'u' or 'v'");
    block.coords = parse_index_list(toks[2], where);

    std::size_t pos = 3;
    while (pos < toks.size()) {
        if (toks[pos] != "f" || pos + 2 >= toks.size())
            throw ParseError(where + ": expected 'f <factor> exp|norm <ints>'");
        CharacterComponent comp;
        comp.factor = to_ulong(parse_integer(toks[pos + 1]));
        const std::string& kind = toks[pos + 2];
        if (kind == "exp") {
            if (pos + 3 >= toks.size())
                throw ParseError(where + ": exp needs an exponent list");
            comp.is_norm = false;
            comp.exponents = parse_long_list(toks[pos + 3], where);
        } else if (kind == "norm") {
            if (pos + 3 >= toks.size())
                throw ParseError(where + ": norm needs a power");
            comp.is_norm = true;
            comp.norm_power = to_long(parse_integer(toks[pos + 3]));
        } else {
            throw ParseError(where + ": unknown character kind '" + kind + "'");
        }
        block.chi.components.push_back(comp);
        pos += 4;
    }
    st.action.push_back(block);
}

void handle_level(ParserState& st, const std::vector<std::string>& toks, const std::string& where)
{
    if (toks.size() < 3)
        throw ParseError(where + ": level takes 'depth' or 'lattice'");
    Int p = parse_integer(toks[2]);
    if (toks[1] == "depth") {
        if (toks.size() != 4)
            throw ParseError(where + ": level depth takes a prime and a depth");
        if (!st.level_depth_seen.insert(p.get_str()).second)
            throw ParseError(where + ": duplicate level depth at p=" + p.get_str());
        st.level.set_t_depth(p, static_cast<unsigned>(to_ulong(parse_integer(toks[3]))));
        return;
    }
    if (toks[1] == "lattice") {
        std::size_t n = st.dim_w();
        if (toks.size() != 3 + n * n)
            throw ParseError(where + ": level lattice needs " + std::to_string(n * n) + " entries");
        if (!st.level_lattice_seen.insert(p.get_str()).second)
            throw ParseError(where + ": duplicate level lattice at p=" + p.get_str());
        std::vector<exactalg::QVec> cols;
        std::size_t t = 3;
        for (std::size_t j = 0; j < n; ++j) {
            exactalg::QVec col;
            for (std::size_t i = 0; i < n; ++i)
                col.push_back(parse_rational(toks[t++]));
            cols.push_back(col);
        }
        st.level.set_w_lattice(p, exactalg::QLattice(exactalg::QMatrix::from_columns(cols)));
        return;
    }
    throw ParseError(where + ": unknown level statement '" + toks[1] + "'");
}

void handle_constants(ParserState& st, const std::vector<std::string>& toks, const std::string& where)
{
    if (toks.size() != 3)
        throw ParseError(where + ": constants takes a name and a value");
    const std::string& name = toks[1];
    if (!st.constants_seen.insert(name).second)
        throw ParseError(where + ": duplicate constant '" + name + "'");
    if (name == "b")
        st.constants.b = parse_rational(toks[2]);
    else if (name == "cN")
        st.constants.c_N = parse_rational(toks[2]);
    else if (name == "c0")
        st.constants.c0 = parse_rational(toks[2]);
    else if (name == "N")
        st.constants.N = to_ulong(parse_integer(toks[2]));
    else
        throw ParseError(where + ": unknown constant '" + name + "'");
}

} // namespace

InstanceData parse_instance_text(const std::string& text, const std::string& name)
{
    ParserState st;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::vector<std::string> toks = tokenize(line);
        if (toks.empty())
            continue;
        std::string where = name + ":" + std::to_string(lineno);
        const std::string& key = toks[0];
        if (key == "torus") {
            if (toks.size() < 2)
                throw ParseError(where + ": torus takes a factor kind");
            if (toks[1] == "split") {
                if (toks.size() != 3)
                    throw ParseError(where + ": torus split takes a rank");
                st.torus_factors.push_back(TorusFactor::split(to_ulong(parse_integer(toks[2]))));
            } else if (toks[1] == "weil") {
                st.torus_factors.push_back(TorusFactor::weil(parse_field_spec(toks, 2, where)));
            } else if (toks[1] == "normone") {
                st.torus_factors.push_back(TorusFactor::norm_one(parse_field_spec(toks, 2, where)));
            } else {
                throw ParseError(where + ": unknown torus factor '" + toks[1] + "'");
            }
        } else if (key == "torus_classnumber") {
            if (toks.size() != 2)
                throw ParseError(where + ": torus_classnumber takes one integer");
            if (st.class_number_override)
                throw ParseError(where + ": duplicate torus_classnumber");
            st.class_number_override = parse_integer(toks[1]);
        } else if (key == "psi") {
            handle_psi(st, toks, where);
        } else if (key == "w") {
            if (st.w_values)
                throw ParseError(where + ": duplicate w");
            std::size_t n = st.dim_w();
            if (toks.size() != 1 + n)
                throw ParseError(where + ": w needs " + std::to_string(n) + " values");
            std::vector<Rat> vals;
            for (std::size_t i = 1; i < toks.size(); ++i)
                vals.push_back(parse_rational(toks[i]));
            st.w_values = vals;
        } else if (key == "action") {
            handle_action(st, toks, where);
        } else if (key == "level") {
            handle_level(st, toks, where);
        } else if (key == "wprime") {
            std::size_t n = st.dim_w();
            if (toks.size() != 1 + n)
                throw ParseError(where + ": wprime needs " + std::to_string(n) + " values");
            exactalg::QVec v;
            for (std::size_t i = 1; i < toks.size(); ++i)
                v.push_back(parse_rational(toks[i]));
            st.wprime.push_back(v);
        } else if (key == "constants") {
            handle_constants(st, toks, where);
        } else {
            throw ParseError(where + ": unknown key '" + key + "'");
        }
    }

    if (st.torus_factors.empty())
        throw ParseError(name + ": no torus factors");
    if (!st.psi_dim)
        throw ParseError(name + ": missing psi dim");
    auto [du, dv] = *st.psi_dim;
    if (!st.w_values) {
        if (du + dv > 0)
            throw ParseError(name + ": missing w");
        st.w_values = std::vector<Rat>{};
    }

    InstanceData out{
        inv::SubvarietyDatum{
            inv::TorusSpec{st.torus_factors, st.class_number_override},
            heis::PolarizationForm(du, dv, st.psi_tensor),
            heis::HeisenbergElement{},
            st.action,
            st.wprime},
        st.level,
        st.constants};
    out.datum.w.u.assign(st.w_values->begin(), st.w_values->begin() + static_cast<std::ptrdiff_t>(du));
    out.datum.w.v.assign(st.w_values->begin() + static_cast<std::ptrdiff_t>(du), st.w_values->end());
    out.constants.validate();
    out.datum.validate();
    return out;
}

InstanceData parse_instance_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open instance file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_instance_text(buf.str(), std::filesystem::path(path).filename().string());
}

std::vector<std::string> read_list_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open list file: " + path);
    std::filesystem::path base = std::filesystem::path(path).parent_path();
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> toks = tokenize(line);
        if (toks.empty())
            continue;
        if (toks.size() != 1)
            throw ParseError("list file lines hold a single path: " + line);
        out.push_back((base / toks[0]).string());
    }
    return out;
}

} // namespace testinv::cli
