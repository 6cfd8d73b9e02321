#include "testinv/report_io.hpp"

#include <cstdio>
#include <sstream>

namespace testinv::cli {

namespace {

using nlohmann::json;

std::string int_str(const Int& v)
{
    return v.get_str();
}

json qvec_json(const exactalg::QVec& v)
{
    json out = json::array();
    for (const Rat& q : v)
        out.push_back(rat_str(q));
    return out;
}

json primes_json(const inv::InvariantReport& rep)
{
    json arr = json::array();
    for (const auto& [p, pd] : rep.primes) {
        json e;
        e["p"] = int_str(p);
        e["index"] = int_str(pd.index);
        e["I"] = rat_str(pd.I);
        e["order"] = std::to_string(pd.order);
        e["t_depth"] = std::to_string(pd.t_depth);
        e["in_delta"] = pd.in_delta;
        arr.push_back(e);
    }
    return arr;
}

json primes_list_json(const std::vector<Int>& ps)
{
    json arr = json::array();
    for (const Int& p : ps)
        arr.push_back(int_str(p));
    return arr;
}

json constants_json(const inv::BoundConstants& c)
{
    json out;
    out["b"] = rat_str(c.b);
    out["cN"] = rat_str(c.c_N);
    out["c0"] = rat_str(c.c0);
    out["N"] = std::to_string(c.N);
    return out;
}

std::string primes_line(const std::vector<Int>& ps)
{
    if (ps.empty())
        return "(none)";
    std::string out;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (i)
            out += ", ";
        out += ps[i].get_str();
    }
    return out;
}

} // namespace

std::string format_bound(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

json tau_report_json(const inv::InvariantReport& rep, const inv::BoundConstants& c)
{
    json out;
    out["command"] = "tau";
    out["D"] = int_str(rep.D);
    out["degenerate_D"] = rep.degenerate_D;
    out["Delta"] = primes_list_json(rep.Delta);
    out["delta"] = primes_list_json(rep.delta);
    out["primes"] = primes_json(rep);
    out["tau"] = rat_str(rep.tau);
    out["w_min"] = json{{"u", qvec_json(rep.w_min.u)}, {"v", qvec_json(rep.w_min.v)}};
    out["constants"] = constants_json(c);
    return out;
}

std::string tau_report_table(const inv::InvariantReport& rep, const inv::BoundConstants& c)
{
    std::ostringstream os;
    os << "D               " << rep.D.get_str() << (rep.degenerate_D ? "  (degenerate)" : "") << '\n';
    os << "Delta           " << primes_line(rep.Delta) << '\n';
    os << "delta           " << primes_line(rep.delta) << '\n';
    for (const auto& [p, pd] : rep.primes) {
        os << "  p=" << p.get_str() << "  index=" << pd.index.get_str() << "  I=" << rat_str(pd.I)
           << "  order=" << pd.order << "  t_depth=" << pd.t_depth
           << (pd.in_delta ? "  [w-defect]" : "") << '\n';
    }
    os << "tau             " << rat_str(rep.tau) << '\n';
    os << "w_min u         ";
    for (const Rat& q : rep.w_min.u)
        os << rat_str(q) << ' ';
    os << '\n';
    os << "w_min v         ";
    for (const Rat& q : rep.w_min.v)
        os << rat_str(q) << ' ';
    os << '\n';
    os << "constants       b=" << rat_str(c.b) << " cN=" << rat_str(c.c_N) << " c0=" << rat_str(c.c0)
       << " N=" << c.N << '\n';
    return os.str();
}

json bounds_report_json(const inv::LowerBoundResult& lb, const inv::UpperBoundResult& ub,
                        const inv::BoundConstants& c)
{
    json out;
    out["command"] = "bounds";
    out["lower_bound"] = format_bound(lb.value);
    out["degenerate_D"] = lb.degenerate;
    out["upper_bound"] = format_bound(ub.value);
    out["upper_bound_exact"] = rat_str(ub.exact);
    out["class_number"] = int_str(ub.class_number);
    out["order_w"] = int_str(ub.order_w);
    out["d_exponent"] = std::to_string(ub.d_exponent);
    out["constants"] = constants_json(c);
    return out;
}

std::string bounds_report_table(const inv::LowerBoundResult& lb, const inv::UpperBoundResult& ub,
                                const inv::BoundConstants& c)
{
    std::ostringstream os;
    os << "lower_bound     " << format_bound(lb.value)
       << (lb.degenerate ? "  (degenerate: D = 1)" : "") << '\n';
    os << "upper_bound     " << format_bound(ub.value) << "  (exact " << rat_str(ub.exact) << ")\n";
    os << "class_number    " << ub.class_number.get_str() << '\n';
    os << "order_w         " << ub.order_w.get_str() << '\n';
    os << "d_exponent      " << ub.d_exponent << '\n';
    os << "constants       b=" << rat_str(c.b) << " cN=" << rat_str(c.c_N) << " c0=" << rat_str(c.c0)
       << " N=" << c.N << '\n';
    return os.str();
}

json defects_report_json(const inv::InvariantReport& rep)
{
    json out;
    out["command"] = "defects";
    out["Delta"] = primes_list_json(rep.Delta);
    out["delta"] = primes_list_json(rep.delta);
    out["primes"] = primes_json(rep);
    return out;
}

std::string defects_report_table(const inv::InvariantReport& rep)
{
    std::ostringstream os;
    os << "Delta           " << primes_line(rep.Delta) << '\n';
    os << "delta           " << primes_line(rep.delta) << '\n';
    for (const auto& [p, pd] : rep.primes) {
        os << "  p=" << p.get_str() << "  index=" << pd.index.get_str() << "  I=" << rat_str(pd.I)
           << "  order=" << pd.order << "  t_depth=" << pd.t_depth
           << (pd.in_delta ? "  [w-defect]" : "") << '\n';
    }
    return os.str();
}

json classify_report_json(const inv::ClassifyResult& res, const Rat& threshold)
{
    json out;
    out["command"] = "classify";
    out["threshold"] = rat_str(threshold);
    out["max_tau"] = rat_str(res.max_tau);
    out["bounded"] = res.bounded;
    json items = json::array();
    for (const Rat& t : res.taus)
        items.push_back(json{{"tau", rat_str(t)}});
    out["items"] = items;
    json classes = json::array();
    for (const inv::ClassRep& c : res.classes)
        classes.push_back(json{{"signature", c.signature}, {"w", qvec_json(c.w_class)}});
    out["classes"] = classes;
    return out;
}

std::string classify_report_table(const inv::ClassifyResult& res, const Rat& threshold)
{
    std::ostringstream os;
    os << "verdict         " << (res.bounded ? "BOUNDED" : "UNBOUNDED") << "  (threshold "
       << rat_str(threshold) << ")\n";
    os << "max_tau         " << rat_str(res.max_tau) << '\n';
    os << "items           " << res.taus.size() << '\n';
    for (std::size_t i = 0; i < res.taus.size(); ++i)
        os << "  item " << i << "  tau=" << rat_str(res.taus[i]) << '\n';
    os << "classes         " << res.classes.size() << '\n';
    for (const inv::ClassRep& c : res.classes) {
        os << "  " << c.signature << "  w=[";
        for (std::size_t i = 0; i < c.w_class.size(); ++i) {
            if (i)
                os << ',';
            os << rat_str(c.w_class[i]);
        }
        os << "]\n";
    }
    return os.str();
}

json level_fragment_json(const inv::LevelSpec& level)
{
    json out;
    out["command"] = "intersect";
    json exceptions = json::array();
    for (const auto& [p, ex] : level.exceptions()) {
        json e;
        e["p"] = int_str(p);
        e["t_depth"] = std::to_string(ex.t_depth);
        if (ex.w_lattice) {
            json basis = json::array();
            for (std::size_t j = 0; j < ex.w_lattice->dim(); ++j)
                for (std::size_t i = 0; i < ex.w_lattice->dim(); ++i)
                    basis.push_back(rat_str(ex.w_lattice->basis().at(i, j)));
            e["w_lattice"] = basis;
        }
        exceptions.push_back(e);
    }
    out["exceptions"] = exceptions;
    return out;
}

std::string level_fragment_text(const inv::LevelSpec& level)
{
    std::ostringstream os;
    for (const auto& [p, ex] : level.exceptions()) {
        if (ex.t_depth > 0)
            os << "level depth " << p.get_str() << ' ' << ex.t_depth << '\n';
        if (ex.w_lattice) {
            os << "level lattice " << p.get_str();
            for (std::size_t j = 0; j < ex.w_lattice->dim(); ++j)
                for (std::size_t i = 0; i < ex.w_lattice->dim(); ++i)
                    os << ' ' << rat_str(ex.w_lattice->basis().at(i, j));
            os << '\n';
        }
    }
    return os.str();
}

json oracle_report_json(const std::vector<OracleCheck>& checks)
{
    json out;
    out["command"] = "oracle";
    bool all = true;
    json arr = json::array();
    for (const OracleCheck& c : checks) {
        arr.push_back(json{{"name", c.name},
                           {"expected", c.expected},
                           {"actual", c.actual},
                           {"pass", c.pass}});
        all = all && c.pass;
    }
    out["checks"] = arr;
    out["pass"] = all;
    return out;
}

std::string oracle_report_table(const std::vector<OracleCheck>& checks)
{
    std::ostringstream os;
    bool all = true;
    for (const OracleCheck& c : checks) {
        os << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << "  expected=" << c.expected
           << "  actual=" << c.actual << '\n';
        all = all && c.pass;
    }
    os << (all ? "ALL CHECKS PASSED" : "CHECK FAILURES PRESENT") << '\n';
    return os.str();
}

std::string render_json(const json& j)
{
    return j.dump(2) + "\n";
}

} // namespace testinv::cli
