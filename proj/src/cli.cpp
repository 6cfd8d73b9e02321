#include "testinv/cli.hpp"

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "testinv/errors.hpp"
#include "testinv/instance.hpp"
#include "testinv/invariants.hpp"
#include "testinv/localtori.hpp"
#include "testinv/oracles.hpp"
#include "testinv/report_io.hpp"

namespace testinv::cli {

namespace {

struct CommonOptions {
    std::string format = "table";
    std::string constants_spec;
    std::string cache_path;
    int precision_max = -1;
};

void apply_constants_spec(inv::BoundConstants& c, const std::string& spec)
{
    if (spec.empty())
        return;
    std::istringstream is(spec);
    std::string item;
    while (std::getline(is, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw ParseError("constants need key=value pairs: '" + item + "'");
        std::string key = item.substr(0, eq);
        std::string val = item.substr(eq + 1);
        if (key == "b")
            c.b = parse_rational(val);
        else if (key == "cN")
            c.c_N = parse_rational(val);
        else if (key == "c0")
            c.c0 = parse_rational(val);
        else if (key == "N")
            c.N = to_ulong(parse_integer(val));
        else
            throw ParseError("unknown constant '" + key + "'");
    }
    c.validate();
}

struct CacheSession {
    fields::FieldCache cache;
    std::string path;

    explicit CacheSession(const std::string& p) : path(p)
    {
        if (!path.empty())
            cache.load(path);
    }
    fields::FieldCache* get() { return path.empty() ? nullptr : &cache; }
    void flush()
    {
        if (!path.empty())
            cache.save(path);
    }
};

OutputFormat parse_format(const std::string& fmt)
{
    if (fmt == "table")
        return OutputFormat::table;
    if (fmt == "json")
        return OutputFormat::json;
    throw ParseError("unknown format '" + fmt + "'");
}

void emit(std::ostream& os, OutputFormat fmt, const nlohmann::json& j, const std::string& table)
{
    if (fmt == OutputFormat::json)
        os << render_json(j);
    else
        os << table;
}

int cmd_tau(const std::string& path, const CommonOptions& opt)
{
    InstanceData inst = parse_instance_file(path);
    apply_constants_spec(inst.constants, opt.constants_spec);
    CacheSession cache(opt.cache_path);
    inv::InvariantReport rep = inv::test_invariant(inst.datum, inst.level, inst.constants, cache.get());
    cache.flush();
    emit(std::cout, parse_format(opt.format), tau_report_json(rep, inst.constants),
         tau_report_table(rep, inst.constants));
    return 0;
}

int cmd_bounds(const std::string& path, const CommonOptions& opt)
{
    InstanceData inst = parse_instance_file(path);
    apply_constants_spec(inst.constants, opt.constants_spec);
    CacheSession cache(opt.cache_path);
    inv::LowerBoundResult lb = inv::lower_bound(inst.datum, inst.level, inst.constants, cache.get());
    inv::UpperBoundResult ub = inv::upper_bound(inst.datum, inst.level, inst.constants, cache.get());
    cache.flush();
    emit(std::cout, parse_format(opt.format), bounds_report_json(lb, ub, inst.constants),
         bounds_report_table(lb, ub, inst.constants));
    return 0;
}

int cmd_defects(const std::string& path, const CommonOptions& opt)
{
    InstanceData inst = parse_instance_file(path);
    apply_constants_spec(inst.constants, opt.constants_spec);
    CacheSession cache(opt.cache_path);
    inv::InvariantReport rep = inv::defect_report(inst.datum, inst.level, inst.constants, cache.get());
    cache.flush();
    emit(std::cout, parse_format(opt.format), defects_report_json(rep), defects_report_table(rep));
    return 0;
}

int cmd_classify(const std::string& path, const std::string& threshold, const CommonOptions& opt)
{
    Rat thr = parse_rational(threshold);
    std::vector<std::pair<inv::SubvarietyDatum, inv::LevelSpec>> items;
    inv::BoundConstants constants;
    bool first = true;
    for (const std::string& inst_path : read_list_file(path)) {
        InstanceData inst = parse_instance_file(inst_path);
        apply_constants_spec(inst.constants, opt.constants_spec);
        if (first) {
            constants = inst.constants;
            first = false;
        }
        items.emplace_back(inst.datum, inst.level);
    }
    CacheSession cache(opt.cache_path);
    inv::ClassifyResult res = inv::classify_sequence(items, thr, constants, cache.get(), true);
    cache.flush();
    emit(std::cout, parse_format(opt.format), classify_report_json(res, thr),
         classify_report_table(res, thr));
    return 0;
}

int cmd_intersect(const std::string& path, const CommonOptions& opt)
{
    std::vector<exactalg::QVec> translates;
    bool first = true;
    inv::LevelSpec base;
    for (const std::string& inst_path : read_list_file(path)) {
        InstanceData inst = parse_instance_file(inst_path);
        if (first) {
            base = inst.level;
            first = false;
        }
        translates.push_back(heis::flatten(inst.datum.w));
    }
    if (first)
        throw ParseError("intersect needs at least one instance");
    inv::LevelSpec merged = inv::intersect_levels(base, translates);
    emit(std::cout, parse_format(opt.format), level_fragment_json(merged),
         level_fragment_text(merged));
    return 0;
}

int cmd_oracle(const CommonOptions& opt)
{
    std::vector<OracleCheck> checks;
    auto add = [&](const std::string& name, const std::string& expected, const std::string& actual) {
        checks.push_back(OracleCheck{name, expected, actual, expected == actual});
    };

    for (long d : {-3L, -4L, -7L, -8L, -11L, -15L, -20L, -23L, -47L, -71L}) {
        Int lib = fields::quadratic_class_number(Int(d));
        long brute = oracles::reduced_form_count_brute(d);
        add("class_number d=" + std::to_string(d), std::to_string(brute), lib.get_str());
    }
    for (unsigned long n : {3UL, 4UL, 5UL, 7UL, 8UL, 9UL, 11UL, 12UL}) {
        Int lib = fields::abelian_field_discriminant(fields::AbelianFieldSpec::cyclotomic(n));
        Int res = fields::cyclotomic_poly_disc_oracle(n);
        add("cyclotomic_disc n=" + std::to_string(n), res.get_str(), lib.get_str());
    }
    {
        struct ClosureCase {
            const char* name;
            localtori::LocalFieldFactor factor;
            long p;
            unsigned k;
        };
        std::vector<ClosureCase> cases{
            {"unit_closure Q p=5 k=2", localtori::LocalFieldFactor::rational(), 5, 2},
            {"unit_closure Q p=2 k=3", localtori::LocalFieldFactor::rational(), 2, 3},
            {"unit_closure Q(i) p=3 k=2",
             localtori::LocalFieldFactor::from_field(fields::AbelianFieldSpec::quadratic(-4)), 3, 2},
            {"unit_closure Q(sqrt-3) p=2 k=2",
             localtori::LocalFieldFactor::from_field(fields::AbelianFieldSpec::quadratic(-3)), 2, 2},
        };
        for (const ClosureCase& c : cases) {
            localtori::LocalUnitGroup ug = localtori::unit_group_generators(c.factor, Int(c.p), c.k);
            Int closure = localtori::generator_closure_order(ug);
            Int exhaustive = oracles::unit_count_exhaustive(Int(c.p), c.k, c.factor.min_poly());
            add(std::string(c.name) + " closure-vs-exhaustive", exhaustive.get_str(), closure.get_str());
            add(std::string(c.name) + " closure-vs-formula", ug.order.get_str(), closure.get_str());
        }
    }
    for (long d : {2L, 3L, 5L}) {
        fields::PellSolution s = fields::pell_fundamental(Int(d));
        auto [bx, by] = oracles::pell_brute(d);
        add("pell d=" + std::to_string(d), bx.get_str() + "," + by.get_str(),
            s.x.get_str() + "," + s.y.get_str());
    }

    emit(std::cout, parse_format(opt.format), oracle_report_json(checks),
         oracle_report_table(checks));
    for (const OracleCheck& c : checks)
        if (!c.pass)
            return 1;
    return 0;
}

} // namespace

int run(int argc, char** argv)
{
    CLI::App app{"test-invariant and Galois-orbit bound calculator for explicit torus data"};
    app.require_subcommand(1);

    CommonOptions opt;
    app.add_option("--format", opt.format, "output format: table|json")->capture_default_str();
    app.add_option("--constants", opt.constants_spec, "override constants, e.g. b=1,cN=1,c0=1,N=2");
    app.add_option("--cache", opt.cache_path, "path of the persisted field-data cache");
    app.add_option("--precision-max", opt.precision_max,
                   "extra precision steps allowed in stabilization loops");

    std::string instance_path, list_path, threshold;

    CLI::App* tau = app.add_subcommand("tau", "evaluate the test invariant of one instance");
    tau->add_option("instance", instance_path, "instance file")->required();

    CLI::App* bounds = app.add_subcommand("bounds", "lower and upper Galois-orbit bound values");
    bounds->add_option("instance", instance_path, "instance file")->required();

    CLI::App* defects = app.add_subcommand("defects", "defect primes and per-prime indices");
    defects->add_option("instance", instance_path, "instance file")->required();

    CLI::App* classify = app.add_subcommand("classify", "boundedness of a finite family");
    classify->add_option("list", list_path, "list file of instances")->required();
    classify->add_option("--threshold", threshold, "boundedness threshold (rational)")->required();

    CLI::App* intersect = app.add_subcommand("intersect", "intersect the level over a w-list");
    intersect->add_option("list", list_path, "list file of instances")->required();

    app.add_subcommand("oracle", "run the built-in brute-force cross-checks");

    for (CLI::App* sub : app.get_subcommands({}))
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (opt.precision_max >= 0)
            localtori::set_precision_margin(static_cast<unsigned>(opt.precision_max));
        if (tau->parsed())
            return cmd_tau(instance_path, opt);
        if (bounds->parsed())
            return cmd_bounds(instance_path, opt);
        if (defects->parsed())
            return cmd_defects(instance_path, opt);
        if (classify->parsed())
            return cmd_classify(list_path, threshold, opt);
        if (intersect->parsed())
            return cmd_intersect(list_path, opt);
        return cmd_oracle(opt);
    } catch (const PrecisionNotStabilized& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const Unsupported& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace testinv::cli
