// entbound: batch front end. Every command prints a JSON run report on
// stdout and writes result files where asked.

#include <CLI11.hpp>
#include <boost/crc.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <entbound/auxgen.hpp>
#include <entbound/io.hpp>
#include <entbound/netmodel.hpp>
#include <entbound/partitions.hpp>
#include <entbound/polycone.hpp>
#include <entbound/probdist.hpp>
#include <entbound/solve.hpp>

using namespace entbound;
using io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitResource = 3;
constexpr int kExitInfeasible = 4;

struct Report {
    std::vector<std::string> command;
    json inputs = json::object();
    json outcome = json::object();
    std::vector<std::string> warnings;
    bool timings = false;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void input(const std::string& path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw Error(ErrorKind::ParseError, "cannot open " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        const auto bytes = ss.str();
        boost::crc_32_type crc;
        crc.process_bytes(bytes.data(), bytes.size());
        char buf[16];
        std::snprintf(buf, sizeof buf, "%08x", crc.checksum());
        inputs[path] = {{"crc32", buf}, {"bytes", bytes.size()}};
    }

    json to_json() const
    {
        json j{{"command", command}, {"inputs", inputs}, {"outcome", outcome}, {"warnings", warnings}};
        if (timings)
            j["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return j;
    }
};

struct Common {
    std::uint64_t seed = 0;
    bool strict = false;
    bool timings = false;
    std::string output;
};

void emit(const std::string& path, const json& j, Report& rep, const char* key)
{
    if (path.empty())
        return;
    io::write_json_file(path, j);
    rep.outcome[key] = path;
}

EntropyMeasure measure_from(const std::string& name, double param)
{
    if (name == "shannon")
        return EntropyMeasure::shannon();
    if (name == "renyi")
        return EntropyMeasure::renyi(param);
    if (name == "tsallis")
        return EntropyMeasure::tsallis(param);
    throw Error(ErrorKind::InvalidMeasure, "unknown measure " + name);
}

CapacityTuple parse_tuple(const std::string& text)
{
    CapacityTuple t;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        t.push_back(Rational::parse(item));
    if (t.empty())
        throw Error(ErrorKind::ParseError, "empty tuple");
    return t;
}

JointDistribution load_dist(const std::string& path, Report& rep)
{
    rep.input(path);
    return io::distribution_from_json(io::read_json_file(path));
}

// ---------------------------------------------------------------- entropy

struct EntropyArgs {
    std::string dist;
    std::string measure = "shannon";
    double param = 2;
    std::vector<std::string> ground;
};

int cmd_entropy(const EntropyArgs& a, const Common& c, Report& rep)
{
    auto d = load_dist(a.dist, rep);
    auto m = measure_from(a.measure, a.param);
    auto ground = a.ground.empty() ? d.variables() : a.ground;
    auto h = entropy_vector(d, ground, m);
    json out;
    if (m.kind() == EntropyMeasure::Kind::Shannon) {
        bool exact = false;
        auto hr = rational_entropy_vector(d, ground, exact);
        if (exact) {
            out = io::entropy_vector_to_json(h, m, &hr);
        } else {
            out = io::entropy_vector_to_json(h, m);
            rep.warnings.push_back("entropies are not dyadic; no exact values written");
        }
        rep.outcome["exact"] = exact;
    } else {
        out = io::entropy_vector_to_json(h, m);
        rep.outcome["exact"] = false;
    }
    rep.outcome["status"] = "OK";
    rep.outcome["ground"] = ground;
    rep.outcome["measure"] = m.name();
    if (c.output.empty())
        rep.outcome["vector"] = out;
    else
        emit(c.output, out, rep, "vector_file");
    return kExitOk;
}

// ---------------------------------------------------------------- bound

struct BoundArgs {
    std::string network, dist, entropy, variant = "basic", aux_file, partitions_file;
    std::string tuple, min_scale, witness_dist;
    std::string emit_lp, emit_witness, emit_certificate;
};

int cmd_bound(const BoundArgs& a, const Common& c, Report& rep)
{
    rep.input(a.network);
    Network net(io::network_from_json(io::read_json_file(a.network)));

    if (a.dist.empty() == a.entropy.empty())
        throw Error(ErrorKind::ParseError, "give exactly one of --dist and --entropy");
    std::optional<JointDistribution> sources;
    SourceEntropySpec es;
    bool table_approx = false;
    if (!a.dist.empty()) {
        sources = load_dist(a.dist, rep);
        es = *sources;
    } else {
        rep.input(a.entropy);
        es = io::entropy_table_from_json(io::read_json_file(a.entropy), table_approx);
    }

    BoundVariant v;
    if (a.variant == "basic") {
        v = BoundVariant::basic();
    } else if (a.variant == "auxiliary") {
        if (a.aux_file.empty())
            throw Error(ErrorKind::ParseError, "--variant auxiliary needs --aux-file");
        v = BoundVariant::with_auxiliaries(load_dist(a.aux_file, rep));
    } else if (a.variant == "partition") {
        if (a.partitions_file.empty() || !sources)
            throw Error(ErrorKind::ParseError, "--variant partition needs --partitions-file and --dist");
        rep.input(a.partitions_file);
        v = BoundVariant::with_partitions(io::partitions_from_json(io::read_json_file(a.partitions_file), *sources));
    } else {
        throw Error(ErrorKind::ParseError, "unknown variant " + a.variant);
    }

    if (!a.tuple.empty() && !a.min_scale.empty())
        throw Error(ErrorKind::ParseError, "--tuple and --min-scale are exclusive");
    const bool scaling = !a.min_scale.empty();
    std::optional<CapacityTuple> tuple;
    if (scaling)
        tuple = parse_tuple(a.min_scale);
    else if (!a.tuple.empty())
        tuple = parse_tuple(a.tuple);

    auto cb = compile_bound(net, es, v, tuple, scaling);
    if (cb.approximate || table_approx)
        rep.warnings.push_back("approximate: rationalized entropies");
    rep.outcome["variant"] = a.variant;
    rep.outcome["edges"] = cb.edge_labels;
    rep.outcome["rows"] = cb.lp.constraints.size();
    rep.outcome["columns"] = cb.lp.num_columns();
    emit(a.emit_lp, io::to_json(cb.lp), rep, "lp_file");

    LpOptions opts;
    opts.seed ^= c.seed;
    auto out = lp_solve(cb.lp, opts);
    rep.outcome["status"] = to_string(out.status);

    if (!a.witness_dist.empty()) {
        if (scaling)
            throw Error(ErrorKind::ParseError, "--witness-dist checks a fixed tuple, not --min-scale");
        auto wd = load_dist(a.witness_dist, rep);
        bool exact = false;
        auto hw = rational_entropy_vector(wd, cb.lp.ground, exact);
        rep.outcome["witness_dist_exact"] = exact;
        rep.outcome["witness_dist_verified"] = exact && cb.lp.extra_columns.empty() && verify_witness(cb.lp, hw);
    }

    if (out.status == LpStatus::Feasible) {
        rep.outcome["witness_verified"] = verify_assignment(cb.lp, out.witness);
        if (scaling && out.optimum) {
            rep.outcome["t"] = out.optimum->str();
            rep.outcome["t_decimal"] = out.optimum->to_double();
            rep.outcome["optimum_verified"] = verify_dual_bound(cb.lp, out.dual, *out.optimum);
        }
        emit(a.emit_witness, io::witness_json(cb.lp, out), rep, "witness_file");
    } else if (out.status == LpStatus::Infeasible) {
        rep.outcome["certificate_verified"] = verify_certificate(cb.lp, out.certificate);
        emit(a.emit_certificate, io::certificate_json(cb.lp, out.certificate), rep, "certificate_file");
    }
    if (!c.output.empty())
        emit(c.output, rep.outcome, rep, "report_file");
    return c.strict && out.status == LpStatus::Infeasible ? kExitInfeasible : kExitOk;
}

// ---------------------------------------------------------------- recover

struct RecoverArgs {
    std::string oracle, dist, compare, export_oracle;
    bool round_trip = false, vector = false, shuffle = false;
    std::string measure = "shannon";
    double param = 2;
};

std::vector<std::string> label_names(const SystemOracle& o)
{
    std::vector<std::string> out;
    for (std::size_t i = 0; i < o.label_count(); ++i)
        out.push_back(o.system().labels()[o.system_label(i)].name());
    return out;
}

RecoveredDistribution run_recovery(const EntropyOracle& o, bool vec, const EntropyMeasure& m)
{
    return vec ? recover_vector(o, m) : recover_scalar(o, m);
}

int cmd_recover(const RecoverArgs& a, const Common& c, Report& rep)
{
    const auto m = measure_from(a.measure, a.param);
    json result;
    if (!a.oracle.empty()) {
        rep.input(a.oracle);
        auto o = io::oracle_from_json(io::read_json_file(a.oracle));
        auto r = run_recovery(o, a.vector, m);
        result = io::to_json(r, o.labels());
    } else {
        if (a.dist.empty())
            throw Error(ErrorKind::ParseError, "give --oracle or --dist");
        auto d = load_dist(a.dist, rep);
        PartitionSystem sys(d);
        std::optional<std::uint64_t> shuffle;
        if (a.shuffle)
            shuffle = c.seed;
        SystemOracle so(sys, m, shuffle, false);
        RecordingOracle rec(so);
        auto r = run_recovery(rec, a.vector, m);
        auto names = label_names(so);
        result = io::to_json(r, names);
        if (!a.export_oracle.empty()) {
            std::vector<std::string> coords;
            for (std::size_t k = 0; k < so.coordinates(); ++k)
                coords.push_back(so.coordinate_name(k));
            emit(a.export_oracle, io::oracle_to_json(sys.support_size(), names, coords, rec.entries()), rep,
                 "oracle_file");
        }
        if (a.round_trip) {
            auto hidden = sys.masses_double();
            bool ok = hidden.size() == r.masses.size();
            double worst = 0;
            for (std::size_t k = 0; ok && k < hidden.size(); ++k)
                worst = std::max(worst, std::abs(hidden[k] - r.masses[k]));
            ok = ok && worst <= 1e-6;
            if (a.vector)
                ok = ok && coordinate_isomorphic(d, r.joint, 1e-6).has_value();
            rep.outcome["round_trip"] = ok;
            rep.outcome["max_mass_error"] = worst;
        }
        if (!a.compare.empty()) {
            auto other = load_dist(a.compare, rep);
            PartitionSystem osys(other);
            SystemOracle oo(osys, m, std::nullopt, true);
            rep.outcome["scalar_consistent"] = check_oracle_consistency(sys, oo, false, c.seed, m);
            rep.outcome["vector_consistent"] = check_oracle_consistency(sys, oo, true, c.seed, m);
            if (a.vector) {
                SystemOracle oo2(osys, m, std::nullopt, false);
                auto r2 = recover_vector(oo2, m);
                rep.outcome["vector_isomorphic"] = coordinate_isomorphic(r.joint, r2.joint, 1e-6).has_value();
            }
        }
    }
    rep.outcome["status"] = "OK";
    rep.outcome["measure"] = m.name();
    if (c.output.empty())
        rep.outcome["recovered"] = result;
    else
        emit(c.output, result, rep, "recovered_file");
    return kExitOk;
}

// ---------------------------------------------------------------- aux

json common_info_json(const CommonInfoResult& r)
{
    json kernel = json::array();
    for (const auto& row : r.kernel)
        kernel.push_back(row);
    return {{"h_k", r.h_k},
            {"h_k_given_x", r.h_k_given_x},
            {"h_k_given_y", r.h_k_given_y},
            {"i_xy_given_k", r.i_xy_given_k},
            {"delta", r.delta},
            {"kernel", kernel},
            {"joint", io::to_json(r.joint)}};
}

struct AuxArgs {
    std::string dist, basis;
    bool keys = false;
    std::size_t k = 2;
    std::string mode = "exhaustive";
    int restarts = 20, steps = 2000, grid = 64;
};

int cmd_gk(const AuxArgs& a, const Common& c, Report& rep)
{
    auto r = gk_common_information(load_dist(a.dist, rep));
    rep.outcome["status"] = "OK";
    rep.outcome["h_k"] = r.h_k;
    emit(c.output, common_info_json(r), rep, "result_file");
    if (c.output.empty())
        rep.outcome["result"] = common_info_json(r);
    return kExitOk;
}

int cmd_lincorr(const AuxArgs& a, const Common& c, Report& rep)
{
    rep.input(a.basis);
    auto b = io::basis_from_json(io::read_json_file(a.basis));
    auto ls = linearly_correlated(b);
    const auto& d = a.keys ? ls.with_keys : ls.sources;
    rep.outcome["status"] = "OK";
    rep.outcome["support"] = d.support_size();
    rep.outcome["uniform_over_subspaces"] = uniform_over_subspaces(d, b.q);
    emit(c.output, io::to_json(d), rep, "distribution_file");
    if (c.output.empty())
        rep.outcome["distribution"] = io::to_json(d);
    return kExitOk;
}

int cmd_delta_star(const AuxArgs& a, const Common& c, Report& rep)
{
    SearchOptions o;
    if (a.mode == "exhaustive")
        o.mode = SearchMode::Exhaustive;
    else if (a.mode == "local")
        o.mode = SearchMode::LocalSearch;
    else
        throw Error(ErrorKind::ParseError, "unknown mode " + a.mode);
    o.seed = c.seed;
    o.restarts = a.restarts;
    o.steps = a.steps;
    o.grid = a.grid;
    auto r = delta_star_search(load_dist(a.dist, rep), a.k, o);
    rep.outcome["status"] = "OK";
    rep.outcome["mode"] = a.mode;
    rep.outcome["seed"] = c.seed;
    rep.outcome["delta"] = r.delta;
    rep.outcome["h_k"] = r.h_k;
    emit(c.output, common_info_json(r), rep, "result_file");
    if (c.output.empty())
        rep.outcome["result"] = common_info_json(r);
    return kExitOk;
}

// ---------------------------------------------------------------- code

struct CodeArgs {
    std::string network, dist, code;
};

int cmd_code(const CodeArgs& a, const Common& c, Report& rep)
{
    rep.input(a.network);
    Network net(io::network_from_json(io::read_json_file(a.network)));
    auto d = load_dist(a.dist, rep);
    rep.input(a.code);
    auto code = io::code_from_json(io::read_json_file(a.code));
    auto r = evaluate_code(net, d, code);
    rep.outcome["status"] = r.success ? "SUCCESS" : "FAILURE";
    auto rj = io::to_json(r);
    rep.outcome["decoders"] = rj["decoders"];
    rep.outcome["edges"] = rj["edges"];
    emit(c.output, rj, rep, "report_file");
    return c.strict && !r.success ? kExitInfeasible : kExitOk;
}

int exit_code_for(const Error& e)
{
    switch (e.kind()) {
    case ErrorKind::GroundSetTooLarge:
    case ErrorKind::SupportTooLarge:
    case ErrorKind::SearchSpaceTooLarge:
    case ErrorKind::NumIterationsExceeded:
        return kExitResource;
    default:
        return kExitValidation;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"entropy-based outer bounds, partition recovery and auxiliary variables"};
    app.require_subcommand(1);
    Common common;
    Report rep;
    for (int i = 1; i < argc; ++i)
        rep.command.push_back(argv[i]);

    auto add_common = [&](CLI::App* s) {
        s->add_option("--seed", common.seed, "seed for every random choice")->default_val(0);
        s->add_flag("--strict", common.strict, "exit 4 when the answer is infeasible or the code fails");
        s->add_flag("--timings", common.timings, "add wall time to the report (breaks byte-identical output)");
        s->add_option("-o,--output", common.output, "result file");
    };

    EntropyArgs ea;
    auto* s_ent = app.add_subcommand("entropy", "entropy vector of a distribution\n"
                                                "  entbound entropy --dist D.json [--measure renyi --param 2]");
    s_ent->add_option("--dist", ea.dist, "distribution file")->required();
    s_ent->add_option("--measure", ea.measure, "shannon | renyi | tsallis");
    s_ent->add_option("--param", ea.param, "order for renyi / tsallis");
    s_ent->add_option("--ground", ea.ground, "variables, in order (default: all)");
    add_common(s_ent);

    BoundArgs ba;
    auto* s_bnd = app.add_subcommand("bound", "outer-bound membership of a capacity tuple\n"
                                              "  entbound bound --network N.json --dist D.json --tuple 1,1,1,1\n"
                                              "  exit 4 with --strict when the tuple is outside the bound");
    s_bnd->add_option("--network", ba.network, "network file")->required();
    s_bnd->add_option("--dist", ba.dist, "source distribution");
    s_bnd->add_option("--entropy", ba.entropy, "source entropy table");
    s_bnd->add_option("--variant", ba.variant, "basic | auxiliary | partition");
    s_bnd->add_option("--aux-file", ba.aux_file, "joint law of sources and auxiliaries");
    s_bnd->add_option("--partitions-file", ba.partitions_file, "partition blocks over the source support");
    s_bnd->add_option("--tuple", ba.tuple, "capacities e.g. 1,1,1/2 (default: network capacities)");
    s_bnd->add_option("--min-scale", ba.min_scale, "direction; reports the least scaling t inside the bound");
    s_bnd->add_option("--witness-dist", ba.witness_dist, "check this distribution's entropy vector against the LP");
    s_bnd->add_option("--emit-lp", ba.emit_lp, "write the LP");
    s_bnd->add_option("--emit-witness", ba.emit_witness, "write the feasible point");
    s_bnd->add_option("--emit-certificate", ba.emit_certificate, "write the Farkas multipliers");
    add_common(s_bnd);

    RecoverArgs ra;
    auto* s_rec = app.add_subcommand("recover", "rebuild a distribution from partition-entropy queries\n"
                                                "  entbound recover --oracle O.json [--vector]\n"
                                                "  entbound recover --dist D.json --round-trip [--shuffle --seed 3]");
    s_rec->add_option("--oracle", ra.oracle, "oracle table file");
    s_rec->add_option("--dist", ra.dist, "distribution to build an oracle from");
    s_rec->add_flag("--round-trip", ra.round_trip, "compare recovered masses with the hidden ones");
    s_rec->add_flag("--vector", ra.vector, "recover coordinates too");
    s_rec->add_flag("--shuffle", ra.shuffle, "shuffle oracle labels with --seed");
    s_rec->add_option("--compare", ra.compare, "second distribution to test for distinguishability");
    s_rec->add_option("--export-oracle", ra.export_oracle, "write the queries recovery used");
    s_rec->add_option("--measure", ra.measure, "shannon | renyi | tsallis");
    s_rec->add_option("--param", ra.param, "order for renyi / tsallis");
    add_common(s_rec);

    AuxArgs aa;
    auto* s_aux = app.add_subcommand("aux", "auxiliary random variables");
    s_aux->require_subcommand(1);
    auto* s_gk = s_aux->add_subcommand("gk", "common information of a pair\n  entbound aux gk --dist XY.json");
    s_gk->add_option("--dist", aa.dist, "two-variable distribution")->required();
    add_common(s_gk);
    auto* s_lc = s_aux->add_subcommand("lincorr", "sources uniform over subspaces\n  entbound aux lincorr --basis B.json");
    s_lc->add_option("--basis", aa.basis, "basis file")->required();
    s_lc->add_flag("--keys", aa.keys, "include the key variables K1..Km");
    add_common(s_lc);
    auto* s_ds = s_aux->add_subcommand("delta-star", "search for an approximately common K\n"
                                                     "  entbound aux delta-star --dist XY.json --k 2 --mode local --seed 1");
    s_ds->add_option("--dist", aa.dist, "two-variable distribution")->required();
    s_ds->add_option("--k", aa.k, "alphabet size of K");
    s_ds->add_option("--mode", aa.mode, "exhaustive | local");
    s_ds->add_option("--restarts", aa.restarts);
    s_ds->add_option("--steps", aa.steps);
    s_ds->add_option("--grid", aa.grid);
    add_common(s_ds);

    CodeArgs ca;
    auto* s_code = app.add_subcommand("code", "run a network code on every source outcome\n"
                                              "  entbound code --network N.json --dist D.json --code C.json");
    s_code->add_option("--network", ca.network)->required();
    s_code->add_option("--dist", ca.dist)->required();
    s_code->add_option("--code", ca.code)->required();
    add_common(s_code);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitValidation;
    }

    int rc = kExitOk;
    try {
        if (s_ent->parsed())
            rc = cmd_entropy(ea, common, rep);
        else if (s_bnd->parsed())
            rc = cmd_bound(ba, common, rep);
        else if (s_rec->parsed())
            rc = cmd_recover(ra, common, rep);
        else if (s_gk->parsed())
            rc = cmd_gk(aa, common, rep);
        else if (s_lc->parsed())
            rc = cmd_lincorr(aa, common, rep);
        else if (s_ds->parsed())
            rc = cmd_delta_star(aa, common, rep);
        else if (s_code->parsed())
            rc = cmd_code(ca, common, rep);
    } catch (const Error& e) {
        rc = exit_code_for(e);
        rep.outcome["status"] = "ERROR";
        rep.outcome["error"] = {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
    }
    rep.timings = common.timings;
    std::cout << rep.to_json().dump(2) << "\n";
    return rc;
}
