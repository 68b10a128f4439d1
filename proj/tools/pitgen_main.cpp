#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "pitgen/pit.hpp"
#include "pitgen/witness.hpp"

using namespace pitgen;

namespace {

// flag/value problems the user can fix; mapped to exit code 2
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr const char* kClassKinds = "sparse, spsk, smesp, occur, commroabp, roabp";
constexpr const char* kGenKinds = "rc, ssv, sssv, trdeg, bms, asss, fs";

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

std::uint64_t parse_u64(const std::string& s, const std::string& what)
{
    try {
        std::size_t used = 0;
        std::uint64_t v = std::stoull(s, &used);
        if (used != s.size()) {
            throw std::invalid_argument(s);
        }
        return v;
    } catch (const std::exception&) {
        throw UsageError("cannot parse '" + s + "' as a number in " + what);
    }
}

std::vector<std::uint64_t> parse_u64_list(const std::string& s, const std::string& what)
{
    std::vector<std::uint64_t> out;
    if (s.empty()) {
        return out;
    }
    for (const std::string& part : split(s, ',')) {
        out.push_back(parse_u64(part, what));
    }
    return out;
}

struct ParsedName {
    std::string name;
    std::map<std::string, std::uint64_t> kv;

    std::uint64_t require(const std::string& key) const
    {
        auto it = kv.find(key);
        if (it == kv.end()) {
            throw UsageError(name + " needs the parameter '" + key + "'");
        }
        return it->second;
    }
    std::optional<std::uint64_t> get(const std::string& key) const
    {
        auto it = kv.find(key);
        return it == kv.end() ? std::nullopt : std::optional(it->second);
    }
};

// grammar: name:key=value,key=value,...
ParsedName parse_name(const std::string& s, const std::string& what)
{
    ParsedName out;
    std::string rest;
    if (auto colon = s.find(':'); colon == std::string::npos) {
        out.name = s;
    } else {
        out.name = s.substr(0, colon);
        rest = s.substr(colon + 1);
    }
    if (out.name.empty()) {
        throw UsageError(what + " descriptor '" + s + "' is missing a name");
    }
    if (rest.empty()) {
        return out;
    }
    for (const std::string& part : split(rest, ',')) {
        auto eq = part.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw UsageError(what + " parameter '" + part + "' is not key=value");
        }
        out.kv[part.substr(0, eq)] = parse_u64(part.substr(eq + 1), what);
    }
    return out;
}

ClassDescriptor parse_class(const std::string& s)
{
    ParsedName p = parse_name(s, "class");
    if (p.name == "sparse") {
        return SigmaPiClass{ p.require("s"),
                             static_cast<unsigned>(p.get("d").value_or(3)) };
    }
    if (p.name == "spsk") {
        return SigmaKPiSigmaClass{ static_cast<unsigned>(p.require("k")),
                                   static_cast<unsigned>(p.require("d")) };
    }
    if (p.name == "smesp") {
        return SmespClass{ static_cast<unsigned>(p.require("t")),
                           static_cast<unsigned>(p.require("s")) };
    }
    if (p.name == "occur") {
        return OccurKClass{ static_cast<unsigned>(p.require("D")),
                            static_cast<unsigned>(p.require("k")), p.require("s") };
    }
    if (p.name == "commroabp") {
        return CommRoAbpClass{ static_cast<unsigned>(p.require("w")),
                               static_cast<unsigned>(p.require("d")) };
    }
    if (p.name == "roabp") {
        return RoAbpClass{ static_cast<unsigned>(p.require("w")),
                           static_cast<unsigned>(p.require("d")),
                           {} };
    }
    throw UsageError("unknown class '" + p.name + "'; valid kinds: " + kClassKinds);
}

GeneratorSpec build_gen(const ParsedName& p, const PrimeField& f)
{
    if (p.name == "rc") {
        GeneratorSpec g = build_rc(static_cast<unsigned>(p.require("n")),
                                   static_cast<unsigned>(p.require("r")), f);
        if (p.get("specialize").value_or(0) != 0) {
            g = rc_specialize_t(g);
        }
        return g;
    }
    if (p.name == "ssv") {
        return build_ssv(static_cast<unsigned>(p.require("n")),
                         static_cast<unsigned>(p.require("k")), f);
    }
    if (p.name == "sssv") {
        return build_sssv(static_cast<unsigned>(p.require("n")),
                          static_cast<unsigned>(p.require("k")), f);
    }
    if (p.name == "trdeg") {
        return build_trdeg(static_cast<unsigned>(p.require("n")),
                           static_cast<unsigned>(p.require("k")), f);
    }
    if (p.name == "bms") {
        return build_bms(static_cast<unsigned>(p.require("n")),
                         static_cast<unsigned>(p.require("r")), p.require("s"), f);
    }
    if (p.name == "asss") {
        return build_asss(static_cast<unsigned>(p.require("n")),
                          static_cast<unsigned>(p.require("k")),
                          static_cast<unsigned>(p.require("D")), p.require("s"), f,
                          p.get("R"));
    }
    if (p.name == "fs") {
        return build_fs(static_cast<unsigned>(p.require("n")),
                        static_cast<unsigned>(p.require("w")),
                        static_cast<unsigned>(p.require("d")), f);
    }
    throw UsageError("unknown generator '" + p.name + "'; valid kinds: " + kGenKinds);
}

GeneratorSpec parse_gen(const std::string& s, const PrimeField& f)
{
    return build_gen(parse_name(s, "generator"), f);
}

// rebuilds the spec a report was produced with, from its serialized form
GeneratorSpec spec_from_json(const nlohmann::json& j, const PrimeField& f)
{
    ParsedName p;
    p.name = j.at("generator").get<std::string>();
    const nlohmann::json& params = j.at("params");
    for (auto it = params.begin(); it != params.end(); ++it) {
        if (it.value().is_number_unsigned()) {
            p.kv[it.key()] = it.value().get<std::uint64_t>();
        }
    }
    if (p.name == "asss" && !j.value("heuristic", false)) {
        p.kv.erase("R"); // only an override R is a build parameter
    }
    if (p.name == "rc" && params.contains("specialized_t")) {
        p.kv["specialize"] = 1;
    }
    GeneratorSpec g = build_gen(p, f);
    if (p.name == "fs" && params.contains("order")) {
        g = order_variants(g, params["order"].get<std::vector<unsigned>>());
    }
    return g;
}

struct FieldBox {
    std::optional<PrimeField> storage; // engaged for non-default primes
    const PrimeField* field = &PrimeField::goldilocks();

    void configure(std::uint64_t prime, const std::string& factors_csv)
    {
        if (prime == 0 || prime == PrimeField::goldilocks().modulus()) {
            if (prime == 0 && !factors_csv.empty()) {
                throw UsageError("--field-factors needs --field-prime");
            }
            return;
        }
        if (factors_csv.empty()) {
            throw UsageError("--field-prime " + std::to_string(prime)
                             + " needs --field-factors (prime factors of p-1, "
                               "with multiplicity, comma separated)");
        }
        try {
            storage.emplace(prime, parse_u64_list(factors_csv, "--field-factors"));
        } catch (const std::invalid_argument& e) {
            throw UsageError(std::string("bad field: ") + e.what());
        }
        field = &*storage;
    }

    void configure_from_json(const nlohmann::json& field_json)
    {
        std::uint64_t p = field_json.at("p").get<std::uint64_t>();
        if (p == PrimeField::goldilocks().modulus()) {
            return;
        }
        if (!field_json.contains("factors")) {
            throw UsageError("serialized field lacks its factorization; pass "
                             "--field-prime/--field-factors instead");
        }
        storage.emplace(p, field_json["factors"].get<std::vector<std::uint64_t>>());
        field = &*storage;
    }
};

nlohmann::json load_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot open " + path);
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw UsageError(path + ": " + e.what());
    }
}

void write_text(const std::string& path, const std::string& content)
{
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << content;
}

void emit_report(const ExperimentReport& rep, const std::string& format,
                 const std::string& path)
{
    if (format == "csv") {
        write_text(path, rep.to_csv());
    } else if (format == "json") {
        write_text(path, rep.to_json().dump(2) + "\n");
    } else {
        throw UsageError("unknown format '" + format + "'; use json or csv");
    }
}

int cmd_gen(const std::string& gen_str, const FieldBox& fb, const std::string& alpha_csv,
            const std::string& out, const std::string& format)
{
    GeneratorSpec spec = parse_gen(gen_str, *fb.field);
    nlohmann::ordered_json j;
    j["spec"] = spec.to_json();
    if (!alpha_csv.empty()) {
        std::vector<std::uint64_t> alpha = parse_u64_list(alpha_csv, "--alpha");
        j["alpha"] = alpha;
        j["image"] = generator_image(spec, alpha);
    }
    if (format != "json") {
        throw UsageError("gen only emits json");
    }
    write_text(out, j.dump(2) + "\n");
    return 0;
}

int cmd_pit_replay(const std::string& replay_path)
{
    nlohmann::json rep = load_json(replay_path);
    FieldBox fb;
    fb.configure_from_json(rep.at("generator").at("field"));
    GeneratorSpec spec = spec_from_json(rep.at("generator"), *fb.field);

    HitCheckMode mode = rep.at("mode").get<std::string>() == "symbolic"
                            ? HitCheckMode::symbolic_mode()
                            : HitCheckMode::randomized(
                                  rep.value("evals_per_trial", 8u));
    std::size_t replayed = 0, reproduced = 0;
    for (const auto& row : rep.at("rows")) {
        if (!row.contains("member")) {
            continue; // hits carry no serialization; nothing to replay
        }
        ClassMember member = member_from_json(row["member"], *fb.field);
        HitVerdict v = hit_check(member, spec, mode,
                                 row.at("check_seed").get<std::uint64_t>());
        ++replayed;
        if (hit_outcome_name(v.outcome) == row.at("outcome").get<std::string>()) {
            ++reproduced;
        }
    }
    std::cout << "replayed " << replayed << " failure rows, reproduced " << reproduced
              << "\n";
    return replayed == reproduced ? 0 : 1;
}

int cmd_pit(const std::string& class_str, const std::string& gen_str, const FieldBox& fb,
            unsigned trials, std::uint64_t seed, const std::string& mode_str,
            unsigned evals, const std::string& out, const std::string& format)
{
    ClassDescriptor cls = parse_class(class_str);
    GeneratorSpec spec = parse_gen(gen_str, *fb.field);
    ExperimentOptions opt;
    if (mode_str == "symbolic") {
        opt.symbolic = true;
    } else if (mode_str == "randomized") {
        opt.symbolic = false;
        opt.evals_per_trial = evals;
    } else {
        throw UsageError("unknown mode '" + mode_str + "'; use symbolic or randomized");
    }
    ExperimentReport rep = run_experiment(cls, spec, trials, seed, opt);
    emit_report(rep, format, out);
    return 0;
}

int cmd_expand(const std::string& circuit_path, const FieldBox& fb, const std::string& out)
{
    nlohmann::json j = load_json(circuit_path);
    FieldBox embedded;
    if (fb.field == &PrimeField::goldilocks() && j.contains("field")) {
        embedded.configure_from_json(j["field"]);
    }
    const PrimeField& f =
        fb.field != &PrimeField::goldilocks() ? *fb.field : *embedded.field;
    ClassMember m = member_from_json(j, f);
    SparsePoly p = member_expand(m);
    const ArenaPtr& arena = member_arena(m);

    nlohmann::ordered_json res;
    res["polynomial"] = p.to_string();
    res["term_count"] = p.term_count();
    res["degree"] = p.degree();
    nlohmann::ordered_json terms = nlohmann::ordered_json::array();
    for (const auto& [mono, coeff] : p.terms()) {
        nlohmann::ordered_json t;
        t["coeff"] = coeff;
        nlohmann::ordered_json powers = nlohmann::ordered_json::object();
        for (const auto& [v, e] : mono.powers) {
            powers[arena->name(v)] = e;
        }
        t["powers"] = std::move(powers);
        terms.push_back(std::move(t));
    }
    res["terms"] = std::move(terms);
    write_text(out, res.dump(2) + "\n");
    return 0;
}

int cmd_verify_succinct(const std::string& gen_str, const FieldBox& fb,
                        const std::string& alpha_csv, std::uint64_t seed, unsigned count,
                        const std::string& out)
{
    GeneratorSpec spec = parse_gen(gen_str, *fb.field);
    std::vector<std::vector<std::uint64_t>> alphas;
    if (!alpha_csv.empty()) {
        std::vector<std::uint64_t> alpha = parse_u64_list(alpha_csv, "--alpha");
        if (alpha.size() != spec.seed_block.size()) {
            throw UsageError("--alpha needs " + std::to_string(spec.seed_block.size())
                             + " values for this spec");
        }
        alphas.push_back(std::move(alpha));
    } else {
        Rng rng(seed);
        for (unsigned i = 0; i < count; ++i) {
            std::vector<std::uint64_t> alpha(spec.seed_block.size());
            for (auto& a : alpha) {
                a = fb.field->random_element(rng);
            }
            alphas.push_back(std::move(alpha));
        }
    }

    bool all_ok = true;
    nlohmann::ordered_json artifacts = nlohmann::ordered_json::array();
    for (const auto& alpha : alphas) {
        WitnessArtifact a = spec.kind == GenKind::fs ? witness_fs_roabp(spec, alpha)
                                                     : witness_circuit(spec, alpha);
        // round-trip through JSON before verifying
        nlohmann::ordered_json serialized = a.to_json();
        WitnessArtifact back{ a.kind,
                              member_from_json(serialized["artifact"], *fb.field),
                              a.declared_size, spec, alpha };
        bool ok = witness_verify(back);
        all_ok = all_ok && ok;
        serialized["verified"] = ok;
        artifacts.push_back(std::move(serialized));
    }
    if (!out.empty()) {
        nlohmann::ordered_json j;
        j["artifacts"] = std::move(artifacts);
        write_text(out, j.dump(2) + "\n");
    }
    std::cout << (all_ok ? "verified" : "MISMATCH") << " (" << alphas.size()
              << " witnesses)\n";
    return all_ok ? 0 : 1;
}

int cmd_audit(const std::string& dist_path, const std::string& gen_str, const FieldBox& fb,
              unsigned samples, std::uint64_t seed, const std::string& out)
{
    nlohmann::json dj = load_json(dist_path);
    FieldBox dist_fb;
    if (fb.field == &PrimeField::goldilocks() && dj.contains("field")) {
        dist_fb.configure_from_json(dj["field"]);
    }
    const PrimeField& f = fb.field != &PrimeField::goldilocks()
                              ? *fb.field       // explicit flags win
                              : *dist_fb.field; // else the file's embedded field
    ClassMember d = member_from_json(dj, f);
    GeneratorSpec spec = parse_gen(gen_str, f);

    Rng rng(seed);
    std::vector<std::vector<std::uint64_t>> images;
    for (unsigned i = 0; i < samples; ++i) {
        std::vector<std::uint64_t> alpha(spec.seed_block.size());
        for (auto& a : alpha) {
            a = f.random_element(rng);
        }
        images.push_back(generator_image(spec, alpha));
    }
    AuditResult r = natural_proof_audit(d, images);
    nlohmann::ordered_json j;
    j["is_distinguisher"] = r.is_distinguisher;
    j["samples"] = samples;
    if (r.hit_index) {
        j["hit_index"] = *r.hit_index;
        j["hit_sample"] = r.hit_sample;
        j["hit_value"] = r.hit_value;
    }
    write_text(out, j.dump(2) + "\n");
    return 0;
}

int cmd_hitset(const std::string& gen_str, const FieldBox& fb, std::uint64_t degree,
               const std::string& out, const std::string& format)
{
    GeneratorSpec spec = parse_gen(gen_str, *fb.field);
    std::vector<std::vector<std::uint64_t>> points =
        interpolation_hitting_set(spec, degree);
    if (format == "csv") {
        std::ostringstream s;
        for (std::size_t c = 1; c <= spec.coord_count(); ++c) {
            s << (c > 1 ? "," : "") << "c" << c;
        }
        s << "\n";
        for (const auto& v : points) {
            for (std::size_t i = 0; i < v.size(); ++i) {
                s << (i > 0 ? "," : "") << v[i];
            }
            s << "\n";
        }
        write_text(out, s.str());
        return 0;
    }
    nlohmann::ordered_json j;
    j["spec"] = spec.to_json();
    j["degree_bound"] = degree;
    j["seed_degree"] = generator_seed_degree(spec);
    j["size"] = points.size();
    j["points"] = points;
    write_text(out, j.dump(2) + "\n");
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{ "succinct hitting-set generator toolkit" };
    app.require_subcommand(0, 1);

    std::string class_str, gen_str, alpha_csv, out, format = "json";
    std::string mode_str = "randomized", circuit_path, dist_path, replay_path;
    std::string factors_csv;
    std::uint64_t prime = 0, seed = 0, degree = 0;
    unsigned trials = 100, evals = 8, count = 1, samples = 50;
    bool have_seed = false;

    auto add_field_flags = [&](CLI::App* cmd) {
        cmd->add_option("--field-prime", prime, "field modulus (default goldilocks)");
        cmd->add_option("--field-factors", factors_csv,
                        "prime factors of p-1 with multiplicity, comma separated");
    };
    auto add_seed = [&](CLI::App* cmd, bool required) {
        auto* o = cmd->add_option("--seed", seed, "master seed (no ambient entropy)");
        if (required) {
            o->required();
        }
        o->each([&](const std::string&) { have_seed = true; });
    };

    CLI::App* gen = app.add_subcommand("gen", "emit a generator spec (and image at --alpha)");
    gen->add_option("--gen", gen_str, "kind:key=value,... (" + std::string(kGenKinds) + ")")
        ->required();
    add_field_flags(gen);
    gen->add_option("--alpha", alpha_csv, "seed values, comma separated");
    gen->add_option("--out", out, "output path (default stdout)");
    gen->add_option("--format", format, "json");

    CLI::App* pit = app.add_subcommand("pit", "run a hitting experiment or replay a report");
    pit->add_option("--class", class_str,
                    "kind:key=value,... (" + std::string(kClassKinds) + ")");
    pit->add_option("--gen", gen_str, "generator descriptor");
    add_field_flags(pit);
    pit->add_option("--trials", trials, "number of sampled members");
    add_seed(pit, false);
    pit->add_option("--mode", mode_str, "symbolic | randomized (default)");
    pit->add_option("--evals", evals, "evaluations per randomized trial");
    pit->add_option("--out", out, "output path (default stdout)");
    pit->add_option("--format", format, "json | csv");
    pit->add_option("--replay", replay_path, "re-run the failure rows of a report");

    CLI::App* expand = app.add_subcommand("expand", "expand a serialized circuit or roABP");
    expand->add_option("--circuit", circuit_path, "circuit/roABP JSON file")->required();
    add_field_flags(expand);
    expand->add_option("--out", out, "output path (default stdout)");

    CLI::App* verify = app.add_subcommand("verify-succinct",
                                          "build, round-trip and verify witnesses");
    verify->add_option("--gen", gen_str, "generator descriptor")->required();
    add_field_flags(verify);
    verify->add_option("--alpha", alpha_csv, "explicit seed values");
    add_seed(verify, false);
    verify->add_option("--count", count, "random witnesses to verify (with --seed)");
    verify->add_option("--out", out, "write the artifacts as JSON");

    CLI::App* audit = app.add_subcommand("audit", "test a distinguisher against images");
    audit->add_option("--distinguisher", dist_path, "circuit/roABP JSON file")->required();
    audit->add_option("--gen", gen_str, "generator descriptor")->required();
    add_field_flags(audit);
    audit->add_option("--samples", samples, "number of sampled images");
    add_seed(audit, true);
    audit->add_option("--out", out, "output path (default stdout)");

    CLI::App* hitset = app.add_subcommand("hitset", "emit the interpolation grid");
    hitset->add_option("--gen", gen_str, "generator descriptor")->required();
    add_field_flags(hitset);
    hitset->add_option("--degree", degree, "degree bound Delta")->required();
    hitset->add_option("--out", out, "output path (default stdout)");
    hitset->add_option("--format", format, "json | csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // prints help, exit 0
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        FieldBox fb;
        fb.configure(prime, factors_csv);
        if (gen->parsed()) {
            return cmd_gen(gen_str, fb, alpha_csv, out, format);
        }
        if (pit->parsed()) {
            if (!replay_path.empty()) {
                return cmd_pit_replay(replay_path);
            }
            if (class_str.empty() || gen_str.empty()) {
                throw UsageError("pit needs --class and --gen (or --replay)");
            }
            if (!have_seed) {
                throw UsageError("pit needs --seed; there is no ambient entropy");
            }
            return cmd_pit(class_str, gen_str, fb, trials, seed, mode_str, evals, out,
                           format);
        }
        if (expand->parsed()) {
            return cmd_expand(circuit_path, fb, out);
        }
        if (verify->parsed()) {
            if (alpha_csv.empty() && !have_seed) {
                throw UsageError("verify-succinct needs --alpha or --seed");
            }
            return cmd_verify_succinct(gen_str, fb, alpha_csv, seed, count, out);
        }
        if (audit->parsed()) {
            return cmd_audit(dist_path, gen_str, fb, samples, seed, out);
        }
        if (hitset->parsed()) {
            return cmd_hitset(gen_str, fb, degree, out, format);
        }
        std::cerr << app.help();
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
