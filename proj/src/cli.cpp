#include "catamerge/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "catamerge/acyclicity.hpp"
#include "catamerge/chase.hpp"
#include "catamerge/csv.hpp"
#include "catamerge/integrator.hpp"
#include "catamerge/model_check.hpp"
#include "catamerge/parser.hpp"
#include "catamerge/printer.hpp"
#include "catamerge/query.hpp"

namespace catamerge {

namespace {

namespace fs = std::filesystem;

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kClash = 2;
constexpr int kExhausted = 3;

struct Options
{
    std::vector<std::string> files;
    std::string extension;
    std::vector<std::string> instances;
    std::string out_dir = "out";
    bool trace = false;
    std::optional<std::size_t> max_rounds;
    std::string query;
    std::string schema;
    bool explain = false;
};

/// Failure that maps to an exit code; the message has been printed already
/// unless it is non-empty.
struct Exit
{
    int code;
    std::string message;
};

struct Integration
{
    const CombinedSchema *combined = nullptr;
    std::map<std::string, const Instance *> sources;
    ChaseResult result;
};

class Session
{
  public:
    Session(const Options &o, std::ostream &out, std::ostream &err) : o_(o), out_(out), err_(err) { }

    int check()
    {
        load();
        for (const auto &name : ws_.schema_order) {
            const Schema &s = ws_.schemas.at(name);
            warn_cyclic(name, s.constraints(), s);
        }
        for (const auto &name : ws_.extension_order) {
            const auto &c = ws_.combined.at(name);
            warn_cyclic(name, c.schema->constraints(), *c.schema);
        }
        for (const auto &name : ws_.instance_order) {
            const Instance &inst = ws_.instances.at(name);
            auto report = check_model(inst, inst.schema().constraints());
            for (const auto &v : report.violations)
                err_ << "warning: instance '" << name << "' violates " << v.constraint << " at " << v.assignment
                     << ": " << v.reason << "\n";
        }
        out_ << "ok: " << ws_.schemas.size() << " schema(s), " << ws_.extensions.size() << " extension(s), "
             << ws_.instances.size() << " instance(s), " << ws_.queries.size() << " query(ies)\n";
        return kOk;
    }

    int integrate()
    {
        load();
        Integration run = chase_extension(o_.extension);
        const auto &inst = run.result.instance;
        prepare_out();
        write("combined.cmg", print_canonical(*run.combined->schema));
        write("saturated.cmg", print_canonical(inst));
        const Schema &schema = inst.schema();
        for (std::size_t e = 0; e < schema.entities().size(); ++e)
            write(schema.entities()[e] + ".csv", entity_csv(inst, e));
        out_ << "saturated '" << run.combined->extension << "' in " << run.result.rounds << " round(s), "
             << run.result.trace.action_count() << " action(s)\n";
        for (std::size_t e = 0; e < schema.entities().size(); ++e)
            out_ << "  " << schema.entities()[e] << ": " << inst.class_count(e) << "\n";
        return kOk;
    }

    int query()
    {
        load();
        auto it = ws_.queries.find(o_.query);
        if (it == ws_.queries.end()) throw Exit{kInvalid, "unknown query '" + o_.query + "'"};
        const QuerySpec &q = it->second;
        std::optional<Integration> run;
        const Instance *inst = nullptr;
        if (ws_.combined.count(q.target)) {
            run.emplace(chase_extension(q.target));
            inst = &run->result.instance;
        } else {
            inst = pick_instance(q.target);
            if (!inst) throw Exit{kInvalid, "no instance over schema '" + q.target + "'"};
        }
        ResultTable table = evaluate(q, *inst);
        prepare_out();
        write("query_" + q.name + ".csv", table.to_csv());
        out_ << table.to_text();
        if (o_.explain) out_ << "\n" << explain(q, *inst).render();
        return kOk;
    }

    int roundtrip()
    {
        load();
        Integration run = chase_extension(o_.extension);
        const auto &inc = run.combined->includes;
        if (std::find(inc.begin(), inc.end(), o_.schema) == inc.end())
            throw Exit{kInvalid, "schema '" + o_.schema + "' is not part of extension '" + run.combined->extension + "'"};
        auto target = ws_.schema_ptrs.at(o_.schema);
        Instance recovered = delta_project(*run.combined, run.result.instance, target);
        Instance empty(target, o_.schema);
        const Instance *original = run.sources.count(o_.schema) ? run.sources.at(o_.schema) : &empty;
        RoundTripReport report = roundtrip_report(*original, recovered);
        prepare_out();
        write("roundtrip_" + o_.schema + ".txt", report.render());
        out_ << report.render();
        return kOk;
    }

  private:
    void load()
    {
        std::vector<SourceDocument> docs;
        for (const auto &path : o_.files) {
            std::ifstream in(path, std::ios::binary);
            if (!in) throw Exit{kInvalid, "cannot read '" + path + "'"};
            std::ostringstream text;
            text << in.rdbuf();
            docs.emplace_back(path, text.str());
        }
        ws_ = load_workspace(docs);
        for (const auto &d : ws_.diagnostics)
            err_ << format_diagnostic(d) << "\n";
        if (!ws_.ok()) throw Exit{kInvalid, ""};
    }

    void warn_cyclic(const std::string &owner, const std::vector<Constraint> &cs, const Schema &s)
    {
        auto r = check_weak_acyclicity(cs, s);
        if (!r.acyclic)
            err_ << "warning: constraints of '" << owner << "' are not weakly acyclic: " << r.describe() << "\n";
    }

    const Instance *pick_instance(const std::string &schema)
    {
        const Instance *found = nullptr;
        for (const auto &name : ws_.instance_order) {
            const Instance &inst = ws_.instances.at(name);
            if (inst.schema().name() != schema || !ws_.schema_ptrs.count(schema)) continue;
            if (!o_.instances.empty() && std::find(o_.instances.begin(), o_.instances.end(), name) == o_.instances.end())
                continue;
            if (found)
                throw Exit{kInvalid, "several instances over schema '" + schema + "'; choose one with --instance"};
            found = &inst;
        }
        return found;
    }

    const CombinedSchema &pick_extension(const std::string &name)
    {
        if (!name.empty()) {
            auto it = ws_.combined.find(name);
            if (it == ws_.combined.end()) throw Exit{kInvalid, "unknown extension '" + name + "'"};
            return it->second;
        }
        if (ws_.combined.empty()) throw Exit{kInvalid, "no extension declared"};
        if (ws_.combined.size() > 1) throw Exit{kInvalid, "several extensions declared; choose one with --extension"};
        return ws_.combined.begin()->second;
    }

    std::size_t max_rounds()
    {
        std::size_t rounds = ChaseConfig{}.max_rounds;
        if (const char *env = std::getenv("CATAMERGE_MAX_ROUNDS")) {
            std::string_view s(env);
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), rounds);
            if (ec != std::errc{} || p != s.data() + s.size())
                throw Exit{kInvalid, "CATAMERGE_MAX_ROUNDS must be a non-negative integer, got '" + std::string(s) + "'"};
        }
        return o_.max_rounds.value_or(rounds);
    }

    Integration chase_extension(const std::string &name)
    {
        const CombinedSchema &c = pick_extension(name);
        std::map<std::string, const Instance *> sources;
        for (const auto &s : c.includes)
            if (const Instance *inst = pick_instance(s)) sources[s] = inst;
        ChaseConfig cfg;
        cfg.max_rounds = max_rounds();
        Instance pre = sigma_insert(c, sources);
        try {
            Integration run{&c, std::move(sources), chase(std::move(pre), c.schema->constraints(), cfg)};
            finish(run);
            return run;
        } catch (const ChasePreconditionError &e) {
            throw Exit{kInvalid, e.what()};
        }
    }

    void finish(const Integration &run)
    {
        if (o_.trace) {
            prepare_out();
            write("trace.log", run.result.trace.to_log());
        }
        switch (run.result.status) {
        case ChaseStatus::Saturated: return;
        case ChaseStatus::Failed:
            throw Exit{kClash, "integration failed: constant clash: " + run.result.clash->describe() + " (after " +
                                   std::to_string(run.result.trace.action_count()) + " action(s))"};
        case ChaseStatus::Exhausted:
            throw Exit{kExhausted, "integration stopped: round bound " + std::to_string(max_rounds()) + " exhausted"};
        }
    }

    void prepare_out()
    {
        std::error_code ec;
        fs::create_directories(o_.out_dir, ec);
        if (ec) throw Exit{kInvalid, "cannot create output directory '" + o_.out_dir + "': " + ec.message()};
    }

    void write(const std::string &file, const std::string &content)
    {
        fs::path path = fs::path(o_.out_dir) / file;
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        f << content;
        if (!f) throw Exit{kInvalid, "cannot write '" + path.string() + "'"};
    }

    const Options &o_;
    std::ostream &out_;
    std::ostream &err_;
    Workspace ws_;
};

} // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
{
    Options o;
    CLI::App app{"catamerge: integrate schemas and data by constraint chase"};
    app.name("catamerge");
    app.require_subcommand(1, 1);

    auto files = [&](CLI::App *cmd) { cmd->add_option("files", o.files, ".cmg input files")->required(); };
    auto pipeline = [&](CLI::App *cmd) {
        cmd->add_option("--extension,-x", o.extension, "extension to integrate (default: the only one)");
        cmd->add_option("--instance,-i", o.instances, "restrict source instances to these names");
        cmd->add_option("--out,-o", o.out_dir, "output directory")->capture_default_str();
        cmd->add_flag("--trace", o.trace, "write trace.log");
        cmd->add_option("--max-rounds", o.max_rounds, "chase round bound (overrides CATAMERGE_MAX_ROUNDS)");
    };

    auto *check = app.add_subcommand("check", "parse and validate every input");
    files(check);
    auto *integrate = app.add_subcommand("integrate", "migrate sources into the combined schema and saturate");
    files(integrate);
    pipeline(integrate);
    auto *query = app.add_subcommand("query", "run a query over the saturated instance");
    files(query);
    pipeline(query);
    query->add_option("--name,-q", o.query, "query name")->required();
    query->add_flag("--explain", o.explain, "print the join plan");
    auto *roundtrip = app.add_subcommand("roundtrip", "project back onto one source schema and report the differences");
    files(roundtrip);
    pipeline(roundtrip);
    roundtrip->add_option("--schema,-s", o.schema, "source schema")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e, out, err) == 0 ? kOk : kInvalid;
    }

    Session session(o, out, err);
    try {
        if (*check) return session.check();
        if (*integrate) return session.integrate();
        if (*query) return session.query();
        return session.roundtrip();
    } catch (const Exit &e) {
        if (!e.message.empty()) err << "error: " << e.message << "\n";
        return e.code;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kInvalid;
    }
}

} // namespace catamerge
