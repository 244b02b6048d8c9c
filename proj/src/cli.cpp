#include "cellmix/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "cellmix/csv.hpp"
#include "cellmix/error.hpp"
#include "cellmix/service.hpp"
#include "cellmix/synth.hpp"
#include "cellmix/tensor_io.hpp"

namespace cellmix::cli {

namespace {

using service::Json;

struct InputFlags {
    std::string cdr, clients, segments, cells, tensor, revenue_file, phrases, epoch;
    std::optional<double> capacity;
    bool keep_clients = false;
    double closeness = fuzzy::kDefaultCloseness;
    std::string format = "text";
};

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    return in;
}

std::string slurp(const std::string& path) {
    auto in = open_input(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string num(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    if (std::abs(v - std::round(v)) < 1e-9) {
        std::ostringstream ss;
        ss << std::fixed << std::setprecision(0) << std::round(v) + 0.0;
        return ss.str();
    }
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(4) << v;
    std::string s = ss.str();
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
    return s;
}

std::string num(const Json& v) {
    if (v.is_null()) return "-";
    if (v.is_number()) return num(v.get<double>());
    if (v.is_boolean()) return v.get<bool>() ? "yes" : "no";
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
        std::string s = "[";
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
        return s + "]";
    }
    return v.dump();
}

// Left-aligned columns separated by two spaces.
void print_table(std::ostream& out, const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width;
    for (const auto& r : rows)
        for (std::size_t c = 0; c < r.size(); ++c) {
            if (width.size() <= c) width.push_back(0);
            width[c] = std::max(width[c], r[c].size());
        }
    for (const auto& r : rows) {
        std::string line;
        for (std::size_t c = 0; c < r.size(); ++c) {
            line += r[c];
            if (c + 1 < r.size()) line += std::string(width[c] - r[c].size() + 2, ' ');
        }
        out << line << '\n';
    }
}

std::vector<double> read_revenue(const std::string& path, const FootprintTensor& tensor) {
    auto in = open_input(path);
    const auto table = csv::Table::read(in);
    const auto code_col = table.require("segment_code");
    const auto rev_col = table.require("revenue");
    std::map<std::string, double> by_code;
    for (const auto& row : table.rows()) {
        const auto& code = row.fields.at(code_col);
        double r = 0;
        try {
            std::size_t used = 0;
            r = std::stod(row.fields.at(rev_col), &used);
            if (used != row.fields.at(rev_col).size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw InputError(path + ":" + std::to_string(row.line) + ": revenue is not a number");
        }
        if (!by_code.emplace(code, r).second)
            throw InputError(path + ":" + std::to_string(row.line) + ": duplicate segment '" + code + "'");
    }
    std::vector<double> out;
    for (const auto& code : tensor.segments()) {
        auto it = by_code.find(code);
        if (it == by_code.end()) throw InputError(path + ": no revenue weight for segment '" + code + "'");
        out.push_back(it->second);
    }
    return out;
}

struct Loaded {
    FootprintTensor tensor;
    CellRegistry registry;
    SegmentCatalog catalog;
    CdrParseResult parse;
};

Loaded load_raw(const InputFlags& f) {
    Loaded l;
    if (!f.tensor.empty()) {
        l.tensor = tensor_io::load(f.tensor);
        if (!f.segments.empty()) {
            auto in = open_input(f.segments);
            l.catalog = parse_segments(in);
        } else {
            std::vector<Segment> segs;
            for (const auto& code : l.tensor.segments()) segs.push_back({code, code, std::nullopt});
            l.catalog = SegmentCatalog(std::move(segs));
        }
        if (!f.cells.empty()) {
            auto in = open_input(f.cells);
            l.registry = parse_cells(in);
        } else if (f.capacity) {
            std::vector<Cell> cells;
            for (const auto& id : l.tensor.cells()) cells.push_back({id, 0, 0, 1});
            l.registry = CellRegistry(std::move(cells));
        } else {
            throw InputError("--cells or --capacity is required with --tensor");
        }
        return l;
    }
    if (f.cdr.empty() || f.clients.empty() || f.segments.empty() || f.cells.empty())
        throw InputError("either --tensor or all of --cdr, --clients, --segments and --cells are required");
    {
        auto in = open_input(f.segments);
        l.catalog = parse_segments(in);
    }
    ClientDirectory directory;
    {
        auto in = open_input(f.clients);
        directory = parse_clients(in, l.catalog);
    }
    {
        auto in = open_input(f.cells);
        l.registry = parse_cells(in);
    }
    CdrParseOptions opts;
    if (!f.epoch.empty()) {
        opts.epoch = parse_timestamp(f.epoch);
        if (!opts.epoch) throw InputError("--epoch is not a timestamp: " + f.epoch);
    }
    auto in = open_input(f.cdr);
    l.parse = parse_cdr(in, directory, opts);
    l.tensor = build_footprint(l.parse.events, directory, l.catalog, l.registry);
    return l;
}

service::ModelInputs load_inputs(const InputFlags& f) {
    auto l = load_raw(f);
    service::ModelInputs in{std::move(l.tensor), std::move(l.registry), std::move(l.catalog), {}, {}, f.closeness};
    in.options.keep_clients = f.keep_clients;
    in.options.capacity_override = f.capacity;
    if (!f.revenue_file.empty()) in.options.revenue_weights = read_revenue(f.revenue_file, in.tensor);
    if (!f.phrases.empty()) in.phrases = fuzzy::PhraseTable::from_json(slurp(f.phrases));
    if (!(f.closeness > 0 && f.closeness < 1)) throw InputError("--closeness must lie in (0, 1)");
    return in;
}

// Fixed, stable timestamp so that repeated runs print identical documents.
std::shared_ptr<const service::ModelSnapshot> snapshot(const InputFlags& f) {
    return service::make_snapshot(load_inputs(f), "1970-01-01T00:00:00Z");
}

void emit(std::ostream& out, const InputFlags& f, const Json& doc, void (*text)(std::ostream&, const Json&)) {
    if (f.format == "json")
        out << doc.dump(2) << '\n';
    else
        text(out, doc);
}

// --- text renderers --------------------------------------------------------

void text_portfolio(std::ostream& out, const Json& d) {
    print_table(out, {{"status", d["status"].get<std::string>()},
                      {"max_obj", num(d["max_obj"])},
                      {"current_obj", num(d["current_obj"])},
                      {"headroom_ratio", num(d["headroom_ratio"])},
                      {"rows", num(d["rows_after_prune"]) + " of " + num(d["rows_built"]) + " after pruning"}});
    if (d["status"] == "optimal") {
        std::string x = "x = (";
        for (std::size_t i = 0; i < d["segments"].size(); ++i) x += (i ? ", " : "") + num(d["segments"][i]["x_star"]);
        out << x << ")\n";
    }
    out << '\n';
    std::vector<std::vector<std::string>> rows{{"code", "name", "population", "x_star", "s_star", "desirability"}};
    for (const auto& s : d["segments"])
        rows.push_back({s["code"].get<std::string>(), s["name"].get<std::string>(), num(s["population"]),
                        num(s["x_star"]), num(s["s_star"]), num(s["desirability"])});
    print_table(out, rows);
}

void text_desirability(std::ostream& out, const Json& d) {
    std::vector<std::vector<std::string>> rows{{"code", "name", "desirability", "strongest_hedge"}};
    for (const auto& s : d["segments"])
        rows.push_back({s["code"].get<std::string>(), s["name"].get<std::string>(), num(s["desirability"]),
                        s["strongest_hedge"].get<std::string>()});
    print_table(out, rows);
    out << '\n' << d["sentence"].get<std::string>() << '\n';
}

void text_efficiency(std::ostream& out, const Json& d) {
    out << d["display"].get<std::string>() << '\n' << d["sentence"].get<std::string>() << '\n';
}

void assessment_rows(const std::vector<const Json*>& as, std::vector<std::vector<std::string>>& rows) {
    std::vector<std::string> head{""};
    for (const auto* a : as) head.push_back((*a)["action"].get<std::string>());
    rows.push_back(head);
    rows.push_back({"Subscribers in database"});
    for (const auto& s : (*as[0])["subscribers_in_database"])
        rows.push_back({"  " + s["name"].get<std::string>() + " (" + s["code"].get<std::string>() + ")",
                        num(s["subscribers"])});
    auto line = [&](const std::string& label, const char* key) {
        std::vector<std::string> r{label};
        for (const auto* a : as) r.push_back(num((*a)[key]));
        rows.push_back(r);
    };
    line("New clients", "new_clients");
    {
        std::vector<std::string> r{"Feasible (lo, hi)"};
        for (const auto* a : as)
            r.push_back(num((*a)["expansion_feasible"]["lo"]) + ", " + num((*a)["expansion_feasible"]["hi"]));
        rows.push_back(r);
    }
    line("f_efficient(S)", "f_efficient_base");
    line("f_efficient(S new)", "f_efficient_new");
    line("Potential", "potential");
    line("Expected potential", "expected_potential");
    line("Hedge", "hedge");
}

void text_assessment(std::ostream& out, const Json& d) {
    const auto& a = d["assessment"];
    std::vector<std::vector<std::string>> rows;
    assessment_rows({&a}, rows);
    print_table(out, rows);
    if (!a["violated_at_hi"].empty()) out << "Violated at hi: " << num(a["violated_at_hi"]) << '\n';
    out << '\n' << a["sentence"].get<std::string>() << '\n';
}

void text_comparison(std::ostream& out, const Json& d) {
    const auto& as = d["assessments"];
    std::vector<std::vector<std::string>> rows;
    assessment_rows({&as[0], &as[1]}, rows);
    rows.push_back({"Conclusion", d["verdict"].get<std::string>()});
    print_table(out, rows);
    out << '\n' << as[0]["sentence"].get<std::string>() << '\n' << as[1]["sentence"].get<std::string>() << '\n';
    out << "delta " << num(d["delta"]) << ", same tier: " << num(d["same_tier"]) << '\n';
}

void text_capacity(std::ostream& out, const Json& d) {
    std::vector<std::vector<std::string>> rows{{"capacity", "current_obj", "max_obj", "keep_clients_obj"}};
    for (const auto& p : d["points"])
        rows.push_back({num(p["capacity"]), num(p["current_obj"]), num(p["max_obj"]), num(p["keep_clients_obj"])});
    print_table(out, rows);
    out << "\nmin_feasible_capacity " << num(d["min_feasible_capacity"]) << '\n'
        << "keep_clients_release_capacity " << num(d["keep_clients_release_capacity"]) << '\n';
}

void text_granularity(std::ostream& out, const Json& d) {
    std::vector<std::vector<std::string>> rows{{"segmentation", "k", "max_obj"}};
    for (const auto& s : d["segmentations"])
        rows.push_back({s["label"].get<std::string>(), num(s["segment_count"]), num(s["max_obj"])});
    print_table(out, rows);
    const auto& t = d["trajectory"];
    out << "\ngreedy merge of " << t["label"].get<std::string>() << '\n';
    rows = {{"step", "merged", "k", "max_obj"},
            {"0", "-", num(t["initial"]["segment_count"]), num(t["initial"]["max_obj"])}};
    for (const auto& s : t["steps"])
        rows.push_back({num(s["step"]),
                        s["merged"][0].get<std::string>() + " + " + s["merged"][1].get<std::string>(),
                        num(s["segment_count"]), num(s["max_obj"])});
    print_table(out, rows);
    if (!t["error"].is_null()) out << "stopped: " << t["error"].get<std::string>() << '\n';
}

void text_kv(std::ostream& out, const Json& d) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& [k, v] : d.items())
        if (k != "schema_version" && k != "kind") rows.push_back({k, num(v)});
    print_table(out, rows);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Customer-base portfolio optimizer for cellular networks", "cellmix"};
    app.set_config("--config", "", "Key-value config file; command-line flags take precedence");
    app.require_subcommand(1);
    app.fallthrough();

    InputFlags f;
    app.add_option("--cdr", f.cdr, "CDR table (timestamp, client_id, cell_id)");
    app.add_option("--clients", f.clients, "Client table (client_id, segment_code)");
    app.add_option("--segments", f.segments, "Segment table (segment_code, name, parent_code)");
    app.add_option("--cells", f.cells, "Cell table (cell_id, latitude, longitude, capacity)");
    app.add_option("--tensor", f.tensor, "Cached footprint tensor instead of raw tables");
    app.add_option("--capacity", f.capacity, "Uniform capacity for every cell");
    app.add_flag("--keep-clients", f.keep_clients, "Keep every existing client (x >= 1)");
    app.add_option("--revenue-file", f.revenue_file, "Revenue weights (segment_code, revenue)");
    app.add_option("--phrases", f.phrases, "Phrase table JSON");
    app.add_option("--closeness", f.closeness, "Closeness threshold for hedges");
    app.add_option("--epoch", f.epoch, "Start of slot 0 (default: midnight of the first record)");
    app.add_option("--format", f.format, "Output format")->check(CLI::IsMember({"text", "json"}));

    auto* ingest = app.add_subcommand("ingest", "Build the footprint tensor and cache it");
    std::string cache_out, export_json;
    ingest->add_option("--out", cache_out, "Binary tensor cache to write");
    ingest->add_option("--export", export_json, "JSON export of the tensor");

    auto* optimize = app.add_subcommand("optimize", "Solve the portfolio LP");

    auto* query = app.add_subcommand("query", "Fuzzy queries");
    query->require_subcommand(1);
    auto* desired = query->add_subcommand("desired", "Segments desired at a hedge level");
    std::string hedge = "very";
    desired->add_option("--hedge", hedge, "rather, very or extremely")
        ->check(CLI::IsMember({"hardly", "rather", "very", "extremely"}));
    auto* efficiency = query->add_subcommand("efficiency", "How efficiently the infrastructure is exploited");

    auto* simulate = app.add_subcommand("simulate", "Assess one campaign action or compare two");
    std::vector<std::string> action_files;
    simulate->add_option("--action-file", action_files, "Action document (JSON); give two to compare")
        ->required()
        ->expected(1, 2);

    auto* sweep_cap = app.add_subcommand("sweep-capacity", "Objectives against a uniform cell capacity");
    double from = 0, to = 200;
    std::size_t steps = 21;
    sweep_cap->add_option("--from", from, "First capacity");
    sweep_cap->add_option("--to", to, "Last capacity");
    sweep_cap->add_option("--steps", steps, "Number of points");

    auto* sweep_gran = app.add_subcommand("sweep-granularity", "Objective against segment granularity");

    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset");
    std::string synth_config, out_dir = ".";
    std::optional<std::uint64_t> seed;
    synth_cmd->add_option("--synth-config", synth_config, "Generator config (JSON); built-in default otherwise");
    synth_cmd->add_option("--out-dir", out_dir, "Output directory");
    app.add_option("--seed", seed, "Random seed for the generator");

    auto* serve = app.add_subcommand("serve", "Serve the model over HTTP");
    std::string host = "127.0.0.1";
    std::optional<int> port;
    serve->add_option("--host", host, "Listen address");
    serve->add_option("--port", port, "Listen port (default $CELLMIX_PORT or 8080)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*ingest) {
            auto l = load_raw(f);
            for (const auto& e : l.parse.errors) err << "warning: line " << e.line << ": " << e.message << '\n';
            if (!cache_out.empty()) tensor_io::save(cache_out, l.tensor);
            if (!export_json.empty()) {
                std::ofstream js(export_json, std::ios::binary);
                if (!js) throw InputError("cannot write '" + export_json + "'");
                js << tensor_io::to_json_text(l.tensor);
            }
            Json doc;
            doc["schema_version"] = service::kSchemaVersion;
            doc["kind"] = "ingest";
            doc["segments"] = l.tensor.segment_count();
            doc["slots"] = l.tensor.slot_count();
            doc["cells"] = l.tensor.cell_count();
            doc["total_subscribers"] = l.tensor.total_population();
            doc["events"] = l.parse.events.size();
            doc["record_errors"] = l.parse.errors.size();
            doc["snapped_timestamps"] = l.parse.snapped;
            doc["epoch"] = f.tensor.empty() ? Json(format_timestamp(l.parse.epoch)) : Json(nullptr);
            doc["cache"] = cache_out.empty() ? Json(nullptr) : Json(cache_out);
            emit(out, f, doc, text_kv);
        } else if (*optimize) {
            emit(out, f, service::portfolio_document(*snapshot(f)), text_portfolio);
        } else if (*desired) {
            emit(out, f, service::desirability_document(*snapshot(f), fuzzy::parse_hedge(hedge)), text_desirability);
        } else if (*efficiency) {
            emit(out, f, service::efficiency_document(*snapshot(f)), text_efficiency);
        } else if (*simulate) {
            std::vector<CampaignAction> actions;
            for (const auto& p : action_files) actions.push_back(service::action_from_text(slurp(p)));
            const auto snap = snapshot(f);
            if (actions.size() == 1)
                emit(out, f, service::assessment_document(*snap, actions[0]), text_assessment);
            else
                emit(out, f, service::comparison_document(*snap, actions[0], actions[1]), text_comparison);
        } else if (*sweep_cap) {
            emit(out, f, service::capacity_sweep_document(*snapshot(f), from, to, steps), text_capacity);
        } else if (*sweep_gran) {
            emit(out, f, service::granularity_document(*snapshot(f)), text_granularity);
        } else if (*synth_cmd) {
            auto config = synth_config.empty() ? synth::demo_config() : synth::config_from_json(slurp(synth_config));
            if (seed) config.seed = *seed;
            const auto data = synth::generate(config);
            std::filesystem::create_directories(out_dir);
            synth::write_files(data, out_dir);
            Json doc;
            doc["schema_version"] = service::kSchemaVersion;
            doc["kind"] = "synth";
            doc["seed"] = config.seed;
            doc["segments"] = config.segments.size();
            doc["clients"] = data.directory.size();
            doc["cells"] = config.cells.size();
            doc["events"] = data.events.size();
            doc["out_dir"] = out_dir;
            emit(out, f, doc, text_kv);
        } else if (*serve) {
            int p = 8080;
            if (port) {
                p = *port;
            } else if (const char* env = std::getenv("CELLMIX_PORT")) {
                try {
                    p = std::stoi(env);
                } catch (const std::exception&) {
                    throw InputError(std::string("CELLMIX_PORT is not a port number: ") + env);
                }
            }
            service::SnapshotStore store(service::make_snapshot(load_inputs(f)));
            service::HttpServer server(store);
            const int bound = server.bind(host, p);
            out << "listening on http://" << host << ':' << bound << std::endl;
            server.listen();
        }
    } catch (const std::exception& e) {
        std::string msg = e.what();
        for (auto& ch : msg)
            if (ch == '\n') ch = ' ';
        err << "error: " << msg << '\n';
        return 1;
    }
    return 0;
}

}  // namespace cellmix::cli
