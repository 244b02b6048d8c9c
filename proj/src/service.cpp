#include "cellmix/service.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "cellmix/error.hpp"
#include "cellmix/synth.hpp"
#include "cellmix/tensor_io.hpp"
#include "httplib.h"

namespace cellmix::service {

namespace {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
    return format_timestamp(secs) + "Z";
}

Json header(const char* kind) {
    Json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["kind"] = kind;
    return doc;
}

const PortfolioResult& optimal_result(const ModelSnapshot& snap) {
    if (snap.result.status != lp::Status::optimal)
        throw DomainError(std::string("the portfolio LP is ") + lp::to_string(snap.result.status));
    return snap.result;
}

Json interval(double lo, double hi) { return Json::array({lo, hi}); }

Json assessment_body(const ModelSnapshot& snap, const CampaignAssessment& a) {
    Json body;
    body["action"] = a.action;
    Json subs = Json::array();
    const auto names = snap.segment_names();
    for (std::size_t i = 0; i < snap.inputs.tensor.segment_count(); ++i)
        subs.push_back({{"code", snap.inputs.tensor.segments()[i]},
                        {"name", names[i]},
                        {"subscribers", snap.inputs.tensor.totals()[i]}});
    body["subscribers_in_database"] = std::move(subs);
    body["new_clients"] = Json::array({a.new_clients.lo, a.new_clients.hi});
    body["expansion_feasible"] = {{"lo", a.feasible_at_lo}, {"hi", a.feasible_at_hi}};
    body["violated_at_hi"] = a.violated_at_hi;
    body["f_efficient_base"] = a.f_opt_base;
    body["f_efficient_new"] = interval(a.f_opt_new.lo, a.f_opt_new.hi);
    body["potential"] = interval(a.potential.lo, a.potential.hi);
    body["expected_potential"] = a.expected_potential;
    body["hedge"] = std::string(fuzzy::to_string(a.hedge));
    body["sentence"] = a.sentence;
    return body;
}

CampaignAssessment run_assessment(const ModelSnapshot& snap, const CampaignAction& action) {
    const auto& res = optimal_result(snap);
    return assess(snap.inputs.tensor, snap.capacities, action, res.s_star, snap.inputs.closeness, snap.inputs.phrases);
}

}  // namespace

std::vector<std::string> ModelSnapshot::segment_names() const {
    std::vector<std::string> names;
    for (const auto& code : inputs.tensor.segments()) names.push_back(inputs.catalog.name_of(code));
    return names;
}

std::string snapshot_identifier(const ModelInputs& in) {
    std::ostringstream bytes;
    tensor_io::write(bytes, in.tensor);
    for (const auto& c : in.registry.cells()) bytes << '|' << c.id << ',' << c.capacity;
    const auto& o = in.options;
    bytes << "|keep=" << o.keep_clients;
    if (o.capacity_override) bytes << "|cap=" << std::hexfloat << *o.capacity_override;
    if (o.revenue_weights)
        for (double r : *o.revenue_weights) bytes << "|r=" << std::hexfloat << r;
    if (o.traffic) tensor_io::write(bytes, *o.traffic);
    bytes << "|closeness=" << std::hexfloat << in.closeness;
    return hex64(synth::fnv1a64(bytes.str()));
}

std::shared_ptr<const ModelSnapshot> make_snapshot(ModelInputs inputs, std::string created_at) {
    auto snap = std::make_shared<ModelSnapshot>();
    snap->identifier = snapshot_identifier(inputs);
    snap->created_at = created_at.empty() ? utc_now() : std::move(created_at);
    snap->capacities = cell_capacities(inputs.tensor, inputs.registry, inputs.options);
    snap->result = optimize(inputs.tensor, snap->capacities, inputs.options);
    snap->inputs = std::move(inputs);
    return snap;
}

SnapshotStore::SnapshotStore(std::shared_ptr<const ModelSnapshot> initial) : snap_(std::move(initial)) {}

std::shared_ptr<const ModelSnapshot> SnapshotStore::current() const {
    std::lock_guard lock(mu_);
    return snap_;
}

void SnapshotStore::replace(std::shared_ptr<const ModelSnapshot> next) {
    std::lock_guard lock(mu_);
    snap_ = std::move(next);
}

// --- documents ------------------------------------------------------------

Json portfolio_document(const ModelSnapshot& snap) {
    const auto& r = snap.result;
    const auto names = snap.segment_names();
    Json doc = header("portfolio");
    doc["status"] = lp::to_string(r.status);
    doc["keep_clients"] = snap.inputs.options.keep_clients;
    doc["capacity_override"] =
        snap.inputs.options.capacity_override ? Json(*snap.inputs.options.capacity_override) : Json(nullptr);
    Json segs = Json::array();
    const bool ok = r.status == lp::Status::optimal;
    for (std::size_t i = 0; i < r.segments.size(); ++i) {
        Json s;
        s["code"] = r.segments[i];
        s["name"] = names[i];
        s["population"] = r.population[i];
        s["x_star"] = ok ? Json(r.x_star[i]) : Json(nullptr);
        s["s_star"] = ok ? Json(r.s_star[i]) : Json(nullptr);
        s["desirability"] = ok ? Json(r.desirability[i]) : Json(nullptr);
        segs.push_back(std::move(s));
    }
    doc["segments"] = std::move(segs);
    const double population = std::accumulate(r.population.begin(), r.population.end(), 0.0);
    doc["total_population"] = population;
    doc["max_obj"] = ok ? Json(r.max_obj) : Json(nullptr);
    doc["current_obj"] = r.current_obj;
    doc["headroom_ratio"] = ok && population > 0 ? Json(r.max_obj / population) : Json(nullptr);
    doc["tight_rows"] = r.tight_rows;
    doc["rows_built"] = r.rows_built;
    doc["rows_after_prune"] = r.rows_after_prune;
    return doc;
}

Json model_document(const ModelSnapshot& snap) {
    Json doc = header("model");
    doc["identifier"] = snap.identifier;
    doc["created_at"] = snap.created_at;
    const auto& t = snap.inputs.tensor;
    doc["tensor"] = {{"segments", t.segment_count()},
                     {"slots", t.slot_count()},
                     {"cells", t.cell_count()},
                     {"total_subscribers", t.total_population()}};
    Json result = portfolio_document(snap);
    result.erase("schema_version");
    result.erase("kind");
    doc["result"] = std::move(result);
    return doc;
}

Json desirability_document(const ModelSnapshot& snap, fuzzy::Hedge label) {
    const auto& r = optimal_result(snap);
    const auto names = snap.segment_names();
    const auto ans = fuzzy::query_desired(r.desirability, r.segments, names, label, snap.inputs.closeness,
                                          snap.inputs.phrases);
    Json doc = header("desirability");
    doc["hedge"] = std::string(fuzzy::to_string(label));
    doc["closeness"] = snap.inputs.closeness;
    Json segs = Json::array();
    for (std::size_t i = 0; i < r.segments.size(); ++i) {
        const fuzzy::Membership f(r.desirability[i]);
        segs.push_back({{"code", r.segments[i]},
                        {"name", names[i]},
                        {"desirability", f.value()},
                        {"strongest_hedge", std::string(fuzzy::to_string(fuzzy::strongest_hedge(f, snap.inputs.closeness)))},
                        {"tier", fuzzy::anchor(fuzzy::to_tier(f))}});
    }
    doc["segments"] = std::move(segs);
    doc["selected"] = ans.codes;
    doc["sentence"] = ans.sentence;
    return doc;
}

Json efficiency_document(const ModelSnapshot& snap) {
    const auto& r = optimal_result(snap);
    const auto ans = fuzzy::query_efficiency(r.current_obj, r.max_obj, snap.inputs.closeness, snap.inputs.phrases);
    Json doc = header("efficiency");
    doc["current_obj"] = r.current_obj;
    doc["max_obj"] = r.max_obj;
    doc["membership"] = ans.membership.value();
    doc["hedge"] = std::string(fuzzy::to_string(ans.hedge));
    doc["tier"] = fuzzy::anchor(fuzzy::to_tier(ans.membership));
    doc["display"] = fuzzy::format2(ans.membership.value()) + " — " + std::string(snap.inputs.phrases.word(ans.hedge)) +
                     " efficiently exploited";
    doc["sentence"] = ans.sentence;
    return doc;
}

Json assessment_document(const ModelSnapshot& snap, const CampaignAction& action) {
    Json doc = header("campaign_assessment");
    doc["assessment"] = assessment_body(snap, run_assessment(snap, action));
    return doc;
}

Json comparison_document(const ModelSnapshot& snap, const CampaignAction& first, const CampaignAction& second) {
    const auto a = run_assessment(snap, first);
    const auto b = run_assessment(snap, second);
    const auto cmp = compare(a, b, snap.inputs.closeness, snap.inputs.phrases);
    Json doc = header("campaign_comparison");
    doc["assessments"] = Json::array({assessment_body(snap, a), assessment_body(snap, b)});
    doc["delta"] = cmp.delta;
    doc["same_tier"] = cmp.same_tier;
    doc["verdict"] = cmp.verdict;
    return doc;
}

Json capacity_sweep_document(const ModelSnapshot& snap, double from, double to, std::size_t steps) {
    if (!(from >= 0) || !(from < to) || steps < 2 || steps > 10000)
        throw BadRequest("capacity sweep needs 0 <= from < to and 2 <= steps <= 10000");
    const auto points = capacity_sweep(snap.inputs.tensor, snap.inputs.options, from, to, steps);
    const auto breaks = keep_clients_breakpoints(snap.inputs.tensor, snap.inputs.options);
    Json doc = header("capacity_sweep");
    Json pts = Json::array();
    for (const auto& p : points)
        pts.push_back({{"capacity", p.capacity},
                       {"current_obj", p.current_obj},
                       {"max_obj", p.max_obj},
                       {"keep_clients_obj", p.keep_clients_obj ? Json(*p.keep_clients_obj) : Json(nullptr)}});
    doc["points"] = std::move(pts);
    doc["min_feasible_capacity"] = breaks.min_feasible;
    doc["keep_clients_release_capacity"] = breaks.release ? Json(*breaks.release) : Json(nullptr);
    return doc;
}

Json granularity_document(const ModelSnapshot& snap) {
    const auto& in = snap.inputs;
    std::vector<Segmentation> segs{{"served", in.tensor}};
    try {
        segs.push_back({"rolled_up", roll_up(in.tensor, in.catalog)});
    } catch (const InputError&) {
        // No complete parent level: compare the served segmentation alone.
    }
    PortfolioOptions opts;
    opts.keep_clients = in.options.keep_clients;
    if (in.options.revenue_weights || in.options.traffic)
        throw DomainError("granularity sweep is only defined for headcount objectives");
    const auto cmp = compare_segmentations(segs, snap.capacities, opts);
    Json doc = header("granularity");
    Json rows = Json::array();
    for (const auto& r : cmp.rows)
        rows.push_back({{"label", r.label}, {"segment_count", r.segment_count}, {"max_obj", r.max_obj}});
    doc["segmentations"] = std::move(rows);
    const auto& traj = cmp.finest_trajectory;
    Json steps = Json::array();
    for (std::size_t s = 0; s < traj.steps.size(); ++s) {
        const auto& st = traj.steps[s];
        steps.push_back({{"step", s + 1},
                         {"merged", Json::array({st.merged_pair.first, st.merged_pair.second})},
                         {"new_code", st.new_code},
                         {"segment_count", st.segment_count_after},
                         {"max_obj", st.max_obj_after}});
    }
    doc["trajectory"] = {{"label", cmp.finest_label},
                         {"initial", {{"segment_count", traj.initial_segments.size()}, {"max_obj", traj.initial_max_obj}}},
                         {"steps", std::move(steps)},
                         {"error", traj.error ? Json(*traj.error) : Json(nullptr)}};
    return doc;
}

CampaignAction action_from_json(const Json& doc) {
    if (!doc.is_object()) throw BadRequest("action document must be a JSON object");
    CampaignAction action;
    try {
        action.name = doc.value("name", std::string("action"));
        if (doc.contains("boosts")) {
            const auto& boosts = doc.at("boosts");
            if (!boosts.is_array()) throw BadRequest("'boosts' must be an array");
            for (const auto& b : boosts) {
                if (!b.is_object()) throw BadRequest("each boost must be an object");
                const auto code = b.at("segment_code").get<std::string>();
                const double lo = b.at("lo_percent").get<double>() / 100.0;
                const double hi = b.at("hi_percent").get<double>() / 100.0;
                if (!action.boosts.emplace(code, Interval<double>{lo, hi}).second)
                    throw BadRequest("segment '" + code + "' is boosted twice");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw BadRequest(std::string("malformed action document: ") + e.what());
    }
    action.validate();
    return action;
}

CampaignAction action_from_text(const std::string& text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw BadRequest(std::string("malformed action document: ") + e.what());
    }
    return action_from_json(doc);
}

// --- HTTP -----------------------------------------------------------------

namespace {

template <class F>
void respond(httplib::Response& res, F&& produce) {
    auto fail = [&](int status, const std::string& msg) {
        Json err = header("error");
        err["status"] = status;
        err["message"] = msg;
        res.status = status;
        res.set_content(err.dump(2) + "\n", "application/json");
    };
    try {
        Json doc = produce();
        res.status = 200;
        res.set_content(doc.dump(2) + "\n", "application/json");
    } catch (const BadRequest& e) {
        fail(400, e.what());
    } catch (const nlohmann::json::exception& e) {
        fail(400, e.what());
    } catch (const InputError& e) {
        fail(422, e.what());
    } catch (const DomainError& e) {
        fail(422, e.what());
    } catch (const std::invalid_argument& e) {
        fail(422, e.what());
    } catch (const std::exception& e) {
        fail(500, e.what());
    }
}

double number_param(const httplib::Request& req, const char* name, double fallback) {
    if (!req.has_param(name)) return fallback;
    const auto text = req.get_param_value(name);
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(v)) throw BadRequest("");
        return v;
    } catch (const std::exception&) {
        throw BadRequest(std::string("query parameter '") + name + "' must be a number");
    }
}

Json parse_body(const httplib::Request& req) {
    try {
        return Json::parse(req.body);
    } catch (const nlohmann::json::exception& e) {
        throw BadRequest(std::string("malformed JSON body: ") + e.what());
    }
}

}  // namespace

HttpServer::HttpServer(SnapshotStore& store) : store_(store), server_(std::make_unique<httplib::Server>()) {
    auto& srv = *server_;
    // httplib also sets SO_REUSEPORT, which would let a second server share a taken port.
    srv.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    srv.Get("/model", [this](const httplib::Request&, httplib::Response& res) {
        respond(res, [&] { return model_document(*store_.current()); });
    });
    srv.Get("/desirability", [this](const httplib::Request& req, httplib::Response& res) {
        respond(res, [&] {
            fuzzy::Hedge label = fuzzy::Hedge::very;
            if (req.has_param("hedge")) {
                try {
                    label = fuzzy::parse_hedge(req.get_param_value("hedge"));
                } catch (const std::invalid_argument& e) {
                    throw BadRequest(e.what());
                }
            }
            return desirability_document(*store_.current(), label);
        });
    });
    srv.Get("/efficiency", [this](const httplib::Request&, httplib::Response& res) {
        respond(res, [&] { return efficiency_document(*store_.current()); });
    });
    srv.Post("/campaign/assess", [this](const httplib::Request& req, httplib::Response& res) {
        respond(res, [&] { return assessment_document(*store_.current(), action_from_json(parse_body(req))); });
    });
    srv.Post("/campaign/compare", [this](const httplib::Request& req, httplib::Response& res) {
        respond(res, [&] {
            const auto body = parse_body(req);
            if (!body.is_object() || !body.contains("first") || !body.contains("second"))
                throw BadRequest("compare body needs 'first' and 'second' action documents");
            return comparison_document(*store_.current(), action_from_json(body.at("first")),
                                       action_from_json(body.at("second")));
        });
    });
    srv.Get("/sweep/capacity", [this](const httplib::Request& req, httplib::Response& res) {
        respond(res, [&] {
            const double from = number_param(req, "from", 0.0);
            const double to = number_param(req, "to", 200.0);
            const double steps = number_param(req, "steps", 21.0);
            if (steps != std::floor(steps) || steps < 2) throw BadRequest("'steps' must be an integer >= 2");
            return capacity_sweep_document(*store_.current(), from, to, static_cast<std::size_t>(steps));
        });
    });
    srv.Get("/sweep/granularity", [this](const httplib::Request&, httplib::Response& res) {
        respond(res, [&] { return granularity_document(*store_.current()); });
    });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) {
        const int bound = server_->bind_to_any_port(host);
        if (bound < 0) throw std::runtime_error("could not bind " + host);
        return bound;
    }
    if (!server_->bind_to_port(host, port))
        throw std::runtime_error("could not bind " + host + ":" + std::to_string(port) + " (port in use?)");
    return port;
}

void HttpServer::listen() { server_->listen_after_bind(); }

void HttpServer::stop() {
    if (server_ && server_->is_running()) server_->stop();
}

void HttpServer::wait_until_ready() const { server_->wait_until_ready(); }

}  // namespace cellmix::service
