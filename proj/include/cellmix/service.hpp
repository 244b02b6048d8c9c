#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "cellmix/campaign.hpp"
#include "cellmix/error.hpp"
#include "cellmix/fuzzy.hpp"
#include "cellmix/granularity.hpp"
#include "cellmix/ingest.hpp"
#include "cellmix/portfolio.hpp"
#include "json.hpp"

namespace httplib {
class Server;
}

namespace cellmix::service {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// A request whose body or parameters cannot be parsed (HTTP 400 class).
class BadRequest : public InputError {
public:
    using InputError::InputError;
};

struct ModelInputs {
    FootprintTensor tensor;
    CellRegistry registry;
    SegmentCatalog catalog;
    PortfolioOptions options;
    fuzzy::PhraseTable phrases;
    double closeness = fuzzy::kDefaultCloseness;
};

/// Immutable optimization result plus everything needed to answer queries.
struct ModelSnapshot {
    std::string identifier;  // stable hash of the inputs
    std::string created_at;
    ModelInputs inputs;
    std::vector<double> capacities;
    PortfolioResult result;

    std::vector<std::string> segment_names() const;
};

std::string snapshot_identifier(const ModelInputs& inputs);
/// Solves the portfolio LP once and freezes the outcome.
std::shared_ptr<const ModelSnapshot> make_snapshot(ModelInputs inputs, std::string created_at = {});

/// Holds the served snapshot; replacement is atomic and readers keep the
/// snapshot they started with.
class SnapshotStore {
public:
    explicit SnapshotStore(std::shared_ptr<const ModelSnapshot> initial);
    std::shared_ptr<const ModelSnapshot> current() const;
    void replace(std::shared_ptr<const ModelSnapshot> next);

private:
    mutable std::mutex mu_;
    std::shared_ptr<const ModelSnapshot> snap_;
};

// Structured documents shared by the CLI and the HTTP endpoints.
Json model_document(const ModelSnapshot& snap);
Json portfolio_document(const ModelSnapshot& snap);
Json desirability_document(const ModelSnapshot& snap, fuzzy::Hedge label);
Json efficiency_document(const ModelSnapshot& snap);
Json assessment_document(const ModelSnapshot& snap, const CampaignAction& action);
Json comparison_document(const ModelSnapshot& snap, const CampaignAction& first, const CampaignAction& second);
Json capacity_sweep_document(const ModelSnapshot& snap, double from, double to, std::size_t steps);
/// Greedy trajectory of the served segmentation, plus its catalog roll-up when every segment has a parent.
Json granularity_document(const ModelSnapshot& snap);

/// {"name": "A", "boosts": [{"segment_code": "T", "lo_percent": 5, "hi_percent": 7}]}
/// Throws BadRequest on structural problems and InputError on invalid bounds.
CampaignAction action_from_json(const Json& doc);
CampaignAction action_from_text(const std::string& text);

/// Read-only HTTP facade over a snapshot store.
class HttpServer {
public:
    explicit HttpServer(SnapshotStore& store);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds host:port (port 0 picks a free one). Throws std::runtime_error when the port is taken.
    int bind(const std::string& host, int port);
    /// Serves until stop() is called.
    void listen();
    void stop();
    void wait_until_ready() const;

private:
    SnapshotStore& store_;
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace cellmix::service
