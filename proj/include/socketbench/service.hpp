#pragma once

// Live PPT session service. One session runs at a time; a worker thread is the
// only writer, HTTP handlers and stream readers take snapshots under the lock.
// Samples go to an append-only per-session log and every reader keeps its own
// cursor, so a slow reader is never skipped ahead.

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stop_token>
#include <string>
#include <thread>
#include <vector>

#include "socketbench/catalog.hpp"
#include "socketbench/error.hpp"
#include "socketbench/ppt.hpp"

namespace socketbench::service {

// A second session start while one is active, or a mark outside `ramping`.
class ConflictError : public StateError {
public:
    using StateError::StateError;
};

// No recorded stream for the requested specimen.
class NotFoundError : public Error {
public:
    using Error::Error;
};

struct Reading {
    double t_s = 0.0;
    double value = 0.0;  // raw units, calibrated by the session
};

// Live readings as `t_s,value` lines (blank and '#' lines skipped), read on a
// background thread. Malformed lines are counted and dropped.
class LineSource {
public:
    explicit LineSource(std::istream& in);
    ~LineSource();
    LineSource(const LineSource&) = delete;
    LineSource& operator=(const LineSource&) = delete;

    // Next reading, nullopt on timeout or once the input is closed and drained.
    std::optional<Reading> next(std::chrono::milliseconds timeout);
    bool closed() const;
    std::size_t rejected() const;
    void discard_pending();

private:
    // Shared with the reader thread, which may outlive this object when the
    // input never closes (stdin).
    struct State {
        std::mutex mu;
        std::condition_variable cv;
        std::deque<Reading> queue;
        bool closed = false;
        std::size_t rejected = 0;
    };
    std::shared_ptr<State> state_;
    std::thread reader_;
};

struct ServiceConfig {
    catalog::Catalog catalog;
    std::optional<ppt::SessionPlan> replay;
    LineSource* live = nullptr;  // used when there is no replay plan
    LinearCalibration live_calibration;
    double rate_hz = 80.0;       // replay playback rate
    double rest_scale = 1.0;     // wall seconds per protocol second; 0 skips the wait
    bool auto_mark = false;      // replay: mark at the plan's recorded time
    double max_force_limit_n = ppt::default_max_force_n;
    std::size_t max_samples_per_session = 1'000'000;
};

struct StartRequest {
    catalog::Region region = catalog::Region::tibia;
    std::string material;
    double thickness_mm = 0.0;
    bool rest_override = false;
    bool screening = false;
};

struct SessionRecord {
    std::uint64_t id = 0;
    catalog::Region region = catalog::Region::tibia;
    ppt::Specimen specimen;
    bool screening = false;
    ppt::SessionState state = ppt::SessionState::idle;
    double required_rest_s = 0.0;
    double remaining_rest_s = 0.0;
    std::size_t samples = 0;
    std::optional<double> last_force_n;
    std::optional<double> pain_force_n;
    std::optional<double> ppt_mpa;
    std::string abort_reason;
    std::vector<std::string> notes;
};

struct Snapshot {
    std::optional<SessionRecord> current;  // the active or most recent session
    std::vector<SessionRecord> history;    // finished sessions, oldest first
    std::string source;                    // "replay" or "live"
    double max_force_limit_n = 0.0;
};

struct StreamBatch {
    std::vector<ppt::ForceSample> samples;
    std::size_t first_index = 0;  // index of samples.front() in the session log
    bool ended = false;           // session terminal and the reader is at the end
    ppt::SessionState final_state = ppt::SessionState::idle;
};

class SessionService {
public:
    explicit SessionService(ServiceConfig config);
    ~SessionService();
    SessionService(const SessionService&) = delete;
    SessionService& operator=(const SessionService&) = delete;

    // ConflictError while a session is active, ValidationError on unknown
    // material, NotFoundError without a matching replay stream.
    SessionRecord start(const StartRequest& request);
    SessionRecord mark();                                  // ConflictError unless ramping
    SessionRecord abort(const std::string& reason);        // ConflictError without an active session

    Snapshot snapshot() const;
    std::optional<std::uint64_t> current_session_id() const;

    // Samples of `session_id` from `cursor` on; waits up to `timeout` for new
    // ones. NotFoundError for an unknown session.
    StreamBatch read_stream(std::uint64_t session_id, std::size_t cursor, std::chrono::milliseconds timeout) const;

    ppt::PPTMatrix matrix() const;
    const catalog::Catalog& catalog() const noexcept { return config_.catalog; }
    const ServiceConfig& config() const noexcept { return config_; }

    // Blocks until the current session is terminal or the timeout passes.
    bool wait_until_terminal(std::chrono::milliseconds timeout) const;

private:
    struct Log {
        std::vector<ppt::ForceSample> samples;
        bool ended = false;
    };
    struct Active {
        std::uint64_t id = 0;
        ppt::PPTSession session;
        std::shared_ptr<Log> log;
        const ppt::PlanEntry* plan_entry = nullptr;
    };

    void run_session(std::uint64_t id, std::stop_token stop);
    bool run_rest(std::uint64_t id, std::stop_token stop);
    void run_replay(std::uint64_t id, std::stop_token stop);
    void run_live(std::uint64_t id, std::stop_token stop);
    void ingest(const Reading& r);     // lock held
    void finalize();                   // lock held
    bool active() const;               // lock held
    SessionRecord record_of(const Active& a) const;
    double probe_area(catalog::Region r) const;

    ServiceConfig config_;
    mutable std::mutex mu_;
    mutable std::condition_variable cv_;
    std::mutex start_mu_;
    std::optional<Active> current_;
    std::map<std::uint64_t, std::shared_ptr<Log>> logs_;
    std::vector<SessionRecord> history_;
    std::map<const ppt::PlanEntry*, std::size_t> replay_uses_;
    ppt::PPTMatrix matrix_;
    std::uint64_t next_id_ = 1;
    std::jthread worker_;
};

// HTTP front end. GET /api/state, POST /api/session/{start,mark,abort},
// GET /api/session/stream (server-sent events), GET /api/matrix, GET /api/selection.
class HttpServer {
public:
    explicit HttpServer(SessionService& service, std::optional<std::string> static_dir = std::nullopt);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    // Binds; port 0 picks an ephemeral one. Returns the bound port, throws Error on failure.
    int bind(const std::string& host, int port);
    void listen();  // blocks until stop()
    void wait_until_ready() const;
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// JSON bodies shared by the HTTP layer and tests.
std::string snapshot_to_json(const Snapshot& s);
std::string record_to_json(const SessionRecord& r);
std::string selection_to_json(const SessionService& service);
StartRequest parse_start_request(std::string_view body);

}  // namespace socketbench::service
