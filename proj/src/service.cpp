#include "socketbench/service.hpp"

#include <charconv>
#include <cmath>

#include "json_util.hpp"
#include "socketbench/delimited.hpp"

namespace socketbench::service {

using namespace std::chrono_literals;
using Clock = std::chrono::steady_clock;
using detail::json;

// ---------------------------------------------------------------- LineSource

namespace {

std::optional<Reading> parse_reading(std::string_view line) {
    const auto comma = line.find(',');
    if (comma == std::string_view::npos) return std::nullopt;
    auto number = [](std::string_view s) -> std::optional<double> {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
        double v = 0.0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
        return v;
    };
    const auto t = number(line.substr(0, comma));
    const auto v = number(line.substr(comma + 1));
    if (!t || !v) return std::nullopt;
    return Reading{*t, *v};
}

}  // namespace

LineSource::LineSource(std::istream& in) : state_(std::make_shared<State>()) {
    reader_ = std::thread([state = state_, &in] {
        std::string line;
        while (std::getline(in, line)) {
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#') continue;
            const auto r = parse_reading(line);
            std::lock_guard lock(state->mu);
            if (r)
                state->queue.push_back(*r);
            else
                ++state->rejected;
            state->cv.notify_all();
        }
        std::lock_guard lock(state->mu);
        state->closed = true;
        state->cv.notify_all();
    });
}

LineSource::~LineSource() {
    bool done = false;
    {
        std::lock_guard lock(state_->mu);
        done = state_->closed;
    }
    // a reader blocked on an open terminal cannot be interrupted portably
    if (done)
        reader_.join();
    else
        reader_.detach();
}

std::optional<Reading> LineSource::next(std::chrono::milliseconds timeout) {
    std::unique_lock lock(state_->mu);
    state_->cv.wait_for(lock, timeout, [&] { return !state_->queue.empty() || state_->closed; });
    if (state_->queue.empty()) return std::nullopt;
    const Reading r = state_->queue.front();
    state_->queue.pop_front();
    return r;
}

bool LineSource::closed() const {
    std::lock_guard lock(state_->mu);
    return state_->closed && state_->queue.empty();
}

std::size_t LineSource::rejected() const {
    std::lock_guard lock(state_->mu);
    return state_->rejected;
}

void LineSource::discard_pending() {
    std::lock_guard lock(state_->mu);
    state_->queue.clear();
}

// ---------------------------------------------------------------- SessionService

SessionService::SessionService(ServiceConfig config) : config_(std::move(config)) {
    if (!(config_.rate_hz > 0)) throw ValidationError("rate_hz", "must be > 0");
    if (!(config_.rest_scale >= 0)) throw ValidationError("rest_scale", "must be >= 0");
    if (!config_.replay && !config_.live) throw ValidationError("source", "either a replay plan or a live source");
    if (config_.replay) config_.max_force_limit_n = config_.replay->max_force_limit_n;
    for (const auto r : ppt::selection_regions) matrix_.set_probe_area(r, probe_area(r));
}

SessionService::~SessionService() {
    if (worker_.joinable()) {
        worker_.request_stop();
        {
            std::lock_guard lock(mu_);
            cv_.notify_all();
        }
        worker_.join();
    }
}

double SessionService::probe_area(catalog::Region r) const {
    if (config_.replay) return config_.replay->probe_area(r);
    const auto* spec = config_.catalog.find_region(r);
    return spec && spec->probe_area_mm2 ? *spec->probe_area_mm2 : 100.0;
}

bool SessionService::active() const { return current_ && !current_->session.terminal(); }

SessionRecord SessionService::record_of(const Active& a) const {
    const auto& s = a.session;
    SessionRecord r;
    r.id = a.id;
    r.region = s.region();
    r.specimen = s.specimen();
    r.screening = s.screening;
    r.state = s.state();
    r.required_rest_s = s.required_rest_s();
    r.remaining_rest_s = s.remaining_rest_s();
    r.samples = s.samples().size();
    if (!s.samples().empty()) r.last_force_n = s.samples().back().force_n;
    r.pain_force_n = s.pain_force_n();
    if (s.state() == ppt::SessionState::marked) r.ppt_mpa = ppt::ppt_value(s, probe_area(s.region()));
    r.abort_reason = s.abort_reason();
    r.notes = s.notes();
    return r;
}

SessionRecord SessionService::start(const StartRequest& req) {
    std::lock_guard start_lock(start_mu_);
    {
        std::lock_guard lock(mu_);
        if (active()) throw ConflictError("a session is already active (id " + std::to_string(current_->id) + ")");
    }
    if (worker_.joinable()) worker_.join();  // previous session is terminal; its worker is on the way out

    if (req.region == catalog::Region::rest) throw ValidationError("region", "PPT sessions cover Tibia, Fibula or Calf");
    config_.catalog.material(req.material);
    if (!(req.thickness_mm > 0)) throw ValidationError("thickness_mm", "must be > 0");
    const ppt::Specimen specimen{req.material, req.thickness_mm};

    const ppt::PlanEntry* entry = nullptr;
    LinearCalibration cal = config_.live_calibration;
    if (config_.replay) {
        // repeated specimens step through their recorded streams; the screening flag picks first
        std::size_t best_uses = 0;
        for (const auto* e : config_.replay->find_all(req.region, specimen)) {
            const std::size_t uses = replay_uses_[e] + (e->session.screening == req.screening ? 0 : 1'000'000);
            if (!entry || uses < best_uses) {
                entry = e;
                best_uses = uses;
            }
        }
        if (!entry)
            throw NotFoundError("no recorded stream for " + std::string(catalog::to_string(req.region)) + " " +
                                req.material + " " + format_fixed(req.thickness_mm, 2) + " mm");
        cal = entry->stream.raw ? config_.replay->calibration : LinearCalibration::identity();
    }

    std::lock_guard lock(mu_);
    Active a;
    a.id = next_id_++;
    a.session = ppt::PPTSession(req.region, specimen, cal, config_.max_force_limit_n);
    a.session.screening = req.screening || (entry && entry->session.screening);
    a.session.apply(ppt::event::StartRest{history_.empty() ? ppt::first_rest_s : ppt::between_rest_s});
    if (req.rest_override) a.session.apply(ppt::event::StartRamp{true});
    a.log = std::make_shared<Log>();
    a.plan_entry = entry;
    if (entry) ++replay_uses_[entry];
    logs_[a.id] = a.log;
    current_ = std::move(a);
    if (config_.live) config_.live->discard_pending();
    const auto id = current_->id;
    worker_ = std::jthread([this, id](std::stop_token st) { run_session(id, st); });
    cv_.notify_all();
    return record_of(*current_);
}

SessionRecord SessionService::mark() {
    std::lock_guard lock(mu_);
    if (!active() || current_->session.state() != ppt::SessionState::ramping)
        throw ConflictError("mark: no session is ramping");
    if (current_->session.samples().empty()) throw ConflictError("mark: no samples recorded yet");
    current_->session.apply(ppt::event::MarkPain{});
    finalize();
    return record_of(*current_);
}

SessionRecord SessionService::abort(const std::string& reason) {
    std::lock_guard lock(mu_);
    if (!active()) throw ConflictError("abort: no active session");
    current_->session.apply(ppt::event::Abort{reason.empty() ? "operator abort" : reason});
    finalize();
    return record_of(*current_);
}

void SessionService::finalize() {
    auto& a = *current_;
    a.log->ended = true;
    auto rec = record_of(a);
    if (rec.ppt_mpa && !rec.screening) matrix_.record({rec.region, rec.specimen.material, rec.specimen.thickness_mm}, *rec.ppt_mpa);
    history_.push_back(std::move(rec));
    cv_.notify_all();
}

void SessionService::ingest(const Reading& r) {
    auto& a = *current_;
    const auto before = a.session.samples().size();
    a.session.apply(ppt::event::Sample{r.t_s, r.value});
    if (a.session.state() == ppt::SessionState::aborted) {
        finalize();
        return;
    }
    if (a.session.samples().size() > before) a.log->samples.push_back(a.session.samples().back());
    if (a.log->samples.size() >= config_.max_samples_per_session) {
        a.session.apply(ppt::event::Abort{"sample log overflow"});
        finalize();
        return;
    }
    cv_.notify_all();
}

void SessionService::run_session(std::uint64_t id, std::stop_token stop) {
    if (!run_rest(id, stop)) return;
    if (config_.replay)
        run_replay(id, stop);
    else
        run_live(id, stop);
}

bool SessionService::run_rest(std::uint64_t id, std::stop_token stop) {
    std::unique_lock lock(mu_);
    auto last = Clock::now();
    while (true) {
        if (stop.stop_requested() || !active() || current_->id != id) return false;
        auto& s = current_->session;
        if (s.state() != ppt::SessionState::resting) return s.state() == ppt::SessionState::ramping;
        const auto now = Clock::now();
        const double wall = std::chrono::duration<double>(now - last).count();
        last = now;
        const double remaining = s.remaining_rest_s();
        const double credit = config_.rest_scale == 0.0 ? remaining : std::min(remaining, wall / config_.rest_scale);
        s.apply(ppt::event::RestElapsed{credit});
        if (s.remaining_rest_s() <= 0.0) {
            s.apply(ppt::event::StartRamp{});
            cv_.notify_all();
            return true;
        }
        cv_.wait_for(lock, 50ms);
    }
}

void SessionService::run_replay(std::uint64_t id, std::stop_token stop) {
    std::unique_lock lock(mu_);
    if (!active() || current_->id != id) return;
    const ppt::PlanEntry& entry = *current_->plan_entry;
    const auto& stream = entry.stream;
    const auto t0 = Clock::now();
    const auto period = std::chrono::duration<double>(1.0 / config_.rate_hz);
    for (std::size_t i = 0; i < stream.size(); ++i) {
        const auto due = t0 + std::chrono::duration_cast<Clock::duration>(period * static_cast<double>(i));
        cv_.wait_until(lock, due, [&] { return stop.stop_requested() || !active() || current_->id != id; });
        if (stop.stop_requested() || !active() || current_->id != id) return;
        const bool marking = config_.auto_mark && entry.mark_at_s;
        // a mark time between samples lands on the last sample before it, as in offline replay
        if (marking && stream.t_s[i] > *entry.mark_at_s + 1e-9 && !current_->session.samples().empty()) {
            current_->session.apply(ppt::event::MarkPain{});
            finalize();
            return;
        }
        ingest({stream.t_s[i], stream.value[i]});
        if (!active()) return;
        if (marking && stream.t_s[i] >= *entry.mark_at_s - 1e-9) {
            current_->session.apply(ppt::event::MarkPain{});
            finalize();
            return;
        }
    }
    if (active() && current_->id == id) {
        current_->session.apply(ppt::event::Abort{"source exhausted"});
        finalize();
    }
}

void SessionService::run_live(std::uint64_t id, std::stop_token stop) {
    while (true) {
        const auto reading = config_.live->next(100ms);
        std::lock_guard lock(mu_);
        if (stop.stop_requested() || !active() || current_->id != id) return;
        if (reading) {
            const auto& samples = current_->session.samples();
            if (!samples.empty() && !(reading->t_s > samples.back().t_s)) continue;  // stale or repeated stamp
            ingest(*reading);
        } else if (config_.live->closed()) {
            current_->session.apply(ppt::event::Abort{"source exhausted"});
            finalize();
            return;
        }
    }
}

Snapshot SessionService::snapshot() const {
    std::lock_guard lock(mu_);
    Snapshot s;
    if (current_) s.current = record_of(*current_);
    s.history = history_;
    s.source = config_.replay ? "replay" : "live";
    s.max_force_limit_n = config_.max_force_limit_n;
    return s;
}

std::optional<std::uint64_t> SessionService::current_session_id() const {
    std::lock_guard lock(mu_);
    if (!current_) return std::nullopt;
    return current_->id;
}

StreamBatch SessionService::read_stream(std::uint64_t session_id, std::size_t cursor,
                                        std::chrono::milliseconds timeout) const {
    std::unique_lock lock(mu_);
    auto it = logs_.find(session_id);
    if (it == logs_.end()) throw NotFoundError("unknown session " + std::to_string(session_id));
    const auto log = it->second;
    cv_.wait_for(lock, timeout, [&] { return log->samples.size() > cursor || log->ended; });
    StreamBatch b;
    b.first_index = cursor;
    if (cursor < log->samples.size())
        b.samples.assign(log->samples.begin() + static_cast<std::ptrdiff_t>(cursor), log->samples.end());
    b.ended = log->ended;
    if (b.ended)
        for (const auto& h : history_)
            if (h.id == session_id) b.final_state = h.state;
    return b;
}

ppt::PPTMatrix SessionService::matrix() const {
    std::lock_guard lock(mu_);
    return matrix_;
}

bool SessionService::wait_until_terminal(std::chrono::milliseconds timeout) const {
    std::unique_lock lock(mu_);
    return cv_.wait_for(lock, timeout, [&] { return !active(); });
}

// ---------------------------------------------------------------- JSON

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json record_json(const SessionRecord& r) {
    return {{"id", r.id},
            {"region", catalog::to_string(r.region)},
            {"material", r.specimen.material},
            {"thickness_mm", r.specimen.thickness_mm},
            {"screening", r.screening},
            {"state", ppt::to_string(r.state)},
            {"required_rest_s", r.required_rest_s},
            {"remaining_rest_s", r.remaining_rest_s},
            {"samples", r.samples},
            {"last_force_n", optional_number(r.last_force_n)},
            {"pain_force_n", optional_number(r.pain_force_n)},
            {"ppt_mpa", optional_number(r.ppt_mpa)},
            {"abort_reason", r.abort_reason.empty() ? json(nullptr) : json(r.abort_reason)},
            {"notes", r.notes}};
}

}  // namespace

std::string record_to_json(const SessionRecord& r) { return record_json(r).dump(); }

std::string snapshot_to_json(const Snapshot& s) {
    json history = json::array();
    for (const auto& h : s.history) history.push_back(record_json(h));
    const bool busy =
        s.current && s.current->state != ppt::SessionState::marked && s.current->state != ppt::SessionState::aborted;
    json doc = {{"units", {{"force", "N"}, {"ppt", "MPa"}, {"time", "s"}, {"thickness", "mm"}}},
                {"source", s.source},
                {"state", busy ? ppt::to_string(s.current->state) : "idle"},
                {"max_force_limit_n", s.max_force_limit_n},
                {"session", s.current ? record_json(*s.current) : json(nullptr)},
                {"history", history}};
    return doc.dump();
}

std::string selection_to_json(const SessionService& service) {
    const auto matrix = service.matrix();
    json missing = json::array();
    for (const auto r : ppt::selection_regions)
        if (!matrix.has_region(r)) missing.push_back(catalog::to_string(r));
    if (!missing.empty()) return json{{"complete", false}, {"missing", missing}, {"regions", json::object()}}.dump();
    json doc = json::parse(ppt::serialize_selection(ppt::select_materials(matrix, service.catalog()), service.catalog()));
    doc["complete"] = true;
    doc["missing"] = json::array();
    return doc.dump();
}

StartRequest parse_start_request(std::string_view body) {
    using namespace detail;
    const json doc = parse_json(body, "start request");
    StartRequest r;
    r.region = catalog::parse_region(get_string(doc, "region", "start"));
    r.material = get_string(doc, "material", "start");
    r.thickness_mm = get_number(doc, "thickness_mm", "start");
    if (auto it = doc.find("rest_override"); it != doc.end()) {
        if (!it->is_boolean()) throw ParseError("start.rest_override: expected a boolean");
        r.rest_override = it->get<bool>();
    }
    if (auto it = doc.find("screening"); it != doc.end()) {
        if (!it->is_boolean()) throw ParseError("start.screening: expected a boolean");
        r.screening = it->get<bool>();
    }
    return r;
}

}  // namespace socketbench::service
