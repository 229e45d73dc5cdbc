#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <condition_variable>
#include <deque>
#include <istream>
#include <mutex>
#include <thread>

#include "socketbench/catalog.hpp"
#include "socketbench/delimited.hpp"
#include "socketbench/ppt.hpp"
#include "socketbench/service.hpp"
#include "test_support.hpp"

using namespace socketbench;
using namespace socketbench::service;
using namespace std::chrono_literals;
using nlohmann::json;

namespace {

// Runs an HttpServer on an ephemeral port for the lifetime of the object.
class Harness {
public:
    explicit Harness(ServiceConfig cfg) : service(std::move(cfg)), server(service) {
        port = server.bind("127.0.0.1", 0);
        thread = std::thread([this] { server.listen(); });
        server.wait_until_ready();
    }
    ~Harness() {
        server.stop();
        thread.join();
    }

    httplib::Client client() const {
        httplib::Client c("127.0.0.1", port);
        c.set_read_timeout(20, 0);
        return c;
    }

    json get(const std::string& path) const {
        auto c = client();
        auto res = c.Get(path);
        REQUIRE(res);
        REQUIRE(res->status == 200);
        return json::parse(res->body);
    }

    httplib::Result post(const std::string& path, const json& body) const {
        auto c = client();
        return c.Post(path, body.dump(), "application/json");
    }

    SessionService service;
    HttpServer server;
    int port = 0;
    std::thread thread;
};

ServiceConfig replay_config(double rate_hz, bool auto_mark, double rest_scale = 0.0) {
    ServiceConfig cfg;
    cfg.catalog = catalog::load_catalog(catalog_path());
    cfg.replay = ppt::load_session_plan(fixture("ppt/plan.json"));
    cfg.rate_hz = rate_hz;
    cfg.auto_mark = auto_mark;
    cfg.rest_scale = rest_scale;
    return cfg;
}

json start_body(const std::string& region, const std::string& material, double t) {
    return {{"region", region}, {"material", material}, {"thickness_mm", t}};
}

struct SseEvent {
    std::optional<std::size_t> id;
    std::string type;
    json data;
};

std::vector<SseEvent> parse_sse(const std::string& text) {
    std::vector<SseEvent> out;
    std::size_t pos = 0;
    while (true) {
        const auto end = text.find("\n\n", pos);
        if (end == std::string::npos) break;
        const std::string block = text.substr(pos, end - pos);
        pos = end + 2;
        SseEvent e;
        std::istringstream lines(block);
        std::string line;
        bool any = false;
        while (std::getline(lines, line)) {
            if (line.starts_with(":")) continue;
            any = true;
            if (line.starts_with("id: ")) e.id = std::stoul(line.substr(4));
            else if (line.starts_with("event: ")) e.type = line.substr(7);
            else if (line.starts_with("data: ")) e.data = json::parse(line.substr(6));
        }
        if (any) out.push_back(std::move(e));
    }
    return out;
}

std::string read_sse(const Harness& h, const std::string& path, const httplib::Headers& headers = {}) {
    auto c = h.client();
    std::string body;
    auto res = c.Get(path, headers, [&](const char* data, std::size_t n) {
        body.append(data, n);
        return true;
    });
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->get_header_value("Content-Type").find("text/event-stream") != std::string::npos);
    return body;
}

// Blocking in-memory input: getline waits until text is pushed or the buffer closes.
class BlockingBuf : public std::streambuf {
public:
    void push(const std::string& s) {
        std::lock_guard lock(mu_);
        pending_ += s;
        cv_.notify_all();
    }
    void close() {
        std::lock_guard lock(mu_);
        closed_ = true;
        cv_.notify_all();
    }

protected:
    int_type underflow() override {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return !pending_.empty() || closed_; });
        if (pending_.empty()) return traits_type::eof();
        current_.assign(pending_);
        pending_.clear();
        setg(current_.data(), current_.data(), current_.data() + current_.size());
        return traits_type::to_int_type(current_[0]);
    }

private:
    std::mutex mu_;
    std::condition_variable cv_;
    std::string pending_;
    std::string current_;
    bool closed_ = false;
};

template <class Pred>
bool eventually(Pred p, std::chrono::milliseconds limit = 5000ms) {
    const auto until = std::chrono::steady_clock::now() + limit;
    while (std::chrono::steady_clock::now() < until) {
        if (p()) return true;
        std::this_thread::sleep_for(5ms);
    }
    return p();
}

}  // namespace

TEST_CASE("state endpoint before any session") {
    Harness h(replay_config(1000, true));
    const auto s = h.get("/api/state");
    CHECK(s["state"] == "idle");
    CHECK(s["source"] == "replay");
    CHECK(s["session"].is_null());
    CHECK(s["history"].empty());
    CHECK(h.get("/api/matrix")["entries"].empty());
    const auto sel = h.get("/api/selection");
    CHECK(sel["complete"] == false);
    CHECK(sel["missing"].size() == 3);
    auto c = h.client();
    auto res = c.Get("/api/session/stream");
    REQUIRE(res);
    CHECK(res->status == 404);
}

TEST_CASE("start, conflict and request validation") {
    Harness h(replay_config(80, false, 1.0));  // real-time rest: the session stays resting
    auto res = h.post("/api/session/start", start_body("Tibia", "tpu", 4.0));
    REQUIRE(res);
    CHECK(res->status == 201);
    const auto rec = json::parse(res->body);
    CHECK(rec["state"] == "resting");
    CHECK(rec["required_rest_s"] == 900.0);

    res = h.post("/api/session/start", start_body("Fibula", "kevlar", 5.5));
    REQUIRE(res);
    CHECK(res->status == 409);
    CHECK(json::parse(res->body).contains("error"));

    res = h.post("/api/session/mark", json::object());
    REQUIRE(res);
    CHECK(res->status == 409);  // resting, not ramping

    res = h.post("/api/session/abort", {{"reason", "participant withdrew"}});
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(json::parse(res->body)["state"] == "aborted");
    CHECK(json::parse(res->body)["abort_reason"] == "participant withdrew");

    res = h.post("/api/session/abort", json::object());
    REQUIRE(res);
    CHECK(res->status == 409);

    auto c = h.client();
    auto bad = c.Post("/api/session/start", "{nope", "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 400);
    res = h.post("/api/session/start", start_body("Tibia", "balsa", 4.0));
    REQUIRE(res);
    CHECK(res->status == 400);
    res = h.post("/api/session/start", start_body("Tibia", "tpu", -1));
    REQUIRE(res);
    CHECK(res->status == 400);
    res = h.post("/api/session/start", start_body("Calf", "tpu", 9.9));  // no recorded stream
    REQUIRE(res);
    CHECK(res->status == 404);

    // the second session gets the shorter rest; override goes straight to the ramp
    json body = start_body("Fibula", "kevlar", 5.5);
    body["rest_override"] = true;
    res = h.post("/api/session/start", body);
    REQUIRE(res);
    CHECK(res->status == 201);
    const auto second = json::parse(res->body);
    CHECK(second["required_rest_s"] == 600.0);
    CHECK(second["state"] == "ramping");
    CHECK_FALSE(second["notes"].empty());
    CHECK(h.post("/api/session/abort", json::object())->status == 200);
}

TEST_CASE("manual mark during a replayed ramp") {
    Harness h(replay_config(400, false));
    REQUIRE(h.post("/api/session/start", start_body("Tibia", "tpu", 4.0))->status == 201);
    REQUIRE(eventually([&] { return h.get("/api/state")["session"]["samples"].get<int>() >= 40; }));
    auto res = h.post("/api/session/mark", json::object());
    REQUIRE(res);
    REQUIRE(res->status == 200);
    const auto rec = json::parse(res->body);
    CHECK(rec["state"] == "marked");
    const double force = rec["pain_force_n"].get<double>();
    CHECK(force > 0);
    CHECK(rec["ppt_mpa"].get<double>() == doctest::Approx(force / 100.0));
    CHECK(h.post("/api/session/mark", json::object())->status == 409);
    const auto matrix = h.get("/api/matrix");
    REQUIRE(matrix["entries"].size() == 1);
    CHECK(matrix["entries"][0]["ppt_mpa"].get<double>() == doctest::Approx(force / 100.0));
}

TEST_CASE("live source: mark at 22.9 N gives 0.229 MPa") {
    BlockingBuf buf;
    std::istream in(&buf);
    LineSource source(in);
    ServiceConfig cfg;
    cfg.catalog = catalog::load_catalog(catalog_path());
    cfg.live = &source;
    cfg.live_calibration = LinearCalibration::identity();
    cfg.rest_scale = 0;
    {
        Harness h(std::move(cfg));
        CHECK(h.get("/api/state")["source"] == "live");
        REQUIRE(h.post("/api/session/start", start_body("Tibia", "tpu", 4.0))->status == 201);
        REQUIRE(eventually([&] { return h.get("/api/state")["session"]["state"] == "ramping"; }));
        std::string lines = "# header comment\n";
        for (int i = 1; i <= 229; ++i)
            lines += format_fixed(i * 0.0125, 4) + "," + format_fixed(i * 0.1, 1) + "\n";
        lines += "garbage line\n0.0125,99\n";  // malformed, then a stale stamp
        buf.push(lines);
        REQUIRE(eventually([&] { return source.rejected() == 1 && h.get("/api/state")["session"]["samples"] == 229; }));
        std::this_thread::sleep_for(150ms);
        CHECK(h.get("/api/state")["session"]["samples"] == 229);  // the stale stamp was dropped
        const auto rec = json::parse(h.post("/api/session/mark", json::object())->body);
        CHECK(rec["pain_force_n"].get<double>() == doctest::Approx(22.9));
        CHECK(rec["ppt_mpa"].get<double>() == doctest::Approx(0.229));

        // the next session aborts on a reading above the limit
        REQUIRE(h.post("/api/session/start", start_body("Calf", "kevlar", 7.5))->status == 201);
        REQUIRE(eventually([&] { return h.get("/api/state")["session"]["state"] == "ramping"; }));
        buf.push("10,150\n10.1,205\n");
        REQUIRE(eventually([&] { return h.get("/api/state")["session"]["state"] == "aborted"; }));
        const auto s = h.get("/api/state");
        CHECK(s["session"]["abort_reason"].get<std::string>().find("force limit") != std::string::npos);
        CHECK(s["session"]["samples"] == 1);

        // closing the input ends a ramping session
        REQUIRE(h.post("/api/session/start", start_body("Fibula", "kevlar", 5.5))->status == 201);
        REQUIRE(eventually([&] { return h.get("/api/state")["session"]["state"] == "ramping"; }));
        buf.close();
        REQUIRE(eventually([&] { return h.get("/api/state")["session"]["state"] == "aborted"; }));
        CHECK(h.get("/api/state")["session"]["abort_reason"] == "source exhausted");
    }
}

TEST_CASE("event stream ordering, completeness and resume") {
    Harness h(replay_config(1000, true));
    REQUIRE(h.post("/api/session/start", start_body("Tibia", "tpu", 3.0))->status == 201);
    const auto events = parse_sse(read_sse(h, "/api/session/stream"));
    REQUIRE(events.size() >= 2);
    CHECK(events.back().type == "end");
    CHECK(events.back().data["state"] == "marked");
    std::size_t expected = 0;
    double last_t = -1;
    for (std::size_t i = 0; i + 1 < events.size(); ++i) {
        REQUIRE(events[i].type == "sample");
        REQUIRE(events[i].id);
        CHECK(*events[i].id == expected++);
        CHECK(events[i].data["t_s"].get<double>() > last_t);
        last_t = events[i].data["t_s"].get<double>();
    }
    const auto state = h.get("/api/state");
    CHECK(expected == state["session"]["samples"].get<std::size_t>());
    CHECK(events[events.size() - 2].data["force_n"].get<double>() ==
          doctest::Approx(state["session"]["pain_force_n"].get<double>()));

    // reconnect after id 100: delivery restarts at 101 with nothing repeated
    const std::string id = std::to_string(state["session"]["id"].get<int>());
    const auto resumed = parse_sse(read_sse(h, "/api/session/stream?session=" + id, {{"Last-Event-ID", "100"}}));
    REQUIRE(resumed.size() == expected - 101 + 1);
    CHECK(*resumed.front().id == 101);
    CHECK(resumed.back().type == "end");
    const auto from = parse_sse(read_sse(h, "/api/session/stream?session=" + id + "&from=" + std::to_string(expected)));
    REQUIRE(from.size() == 1);
    CHECK(from[0].type == "end");

    auto c = h.client();
    auto res = c.Get("/api/session/stream?session=999");
    REQUIRE(res);
    CHECK(res->status == 404);
    res = c.Get("/api/session/stream?session=abc");
    REQUIRE(res);
    CHECK(res->status == 400);
}

TEST_CASE("slow stream reader loses nothing") {
    Harness h(replay_config(4000, true));
    REQUIRE(h.post("/api/session/start", start_body("Fibula", "carbon_fiber", 5.5))->status == 201);
    auto c = h.client();
    std::string body;
    std::size_t chunks = 0;
    auto res = c.Get("/api/session/stream", [&](const char* data, std::size_t n) {
        body.append(data, n);
        if (++chunks < 20) std::this_thread::sleep_for(20ms);
        return true;
    });
    REQUIRE(res);
    const auto events = parse_sse(body);
    const auto samples = h.get("/api/state")["session"]["samples"].get<std::size_t>();
    REQUIRE(events.size() == samples + 1);
    for (std::size_t i = 0; i < samples; ++i) CHECK(*events[i].id == i);
}

TEST_CASE("force limit abort in replay") {
    Harness h(replay_config(20000, true));
    REQUIRE(h.post("/api/session/start", start_body("Calf", "tpu", 3.0))->status == 201);
    REQUIRE(h.service.wait_until_terminal(20s));
    const auto s = h.get("/api/state");
    CHECK(s["session"]["state"] == "aborted");
    CHECK(s["session"]["abort_reason"].get<std::string>().find("force limit") != std::string::npos);
    CHECK(s["session"]["last_force_n"].get<double>() <= 200.0);
    CHECK(h.get("/api/matrix")["entries"].empty());
}

TEST_CASE("full replay through the API yields the published matrix and selection") {
    Harness h(replay_config(20000, true));
    const auto plan = ppt::load_session_plan(fixture("ppt/plan.json"));
    for (const auto& e : plan.entries) {
        json body = start_body(std::string(catalog::to_string(e.session.region)), e.session.specimen.material,
                               e.session.specimen.thickness_mm);
        body["screening"] = e.session.screening;
        auto res = h.post("/api/session/start", body);
        REQUIRE(res);
        REQUIRE(res->status == 201);
        REQUIRE(h.service.wait_until_terminal(20s));
    }
    const auto expected = ppt::replay_plan(plan).matrix;
    const auto got = ppt::parse_matrix(h.client().Get("/api/matrix")->body);
    CHECK(got.entries().size() == expected.entries().size());
    for (const auto& [key, v] : expected.entries()) {
        CAPTURE(key.material);
        REQUIRE(got.value(key));
        CHECK(*got.value(key) == doctest::Approx(v).epsilon(1e-12));
    }
    const auto sel = h.get("/api/selection");
    CHECK(sel["complete"] == true);
    CHECK(sel["regions"]["Tibia"]["material"] == "tpu");
    CHECK(sel["regions"]["Tibia"]["thickness_mm"] == 4.0);
    CHECK(sel["regions"]["Fibula"]["material"] == "carbon_fiber");
    CHECK(sel["regions"]["Fibula"]["thickness_mm"] == 5.5);
    CHECK(sel["regions"]["Calf"]["material"] == "kevlar");
    CHECK(sel["regions"]["Calf"]["thickness_mm"] == 7.5);
    const auto state = h.get("/api/state");
    CHECK(state["history"].size() == plan.entries.size());
    CHECK(state["history"][0]["required_rest_s"] == 900.0);
    CHECK(state["history"][1]["required_rest_s"] == 600.0);
}

TEST_CASE("replay is bit-identical across runs") {
    auto run = [] {
        ServiceConfig cfg = replay_config(20000, true);
        SessionService svc(std::move(cfg));
        std::vector<ppt::ForceSample> all;
        for (const auto& [region, mat, t] : {std::tuple{catalog::Region::tibia, "tpu", 4.0},
                                              std::tuple{catalog::Region::fibula, "kevlar", 5.5}}) {
            const auto rec = svc.start({region, mat, t, false, false});
            REQUIRE(svc.wait_until_terminal(20s));
            const auto batch = svc.read_stream(rec.id, 0, 0ms);
            all.insert(all.end(), batch.samples.begin(), batch.samples.end());
        }
        return std::pair{all, ppt::serialize_matrix(svc.matrix())};
    };
    const auto a = run();
    const auto b = run();
    REQUIRE(a.first.size() == b.first.size());
    for (std::size_t i = 0; i < a.first.size(); ++i) {
        CHECK(a.first[i].t_s == b.first[i].t_s);
        CHECK(a.first[i].force_n == b.first[i].force_n);
    }
    CHECK(a.second == b.second);
}
