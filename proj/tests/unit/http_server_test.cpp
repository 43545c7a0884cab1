#include <gtest/gtest.h>

#include <atomic>
#include <condition_variable>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "fixture.hpp"
#include "generators.hpp"
#include "semtour/service.hpp"

using namespace semtour;
using namespace semtour::testing;

namespace {

struct SseEvent {
    std::uint64_t id = 0;
    std::string event;
    Json data;
};

// Incremental parser for the frames written by sse_frame.
class SseCollector {
public:
    bool feed(const char* data, std::size_t size) {
        std::lock_guard lock(mutex_);
        buffer_.append(data, size);
        std::size_t end;
        while ((end = buffer_.find("\n\n")) != std::string::npos) {
            const std::string frame = buffer_.substr(0, end);
            buffer_.erase(0, end + 2);
            SseEvent ev;
            std::size_t pos = 0;
            while (pos < frame.size()) {
                std::size_t nl = frame.find('\n', pos);
                if (nl == std::string::npos) nl = frame.size();
                const std::string line = frame.substr(pos, nl - pos);
                pos = nl + 1;
                if (line.rfind("id: ", 0) == 0) ev.id = std::stoull(line.substr(4));
                if (line.rfind("event: ", 0) == 0) ev.event = line.substr(7);
                if (line.rfind("data: ", 0) == 0) ev.data = Json::parse(line.substr(6));
            }
            events_.push_back(std::move(ev));
        }
        changed_.notify_all();
        return !stop_;
    }

    bool wait_for(std::size_t count, std::chrono::seconds timeout) {
        std::unique_lock lock(mutex_);
        return changed_.wait_for(lock, timeout, [&] { return events_.size() >= count; });
    }

    std::vector<SseEvent> events() {
        std::lock_guard lock(mutex_);
        return events_;
    }

    void stop() { stop_ = true; }

private:
    std::mutex mutex_;
    std::condition_variable changed_;
    std::string buffer_;
    std::vector<SseEvent> events_;
    std::atomic<bool> stop_{false};
};

class HttpServerTest : public ::testing::Test {
protected:
    void SetUp() override {
        service.add_documents(fixture().documents);
        service.add_graph(build_graph(fixture().documents, fixture().config).graph);
        server = std::make_unique<HttpServer>(service, ServerOptions{"127.0.0.1", 0, std::chrono::milliseconds(50)});
        port = server->start();
        ASSERT_GT(port, 0);
    }

    void TearDown() override { server->stop(); }

    httplib::Client client() {
        httplib::Client c("127.0.0.1", port);
        c.set_read_timeout(10, 0);
        return c;
    }

    Json post_ok(const std::string& path, const Json& body, int status = 200) {
        auto c = client();
        auto r = c.Post(path, body.dump(), "application/json");
        EXPECT_TRUE(r) << path;
        if (!r) return {};
        EXPECT_EQ(r->status, status) << path << " " << r->body;
        return Json::parse(r->body);
    }

    std::string open_session() {
        const Json tours = post_ok("/tours/seed", {{"document", "Fall"}}, 201)["tours"];
        return post_ok("/sessions", {{"tour", tours[0]["id"]}}, 201)["session"];
    }

    Service service{counting_clock()};
    std::unique_ptr<HttpServer> server;
    int port = 0;
};

}  // namespace

TEST_F(HttpServerTest, ServesJsonOverTheWire) {
    auto c = client();
    auto health = c.Get("/healthz");
    ASSERT_TRUE(health);
    EXPECT_EQ(health->status, 200);
    EXPECT_EQ(health->get_header_value("Content-Type"), "application/json");
    EXPECT_EQ(Json::parse(health->body), (Json{{"status", "ok"}}));

    auto search = c.Get("/graphs/default/entities?q=Urlaub");
    ASSERT_TRUE(search);
    EXPECT_EQ(search->status, 200);
    EXPECT_FALSE(Json::parse(search->body)["hits"].empty());

    auto missing = c.Get("/sessions/s-404/lens");
    ASSERT_TRUE(missing);
    EXPECT_EQ(missing->status, 404);
    EXPECT_EQ(Json::parse(missing->body)["code"], "UnknownSession");

    auto bad = c.Post("/tours/seed", "{oops", "application/json");
    ASSERT_TRUE(bad);
    EXPECT_EQ(bad->status, 400);
    EXPECT_EQ(Json::parse(bad->body)["code"], "SchemaError");

    auto unknown = c.Put("/healthz", "", "application/json");
    ASSERT_TRUE(unknown);
    EXPECT_EQ(unknown->status, 404);
}

TEST_F(HttpServerTest, SessionMovesOverHttp) {
    const std::string base = "/sessions/" + open_session();
    EXPECT_EQ(post_ok(base + "/step", {{"edge", "e000061"}})["current"], "BGB/s651n");
    EXPECT_EQ(post_ok(base + "/navigate", {{"entity", "StGB/s223"}})["move"]["kind"], "detour");
    auto c = client();
    auto conflict = c.Post(base + "/detour", Json{{"entity", "BGB/s253"}}.dump(), "application/json");
    ASSERT_TRUE(conflict);
    EXPECT_EQ(conflict->status, 409);
    auto log = c.Get(base + "/log");
    ASSERT_TRUE(log);
    EXPECT_EQ(load_session_log(log->body).size(), 3u);
}

TEST_F(HttpServerTest, EventStreamWithoutFollowHonoursLastEventId) {
    const std::string base = "/sessions/" + open_session();
    post_ok(base + "/step", {{"edge", "e000061"}});
    auto c = client();
    auto all = c.Get(base + "/events?follow=0");
    ASSERT_TRUE(all);
    EXPECT_EQ(all->get_header_value("Content-Type"), "text/event-stream");
    SseCollector parsed;
    parsed.feed(all->body.data(), all->body.size());
    ASSERT_EQ(parsed.events().size(), 2u);
    EXPECT_EQ(parsed.events()[1].event, "step");

    auto resumed = c.Get(base + "/events?follow=0", httplib::Headers{{"Last-Event-ID", "0"}});
    ASSERT_TRUE(resumed);
    SseCollector tail;
    tail.feed(resumed->body.data(), resumed->body.size());
    ASSERT_EQ(tail.events().size(), 1u);
    EXPECT_EQ(tail.events()[0].id, 1u);
}

TEST_F(HttpServerTest, FollowedStreamDeliversEveryEventOnceInOrder) {
    const std::string id = open_session();
    const std::string base = "/sessions/" + id;
    SseCollector collector;
    std::thread reader([&] {
        auto c = client();
        c.Get(base + "/events", [&](const char* data, std::size_t size) { return collector.feed(data, size); });
    });
    ASSERT_TRUE(collector.wait_for(1, std::chrono::seconds(10)));

    post_ok(base + "/step", {{"edge", "e000061"}});
    post_ok(base + "/step", {{"edge", "e000048"}});
    post_ok(base + "/branch", {{"edge", "e000062"}});
    post_ok(base + "/tasks", {{"event", 1}, {"tag", "T2"}});
    post_ok(base + "/replay", {{"from", 0}, {"to", 3}});

    auto session = service.session(SessionId(id));
    const auto log = session->log();
    ASSERT_TRUE(collector.wait_for(log.size(), std::chrono::seconds(10)));
    collector.stop();
    const auto events = collector.events();
    ASSERT_EQ(events.size(), log.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
        EXPECT_EQ(events[i].id, i);
        EXPECT_EQ(events[i].event, enum_name(log[i].kind));
        EXPECT_EQ(from_json<ProvenanceEvent>(events[i].data), log[i]);
    }
    // another mutation wakes the reader so it can observe the stop flag
    post_ok(base + "/tasks", {{"event", 2}, {"tag", "T3"}});
    reader.join();
}

TEST_F(HttpServerTest, StreamResumesAfterLastEventId) {
    const std::string base = "/sessions/" + open_session();
    post_ok(base + "/step", {{"edge", "e000061"}});
    SseCollector collector;
    std::thread reader([&] {
        auto c = client();
        c.Get(base + "/events", httplib::Headers{{"Last-Event-ID", "0"}},
              [&](const char* data, std::size_t size) { return collector.feed(data, size); });
    });
    ASSERT_TRUE(collector.wait_for(1, std::chrono::seconds(10)));
    post_ok(base + "/step", {{"edge", "e000048"}});
    ASSERT_TRUE(collector.wait_for(2, std::chrono::seconds(10)));
    collector.stop();
    const auto events = collector.events();
    EXPECT_EQ(events[0].id, 1u);
    EXPECT_EQ(events[1].id, 2u);
    post_ok(base + "/tasks", {{"event", 0}, {"tag", "T1"}});
    reader.join();
}

TEST_F(HttpServerTest, ConcurrentClientsOnOneSession) {
    const std::string id = open_session();
    const std::string base = "/sessions/" + id;
    SseCollector collector;
    std::thread reader([&] {
        auto c = client();
        c.Get(base + "/events", [&](const char* data, std::size_t size) { return collector.feed(data, size); });
    });
    ASSERT_TRUE(collector.wait_for(1, std::chrono::seconds(10)));

    const std::vector<std::string> targets = {"BGB/s249", "BGB/s253", "BGB/s651n", "BGB/s823", "concept:Urlaub",
                                              "concept:Schadensersatz"};
    std::atomic<int> transport_errors{0}, server_errors{0};
    std::vector<std::thread> writers;
    for (int t = 0; t < 6; ++t) {
        writers.emplace_back([&, t] {
            auto c = client();
            for (int i = 0; i < 25; ++i) {
                const Json body{{"entity", targets[static_cast<std::size_t>(t + i) % targets.size()]}};
                auto r = c.Post(base + "/navigate", body.dump(), "application/json");
                if (!r) {
                    ++transport_errors;
                } else if (r->status >= 500) {
                    ++server_errors;
                }
                c.Get(base + "/lens");
            }
        });
    }
    for (auto& w : writers) w.join();
    EXPECT_EQ(transport_errors.load(), 0);
    EXPECT_EQ(server_errors.load(), 0);

    auto session = service.session(SessionId(id));
    const auto log = session->log();
    EXPECT_EQ(log.size(), 1u + 6 * 25);  // every navigate to a tour member succeeds
    for (std::size_t i = 0; i < log.size(); ++i) ASSERT_EQ(log[i].seq, i);
    EXPECT_EQ(state_hash(replay_events(log)), state_hash(session->state()));

    ASSERT_TRUE(collector.wait_for(log.size(), std::chrono::seconds(20)));
    collector.stop();
    const auto events = collector.events();
    ASSERT_EQ(events.size(), log.size());
    for (std::size_t i = 0; i < events.size(); ++i) EXPECT_EQ(events[i].id, i);
    post_ok(base + "/tasks", {{"event", 0}, {"tag", "T1"}});
    reader.join();
}

TEST_F(HttpServerTest, StopEndsOpenStreams) {
    const std::string base = "/sessions/" + open_session();
    SseCollector collector;
    std::thread reader([&] {
        auto c = client();
        c.Get(base + "/events", [&](const char* data, std::size_t size) { return collector.feed(data, size); });
    });
    ASSERT_TRUE(collector.wait_for(1, std::chrono::seconds(10)));
    const auto started = std::chrono::steady_clock::now();
    server->stop();
    reader.join();
    EXPECT_LT(std::chrono::steady_clock::now() - started, std::chrono::seconds(5));
}

TEST(HttpServerBind, ReportsBusyPorts) {
    Service service;
    HttpServer first(service, {"127.0.0.1", 0, std::chrono::milliseconds(50)});
    const int port = first.start();
    HttpServer second(service, {"127.0.0.1", port, std::chrono::milliseconds(50)});
    try {
        second.bind();
        ADD_FAILURE() << "second bind succeeded";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::IoError);
    }
    first.stop();
}
