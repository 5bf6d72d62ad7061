#include "tutor/app/gateway.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <spdlog/spdlog.h>

#include <condition_variable>
#include <deque>
#include <future>
#include <map>

#include "tutor/app/protocol.hpp"

namespace tutor::app {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

using WorkStrand = net::strand<net::thread_pool::executor_type>;

struct Entry {
    std::shared_ptr<SessionHost> host;
    std::shared_ptr<WorkStrand> strand;  // serializes work on this session
};

std::string client_error(const std::string& session_id, json payload) {
    SessionEventEnvelope e{session_id, 0, EnvelopeKind::Error, std::move(payload),
                           format_iso8601(std::chrono::system_clock::now())};
    return to_json(e).dump();
}

LearnerProfile profile_from_json(const json& j) {
    LearnerProfile p{"learner"};
    if (!j.is_object()) return p;
    p.learner_id = j.value("id", p.learner_id);
    auto opt = [&](const char* key, std::optional<std::string>& out) {
        if (auto it = j.find(key); it != j.end() && it->is_string() && !it->get<std::string>().empty())
            out = it->get<std::string>();
    };
    opt("name", p.name);
    opt("native_language", p.native_language);
    opt("cultural_background", p.cultural_background);
    opt("motivation", p.motivation);
    return p;
}

}  // namespace

class Connection;

struct Gateway::Impl {
    Impl(Runtime& rt, GatewayConfig c) : runtime(rt), config(std::move(c)) {}

    Runtime& runtime;
    GatewayConfig config;
    net::io_context ioc;
    tcp::acceptor acceptor{ioc};
    std::thread io_thread;
    net::thread_pool workers{2};

    mutable std::mutex mutex;
    std::map<std::string, Entry> sessions;
    std::vector<std::weak_ptr<Connection>> connections;
    int next_id = 1;

    std::mutex stop_mutex;
    std::condition_variable stop_cv;
    bool running = false;

    Entry add(std::shared_ptr<SessionHost> host) {
        std::lock_guard lock(mutex);
        auto id = host->session_id();
        if (sessions.contains(id)) throw PreconditionError("session " + id + " already exists");
        Entry e{std::move(host), std::make_shared<WorkStrand>(net::make_strand(workers.get_executor()))};
        sessions.emplace(id, e);
        return e;
    }

    std::optional<Entry> find(const std::string& id) const {
        std::lock_guard lock(mutex);
        auto it = sessions.find(id);
        if (it == sessions.end()) return std::nullopt;
        return it->second;
    }

    std::string fresh_id() {
        std::lock_guard lock(mutex);
        for (;;) {
            auto id = "session-" + std::to_string(next_id++);
            if (!sessions.contains(id)) return id;
        }
    }

    void accept();
};

class Connection : public std::enable_shared_from_this<Connection> {
public:
    Connection(tcp::socket socket, Gateway::Impl& gw) : ws_(std::move(socket)), gw_(gw) {}

    void run() {
        net::dispatch(ws_.get_executor(), [self = shared_from_this()] {
            self->ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
            self->ws_.async_accept([self](beast::error_code ec) {
                if (ec) return;
                self->read();
            });
        });
    }

    // Thread-safe; frames leave in the order send() was called.
    void send(std::string frame) {
        net::post(ws_.get_executor(), [self = shared_from_this(), f = std::move(frame)]() mutable {
            self->enqueue(std::move(f));
        });
    }

    std::future<void> close() {
        auto done = std::make_shared<std::promise<void>>();
        auto fut = done->get_future();
        net::post(ws_.get_executor(), [self = shared_from_this(), done] {
            if (!self->closed_) {
                self->closed_ = true;
                self->drop_subscriptions();
                beast::error_code ec;
                beast::get_lowest_layer(self->ws_).socket().close(ec);
            }
            done->set_value();
        });
        return fut;
    }

private:
    void read() {
        ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->closed_ = true;
                self->drop_subscriptions();
                return;
            }
            auto text = beast::buffers_to_string(self->buffer_.data());
            self->buffer_.consume(self->buffer_.size());
            self->handle(text);
            self->read();
        });
    }

    void enqueue(std::string frame) {
        if (closed_) return;
        outbox_.push_back(std::move(frame));
        if (!writing_) write();
    }

    void write() {
        writing_ = true;
        ws_.text(true);
        ws_.async_write(net::buffer(outbox_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->closed_ = true;
                self->outbox_.clear();
                self->writing_ = false;
                return;
            }
            self->outbox_.pop_front();
            if (self->outbox_.empty()) self->writing_ = false;
            else self->write();
        });
    }

    void drop_subscriptions() {
        for (auto& [id, sub] : subs_) sub.first->events().unsubscribe(sub.second);
        subs_.clear();
    }

    void reject(const std::string& session_id, json payload) { enqueue(client_error(session_id, std::move(payload))); }

    void handle(const std::string& text) {
        json frame;
        try {
            frame = json::parse(text);
        } catch (const json::exception& e) {
            reject("", {{"reason", std::string("malformed frame: ") + e.what()}});
            return;
        }
        if (!frame.is_object() || !frame.contains("type") || !frame["type"].is_string()) {
            reject("", {{"reason", "frame needs a string 'type'"}});
            return;
        }
        auto type = frame["type"].get<std::string>();
        auto sid = frame.value("session_id", std::string());

        if (type == "list_sessions") {
            json list = json::array();
            std::lock_guard lock(gw_.mutex);
            for (const auto& [id, e] : gw_.sessions) {
                list.push_back({{"session_id", id}, {"phase", to_string(e.host->state().phase)}});
            }
            enqueue(json{{"type", "sessions"}, {"sessions", list}}.dump());
            return;
        }
        if (type == "create_session") {
            create(frame);
            return;
        }

        auto entry = gw_.find(sid);
        if (!entry) {
            reject(sid, {{"reason", "unknown session '" + sid + "'"}, {"request", type}});
            return;
        }
        if (type == "subscribe") {
            subscribe(*entry, frame.value("from_seq", std::int64_t{1}));
        } else if (type == "unsubscribe") {
            if (auto it = subs_.find(sid); it != subs_.end()) {
                it->second.first->events().unsubscribe(it->second.second);
                subs_.erase(it);
            }
            enqueue(json{{"type", "ack"}, {"request", type}, {"session_id", sid}}.dump());
        } else {
            command(*entry, frame);
        }
    }

    void subscribe(const Entry& entry, std::int64_t from_seq) {
        auto& host = entry.host;
        auto sid = host->session_id();
        if (auto it = subs_.find(sid); it != subs_.end()) {
            host->events().unsubscribe(it->second.second);
            subs_.erase(it);
        }
        std::weak_ptr<Connection> weak = shared_from_this();
        auto [snapshot, id] = host->events().subscribe(
            [weak](const SessionEventEnvelope& e) {
                if (auto self = weak.lock()) self->send(to_json(e).dump());
            },
            from_seq);
        subs_.emplace(sid, std::make_pair(host, id));
        // Live envelopes are posted behind this handler, so the snapshot goes
        // out first.
        for (const auto& e : snapshot) enqueue(to_json(e).dump());
    }

    void create(const json& frame) {
        auto sid = frame.value("session_id", std::string());
        if (sid.empty()) sid = gw_.fresh_id();
        std::optional<Entry> entry;
        try {
            auto host = std::make_shared<SessionHost>(gw_.runtime, sid, profile_from_json(frame.value("learner", json())));
            entry = gw_.add(host);
        } catch (const Error& e) {
            reject(sid, {{"reason", e.what()}, {"request", "create_session"}});
            return;
        }
        enqueue(json{{"type", "ack"}, {"request", "create_session"}, {"session_id", sid}}.dump());
        net::post(*entry->strand, [host = entry->host] {
            try {
                host->start();
            } catch (const std::exception& e) {
                spdlog::error("starting session {}: {}", host->session_id(), e.what());
            }
        });
    }

    void command(const Entry& entry, const json& frame) {
        auto sid = entry.host->session_id();
        OperatorCommand cmd;
        try {
            cmd = operator_command_from_json(frame);
        } catch (const Error& e) {
            reject(sid, {{"reason", e.what()}, {"request", frame.value("type", std::string())}});
            return;
        }
        net::post(*entry.strand, [self = shared_from_this(), host = entry.host, cmd, sid] {
            std::string name(command_name(cmd));
            try {
                auto reply = host->apply(cmd);
                json ack = {{"type", "ack"}, {"request", name}, {"session_id", sid}};
                if (reply.error) ack["error"] = *reply.error;
                self->send(ack.dump());
            } catch (const ProtocolError& e) {
                self->send(client_error(sid, {{"reason", e.what()},
                                              {"request", name},
                                              {"from", to_string(e.from())},
                                              {"to", to_string(e.to())}}));
            } catch (const Error& e) {
                self->send(client_error(sid, {{"reason", e.what()}, {"request", name}}));
            }
        });
    }

    websocket::stream<beast::tcp_stream> ws_;
    Gateway::Impl& gw_;
    beast::flat_buffer buffer_;
    std::deque<std::string> outbox_;
    bool writing_ = false;
    bool closed_ = false;
    std::map<std::string, std::pair<std::shared_ptr<SessionHost>, int>> subs_;
};

void Gateway::Impl::accept() {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
        if (ec) {
            if (ec != net::error::operation_aborted) spdlog::warn("accept: {}", ec.message());
            if (!acceptor.is_open()) return;
        } else {
            auto conn = std::make_shared<Connection>(std::move(socket), *this);
            {
                std::lock_guard lock(mutex);
                std::erase_if(connections, [](const auto& w) { return w.expired(); });
                connections.push_back(conn);
            }
            conn->run();
        }
        accept();
    });
}

Gateway::Gateway(Runtime& runtime, GatewayConfig config)
    : impl_(std::make_unique<Impl>(runtime, std::move(config))) {}

Gateway::~Gateway() { stop(); }

std::shared_ptr<SessionHost> Gateway::create_session(const std::string& session_id, const LearnerProfile& profile) {
    auto host = std::make_shared<SessionHost>(impl_->runtime, session_id, profile);
    impl_->add(host);
    host->start();
    return host;
}

void Gateway::add_session(std::shared_ptr<SessionHost> host) { impl_->add(std::move(host)); }

std::shared_ptr<SessionHost> Gateway::find(const std::string& session_id) const {
    auto e = impl_->find(session_id);
    return e ? e->host : nullptr;
}

std::vector<std::string> Gateway::session_ids() const {
    std::lock_guard lock(impl_->mutex);
    std::vector<std::string> out;
    for (const auto& [id, _] : impl_->sessions) out.push_back(id);
    return out;
}

int Gateway::start() {
    auto& im = *impl_;
    tcp::endpoint endpoint(net::ip::make_address(im.config.host), static_cast<unsigned short>(im.config.port));
    beast::error_code ec;
    im.acceptor.open(endpoint.protocol(), ec);
    if (!ec) im.acceptor.set_option(net::socket_base::reuse_address(true), ec);
    if (!ec) im.acceptor.bind(endpoint, ec);
    if (!ec) im.acceptor.listen(net::socket_base::max_listen_connections, ec);
    if (ec) throw ConfigError("gateway cannot listen on " + im.config.host + ":" + std::to_string(im.config.port) + ": " + ec.message());
    int port = im.acceptor.local_endpoint().port();
    im.accept();
    im.io_thread = std::thread([&im] { im.ioc.run(); });
    {
        std::lock_guard lock(im.stop_mutex);
        im.running = true;
    }
    spdlog::info("gateway listening on ws://{}:{}", im.config.host, port);
    return port;
}

void Gateway::stop() {
    auto& im = *impl_;
    {
        std::lock_guard lock(im.stop_mutex);
        if (!im.running) return;
        im.running = false;
    }
    net::post(im.ioc, [&im] {
        beast::error_code ec;
        im.acceptor.close(ec);
    });
    std::vector<std::future<void>> closing;
    {
        std::lock_guard lock(im.mutex);
        for (auto& w : im.connections) {
            if (auto c = w.lock()) closing.push_back(c->close());
        }
    }
    // Let the closes reach the sockets before the loop stops, so clients see EOF.
    for (auto& f : closing) f.wait_for(std::chrono::seconds(2));
    im.workers.join();
    im.ioc.stop();
    if (im.io_thread.joinable()) im.io_thread.join();
    im.stop_cv.notify_all();
}

void Gateway::wait() {
    std::unique_lock lock(impl_->stop_mutex);
    impl_->stop_cv.wait(lock, [&] { return !impl_->running; });
}

}  // namespace tutor::app
