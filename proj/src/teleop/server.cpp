/*
 * Copyright 2026 The Crane Teleop Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "crane/teleop/server.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <boost/asio/signal_set.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "crane/scenario.hpp"
#include "crane/teleop/session.hpp"

namespace crane::teleop {
namespace {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using Frame = std::shared_ptr<const std::string>;

constexpr std::size_t kMaxQueuedFrames = 256;
constexpr std::size_t kMaxMessageBytes = 1 << 20;

Session::Loader directory_loader(const std::string& dir) {
  if (dir.empty()) return {};
  return [dir](const std::string& id) {
    if (!valid_scenario_id(id)) throw std::runtime_error("invalid id");
    const std::filesystem::path file =
        std::filesystem::path(dir) / (id + ".json");
    if (!std::filesystem::is_regular_file(file)) {
      throw std::runtime_error("unknown scenario");
    }
    return load_json(file);
  };
}

const char* mime_type(const std::filesystem::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "text/javascript; charset=utf-8";
  if (ext == ".css") return "text/css; charset=utf-8";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".ico") return "image/x-icon";
  if (ext == ".map") return "application/json";
  return "application/octet-stream";
}

/// Maps a request target to a file under root, or empty when the target
/// tries to leave it.
std::filesystem::path resolve_static(const std::string& root,
                                     std::string_view target) {
  const auto q = target.find_first_of("?#");
  if (q != std::string_view::npos) target = target.substr(0, q);
  if (target.empty() || target.front() != '/') return {};
  std::filesystem::path rel(std::string(target.substr(1)));
  for (const auto& part : rel) {
    if (part == "..") return {};
  }
  std::filesystem::path file = std::filesystem::path(root) / rel;
  if (target.back() == '/') file /= "index.html";
  return file;
}

struct Inbound {
  std::uint64_t connection = 0;
  OperatorMsg msg;
};

}  // namespace

struct Server::Impl {
  class WsConnection;
  class HttpConnection;

  explicit Impl(ServerOptions o)
      : options(std::move(o)),
        session(load_json(options.scenario_file),
                SessionOptions{options.lockstep, options.telemetry_hz,
                               options.trace_file},
                directory_loader(options.scenario_dir)),
        acceptor(ioc) {
    remember_hello(session.hello());
    session.set_emit([this](const Json& frame) { publish(frame); });
  }

  // ---- control thread side
  void publish(const Json& frame) {
    auto text = std::make_shared<const std::string>(frame.dump());
    if (frame["kind"] == "hello") remember_hello_text(text);
    net::post(ioc, [this, text] { broadcast(text); });
  }

  void remember_hello(const Json& hello) {
    remember_hello_text(std::make_shared<const std::string>(hello.dump()));
  }
  void remember_hello_text(Frame f) {
    std::lock_guard<std::mutex> lock(hello_mutex);
    hello_frame = std::move(f);
  }
  Frame current_hello() {
    std::lock_guard<std::mutex> lock(hello_mutex);
    return hello_frame;
  }

  void enqueue(Inbound in) {
    {
      std::lock_guard<std::mutex> lock(queue_mutex);
      if (!options.lockstep && in.msg.kind == MsgKind::kJoystick &&
          !inbox.empty() && inbox.back().msg.kind == MsgKind::kJoystick) {
        inbox.back() = std::move(in);  // latest joystick value wins
      } else {
        inbox.push_back(std::move(in));
      }
    }
    wake.notify_one();
  }

  void control_loop() {
    using clock = std::chrono::steady_clock;
    const auto dt = std::chrono::duration_cast<clock::duration>(
        std::chrono::duration<double>(session.scenario().dt));
    auto origin = clock::now();
    std::int64_t origin_step = session.step_index();
    int run = session.run();

    std::unique_lock<std::mutex> lock(queue_mutex);
    while (!stopping) {
      while (!inbox.empty()) {
        Inbound in = std::move(inbox.front());
        inbox.pop_front();
        lock.unlock();
        session.handle(in.msg);
        lock.lock();
      }
      if (session.run() != run) {
        run = session.run();
        origin = clock::now();
        origin_step = session.step_index();
      }
      if (options.lockstep) {
        wake.wait(lock, [&] { return stopping || !inbox.empty(); });
        continue;
      }
      lock.unlock();
      const auto due = origin_step + (clock::now() - origin) / dt;
      std::int64_t behind = due - session.step_index();
      if (behind > options.max_burst_steps) {
        origin_step -= behind - options.max_burst_steps;
        behind = options.max_burst_steps;
      }
      for (std::int64_t i = 0; i < behind; ++i) session.step();
      const auto next = origin + (session.step_index() - origin_step + 1) * dt;
      lock.lock();
      wake.wait_until(lock, next, [&] { return stopping || !inbox.empty(); });
    }
  }

  // ---- I/O thread side
  void broadcast(const Frame& f);
  void on_text(std::uint64_t id, const std::string& text);
  void attach(const std::shared_ptr<WsConnection>& c);
  void detach(std::uint64_t id);
  void do_accept();

  ServerOptions options;
  Session session;  // control thread only, after start()

  net::io_context ioc;
  tcp::acceptor acceptor;
  std::map<std::uint64_t, std::weak_ptr<WsConnection>> connections;
  std::uint64_t next_id = 1;

  std::mutex hello_mutex;
  Frame hello_frame;

  std::mutex queue_mutex;
  std::condition_variable wake;
  std::deque<Inbound> inbox;
  bool stopping = false;

  std::thread io_thread;
  std::thread control_thread;
  bool started = false;
  bool stopped = false;
};

class Server::Impl::WsConnection
    : public std::enable_shared_from_this<WsConnection> {
 public:
  WsConnection(tcp::socket socket, Impl& impl, std::uint64_t id)
      : ws_(std::move(socket)), impl_(impl), id_(id) {}

  std::uint64_t id() const { return id_; }

  void run(http::request<http::string_body> req) {
    ws_.read_message_max(kMaxMessageBytes);
    ws_.set_option(
        websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->impl_.attach(self);
      if (Frame hello = self->impl_.current_hello()) self->send(hello);
      self->read();
    });
  }

  void send(const Frame& f) {
    if (closed_) return;
    if (queue_.size() >= kMaxQueuedFrames) return;  // slow reader
    queue_.push_back(f);
    if (queue_.size() == 1) write();
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec,
                                                        std::size_t) {
      if (ec) {
        self->closed_ = true;
        self->impl_.detach(self->id_);
        return;
      }
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->impl_.on_text(self->id_, text);
      self->read();
    });
  }

  void write() {
    ws_.text(true);
    ws_.async_write(net::buffer(*queue_.front()),
                    [self = shared_from_this()](beast::error_code ec,
                                                std::size_t) {
                      if (ec) {
                        self->closed_ = true;
                        self->queue_.clear();
                        return;
                      }
                      self->queue_.pop_front();
                      if (!self->queue_.empty()) self->write();
                    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::deque<Frame> queue_;
  Impl& impl_;
  std::uint64_t id_;
  bool closed_ = false;
};

class Server::Impl::HttpConnection
    : public std::enable_shared_from_this<HttpConnection> {
 public:
  HttpConnection(tcp::socket socket, Impl& impl)
      : stream_(std::move(socket)), impl_(impl) {}

  void run() { read(); }

 private:
  void read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_,
                     [self = shared_from_this()](beast::error_code ec,
                                                 std::size_t) {
                       if (ec) return;
                       self->on_request();
                     });
  }

  void on_request() {
    if (websocket::is_upgrade(req_)) {
      if (req_.target() != "/ws") {
        respond(http::status::not_found, "text/plain", "no such endpoint\n");
        return;
      }
      stream_.expires_never();
      auto ws = std::make_shared<WsConnection>(stream_.release_socket(), impl_,
                                               impl_.next_id++);
      ws->run(std::move(req_));
      return;
    }
    if (req_.method() != http::verb::get && req_.method() != http::verb::head) {
      respond(http::status::method_not_allowed, "text/plain",
              "GET only\n");
      return;
    }
    if (impl_.options.ui_dir.empty()) {
      respond(http::status::not_found, "text/plain",
              "console not served: start with --ui-dir\n");
      return;
    }
    const auto file = resolve_static(impl_.options.ui_dir,
                                     std::string(req_.target()));
    std::ifstream in(file, std::ios::binary);
    if (file.empty() || !std::filesystem::is_regular_file(file) || !in) {
      respond(http::status::not_found, "text/plain", "not found\n");
      return;
    }
    std::ostringstream body;
    body << in.rdbuf();
    respond(http::status::ok, mime_type(file), body.str());
  }

  void respond(http::status status, const char* type, std::string body) {
    auto res = std::make_shared<http::response<http::string_body>>(
        status, req_.version());
    res->set(http::field::server, "crane-teleop");
    res->set(http::field::content_type, type);
    res->set(http::field::cache_control, "no-store");
    res->keep_alive(req_.keep_alive());
    if (req_.method() != http::verb::head) res->body() = std::move(body);
    res->prepare_payload();
    http::async_write(stream_, *res,
                      [self = shared_from_this(), res](beast::error_code ec,
                                                       std::size_t) {
                        if (ec) return;
                        if (res->keep_alive()) {
                          self->read();
                        } else {
                          beast::error_code ignored;
                          self->stream_.socket().shutdown(
                              tcp::socket::shutdown_send, ignored);
                        }
                      });
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
  Impl& impl_;
};

void Server::Impl::broadcast(const Frame& f) {
  for (auto it = connections.begin(); it != connections.end();) {
    if (auto c = it->second.lock()) {
      c->send(f);
      ++it;
    } else {
      it = connections.erase(it);
    }
  }
}

void Server::Impl::on_text(std::uint64_t id, const std::string& text) {
  try {
    enqueue({id, parse_operator_msg(text)});
  } catch (const ProtocolError& e) {
    auto it = connections.find(id);
    if (it == connections.end()) return;
    if (auto c = it->second.lock()) {
      c->send(std::make_shared<const std::string>(
          error_frame(e.what()).dump()));
    }
  }
}

void Server::Impl::attach(const std::shared_ptr<WsConnection>& c) {
  connections[c->id()] = c;
  std::clog << "[teleop] client " << c->id() << " connected\n";
}

void Server::Impl::detach(std::uint64_t id) {
  if (connections.erase(id) == 0) return;
  std::clog << "[teleop] client " << id << " disconnected; joystick zeroed\n";
  OperatorMsg zero;
  zero.kind = MsgKind::kJoystick;
  enqueue({id, zero});
}

void Server::Impl::do_accept() {
  acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;  // acceptor closed
    std::make_shared<HttpConnection>(std::move(socket), *this)->run();
    do_accept();
  });
}

Server::Server(ServerOptions options)
    : impl_(std::make_unique<Impl>(std::move(options))) {}

Server::~Server() { stop(); }

unsigned short Server::start() {
  Impl& s = *impl_;
  if (s.started) return s.acceptor.local_endpoint().port();
  const tcp::endpoint ep(net::ip::make_address(s.options.host), s.options.port);
  s.acceptor.open(ep.protocol());
  s.acceptor.set_option(net::socket_base::reuse_address(true));
  s.acceptor.bind(ep);
  s.acceptor.listen();
  s.do_accept();
  s.started = true;
  s.io_thread = std::thread([&s] {
    auto guard = net::make_work_guard(s.ioc);
    s.ioc.run();
  });
  s.control_thread = std::thread([&s] { s.control_loop(); });
  return s.acceptor.local_endpoint().port();
}

void Server::stop() {
  Impl& s = *impl_;
  if (!s.started || s.stopped) return;
  s.stopped = true;
  {
    std::lock_guard<std::mutex> lock(s.queue_mutex);
    s.stopping = true;
  }
  s.wake.notify_all();
  s.control_thread.join();
  s.ioc.stop();
  s.io_thread.join();
  s.session.finish();
  if (!s.options.record_file.empty()) {
    std::ofstream out(s.options.record_file, std::ios::binary);
    out << s.session.tape().dump(1) << '\n';
    if (!out) {
      std::clog << "[teleop] cannot write " << s.options.record_file << '\n';
    }
  }
}

void Server::wait_for_signal() {
  net::io_context sig_ctx;
  net::signal_set signals(sig_ctx, SIGINT, SIGTERM);
  signals.async_wait([](beast::error_code, int) {});
  sig_ctx.run();
  stop();
}

int serve(const ServerOptions& options) {
  Server server(options);
  const unsigned short port = server.start();
  std::clog << "[teleop] listening on http://" << options.host << ':' << port
            << "/  (WebSocket /ws" << (options.lockstep ? ", lockstep" : "")
            << ")\n";
  server.wait_for_signal();
  return 0;
}

int replay_tape(const ServerOptions& options, const std::string& tape_file,
                std::ostream& out) {
  SessionOptions so;
  so.telemetry_hz = options.telemetry_hz;
  so.trace_path = options.trace_file;
  const auto session = replay(load_json(tape_file), so,
                              directory_loader(options.scenario_dir));
  const CraneState& st = session->sim().state();
  const OutputPoint y = output_map(st);
  const ctl::Controller& c = session->sim().controller();
  Json j;
  j["t"] = session->time();
  j["run"] = session->run();
  j["state"] = {{"x", st.x},     {"x_dot", st.x_dot},
                {"theta", st.theta}, {"theta_dot", st.theta_dot},
                {"l", st.l},     {"l_dot", st.l_dot}};
  j["output"] = {{"y1", y.y1}, {"y2", y.y2}};
  j["mode"] = ctl::to_string(c.mode());
  j["sc_collision"] = session->sc_collision();
  j["faulted"] = c.faulted();
  j["fault"] = c.fault_message();
  out << j.dump(2) << '\n';
  return (!c.faulted() && !session->sc_collision()) ? 0 : 1;
}

}  // namespace crane::teleop
