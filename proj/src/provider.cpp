#include "occupancy/provider.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include <json.hpp>

#include "occupancy/error.hpp"
#include "occupancy/image_io.hpp"

namespace occupancy {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view to_string(ProviderKind kind) noexcept {
  return kind == ProviderKind::boxes ? "boxes" : "pose";
}

ProviderKind provider_kind_from_string(std::string_view s) {
  if (s == "boxes" || s == "box-detector") return ProviderKind::boxes;
  if (s == "pose" || s == "pose-estimator") return ProviderKind::pose;
  throw Error(ErrorCode::invalid_config, "unknown provider kind '" + std::string(s) + "'");
}

std::string encode_request(const ProviderRequest& r) {
  ordered_json j;
  j["v"] = kProtocolVersion;
  j["frame"] = r.frame;
  j["fragment"] = r.fragment;
  j["image"] = r.image;
  j["kind"] = to_string(r.kind);
  return j.dump();
}

ProviderRequest decode_request(std::string_view line) {
  try {
    const json j = json::parse(line);
    if (j.at("v").get<int>() != kProtocolVersion) {
      throw Error(ErrorCode::protocol_parse_error, "unsupported protocol version");
    }
    ProviderRequest r;
    r.frame = j.at("frame").get<std::int64_t>();
    r.fragment = j.at("fragment").get<int>();
    r.image = j.at("image").get<std::string>();
    r.kind = provider_kind_from_string(j.at("kind").get<std::string>());
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::protocol_parse_error, std::string("bad request: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::protocol_parse_error) throw;
    throw Error(ErrorCode::protocol_parse_error, e.what());
  }
}

std::string encode_reply(const ProviderReply& reply, ProviderKind kind) {
  ordered_json j;
  j["v"] = kProtocolVersion;
  if (kind == ProviderKind::boxes) {
    j["boxes"] = ordered_json::array();
    for (const auto& b : reply.boxes) j["boxes"].push_back({b.x, b.y, b.w, b.h, b.score});
  } else {
    j["poses"] = ordered_json::array();
    for (const auto& p : reply.poses) {
      ordered_json kps = ordered_json::array();
      for (const auto& k : p.keypoints) kps.push_back({k.point.x, k.point.y, k.confidence});
      j["poses"].push_back(std::move(kps));
    }
  }
  return j.dump();
}

ProviderReply decode_reply(std::string_view line, const ProviderRequest& request,
                           std::string_view source) {
  auto fail = [&](const std::string& why) {
    return Error(ErrorCode::protocol_parse_error,
                 std::string(source) + " frame " + std::to_string(request.frame) + " fragment " +
                     std::to_string(request.fragment) + ": " + why);
  };
  ProviderReply reply;
  try {
    const json j = json::parse(line);
    if (!j.is_object() || j.value("v", 0) != kProtocolVersion) throw fail("missing or wrong \"v\"");
    if (request.kind == ProviderKind::boxes) {
      for (const auto& b : j.at("boxes")) {
        if (!b.is_array() || b.size() != 5) throw fail("box entries need [x,y,w,h,score]");
        DetectionBox d;
        d.x = b[0].get<double>();
        d.y = b[1].get<double>();
        d.w = b[2].get<double>();
        d.h = b[3].get<double>();
        d.score = b[4].get<double>();
        d.source = std::string(source);
        d.frame_index = request.frame;
        d.fragment = request.fragment;
        if (!(d.w > 0.0 && d.h > 0.0)) throw fail("box with non-positive size");
        if (!(d.score >= 0.0 && d.score <= 1.0)) throw fail("score outside [0,1]");
        reply.boxes.push_back(std::move(d));
      }
    } else {
      for (const auto& p : j.at("poses")) {
        PoseDetection pose;
        pose.fragment_index = request.fragment;
        for (const auto& k : p) {
          if (!k.is_array() || k.size() != 3) throw fail("keypoints need [x,y,c]");
          pose.keypoints.push_back({{k[0].get<double>(), k[1].get<double>()}, k[2].get<double>()});
        }
        reply.poses.push_back(std::move(pose));
      }
    }
  } catch (const json::exception& e) {
    throw fail(e.what());
  }
  return reply;
}

// ---------------------------------------------------------------------------

SubprocessProvider::SubprocessProvider(std::string name, std::string command,
                                       std::chrono::milliseconds timeout,
                                       std::filesystem::path scratch_dir)
    : name_(std::move(name)),
      command_(std::move(command)),
      timeout_(timeout),
      scratch_(std::move(scratch_dir)) {
  std::error_code ec;
  std::filesystem::create_directories(scratch_, ec);
  if (ec) throw Error(ErrorCode::io_error, "cannot create scratch dir " + scratch_.string());
}

SubprocessProvider::~SubprocessProvider() { stop(); }

void SubprocessProvider::start() {
  // A provider that dies must surface as an error on write, not kill us.
  ::signal(SIGPIPE, SIG_IGN);
  int in_pipe[2];
  int out_pipe[2];
  if (pipe2(in_pipe, O_CLOEXEC) != 0) throw Error(ErrorCode::io_error, "pipe failed");
  if (pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw Error(ErrorCode::io_error, "pipe failed");
  }
  const pid_t pid = fork();
  if (pid < 0) throw Error(ErrorCode::io_error, "fork failed");
  if (pid == 0) {
    // own process group so stop() also reaches whatever the shell spawned
    ::setpgid(0, 0);
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  ::setpgid(pid, pid);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  pending_.clear();
}

void SubprocessProvider::stop() noexcept {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    ::kill(-pid_, SIGKILL);
    int status = 0;
    ::waitpid(pid_, &status, 0);
  }
  pid_ = -1;
  pending_.clear();
}

void SubprocessProvider::send_line(const std::string& line) {
  std::string buf = line + '\n';
  std::size_t off = 0;
  while (off < buf.size()) {
    const ssize_t n = ::write(to_child_, buf.data() + off, buf.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::protocol_parse_error, name_ + ": provider closed its input");
    }
    off += static_cast<std::size_t>(n);
  }
}

std::string SubprocessProvider::receive_line(std::chrono::steady_clock::time_point deadline) {
  for (;;) {
    if (const auto nl = pending_.find('\n'); nl != std::string::npos) {
      std::string line = pending_.substr(0, nl);
      pending_.erase(0, nl + 1);
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      throw Error(ErrorCode::provider_timeout,
                  name_ + " did not answer within " + std::to_string(timeout_.count()) + " ms");
    }
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (ready < 0 && errno == EINTR) continue;
    if (ready <= 0) continue;  // the deadline check above reports the timeout
    char chunk[4096];
    const ssize_t n = ::read(from_child_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw Error(ErrorCode::protocol_parse_error, name_ + ": provider exited mid-reply");
    pending_.append(chunk, static_cast<std::size_t>(n));
  }
}

ProviderReply SubprocessProvider::detect(const ProviderRequest& request, const Image& fragment) {
  if (pid_ < 0) start();
  ProviderRequest req = request;
  const auto path = scratch_ / ("fragment_" + std::to_string(::getpid()) + "_" +
                                std::to_string(serial_++) +
                                (fragment.channels() == 1 ? ".pgm" : ".ppm"));
  write_pnm(fragment, path);
  req.image = path.string();
  struct Cleanup {
    std::filesystem::path p;
    ~Cleanup() {
      std::error_code ec;
      std::filesystem::remove(p, ec);
    }
  } cleanup{path};

  try {
    send_line(encode_request(req));
    const std::string line = receive_line(std::chrono::steady_clock::now() + timeout_);
    return decode_reply(line, req, name_);
  } catch (const Error&) {
    // The stream may now be out of step with our requests; start afresh.
    stop();
    throw;
  }
}

}  // namespace occupancy
