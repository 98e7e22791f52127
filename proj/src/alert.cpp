#include "vbsf/alert.hpp"

#include <fstream>
#include <regex>

#include <httplib.h>

#include "vbsf/error.hpp"
#include "vbsf/log.hpp"

namespace vbsf {

nlohmann::ordered_json alert_to_json(const AlertEvent& event) {
  nlohmann::ordered_json j;
  j["frame"] = event.frame_index;
  j["timestamp"] = event.timestamp;
  j["box"] = {{"x", event.box.x}, {"y", event.box.y}, {"w", event.box.w}, {"h", event.box.h}};
  j["score"] = event.score;
  return j;
}

FileSink::FileSink(std::filesystem::path path) : path_(std::move(path)) {}

bool FileSink::deliver(const AlertEvent& event) {
  std::lock_guard lock(mutex_);
  std::ofstream out(path_, std::ios::app);
  if (!out) return false;
  out << alert_to_json(event).dump() << '\n';
  out.flush();
  return static_cast<bool>(out);
}

WebhookSink::WebhookSink(const std::string& url, double timeout_seconds)
    : url_(url), timeout_seconds_(timeout_seconds) {
  static const std::regex pattern(R"(^(http://[A-Za-z0-9.\-]+(:[0-9]{1,5})?)(/[^\s]*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, pattern)) {
    throw ValidationError("webhook URL must look like http://host[:port][/path], got '" + url + "'");
  }
  origin_ = m[1].str();
  path_ = m[3].matched ? m[3].str() : "/";
}

bool WebhookSink::deliver(const AlertEvent& event) {
  httplib::Client client(origin_);
  const auto timeout = std::chrono::duration<double>(timeout_seconds_);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(timeout);
  client.set_connection_timeout(micros);
  client.set_read_timeout(micros);
  client.set_write_timeout(micros);
  const auto res = client.Post(path_, alert_to_json(event).dump(), "application/json");
  if (!res) {
    spdlog::warn("webhook {}: {}", url_, httplib::to_string(res.error()));
    return false;
  }
  if (res->status < 200 || res->status >= 300) {
    spdlog::warn("webhook {}: HTTP {}", url_, res->status);
    return false;
  }
  return true;
}

std::unique_ptr<AlertSink> file_sink(const std::filesystem::path& path) {
  return std::make_unique<FileSink>(path);
}

std::unique_ptr<AlertSink> webhook_sink(const std::string& url, double timeout_seconds) {
  return std::make_unique<WebhookSink>(url, timeout_seconds);
}

std::string_view to_string(DeliveryStatus status) {
  switch (status) {
    case DeliveryStatus::Pending: return "pending";
    case DeliveryStatus::Delivered: return "delivered";
    case DeliveryStatus::Failed: return "failed";
    case DeliveryStatus::Dropped: return "dropped";
  }
  return "pending";
}

AlertDispatcher::AlertDispatcher(std::vector<AlertSink*> sinks, DeliveryConfig config, Sleeper sleeper)
    : sinks_(std::move(sinks)), config_(config), sleeper_(std::move(sleeper)) {
  if (!sleeper_) {
    sleeper_ = [](std::chrono::duration<double> d) { std::this_thread::sleep_for(d); };
  }
  worker_ = std::jthread([this](std::stop_token stop) { run(stop); });
}

AlertDispatcher::~AlertDispatcher() {
  worker_.request_stop();
  wake_.notify_all();
}

void AlertDispatcher::submit(const AlertEvent& event) {
  {
    std::lock_guard lock(mutex_);
    records_.push_back({event, DeliveryStatus::Pending, std::vector<int>(sinks_.size(), 0)});
    queue_.push_back(records_.size() - 1);
    if (queue_.size() > config_.queue_capacity) {
      const std::size_t dropped = queue_.front();
      queue_.pop_front();
      records_[dropped].status = DeliveryStatus::Dropped;
      spdlog::warn("alert queue full; dropped alert for frame {}", records_[dropped].event.frame_index);
    }
  }
  wake_.notify_all();
}

std::vector<DeliveryRecord> AlertDispatcher::drain() {
  std::unique_lock lock(mutex_);
  idle_.wait(lock, [this] { return queue_.empty() && !busy_; });
  return records_;
}

void AlertDispatcher::run(std::stop_token stop) {
  std::unique_lock lock(mutex_);
  while (true) {
    wake_.wait(lock, stop, [this] { return !queue_.empty(); });
    if (queue_.empty()) return;  // stop requested
    const std::size_t id = queue_.front();
    queue_.pop_front();
    busy_ = true;
    const AlertEvent event = records_[id].event;
    lock.unlock();

    bool all_ok = true;
    std::vector<int> attempts(sinks_.size(), 0);
    for (std::size_t s = 0; s < sinks_.size(); ++s) {
      bool ok = false;
      auto delay = std::chrono::duration<double>(config_.backoff_seconds);
      for (int attempt = 1; attempt <= config_.attempts && !ok; ++attempt) {
        attempts[s] = attempt;
        try {
          ok = sinks_[s]->deliver(event);
        } catch (const std::exception& e) {
          spdlog::warn("alert sink {} threw: {}", sinks_[s]->describe(), e.what());
        }
        if (!ok && attempt < config_.attempts) {
          sleeper_(delay);
          delay *= 2;
        }
      }
      if (!ok) {
        spdlog::error("alert for frame {} not delivered to {} after {} attempts", event.frame_index,
                      sinks_[s]->describe(), config_.attempts);
        all_ok = false;
      }
    }

    lock.lock();
    records_[id].attempts = attempts;
    records_[id].status = all_ok ? DeliveryStatus::Delivered : DeliveryStatus::Failed;
    busy_ = false;
    if (queue_.empty()) idle_.notify_all();
  }
}

}  // namespace vbsf
