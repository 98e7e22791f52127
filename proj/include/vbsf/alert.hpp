#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "vbsf/config.hpp"
#include "vbsf/validator.hpp"

namespace vbsf {

/// JSON object {"frame","timestamp","box":{"x","y","w","h"},"score"}.
nlohmann::ordered_json alert_to_json(const AlertEvent& event);

/// Destination for alerts. deliver() reports success; it may be called again
/// for the same event when retrying.
class AlertSink {
 public:
  virtual ~AlertSink() = default;
  virtual bool deliver(const AlertEvent& event) = 0;
  virtual std::string describe() const = 0;
};

/// Appends one JSON object per line.
class FileSink final : public AlertSink {
 public:
  explicit FileSink(std::filesystem::path path);
  bool deliver(const AlertEvent& event) override;
  std::string describe() const override { return "file:" + path_.string(); }

 private:
  std::filesystem::path path_;
  std::mutex mutex_;
};

/// POSTs the alert JSON to an http:// URL; any 2xx status is success.
class WebhookSink final : public AlertSink {
 public:
  /// Throws ValidationError for a URL that is not http://host[:port][/path].
  explicit WebhookSink(const std::string& url, double timeout_seconds = 5.0);
  bool deliver(const AlertEvent& event) override;
  std::string describe() const override { return url_; }

 private:
  std::string url_;
  std::string origin_;
  std::string path_;
  double timeout_seconds_;
};

std::unique_ptr<AlertSink> file_sink(const std::filesystem::path& path);
std::unique_ptr<AlertSink> webhook_sink(const std::string& url, double timeout_seconds = 5.0);

enum class DeliveryStatus { Pending, Delivered, Failed, Dropped };

std::string_view to_string(DeliveryStatus status);

struct DeliveryRecord {
  AlertEvent event;
  DeliveryStatus status = DeliveryStatus::Pending;
  /// Attempts made per sink, in sink order.
  std::vector<int> attempts;
};

/// Delivers alerts on a worker thread so slow sinks never block the caller.
/// The queue is bounded; on overflow the oldest queued alert is dropped.
/// Each sink gets up to `attempts` tries with exponential backoff between them.
class AlertDispatcher {
 public:
  using Sleeper = std::function<void(std::chrono::duration<double>)>;

  AlertDispatcher(std::vector<AlertSink*> sinks, DeliveryConfig config, Sleeper sleeper = {});
  ~AlertDispatcher();
  AlertDispatcher(const AlertDispatcher&) = delete;
  AlertDispatcher& operator=(const AlertDispatcher&) = delete;

  void submit(const AlertEvent& event);
  /// Blocks until every submitted alert is delivered, failed, or dropped, then
  /// returns all records in submission order.
  std::vector<DeliveryRecord> drain();

 private:
  void run(std::stop_token stop);

  std::vector<AlertSink*> sinks_;
  DeliveryConfig config_;
  Sleeper sleeper_;
  std::mutex mutex_;
  std::condition_variable_any wake_;
  std::condition_variable idle_;
  std::deque<std::size_t> queue_;
  std::vector<DeliveryRecord> records_;
  bool busy_ = false;
  std::jthread worker_;
};

}  // namespace vbsf
