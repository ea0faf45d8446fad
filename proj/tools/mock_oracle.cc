// Scripted oracle speaking the JSON-lines protocol on stdin/stdout, with
// switches for the failure modes a client must survive.

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "contam/hash.h"
#include "contam/ngram.h"
#include "contam/protocol.h"

namespace {

using contam::protocol::Op;
using contam::protocol::Request;
using contam::protocol::Response;

struct Options {
  std::string model;
  std::string name = "mock";
  std::int64_t context_length = 0;
  std::optional<bool> scores_first_token;
  std::size_t reverse = 0;
  long die_after = -1;
  std::string die_once;
  std::string error_on;
  long garbage_after = -1;
  bool no_name = false;
  long meta_delay_ms = 0;
  long delay_ms = 0;
};

class Mock {
 public:
  explicit Mock(Options o) : o_(std::move(o)) {
    if (!o_.model.empty())
      model_ = std::make_unique<contam::NGramModel>(contam::NGramModel::load(o_.model));
    if (o_.die_after >= 0 && !o_.die_once.empty()) {
      if (std::filesystem::exists(o_.die_once)) o_.die_after = -1;
    }
  }

  double score(const std::string& text) const {
    if (model_) return model_->logprob(text);
    return -0.75 * static_cast<double>(text.size()) -
           static_cast<double>(contam::fnv1a64(text) % 1024) / 1024.0;
  }

  Response answer(const Request& req) const {
    Response r;
    r.id = req.id;
    switch (req.op) {
      case Op::kMeta:
        if (!o_.no_name) r.name = o_.name;
        r.context_length = o_.context_length;
        r.scores_first_token = o_.scores_first_token;
        break;
      case Op::kLogprob:
        if (!o_.error_on.empty() && req.text.find(o_.error_on) != std::string::npos)
          r.error = "refusing text containing '" + o_.error_on + "'";
        else
          r.logprob = score(req.text);
        break;
      case Op::kLogprobBatch: {
        std::vector<double> out;
        for (const auto& t : req.texts) out.push_back(score(t));
        r.logprobs = std::move(out);
        break;
      }
    }
    return r;
  }

  void emit(const std::string& line) {
    std::cout << line << '\n' << std::flush;
  }

  // Writes one scoring response, honoring the scripted failures.
  void emit_scored(const Response& r) {
    if (o_.garbage_after >= 0 && answered_ == o_.garbage_after) emit("this is not json");
    emit(contam::protocol::serialize(r));
    ++answered_;
  }

  int run() {
    std::string line;
    std::vector<Response> held;
    while (std::getline(std::cin, line)) {
      if (line.empty()) continue;
      Request req;
      try {
        req = contam::protocol::parse_request(line);
      } catch (const contam::protocol::ParseError& e) {
        Response err;
        err.id = e.id();
        err.error = std::string("protocol error: ") + e.what();
        emit(contam::protocol::serialize(err));
        continue;
      }
      if (req.op == Op::kMeta) {
        if (o_.meta_delay_ms)
          std::this_thread::sleep_for(std::chrono::milliseconds(o_.meta_delay_ms));
        emit(contam::protocol::serialize(answer(req)));
        continue;
      }
      if (o_.die_after >= 0 && answered_ + static_cast<long>(held.size()) >= o_.die_after) {
        if (!o_.die_once.empty()) std::ofstream(o_.die_once) << "died\n";
        std::_Exit(1);
      }
      if (o_.delay_ms)
        std::this_thread::sleep_for(std::chrono::milliseconds(o_.delay_ms));
      if (o_.reverse == 0) {
        emit_scored(answer(req));
        continue;
      }
      held.push_back(answer(req));
      if (held.size() == o_.reverse) {
        for (auto it = held.rbegin(); it != held.rend(); ++it) emit_scored(*it);
        held.clear();
      }
    }
    for (auto it = held.rbegin(); it != held.rend(); ++it) emit_scored(*it);
    return 0;
  }

 private:
  Options o_;
  std::unique_ptr<contam::NGramModel> model_;
  long answered_ = 0;
};

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Scripted mock oracle (stdin/stdout)."};
  app.add_option("--model", o.model, "Score with this n-gram model (default: hash-based)");
  app.add_option("--name", o.name, "Name reported by meta")->capture_default_str();
  app.add_option("--context-length", o.context_length, "Context length reported by meta")
      ->capture_default_str();
  app.add_option("--scores-first-token", o.scores_first_token,
                 "Report scores_first_token in meta");
  app.add_option("--reverse", o.reverse,
                 "Hold this many scoring requests, then answer them in reverse")
      ->capture_default_str();
  app.add_option("--die-after", o.die_after,
                 "Exit without answering once this many requests were taken")
      ->capture_default_str();
  app.add_option("--die-once", o.die_once,
                 "Marker file; --die-after only applies while it does not exist");
  app.add_option("--error-on", o.error_on, "Answer with an error for texts containing this");
  app.add_option("--garbage-after", o.garbage_after,
                 "Emit a non-JSON line after this many answers")
      ->capture_default_str();
  app.add_flag("--no-name", o.no_name, "Leave name out of the meta response");
  app.add_option("--meta-delay-ms", o.meta_delay_ms, "Delay before answering meta")
      ->capture_default_str();
  app.add_option("--delay-ms", o.delay_ms, "Delay before each scoring answer")
      ->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  std::ios::sync_with_stdio(false);
  try {
    return Mock(std::move(o)).run();
  } catch (const std::exception& e) {
    std::cerr << "mock_oracle: " << e.what() << '\n';
    return 2;
  }
}
