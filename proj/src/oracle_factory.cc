#include <filesystem>
#include <memory>
#include <string>

#include "contam/error.h"
#include "contam/ngram.h"
#include "contam/oracle.h"
#include "contam/remote_oracle.h"

namespace contam {

std::unique_ptr<LogProbOracle> open_oracle(const std::string& spec) {
  return open_oracle(spec, RemoteOptions{});
}

std::unique_ptr<LogProbOracle> open_oracle(const std::string& spec,
                                           const RemoteOptions& options) {
  constexpr std::string_view kNgram = "builtin:ngram=";
  if (spec.rfind(kNgram, 0) == 0) {
    const std::filesystem::path path = spec.substr(kNgram.size());
    if (path.empty()) throw ConfigError("builtin:ngram= needs a model file");
    auto model = std::make_shared<const NGramModel>(NGramModel::load(path));
    return std::make_unique<NGramOracle>(std::move(model),
                                         "ngram:" + path.stem().string());
  }
  if (spec.rfind("cmd:", 0) == 0 || spec.rfind("tcp:", 0) == 0)
    return RemoteOracle::connect(parse_endpoint(spec), options);
  throw ConfigError("unknown oracle '" + spec +
                    "' (expected builtin:ngram=<file>, cmd:<command> or "
                    "tcp:<host>:<port>)");
}

}  // namespace contam
