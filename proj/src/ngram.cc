#include "contam/ngram.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <tuple>

#include "contam/error.h"
#include "contam/hash.h"
#include "contam/rng.h"

namespace contam {
namespace {

constexpr char kMagic[8] = {'C', 'T', 'N', 'G', 'R', 'A', 'M', '\0'};

template <typename T>
void put_le(std::string& out, T value) {
  static_assert(std::is_integral_v<T>);
  for (std::size_t i = 0; i < sizeof(T); ++i)
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
}

class Reader {
 public:
  Reader(std::string_view bytes, const std::string& source)
      : bytes_(bytes), source_(source) {}

  std::string_view take(std::size_t n) {
    if (bytes_.size() - pos_ < n)
      throw ModelFormatError(source_ + ": truncated model file");
    auto out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  template <typename T>
  T get_le() {
    const auto raw = take(sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(raw[i])) << (8 * i);
    return static_cast<T>(v);
  }

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::string_view bytes_;
  const std::string& source_;
  std::size_t pos_ = 0;
};

}  // namespace

void NGramModel::Key::set_byte(std::size_t pos, unsigned char b) {
  if (pos < 8)
    lo |= static_cast<std::uint64_t>(b) << (8 * pos);
  else
    hi |= static_cast<std::uint64_t>(b) << (8 * (pos - 8));
}

unsigned char NGramModel::Key::byte(std::size_t pos) const {
  return pos < 8 ? static_cast<unsigned char>(lo >> (8 * pos))
                 : static_cast<unsigned char>(hi >> (8 * (pos - 8)));
}

std::size_t NGramModel::KeyHash::operator()(const Key& k) const {
  return static_cast<std::size_t>(mix64(k.lo ^ mix64(k.hi)));
}

NGramModel::NGramModel(int order, double alpha, int max_order)
    : order_(order), alpha_(alpha) {
  if (order < 1) throw ConfigError("n-gram order must be >= 1");
  if (order > max_order)
    throw ConfigError("n-gram order " + std::to_string(order) +
                      " exceeds the memory guard of " +
                      std::to_string(max_order));
  if (order > kDefaultMaxOrder)
    throw ConfigError("n-gram order above 12 is not representable");
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw ConfigError("smoothing alpha must be a finite value > 0");
  joint_.resize(order);
  contexts_.resize(order);
}

NGramModel NGramModel::train(std::span<const std::string> corpus, int order,
                             double alpha, int max_order) {
  if (corpus.empty()) throw ConfigError("cannot train on an empty corpus");
  NGramModel model(order, alpha, max_order);
  for (const auto& doc : corpus) model.add_document(doc);
  return model;
}

void NGramModel::add_document(std::string_view doc) {
  const auto max_ctx = static_cast<std::size_t>(order_ - 1);
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto next = static_cast<unsigned char>(doc[i]);
    const std::size_t avail = std::min(i, max_ctx);
    Key ctx;
    for (std::size_t o = 0;; ++o) {
      Key joint = ctx;
      joint.set_byte(o, next);
      ++joint_[o][joint];
      ++contexts_[o][ctx];
      if (o == avail) break;
      ctx.set_byte(o, static_cast<unsigned char>(doc[i - 1 - o]));
    }
  }
}

NGramModel::Key NGramModel::context_key(std::string_view context) {
  Key k;
  const std::size_t n = context.size();
  for (std::size_t p = 0; p < n; ++p)
    k.set_byte(p, static_cast<unsigned char>(context[n - 1 - p]));
  return k;
}

std::uint64_t NGramModel::count(std::string_view context,
                                unsigned char next) const {
  if (context.size() >= static_cast<std::size_t>(order_)) return 0;
  Key k = context_key(context);
  k.set_byte(context.size(), next);
  const auto& table = joint_[context.size()];
  const auto it = table.find(k);
  return it == table.end() ? 0 : it->second;
}

std::uint64_t NGramModel::context_total(std::string_view context) const {
  if (context.size() >= static_cast<std::size_t>(order_)) return 0;
  const auto& table = contexts_[context.size()];
  const auto it = table.find(context_key(context));
  return it == table.end() ? 0 : it->second;
}

double NGramModel::log_prob(std::string_view context,
                            unsigned char next) const {
  const double c = static_cast<double>(count(context, next));
  const double t = static_cast<double>(context_total(context));
  return std::log((c + alpha_) / (t + kVocabSize * alpha_));
}

double NGramModel::position_log_prob(std::string_view text, std::size_t i,
                                     std::size_t context_len) const {
  Key ctx;
  for (std::size_t p = 0; p < context_len; ++p)
    ctx.set_byte(p, static_cast<unsigned char>(text[i - 1 - p]));
  Key joint = ctx;
  joint.set_byte(context_len, static_cast<unsigned char>(text[i]));

  const auto& jt = joint_[context_len];
  const auto& ct = contexts_[context_len];
  const auto ji = jt.find(joint);
  const auto ci = ct.find(ctx);
  const double c = ji == jt.end() ? 0.0 : static_cast<double>(ji->second);
  const double t = ci == ct.end() ? 0.0 : static_cast<double>(ci->second);
  return std::log((c + alpha_) / (t + kVocabSize * alpha_));
}

double NGramModel::logprob(std::string_view text) const {
  return window_logprob(text, 0, text.size(), 0);
}

double NGramModel::window_logprob(std::string_view text, std::size_t begin,
                                  std::size_t end,
                                  std::size_t score_begin) const {
  const auto max_ctx = static_cast<std::size_t>(order_ - 1);
  double total = 0.0;
  for (std::size_t i = std::max(score_begin, begin); i < end; ++i)
    total += position_log_prob(text, i, std::min(i - begin, max_ctx));
  return total;
}

std::size_t NGramModel::num_entries() const {
  std::size_t n = 0;
  for (const auto& t : joint_) n += t.size();
  return n;
}

std::string NGramModel::serialize() const {
  std::string out(kMagic, sizeof kMagic);
  put_le<std::uint32_t>(out, kFormatVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(order_));
  put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(alpha_));

  for (std::size_t o = 0; o < joint_.size(); ++o) {
    // (context oldest-first, next, count)
    std::vector<std::pair<std::string, std::uint64_t>> entries;
    entries.reserve(joint_[o].size());
    for (const auto& [key, cnt] : joint_[o]) {
      std::string bytes(o + 1, '\0');
      for (std::size_t p = 0; p < o; ++p)
        bytes[o - 1 - p] = static_cast<char>(key.byte(p));
      bytes[o] = static_cast<char>(key.byte(o));
      entries.emplace_back(std::move(bytes), cnt);
    }
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
      return std::lexicographical_compare(
          a.first.begin(), a.first.end(), b.first.begin(), b.first.end(),
          [](char x, char y) {
            return static_cast<unsigned char>(x) < static_cast<unsigned char>(y);
          });
    });
    put_le<std::uint64_t>(out, entries.size());
    for (const auto& [bytes, cnt] : entries) {
      out += bytes;
      put_le<std::uint64_t>(out, cnt);
    }
  }
  put_le<std::uint64_t>(out, fnv1a64(out));
  return out;
}

NGramModel NGramModel::deserialize(std::string_view bytes,
                                   const std::string& source) {
  Reader r(bytes, source);
  if (bytes.size() < sizeof kMagic ||
      std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
    throw ModelFormatError(source + ": not an n-gram model file (bad magic)");
  r.take(sizeof kMagic);
  const auto version = r.get_le<std::uint32_t>();
  if (version != kFormatVersion)
    throw ModelFormatError(source + ": unsupported model format version " +
                           std::to_string(version) + " (expected " +
                           std::to_string(kFormatVersion) + ")");
  const auto order = r.get_le<std::uint32_t>();
  const double alpha = std::bit_cast<double>(r.get_le<std::uint64_t>());
  if (order < 1 || order > static_cast<std::uint32_t>(kDefaultMaxOrder) ||
      !(alpha > 0.0))
    throw ModelFormatError(source + ": corrupt header");

  NGramModel model(static_cast<int>(order), alpha);
  for (std::size_t o = 0; o < order; ++o) {
    const auto n = r.get_le<std::uint64_t>();
    if (n > r.remaining() / (o + 1 + 8))
      throw ModelFormatError(source + ": truncated model file");
    auto& jt = model.joint_[o];
    auto& ct = model.contexts_[o];
    jt.reserve(n);
    for (std::uint64_t e = 0; e < n; ++e) {
      const auto ctx = r.take(o);
      const auto next = static_cast<unsigned char>(r.take(1)[0]);
      const auto cnt = r.get_le<std::uint64_t>();
      Key ck = context_key(ctx);
      Key jk = ck;
      jk.set_byte(o, next);
      jt[jk] = cnt;
      ct[ck] += cnt;
    }
  }
  const std::size_t body = r.pos();
  const auto checksum = r.get_le<std::uint64_t>();
  if (checksum != fnv1a64(bytes.substr(0, body)))
    throw ModelFormatError(source + ": checksum mismatch (corrupt model file)");
  if (r.remaining() != 0)
    throw ModelFormatError(source + ": trailing bytes after model data");
  return model;
}

void NGramModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelFormatError(path.string() + ": cannot open for writing");
  const auto bytes = serialize();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ModelFormatError(path.string() + ": write failed");
}

NGramModel NGramModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelFormatError(path.string() + ": cannot open model file");
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return deserialize(bytes, path.string());
}

NGramOracle::NGramOracle(std::shared_ptr<const NGramModel> model,
                         std::string name, std::size_t context_length)
    : model_(std::move(model)),
      name_(std::move(name)),
      context_length_(context_length) {
  if (context_length_ == 1)
    throw ConfigError("bounded context length must be >= 2");
}

double NGramOracle::score(std::string_view text) {
  if (text.empty()) throw SemanticError(name_, "cannot score empty text");
  if (context_length_ == 0) return model_->logprob(text);
  return strided_log_likelihood(
      [&](std::size_t b, std::size_t e, std::size_t s) {
        return model_->window_logprob(text, b, e, s);
      },
      text.size(), context_length_);
}

}  // namespace contam
