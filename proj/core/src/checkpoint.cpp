// SPDX-License-Identifier: Apache-2.0
#include "eth/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <string>

#include "eth/config_json.hpp"
#include "eth/error.hpp"

namespace eth::model {
namespace {

constexpr char kMagic[8] = {'E', 'T', 'H', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little-endian");

std::uint64_t fnv1a(const char* data, std::size_t n) {
  std::uint64_t h = 14695981039346656037ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 1099511628211ull;
  }
  return h;
}

template <class T>
void append(std::string& buf, const T& v) {
  buf.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

class Reader {
 public:
  Reader(const std::string& buf, std::string where) : buf_(buf), where_(std::move(where)) {}
  template <class T>
  T take() {
    T v;
    need(sizeof(T));
    std::memcpy(&v, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string take_bytes(std::size_t n) {
    need(n);
    std::string s = buf_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (buf_.size() - pos_ < n) throw StateError(where_ + ": truncated checkpoint");
  }
  const std::string& buf_;
  std::string where_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const EthConfig& config,
                     const data::Vocab& vocab, const EthParams& params,
                     const nlohmann::json& metadata) {
  nlohmann::json table = nlohmann::json::array();
  std::size_t offset = 0;
  for_each_param(
      [&](const std::string& name, const Tensor& t) {
        table.push_back({{"name", name}, {"rows", t.rows()}, {"cols", t.cols()}, {"offset", offset}});
        offset += t.size();
      },
      params);
  nlohmann::json header{{"config", config},
                        {"vocab", {{"entities", vocab.num_entities}, {"relations", vocab.num_relations}}},
                        {"tensors", table},
                        {"metadata", metadata}};
  const std::string text = header.dump();

  std::string buf(kMagic, sizeof(kMagic));
  append(buf, kVersion);
  append(buf, static_cast<std::uint64_t>(text.size()));
  buf += text;
  for_each_param(
      [&](const std::string&, const Tensor& t) {
        buf.append(reinterpret_cast<const char*>(t.values().data()), t.size() * sizeof(double));
      },
      params);
  append(buf, fnv1a(buf.data(), buf.size()));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StateError("cannot write checkpoint " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw StateError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const std::string where = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StateError("cannot open checkpoint " + where);
  const std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < sizeof(kMagic) + 4 + 8 + 8 || std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0)
    throw StateError(where + ": not a checkpoint file");
  std::uint64_t stored;
  std::memcpy(&stored, buf.data() + buf.size() - 8, 8);
  if (fnv1a(buf.data(), buf.size() - 8) != stored) throw StateError(where + ": checksum mismatch");

  Reader r(buf, where);
  r.take_bytes(sizeof(kMagic));
  const auto version = r.take<std::uint32_t>();
  if (version != kVersion)
    throw StateError(where + ": unsupported checkpoint version " + std::to_string(version));
  const auto header_len = r.take<std::uint64_t>();
  Checkpoint ck;
  std::map<std::string, nlohmann::json> entries;
  try {
    const auto header = nlohmann::json::parse(r.take_bytes(header_len));
    ck.config = EthConfig{};
    from_json(header.at("config"), ck.config);
    ck.vocab.num_entities = header.at("vocab").at("entities").get<std::uint32_t>();
    ck.vocab.num_relations = header.at("vocab").at("relations").get<std::uint32_t>();
    ck.metadata = header.value("metadata", nlohmann::json::object());
    for (const auto& e : header.at("tensors")) entries[e.at("name").get<std::string>()] = e;
    ck.config.validate();
  } catch (const StateError&) {
    throw;
  } catch (const std::exception& e) {
    throw StateError(where + ": bad checkpoint header: " + e.what());
  }

  ck.params = zero_params(ck.config, ck.vocab);
  const std::size_t data_begin = r.pos();
  const std::size_t data_bytes = buf.size() - 8 - data_begin;
  std::size_t expected = 0;
  for_each_param(
      [&](const std::string& name, Tensor& t) {
        auto it = entries.find(name);
        if (it == entries.end()) throw StateError(where + ": missing tensor " + name);
        const auto& e = it->second;
        if (e.at("rows").get<std::size_t>() != t.rows() || e.at("cols").get<std::size_t>() != t.cols())
          throw StateError(where + ": tensor " + name + " has unexpected shape");
        const std::size_t off = e.at("offset").get<std::size_t>();
        if ((off + t.size()) * sizeof(double) > data_bytes)
          throw StateError(where + ": tensor " + name + " extends past end of data");
        std::memcpy(t.values().data(), buf.data() + data_begin + off * sizeof(double),
                    t.size() * sizeof(double));
        expected += t.size();
        entries.erase(it);
      },
      ck.params);
  if (!entries.empty()) throw StateError(where + ": unexpected tensor " + entries.begin()->first);
  if (expected * sizeof(double) != data_bytes) throw StateError(where + ": tensor data size mismatch");
  return ck;
}

}  // namespace eth::model
