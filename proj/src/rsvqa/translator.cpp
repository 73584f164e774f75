// Copyright 2026 The rsvqa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rsvqa/translator.hpp"

#include <iostream>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "rsvqa/embedded_data.hpp"
#include "rsvqa/errors.hpp"

namespace rsvqa {

using nlohmann::json;

namespace {

constexpr std::string_view kTagOpen = "\xE2\x9F\xA6";   // U+27E6
constexpr std::string_view kTagClose = "\xE2\x9F\xA7";  // U+27E7

std::string tag(std::string_view pivot) {
  return std::string(kTagOpen) + std::string(pivot) + std::string(kTagClose);
}

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path without trailing slash
};

Endpoint split_endpoint(const std::string& endpoint) {
  std::string rest = endpoint;
  std::string scheme = "http://";
  if (auto pos = rest.find("://"); pos != std::string::npos) {
    scheme = rest.substr(0, pos + 3);
    rest = rest.substr(pos + 3);
  }
  if (scheme != "http://") {
    throw UsageError("unsupported endpoint scheme in '" + endpoint +
                     "' (only http:// is built in)");
  }
  Endpoint out;
  const auto slash = rest.find('/');
  out.origin = scheme + rest.substr(0, slash);
  if (slash != std::string::npos) out.prefix = rest.substr(slash);
  while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
  if (rest.empty() || slash == 0) throw UsageError("endpoint '" + endpoint + "' has no host");
  return out;
}

bool retriable(int status) { return status >= 500 || status == 429; }

}  // namespace

RuleTable RuleTable::parse(std::string_view text) {
  RuleTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError("rule line " + std::to_string(line_no) + " has no tab separator");
    }
    table.add(line.substr(0, tab), line.substr(tab + 1));
  }
  return table;
}

void RuleTable::add(std::string pattern, std::string replacement) {
  RewriteRule rule;
  try {
    rule.compiled = std::regex(pattern, std::regex::ECMAScript | std::regex::icase);
  } catch (const std::regex_error& e) {
    throw DataError("invalid rule pattern '" + pattern + "': " + e.what());
  }
  rule.pattern = std::move(pattern);
  rule.replacement = std::move(replacement);
  rules_.push_back(std::move(rule));
}

std::string RuleTable::apply(const std::string& text) const {
  std::string out = text;
  for (const auto& rule : rules_) {
    out = std::regex_replace(out, rule.compiled, rule.replacement,
                             std::regex_constants::format_first_only);
  }
  return out;
}

const std::map<std::string, RuleTable>& default_mock_tables() {
  static const std::map<std::string, RuleTable> tables = [] {
    std::map<std::string, RuleTable> out;
    for (const char* pivot : {"zh", "de", "fr"}) {
      out.emplace(pivot, RuleTable::parse(embedded::mock_rules(pivot)));
    }
    return out;
  }();
  return tables;
}

MockTranslator::MockTranslator() : tables_(default_mock_tables()) {}

MockTranslator::MockTranslator(std::map<std::string, RuleTable> tables)
    : tables_(std::move(tables)) {}

std::string MockTranslator::translate(const std::string& text, std::string_view src,
                                      std::string_view dst) {
  if (src == "en" && tables_.count(std::string(dst))) {
    return tag(dst) + text;
  }
  if (dst == "en") {
    if (auto it = tables_.find(std::string(src)); it != tables_.end()) {
      std::string body = text;
      const std::string prefix = tag(src);
      if (body.rfind(prefix, 0) == 0) body.erase(0, prefix.size());
      return it->second.apply(body);
    }
  }
  throw UsageError("mock translator does not support " + std::string(src) + "->" +
                   std::string(dst));
}

std::string mock_translate(const std::string& text, std::string_view src,
                           std::string_view dst) {
  static MockTranslator translator;
  return translator.translate(text, src, dst);
}

std::string http_translate(const std::string& text, std::string_view src,
                           std::string_view dst, const HttpOptions& options) {
  if (src == dst) throw UsageError("source and target language are both '" +
                                   std::string(src) + "'");
  const Endpoint endpoint = split_endpoint(options.endpoint);
  const std::string body = json{{"q", text},
                                {"source", src},
                                {"target", dst},
                                {"format", "text"}}
                               .dump();

  httplib::Headers headers;
  if (!options.bearer_token.empty()) {
    headers.emplace("Authorization", "Bearer " + options.bearer_token);
  }

  auto delay = options.backoff;
  std::string last_failure;
  for (int attempt = 0; attempt <= std::max(0, options.retries); ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
    httplib::Client client(endpoint.origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options.timeout);
    const auto usecs =
        std::chrono::duration_cast<std::chrono::microseconds>(options.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    auto result = client.Post(endpoint.prefix + "/translate", headers, body,
                              "application/json");
    if (!result) {
      last_failure = "cannot reach " + options.endpoint + ": " +
                     httplib::to_string(result.error());
      continue;
    }
    if (result->status < 200 || result->status >= 300) {
      last_failure = "HTTP " + std::to_string(result->status) + " from " +
                     options.endpoint;
      if (retriable(result->status)) continue;
      throw ExternalError(last_failure);
    }
    json reply;
    try {
      reply = json::parse(result->body);
    } catch (const json::parse_error&) {
      throw ExternalError("malformed response from " + options.endpoint +
                          ": body is not JSON");
    }
    auto it = reply.is_object() ? reply.find("translatedText") : reply.end();
    if (it == reply.end() || !it->is_string()) {
      throw ExternalError("malformed response from " + options.endpoint +
                          ": missing string field 'translatedText'");
    }
    return it->get<std::string>();
  }
  throw ExternalError(last_failure + " (after " + std::to_string(options.retries + 1) +
                      " attempts)");
}

HttpTranslator::HttpTranslator(HttpOptions options,
                               std::map<std::string, std::string> pivot_endpoints)
    : options_(std::move(options)), pivot_endpoints_(std::move(pivot_endpoints)) {
  split_endpoint(options_.endpoint);
  for (const auto& [lang, url] : pivot_endpoints_) split_endpoint(url);
}

std::string HttpTranslator::translate(const std::string& text, std::string_view src,
                                      std::string_view dst) {
  HttpOptions options = options_;
  for (auto lang : {dst, src}) {
    if (auto it = pivot_endpoints_.find(std::string(lang)); it != pivot_endpoints_.end()) {
      options.endpoint = it->second;
      break;
    }
  }
  ++requests_;
  return http_translate(text, src, dst, options);
}

TranslationCache::TranslationCache(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.empty()) return;
  std::error_code ec;
  if (std::filesystem::exists(path_, ec)) {
    std::ifstream in(path_, std::ios::binary);
    if (!in) {
      warn("cannot read cache file '" + path_.string() + "'");
    } else {
      std::string line;
      std::size_t line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
          const json entry = json::parse(line);
          entries_[key(entry.at("src").get<std::string>(),
                       entry.at("dst").get<std::string>(),
                       entry.at("text").get<std::string>())] =
              entry.at("result").get<std::string>();
        } catch (const json::exception&) {
          warn("skipping malformed cache line " + std::to_string(line_no) + " in '" +
               path_.string() + "'");
        }
      }
    }
  }
  sink_.open(path_, std::ios::binary | std::ios::app);
  if (!sink_) warn("cannot open cache file '" + path_.string() + "' for appending");
}

std::string TranslationCache::key(std::string_view src, std::string_view dst,
                                  const std::string& text) {
  std::string k;
  k.reserve(src.size() + dst.size() + text.size() + 2);
  k.append(src).push_back('\x1f');
  k.append(dst).push_back('\x1f');
  k.append(text);
  return k;
}

std::optional<std::string> TranslationCache::lookup(std::string_view src,
                                                    std::string_view dst,
                                                    const std::string& text) const {
  std::shared_lock lock(mutex_);
  auto it = entries_.find(key(src, dst, text));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

bool TranslationCache::store(std::string_view src, std::string_view dst,
                             const std::string& text, const std::string& result) {
  std::unique_lock lock(mutex_);
  if (!path_.empty()) {
    if (!sink_) {
      lock.unlock();
      warn("cache write skipped for '" + path_.string() + "'");
      return false;
    }
    const json entry{{"src", src}, {"dst", dst}, {"text", text}, {"result", result}};
    sink_ << entry.dump() << '\n';
    sink_.flush();
    if (!sink_) {
      lock.unlock();
      warn("cache write failed for '" + path_.string() + "'");
      return false;
    }
  }
  entries_[key(src, dst, text)] = result;
  return true;
}

std::size_t TranslationCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

std::vector<std::string> TranslationCache::warnings() const {
  std::lock_guard lock(warn_mutex_);
  return warnings_;
}

void TranslationCache::warn(std::string message) const {
  std::clog << "warning: " << message << '\n';
  std::lock_guard lock(warn_mutex_);
  warnings_.push_back(std::move(message));
}

std::string cached_translate(TranslationCache& cache, Translator& inner,
                             const std::string& text, std::string_view src,
                             std::string_view dst) {
  if (auto hit = cache.lookup(src, dst, text)) return *hit;
  std::string result = inner.translate(text, src, dst);
  cache.store(src, dst, text, result);
  return result;
}

CachedTranslator::CachedTranslator(std::shared_ptr<TranslationCache> cache,
                                   std::shared_ptr<Translator> inner)
    : cache_(std::move(cache)), inner_(std::move(inner)) {}

std::string CachedTranslator::translate(const std::string& text, std::string_view src,
                                        std::string_view dst) {
  return cached_translate(*cache_, *inner_, text, src, dst);
}

}  // namespace rsvqa
