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

#ifndef RSVQA_TRANSLATOR_HPP_
#define RSVQA_TRANSLATOR_HPP_

// Translation backends: a deterministic rule-based mock, an HTTP client for
// LibreTranslate-style services, and a persistent JSON-lines cache.

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <regex>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rsvqa {

class Translator {
 public:
  virtual ~Translator() = default;
  virtual std::string translate(const std::string& text, std::string_view src,
                                std::string_view dst) = 0;
};

struct RewriteRule {
  std::string pattern;      // ECMAScript regex, matched case-insensitively
  std::string replacement;  // may reference capture groups as $1, $2, ...
  std::regex compiled;
};

// Ordered rewrite rules; each rule replaces its first match, in file order.
class RuleTable {
 public:
  RuleTable() = default;

  // Lines of "pattern<TAB>replacement"; blank lines and '#' comments skipped.
  static RuleTable parse(std::string_view text);

  void add(std::string pattern, std::string replacement);
  std::string apply(const std::string& text) const;
  const std::vector<RewriteRule>& rules() const { return rules_; }

 private:
  std::vector<RewriteRule> rules_;
};

// Shipped back-translation tables for the "zh", "de" and "fr" pivots.
const std::map<std::string, RuleTable>& default_mock_tables();

// Offline stand-in for a translation service. en->pivot tags the text with
// "⟦pivot⟧"; pivot->en strips the tag and applies the pivot's rule table.
class MockTranslator : public Translator {
 public:
  MockTranslator();
  explicit MockTranslator(std::map<std::string, RuleTable> tables);

  std::string translate(const std::string& text, std::string_view src,
                        std::string_view dst) override;

 private:
  std::map<std::string, RuleTable> tables_;
};

std::string mock_translate(const std::string& text, std::string_view src,
                           std::string_view dst);

struct HttpOptions {
  std::string endpoint = "http://127.0.0.1:5000";
  std::chrono::milliseconds timeout{10000};
  int retries = 3;  // extra attempts after the first
  std::chrono::milliseconds backoff{200};  // doubled after every failure
  std::string bearer_token;
};

// POST {endpoint}/translate. 5xx, 429 and connection failures are retried;
// other statuses and malformed bodies fail immediately. Throws ExternalError.
std::string http_translate(const std::string& text, std::string_view src,
                           std::string_view dst, const HttpOptions& options);

class HttpTranslator : public Translator {
 public:
  explicit HttpTranslator(HttpOptions options,
                          std::map<std::string, std::string> pivot_endpoints = {});

  std::string translate(const std::string& text, std::string_view src,
                        std::string_view dst) override;

  std::size_t requests_issued() const { return requests_.load(); }

 private:
  HttpOptions options_;
  // Language code -> endpoint, used when that language is on either side.
  std::map<std::string, std::string> pivot_endpoints_;
  std::atomic<std::size_t> requests_{0};
};

// Persistent (src, dst, exact text) -> result map backed by a JSON-lines file.
// Later lines win over earlier ones for the same key.
class TranslationCache {
 public:
  // An empty path keeps the cache in memory only.
  explicit TranslationCache(std::filesystem::path path = {});

  std::optional<std::string> lookup(std::string_view src, std::string_view dst,
                                    const std::string& text) const;

  // Appends the entry to the file. Returns false and records a warning when
  // the file cannot be written; the entry is then not kept.
  bool store(std::string_view src, std::string_view dst, const std::string& text,
             const std::string& result);

  std::size_t size() const;
  std::vector<std::string> warnings() const;
  const std::filesystem::path& path() const { return path_; }

 private:
  static std::string key(std::string_view src, std::string_view dst,
                         const std::string& text);
  void warn(std::string message) const;

  std::filesystem::path path_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, std::string> entries_;
  std::ofstream sink_;
  mutable std::mutex warn_mutex_;
  mutable std::vector<std::string> warnings_;
};

std::string cached_translate(TranslationCache& cache, Translator& inner,
                             const std::string& text, std::string_view src,
                             std::string_view dst);

class CachedTranslator : public Translator {
 public:
  CachedTranslator(std::shared_ptr<TranslationCache> cache,
                   std::shared_ptr<Translator> inner);

  std::string translate(const std::string& text, std::string_view src,
                        std::string_view dst) override;

  TranslationCache& cache() { return *cache_; }

 private:
  std::shared_ptr<TranslationCache> cache_;
  std::shared_ptr<Translator> inner_;
};

}  // namespace rsvqa

#endif  // RSVQA_TRANSLATOR_HPP_
